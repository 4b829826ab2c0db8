#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>

#include "minetrace/core/hash_digest.hpp"
#include "minetrace/pool/job.hpp"
#include "minetrace/pool/net.hpp"

namespace minetrace::pool {

struct LinkStatus {
    std::string id;
    std::uint64_t credited = 0;  // hash-equivalents
    std::uint64_t required = 0;
    std::optional<std::string> url;  // set once resolved
};

struct ShareVerdict {
    bool accepted = false;
    std::optional<LinkStatus> link;
};

struct SessionOptions {
    std::optional<std::string> link_id;
    std::chrono::milliseconds io_timeout{5000};
};

/// One logged-in connection. Not thread-safe; callers serialize access.
class PoolSession {
public:
    /// Connects, sends login and waits for the first job.
    /// Throws ConnectFailure, AuthRejected or ProtocolError.
    static PoolSession login(const PoolEndpoint& endpoint, const SessionOptions& options = {});

    const std::string& endpoint() const noexcept { return endpoint_; }
    const Job& initial_job() const noexcept { return initial_job_; }
    const std::optional<LinkStatus>& link() const noexcept { return link_; }
    std::uint64_t last_message_id() const noexcept { return next_id_ - 1; }

    Job get_job();

    /// Accepted shares return normally; rejections throw StaleJob or InvalidShare.
    ShareVerdict submit_share(const std::string& job_id, std::uint32_t nonce, const HashDigest& result);

    /// Waits for a pushed job until the deadline. Pushes that arrived during
    /// earlier requests are returned first.
    std::optional<Job> wait_push(std::chrono::steady_clock::time_point deadline);

    void close() noexcept { socket_.close(); }

private:
    PoolSession() = default;

    std::string request(std::string_view method, std::string params_json);

    LineSocket socket_;
    std::string endpoint_;
    std::uint64_t next_id_ = 1;
    std::chrono::milliseconds io_timeout_{5000};
    Job initial_job_;
    std::optional<LinkStatus> link_;
    std::deque<Job> pushed_;
};

}  // namespace minetrace::pool
