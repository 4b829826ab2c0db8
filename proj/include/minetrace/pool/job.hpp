#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "minetrace/core/bytes.hpp"
#include "minetrace/core/error.hpp"

namespace minetrace::pool {

MINETRACE_DEFINE_ERROR(ConnectFailure);
MINETRACE_DEFINE_ERROR(AuthRejected);
MINETRACE_DEFINE_ERROR(ProtocolError);
MINETRACE_DEFINE_ERROR(StaleJob);
MINETRACE_DEFINE_ERROR(InvalidShare);
MINETRACE_DEFINE_ERROR(OffsetOutOfRange);
MINETRACE_DEFINE_ERROR(JobLogError);

struct Job {
    std::string job_id;
    Bytes blob;  // as received, possibly obfuscated
    std::uint32_t target = 0;
    std::int64_t received_at = 0;  // ms since the Unix epoch
    std::string endpoint;

    bool operator==(const Job&) const = default;
};

/// The pool's blob obfuscation: one byte XORed at a fixed offset.
struct ObfuscationKey {
    std::size_t offset = 0;
    std::uint8_t value = 0;
};

/// XOR is an involution, so this both applies and removes the obfuscation.
/// Throws OffsetOutOfRange when offset >= blob.size().
Bytes deobfuscate(ByteView blob, ObfuscationKey key);

struct PoolEndpoint {
    std::string url;  // host:port[/endpoint], an optional tcp:// prefix is accepted
    std::string token;
    std::chrono::milliseconds poll_interval{500};
};

/// Throws std::invalid_argument for a non-positive poll interval or an
/// unparsable url.
void validate(const PoolEndpoint& endpoint);

struct EndpointAddress {
    std::string host;
    std::uint16_t port = 0;
    std::string name;  // path after the port, "" when absent
};

EndpointAddress parse_endpoint_url(std::string_view url);

/// Compact targets travel as the hex of their four little-endian bytes.
std::string target_to_hex(std::uint32_t target);
std::uint32_t target_from_hex(std::string_view hex);

/// Job log record: {endpoint, received_at, job_id, blob_hex, target_hex}.
std::string to_log_line(const Job& job);
/// Throws JobLogError.
Job job_from_log_line(std::string_view line);

struct JobLog {
    std::vector<Job> jobs;
    std::size_t bad_lines = 0;
};

/// Reads a job log; unparsable lines are counted, not fatal.
JobLog read_job_log(std::istream& in);

/// Serialized, flushed appends from any number of collector threads.
class JobLogWriter {
public:
    explicit JobLogWriter(std::ostream& out) : out_(out) {}
    void append(const Job& job);

private:
    std::mutex mutex_;
    std::ostream& out_;
};

std::int64_t now_ms();

}  // namespace minetrace::pool
