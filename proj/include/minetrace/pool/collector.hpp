#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "minetrace/pool/job.hpp"

namespace minetrace::pool {

/// A window in which the collector had no live session.
struct Gap {
    std::string endpoint;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    std::string reason;
};

struct BackoffPolicy {
    std::chrono::milliseconds base{1000};
    std::chrono::milliseconds cap{60'000};
};

struct PollOptions {
    BackoffPolicy backoff;
    std::chrono::milliseconds io_timeout{5000};
    const std::atomic<bool>* stop = nullptr;  // optional external cancellation
};

struct PollResult {
    std::vector<Job> jobs;
    std::vector<Gap> gaps;
};

/// Delay before reconnect attempt `attempt` (0-based): base * 2^attempt, capped.
std::chrono::milliseconds backoff_delay(const BackoffPolicy& policy, unsigned attempt);

/// Logs in, then requests a job every poll_interval until `duration` has
/// elapsed. Jobs pushed by the pool in between are logged as well. Lost
/// connections are retried with exponential backoff and reported as gaps.
/// received_at is strictly increasing within the result.
PollResult poll_jobs(const PoolEndpoint& endpoint, std::chrono::milliseconds duration,
                     JobLogWriter* log = nullptr, const PollOptions& options = {});

}  // namespace minetrace::pool
