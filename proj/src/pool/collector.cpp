#include "minetrace/pool/collector.hpp"

#include <algorithm>
#include <thread>

#include "minetrace/pool/session.hpp"

namespace minetrace::pool {

using Clock = std::chrono::steady_clock;

std::chrono::milliseconds backoff_delay(const BackoffPolicy& policy, unsigned attempt)
{
    auto delay = policy.base;
    for (unsigned i = 0; i < attempt && delay < policy.cap; ++i)
        delay *= 2;
    return std::min(delay, policy.cap);
}

namespace {

class Recorder {
public:
    Recorder(PollResult& result, JobLogWriter* log) : result_(result), log_(log) {}

    void add(Job job)
    {
        job.received_at = std::max(job.received_at, last_ + 1);
        last_ = job.received_at;
        if (log_)
            log_->append(job);
        result_.jobs.push_back(std::move(job));
    }

private:
    PollResult& result_;
    JobLogWriter* log_;
    std::int64_t last_ = 0;
};

bool stopped(const PollOptions& options)
{
    return options.stop && options.stop->load();
}

// Sleeps until `until` in short slices so an external stop is noticed.
void nap_until(Clock::time_point until, const PollOptions& options)
{
    while (Clock::now() < until && !stopped(options))
        std::this_thread::sleep_for(std::min<Clock::duration>(until - Clock::now(), std::chrono::milliseconds(50)));
}

}  // namespace

PollResult poll_jobs(const PoolEndpoint& endpoint, std::chrono::milliseconds duration, JobLogWriter* log,
                     const PollOptions& options)
{
    validate(endpoint);
    PollResult result;
    if (duration.count() <= 0)
        return result;

    Recorder recorder(result, log);
    const auto start = Clock::now();
    const auto deadline = start + duration;
    SessionOptions session_options;
    session_options.io_timeout = options.io_timeout;

    std::optional<Gap> open_gap;
    unsigned attempt = 0;
    while (Clock::now() < deadline && !stopped(options)) {
        std::optional<PoolSession> session;
        try {
            session.emplace(PoolSession::login(endpoint, session_options));
        } catch (const AuthRejected&) {
            throw;
        } catch (const Error& e) {
            if (!open_gap)
                open_gap = Gap{endpoint.url, now_ms(), 0, e.what()};
            nap_until(std::min(deadline, Clock::now() + backoff_delay(options.backoff, attempt++)), options);
            continue;
        }
        if (open_gap) {
            open_gap->end_ms = now_ms();
            result.gaps.push_back(*open_gap);
            open_gap.reset();
        }
        attempt = 0;

        try {
            recorder.add(session->initial_job());
            auto next_tick = Clock::now() + endpoint.poll_interval;
            while (!stopped(options)) {
                const auto wake = std::min(next_tick, deadline);
                while (Clock::now() < wake && !stopped(options)) {
                    const auto slice = std::min(wake, Clock::now() + std::chrono::milliseconds(50));
                    if (auto pushed = session->wait_push(slice))
                        recorder.add(std::move(*pushed));
                }
                if (Clock::now() >= deadline || stopped(options))
                    break;
                recorder.add(session->get_job());
                next_tick += endpoint.poll_interval;
            }
        } catch (const AuthRejected&) {
            throw;
        } catch (const Error& e) {
            open_gap = Gap{endpoint.url, now_ms(), 0, e.what()};
            nap_until(std::min(deadline, Clock::now() + backoff_delay(options.backoff, attempt++)), options);
            continue;
        }
        break;
    }
    if (open_gap) {
        open_gap->end_ms = now_ms();
        result.gaps.push_back(*open_gap);
    }
    return result;
}

}  // namespace minetrace::pool
