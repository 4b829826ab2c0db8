#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minetrace/core/bytes.hpp"
#include "minetrace/core/error.hpp"
#include "minetrace/core/hash_digest.hpp"
#include "minetrace/kernels/pow_batch.hpp"
#include "minetrace/pool/job.hpp"
#include "minetrace/pool/session.hpp"

namespace minetrace::shortlink {

MINETRACE_DEFINE_ERROR(Cancelled);

inline constexpr std::string_view id_alphabet = "0123456789abcdefghijklmnopqrstuvwxyz";
inline constexpr unsigned max_id_length = 4;

/// Number of IDs of length 1..max_length. Throws std::invalid_argument
/// outside 1..12.
std::uint64_t id_space_size(unsigned max_length);

bool valid_link_id(std::string_view id) noexcept;

/// Length-then-lexicographic order over id_alphabet.
class IdEnumerator {
public:
    explicit IdEnumerator(unsigned max_length);

    std::optional<std::string> next();
    std::uint64_t size() const noexcept { return size_; }
    std::uint64_t position() const noexcept { return position_; }

    /// The ID at a 0-based position in the enumeration order.
    static std::string id_at(std::uint64_t index);
    /// Inverse of id_at. Throws std::invalid_argument for invalid IDs.
    static std::uint64_t index_of(std::string_view id);

private:
    std::uint64_t size_;
    std::uint64_t position_ = 0;
};

/// A duration in seconds kept as an exact reduced fraction.
struct ExactSeconds {
    unsigned __int128 numerator = 0;
    std::uint64_t denominator = 1;

    double seconds() const noexcept;
    double years() const noexcept;  // Julian years of 365.25 days
    /// Exact decimal when the fraction terminates, otherwise "n/d".
    std::string to_string() const;

    bool operator==(const ExactSeconds&) const = default;
};

/// required_hashes / client_rate with the rate given as a fraction of hashes
/// per second. Throws std::invalid_argument for a zero rate.
ExactSeconds time_to_resolve(std::uint64_t required_hashes, std::uint64_t rate_numerator,
                             std::uint64_t rate_denominator = 1);

struct ShortLinkTask {
    std::string link_id;
    std::uint64_t required_hashes = 0;
    std::string creator_token;
    pool::PoolEndpoint endpoint;
};

struct SolveOptions {
    std::size_t workers = 1;
    kernels::Isa isa = kernels::best_isa();
    std::size_t batch = 64;
    pool::ObfuscationKey key;
    pool::SessionOptions session;
};

struct SolveProgress {
    std::uint64_t hashes_done = 0;  // nonces examined
    std::uint64_t shares_submitted = 0;
    std::uint64_t shares_accepted = 0;
    std::uint64_t shares_rejected = 0;
    std::uint64_t credited = 0;
    std::uint64_t required = 0;
    std::optional<std::string> resolved_url;
};

struct SubmittedShare {
    std::string job_id;
    Bytes blob;  // de-obfuscated, nonce zero
    std::uint32_t nonce = 0;
    HashDigest result{};
    std::uint32_t target = 0;
    bool accepted = false;
};

/// Resolves one short link by mining shares for it.
///
/// Workers split the job's nonce space into contiguous ranges. When the
/// shares in flight would cover the remaining requirement, workers pause
/// until the pool answers, so hashes_done counts exactly the nonces examined
/// before resolution when one worker runs.
class ShortLinkSolver {
public:
    ShortLinkSolver(ShortLinkTask task, SolveOptions options);

    /// Blocks until resolved. Throws Cancelled or pool errors.
    SolveProgress run();

    /// Safe to call from any thread while run() is active.
    SolveProgress progress() const;
    void cancel() noexcept;

    /// Shares sent so far, in submission order. Valid after run() returns.
    const std::vector<SubmittedShare>& submitted() const noexcept { return submitted_; }

private:
    struct Found {
        std::uint32_t nonce;
        HashDigest result;
    };

    void work(std::uint64_t begin, std::uint64_t end, const Bytes& blob, std::size_t offset, std::uint32_t target,
              std::uint64_t generation);
    bool settled_locked() const;

    ShortLinkTask task_;
    SolveOptions options_;

    mutable std::mutex mutex_;
    std::condition_variable coordinator_cv_;
    std::condition_variable worker_cv_;
    std::deque<Found> found_;
    std::uint64_t pending_ = 0;
    std::uint64_t generation_ = 0;
    std::size_t running_workers_ = 0;
    std::uint64_t share_difficulty_ = 1;
    SolveProgress progress_;
    std::atomic<bool> cancelled_{false};
    std::atomic<bool> stop_workers_{false};
    std::vector<SubmittedShare> submitted_;
};

/// Convenience wrapper around ShortLinkSolver::run.
SolveProgress solve(const ShortLinkTask& task, const SolveOptions& options = {});

}  // namespace minetrace::shortlink
