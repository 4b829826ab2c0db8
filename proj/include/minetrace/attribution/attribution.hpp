#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "minetrace/core/chain.hpp"
#include "minetrace/core/digest.hpp"
#include "minetrace/core/error.hpp"
#include "minetrace/pool/job.hpp"

namespace minetrace::attribution {

MINETRACE_DEFINE_ERROR(AttributionInvariantError);
MINETRACE_DEFINE_ERROR(EmptyWindow);
MINETRACE_DEFINE_ERROR(ReportError);

/// Pool jobs that shared a previous-block pointer when they were received.
struct JobCluster {
    HashDigest prev_id{};
    std::set<Bytes> distinct_blobs;  // de-obfuscated, nonce zeroed
    std::int64_t first_seen = 0;
    std::int64_t last_seen = 0;
};

struct ClusterResult {
    std::vector<JobCluster> clusters;  // ordered by first_seen, then prev_id
    std::size_t jobs = 0;
    std::size_t malformed = 0;
};

/// De-obfuscates every logged blob, zeroes its nonce and groups by prev_id.
/// Jobs whose blob does not de-obfuscate or parse are counted and skipped.
ClusterResult cluster_jobs(std::span<const pool::Job> log, pool::ObfuscationKey key);

struct AttributedBlock {
    ChainBlock block;
    Bytes blob;  // the pool job blob whose Merkle root matched
};

/// Heights missing between two consecutive snapshot blocks.
struct ChainGap {
    std::uint64_t after_height = 0;
    std::uint64_t before_height = 0;
};

struct AttributionReport {
    std::vector<AttributedBlock> attributed;  // by height
    std::map<std::string, std::uint64_t> per_day_counts;  // UTC "YYYY-MM-DD", zero-filled over the window
    std::uint64_t blocks = 0;
    std::uint64_t reward_sum = 0;  // atomic units
    std::uint64_t chain_blocks = 0;
    std::uint64_t first_height = 0;
    std::uint64_t last_height = 0;
    double median_difficulty = 0;  // over the window's per-block difficulties
    std::vector<ChainGap> gaps;
    std::string tree_digest = "keccak";
};

/// A block is the pool's iff a cluster keyed by the block's prev_id holds a
/// blob whose Merkle root equals the tree hash of the block's transactions.
/// Throws AttributionInvariantError if one pool root would explain two
/// blocks or two attributed blocks share a Coinbase leaf.
AttributionReport attribute(std::span<const JobCluster> clusters, std::span<const ChainBlock> chain,
                            std::string_view tree_digest = "keccak");

/// UTC calendar date of a Unix timestamp.
std::string utc_date(std::uint64_t timestamp);

struct ClientRates {
    double low = 20;
    double high = 100;
};

struct EstimateOptions {
    ClientRates client_rates;
    double block_time = 120;
    double blocks_per_day = 720;
};

struct HashrateEstimate {
    double median_difficulty = 0;
    double network_hashrate = 0;
    double pool_share = 0;  // attributed / (days * blocks_per_day)
    double pool_share_median = 0;  // median blocks/day / blocks_per_day
    double pool_hashrate = 0;
    double users_low = 0;  // pool_hashrate / high client rate
    double users_high = 0;  // pool_hashrate / low client rate
    ClientRates client_rates;
    double block_time = 0;
    std::uint64_t days = 0;
    double median_blocks_per_day = 0;
    double mean_blocks_per_day = 0;
    std::uint64_t attributed_blocks = 0;
    std::uint64_t reward_sum = 0;
};

/// Uses the report's window median difficulty. Throws EmptyWindow when the
/// report covers no day.
HashrateEstimate estimate(const AttributionReport& report, const EstimateOptions& options = {});

/// Same, with the median difficulty taken from `chain`.
HashrateEstimate estimate(const AttributionReport& report, std::span<const ChainBlock> chain,
                          const EstimateOptions& options = {});

/// The estimator identities applied to given rates.
HashrateEstimate estimate_from_rates(double median_difficulty, double blocks_per_day,
                                     const EstimateOptions& options = {});

double median(std::vector<double> values);

/// Operator share as an exact fraction.
struct Split {
    std::uint64_t numerator = 3;
    std::uint64_t denominator = 10;
};

/// Parses a decimal fraction such as "0.30" exactly. Throws std::invalid_argument.
Split parse_split(std::string_view text);

struct Revenue {
    std::uint64_t total = 0;  // atomic units
    std::uint64_t operator_cut = 0;  // floor(total * split)
    std::uint64_t user_payout = 0;  // total - operator_cut
    double price = 0;

    double total_xmr() const noexcept;
    double operator_xmr() const noexcept;
    double user_xmr() const noexcept;
    double fiat() const noexcept;
};

Revenue revenue(std::uint64_t total_atomic, Split split, double price);
Revenue revenue(const AttributionReport& report, Split split, double price);

/// Line-delimited report: one "block" record per attribution, one "day"
/// record per window day, then a "summary" record.
void write_report(std::ostream& out, const AttributionReport& report);
/// Throws ReportError.
AttributionReport read_report(std::istream& in);

}  // namespace minetrace::attribution
