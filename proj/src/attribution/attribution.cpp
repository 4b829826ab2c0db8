#include "minetrace/attribution/attribution.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "minetrace/core/blob.hpp"

namespace minetrace::attribution {

ClusterResult cluster_jobs(std::span<const pool::Job> log, pool::ObfuscationKey key)
{
    ClusterResult result;
    result.jobs = log.size();
    std::map<HashDigest, JobCluster> by_prev;
    for (const pool::Job& job : log) {
        Bytes plain;
        BlockHeaderBlob header;
        try {
            plain = pool::deobfuscate(job.blob, key);
            header = parse_blob(plain);
        } catch (const Error&) {
            ++result.malformed;
            continue;
        }
        auto [it, fresh] = by_prev.try_emplace(header.prev_id);
        JobCluster& cluster = it->second;
        if (fresh) {
            cluster.prev_id = header.prev_id;
            cluster.first_seen = cluster.last_seen = job.received_at;
        }
        cluster.first_seen = std::min(cluster.first_seen, job.received_at);
        cluster.last_seen = std::max(cluster.last_seen, job.received_at);
        cluster.distinct_blobs.insert(zero_nonce(plain));
    }
    for (auto& [prev, cluster] : by_prev)
        result.clusters.push_back(std::move(cluster));
    std::stable_sort(result.clusters.begin(), result.clusters.end(),
                     [](const JobCluster& a, const JobCluster& b) { return a.first_seen < b.first_seen; });
    return result;
}

std::string utc_date(std::uint64_t timestamp)
{
    using namespace std::chrono;
    const year_month_day ymd{floor<days>(sys_seconds{seconds{static_cast<std::int64_t>(timestamp)}})};
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buffer;
}

double median(std::vector<double> values)
{
    if (values.empty())
        return 0;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2;
}

AttributionReport attribute(std::span<const JobCluster> clusters, std::span<const ChainBlock> chain,
                            std::string_view tree_digest)
{
    const DigestFunction digest = digest_by_name(tree_digest);
    AttributionReport report;
    report.tree_digest = std::string(tree_digest);
    if (chain.empty())
        return report;

    std::vector<const ChainBlock*> ordered;
    for (const ChainBlock& b : chain)
        ordered.push_back(&b);
    std::sort(ordered.begin(), ordered.end(),
              [](const ChainBlock* a, const ChainBlock* b) { return a->height < b->height; });

    // prev_id -> merkle root -> the lexicographically first blob carrying it
    std::map<HashDigest, std::map<HashDigest, const Bytes*>> roots;
    for (const JobCluster& cluster : clusters) {
        auto& by_root = roots[cluster.prev_id];
        for (const Bytes& blob : cluster.distinct_blobs) {
            try {
                by_root.try_emplace(parse_blob(blob).merkle_root, &blob);
            } catch (const Error&) {
                // cluster_jobs only keeps parseable blobs; tolerate hand-built input
            }
        }
    }

    std::map<std::pair<HashDigest, HashDigest>, std::uint64_t> claimed;
    std::map<HashDigest, std::uint64_t> coinbases;
    std::vector<double> difficulties;
    report.first_height = ordered.front()->height;
    report.last_height = ordered.back()->height;
    report.chain_blocks = ordered.size();
    std::uint64_t first_ts = ordered.front()->timestamp, last_ts = first_ts;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const ChainBlock& block = *ordered[i];
        if (i > 0 && block.height > ordered[i - 1]->height + 1)
            report.gaps.push_back({ordered[i - 1]->height, block.height});
        difficulties.push_back(static_cast<double>(block.difficulty));
        first_ts = std::min(first_ts, block.timestamp);
        last_ts = std::max(last_ts, block.timestamp);
        if (block.tx_hashes.empty())
            continue;

        const auto cluster = roots.find(block.prev_id);
        if (cluster == roots.end())
            continue;
        const HashDigest root = tree_hash(block.tx_hashes, digest);
        const auto match = cluster->second.find(root);
        if (match == cluster->second.end())
            continue;

        if (const auto [it, fresh] = claimed.try_emplace({block.prev_id, root}, block.height); !fresh)
            throw AttributionInvariantError("one pool root explains heights " + std::to_string(it->second) +
                                            " and " + std::to_string(block.height));
        if (const auto [it, fresh] = coinbases.try_emplace(block.tx_hashes.front(), block.height); !fresh)
            throw AttributionInvariantError("Coinbase leaf shared by heights " + std::to_string(it->second) +
                                            " and " + std::to_string(block.height));
        report.attributed.push_back({block, *match->second});
        report.reward_sum += block.reward;
    }
    report.blocks = report.attributed.size();
    report.median_difficulty = median(std::move(difficulties));

    using namespace std::chrono;
    const auto first_day = floor<days>(sys_seconds{seconds{static_cast<std::int64_t>(first_ts)}});
    const auto last_day = floor<days>(sys_seconds{seconds{static_cast<std::int64_t>(last_ts)}});
    for (auto day = first_day; day <= last_day; day += days{1})
        report.per_day_counts[utc_date(static_cast<std::uint64_t>(sys_seconds{day}.time_since_epoch().count()))] =
            0;
    for (const AttributedBlock& a : report.attributed)
        ++report.per_day_counts[utc_date(a.block.timestamp)];
    return report;
}

HashrateEstimate estimate_from_rates(double median_difficulty, double blocks_per_day, const EstimateOptions& options)
{
    if (options.block_time <= 0 || options.blocks_per_day <= 0 || options.client_rates.low <= 0 ||
        options.client_rates.high < options.client_rates.low)
        throw std::invalid_argument("estimate needs positive block time, blocks per day and ordered client rates");
    HashrateEstimate e;
    e.median_difficulty = median_difficulty;
    e.client_rates = options.client_rates;
    e.block_time = options.block_time;
    e.network_hashrate = median_difficulty / options.block_time;
    e.pool_share = blocks_per_day / options.blocks_per_day;
    e.pool_share_median = e.pool_share;
    e.pool_hashrate = e.pool_share * e.network_hashrate;
    e.users_low = e.pool_hashrate / options.client_rates.high;
    e.users_high = e.pool_hashrate / options.client_rates.low;
    e.median_blocks_per_day = e.mean_blocks_per_day = blocks_per_day;
    return e;
}

namespace {

HashrateEstimate estimate_with(const AttributionReport& report, double median_difficulty,
                               const EstimateOptions& options)
{
    if (report.per_day_counts.empty())
        throw EmptyWindow("the report covers no day");
    std::vector<double> per_day;
    for (const auto& [day, count] : report.per_day_counts)
        per_day.push_back(static_cast<double>(count));
    const auto days = static_cast<double>(per_day.size());

    HashrateEstimate e = estimate_from_rates(median_difficulty, static_cast<double>(report.blocks) / days, options);
    e.days = per_day.size();
    e.median_blocks_per_day = median(per_day);
    e.mean_blocks_per_day = static_cast<double>(report.blocks) / days;
    e.pool_share_median = e.median_blocks_per_day / options.blocks_per_day;
    e.attributed_blocks = report.blocks;
    e.reward_sum = report.reward_sum;
    return e;
}

}  // namespace

HashrateEstimate estimate(const AttributionReport& report, const EstimateOptions& options)
{
    return estimate_with(report, report.median_difficulty, options);
}

HashrateEstimate estimate(const AttributionReport& report, std::span<const ChainBlock> chain,
                          const EstimateOptions& options)
{
    std::vector<double> difficulties;
    for (const ChainBlock& b : chain)
        difficulties.push_back(static_cast<double>(b.difficulty));
    if (difficulties.empty())
        throw EmptyWindow("empty chain");
    return estimate_with(report, median(std::move(difficulties)), options);
}

Split parse_split(std::string_view text)
{
    const std::size_t dot = text.find('.');
    const std::string_view whole = text.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || frac.size() > 12 ||
        !std::all_of(whole.begin(), whole.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
        !std::all_of(frac.begin(), frac.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw std::invalid_argument("split must be a decimal fraction: " + std::string(text));
    Split split{0, 1};
    for (std::size_t i = 0; i < frac.size(); ++i)
        split.denominator *= 10;
    std::uint64_t w = 0;
    std::from_chars(whole.data(), whole.data() + whole.size(), w);
    std::uint64_t f = 0;
    std::from_chars(frac.data(), frac.data() + frac.size(), f);
    split.numerator = w * split.denominator + f;
    if (split.numerator > split.denominator)
        throw std::invalid_argument("split above 1: " + std::string(text));
    return split;
}

Revenue revenue(std::uint64_t total_atomic, Split split, double price)
{
    if (split.denominator == 0 || split.numerator > split.denominator)
        throw std::invalid_argument("split must lie in [0, 1]");
    Revenue r;
    r.total = total_atomic;
    r.operator_cut = static_cast<std::uint64_t>(static_cast<unsigned __int128>(total_atomic) * split.numerator /
                                                split.denominator);
    r.user_payout = total_atomic - r.operator_cut;
    r.price = price;
    return r;
}

Revenue revenue(const AttributionReport& report, Split split, double price)
{
    return revenue(report.reward_sum, split, price);
}

double Revenue::total_xmr() const noexcept
{
    return static_cast<double>(total) / static_cast<double>(atomic_units_per_xmr);
}

double Revenue::operator_xmr() const noexcept
{
    return static_cast<double>(operator_cut) / static_cast<double>(atomic_units_per_xmr);
}

double Revenue::user_xmr() const noexcept
{
    return static_cast<double>(user_payout) / static_cast<double>(atomic_units_per_xmr);
}

double Revenue::fiat() const noexcept
{
    return total_xmr() * price;
}

void write_report(std::ostream& out, const AttributionReport& report)
{
    using nlohmann::ordered_json;
    for (const AttributedBlock& a : report.attributed) {
        ordered_json j;
        j["type"] = "block";
        j["block"] = ordered_json::parse(to_snapshot_line(a.block));
        j["blob_hex"] = to_hex(a.blob);
        out << j.dump() << '\n';
    }
    for (const auto& [day, count] : report.per_day_counts)
        out << ordered_json{{"type", "day"}, {"date", day}, {"count", count}}.dump() << '\n';
    ordered_json summary;
    summary["type"] = "summary";
    summary["blocks"] = report.blocks;
    summary["reward_atomic_units"] = report.reward_sum;
    summary["chain_blocks"] = report.chain_blocks;
    summary["first_height"] = report.first_height;
    summary["last_height"] = report.last_height;
    summary["median_difficulty"] = report.median_difficulty;
    summary["days"] = report.per_day_counts.size();
    summary["tree_digest"] = report.tree_digest;
    summary["gaps"] = ordered_json::array();
    for (const ChainGap& g : report.gaps)
        summary["gaps"].push_back({{"after_height", g.after_height}, {"before_height", g.before_height}});
    out << summary.dump() << '\n';
}

AttributionReport read_report(std::istream& in)
{
    AttributionReport report;
    bool have_summary = false;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            const auto j = nlohmann::json::parse(line);
            const std::string type = j.at("type").get<std::string>();
            if (type == "block") {
                report.attributed.push_back(
                    {chain_block_from_line(j.at("block").dump()), from_hex(j.at("blob_hex").get<std::string>())});
            } else if (type == "day") {
                report.per_day_counts[j.at("date").get<std::string>()] = j.at("count").get<std::uint64_t>();
            } else if (type == "summary") {
                have_summary = true;
                report.blocks = j.at("blocks").get<std::uint64_t>();
                report.reward_sum = j.at("reward_atomic_units").get<std::uint64_t>();
                report.chain_blocks = j.at("chain_blocks").get<std::uint64_t>();
                report.first_height = j.at("first_height").get<std::uint64_t>();
                report.last_height = j.at("last_height").get<std::uint64_t>();
                report.median_difficulty = j.at("median_difficulty").get<double>();
                report.tree_digest = j.at("tree_digest").get<std::string>();
                for (const auto& g : j.at("gaps"))
                    report.gaps.push_back(
                        {g.at("after_height").get<std::uint64_t>(), g.at("before_height").get<std::uint64_t>()});
            } else {
                throw ReportError("unknown record type " + type);
            }
        } catch (const nlohmann::json::exception& e) {
            throw ReportError("line " + std::to_string(number) + ": " + e.what());
        } catch (const ReportError&) {
            throw;
        } catch (const Error& e) {
            throw ReportError("line " + std::to_string(number) + ": " + e.what());
        }
    }
    if (!have_summary)
        throw ReportError("missing summary record");
    if (report.blocks != report.attributed.size())
        throw ReportError("summary counts " + std::to_string(report.blocks) + " blocks, found " +
                          std::to_string(report.attributed.size()));
    return report;
}

}  // namespace minetrace::attribution
