#include "minetrace/report/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace minetrace::report {

namespace {

using nlohmann::ordered_json;

// Left-aligned first column, right-aligned others.
class Table {
public:
    explicit Table(std::vector<std::string> header) : rows_{std::move(header)} {}

    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    std::string str() const
    {
        std::vector<std::size_t> width(rows_.front().size(), 0);
        for (const auto& row : rows_)
            for (std::size_t c = 0; c < row.size(); ++c)
                width[c] = std::max(width[c], row[c].size());
        std::string out;
        for (const auto& row : rows_) {
            std::string line;
            for (std::size_t c = 0; c < row.size(); ++c) {
                const std::string pad(width[c] - row[c].size(), ' ');
                if (c > 0)
                    line += "  ";
                line += c == 0 ? row[c] + pad : pad + row[c];
            }
            while (!line.empty() && line.back() == ' ')
                line.pop_back();
            out += line + '\n';
        }
        return out;
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

std::string fixed(double value, int decimals)
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
    return buffer;
}

std::string si(double value)
{
    const char* suffix[] = {"", "K", "M", "G", "T", "P"};
    int i = 0;
    while (std::abs(value) >= 1000 && i < 5) {
        value /= 1000;
        ++i;
    }
    return fixed(value, i == 0 ? 0 : 2) + suffix[i];
}

}  // namespace

Format parse_format(std::string_view name)
{
    if (name == "text")
        return Format::text;
    if (name == "jsonl")
        return Format::jsonl;
    throw std::invalid_argument("format must be text or jsonl: " + std::string(name));
}

std::uint64_t percent_half_up(std::uint64_t part, std::uint64_t whole) noexcept
{
    if (whole == 0)
        return 0;
    const auto scaled = static_cast<unsigned __int128>(part) * 200 + whole;
    return static_cast<std::uint64_t>(scaled / (2 * static_cast<unsigned __int128>(whole)));
}

std::string percent_one_decimal(std::uint64_t part, std::uint64_t whole)
{
    if (whole == 0)
        return "0.0";
    const auto scaled = static_cast<unsigned __int128>(part) * 2000 + whole;
    const auto per_mille = static_cast<std::uint64_t>(scaled / (2 * static_cast<unsigned __int128>(whole)));
    return std::to_string(per_mille / 10) + "." + std::to_string(per_mille % 10);
}

std::string render_detection(std::span<const ScanSummary> rows, Format format)
{
    if (format == Format::jsonl) {
        std::string out;
        for (const ScanSummary& s : rows) {
            ordered_json j;
            j["type"] = "detection";
            j["dataset"] = s.dataset;
            j["total_domains"] = s.total_domains;
            j["nocoin"] = s.nocoin_hits;
            j["wasm"] = s.wasm_hits;
            j["both"] = s.overlap;
            j["missed"] = s.missed();
            j["missed_pct"] = percent_half_up(s.missed(), s.wasm_hits);
            out += j.dump() + '\n';
        }
        return out;
    }
    Table table({"dataset", "domains", "nocoin", "wasm", "both", "missed by nocoin"});
    for (const ScanSummary& s : rows)
        table.add({s.dataset, std::to_string(s.total_domains), std::to_string(s.nocoin_hits),
                   std::to_string(s.wasm_hits), std::to_string(s.overlap),
                   std::to_string(s.missed()) + " (" + std::to_string(percent_half_up(s.missed(), s.wasm_hits)) +
                       "%)"});
    return table.str();
}

std::string render_labels(const ScanSummary& summary, Format format)
{
    struct Row {
        std::string source, label;
        std::uint64_t pages, base;
    };
    std::vector<Row> rows;
    const auto add = [&](const char* source, const std::map<std::string, std::uint64_t>& counts,
                         std::uint64_t base) {
        std::vector<std::pair<std::string, std::uint64_t>> sorted(counts.begin(), counts.end());
        std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        for (const auto& [label, pages] : sorted)
            rows.push_back({source, label, pages, base});
    };
    add("wasm", summary.wasm_label_counts, summary.wasm_hits);
    add("nocoin", summary.nocoin_label_counts, summary.nocoin_hits);

    if (format == Format::jsonl) {
        std::string out;
        for (const Row& r : rows) {
            ordered_json j;
            j["type"] = "label";
            j["dataset"] = summary.dataset;
            j["source"] = r.source;
            j["label"] = r.label;
            j["pages"] = r.pages;
            j["share_pct"] = std::stod(percent_one_decimal(r.pages, r.base));
            out += j.dump() + '\n';
        }
        return out;
    }
    Table table({"source", "label", "pages", "share"});
    for (const Row& r : rows)
        table.add({r.source, r.label, std::to_string(r.pages), percent_one_decimal(r.pages, r.base) + "%"});
    return table.str();
}

std::string render_estimate(const attribution::HashrateEstimate& e, const attribution::Revenue& r, Format format)
{
    if (format == Format::jsonl) {
        ordered_json j;
        j["type"] = "estimate";
        j["median_difficulty"] = e.median_difficulty;
        j["network_hashrate"] = e.network_hashrate;
        j["pool_share"] = e.pool_share;
        j["pool_share_median"] = e.pool_share_median;
        j["pool_hashrate"] = e.pool_hashrate;
        j["users_low"] = e.users_low;
        j["users_high"] = e.users_high;
        j["client_rates"] = {e.client_rates.low, e.client_rates.high};
        j["block_time"] = e.block_time;
        j["days"] = e.days;
        j["median_blocks_per_day"] = e.median_blocks_per_day;
        j["mean_blocks_per_day"] = e.mean_blocks_per_day;
        j["attributed_blocks"] = e.attributed_blocks;
        ordered_json rev;
        rev["type"] = "revenue";
        rev["total_atomic_units"] = r.total;
        rev["operator_atomic_units"] = r.operator_cut;
        rev["users_atomic_units"] = r.user_payout;
        rev["total_xmr"] = r.total_xmr();
        rev["price"] = r.price;
        rev["fiat"] = r.fiat();
        return j.dump() + '\n' + rev.dump() + '\n';
    }
    Table table({"quantity", "value"});
    table.add({"median difficulty", si(e.median_difficulty)});
    table.add({"network hash rate", si(e.network_hashrate) + " h/s"});
    table.add({"days", std::to_string(e.days)});
    table.add({"attributed blocks", std::to_string(e.attributed_blocks)});
    table.add({"blocks/day median (mean)", fixed(e.median_blocks_per_day, 2) + " (" + fixed(e.mean_blocks_per_day, 2) + ")"});
    table.add({"pool share", fixed(100 * e.pool_share, 2) + "%"});
    table.add({"pool share from median", fixed(100 * e.pool_share_median, 2) + "%"});
    table.add({"pool hash rate", si(e.pool_hashrate) + " h/s"});
    table.add({"mining users at " + fixed(e.client_rates.high, 0) + " h/s", si(e.users_low)});
    table.add({"mining users at " + fixed(e.client_rates.low, 0) + " h/s", si(e.users_high)});
    table.add({"reward total", fixed(r.total_xmr(), 4) + " XMR"});
    table.add({"operator cut", fixed(r.operator_xmr(), 4) + " XMR"});
    table.add({"user payout", fixed(r.user_xmr(), 4) + " XMR"});
    table.add({"fiat value", fixed(r.fiat(), 2)});
    return table.str();
}

std::string render_attribution(const attribution::AttributionReport& report, Format format)
{
    if (format == Format::jsonl) {
        std::ostringstream out;
        attribution::write_report(out, report);
        return out.str();
    }
    Table days({"date", "blocks"});
    for (const auto& [day, count] : report.per_day_counts)
        days.add({day, std::to_string(count)});
    std::string out = days.str();
    out += "attributed " + std::to_string(report.blocks) + " of " + std::to_string(report.chain_blocks) +
           " blocks, heights " + std::to_string(report.first_height) + ".." + std::to_string(report.last_height) +
           ", reward " + fixed(static_cast<double>(report.reward_sum) / static_cast<double>(atomic_units_per_xmr), 4) +
           " XMR\n";
    for (const auto& gap : report.gaps)
        out += "gap: heights " + std::to_string(gap.after_height + 1) + ".." + std::to_string(gap.before_height - 1) +
               " missing\n";
    return out;
}

}  // namespace minetrace::report
