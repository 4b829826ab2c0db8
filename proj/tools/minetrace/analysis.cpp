#include <iostream>

#include <json.hpp>

#include "common.hpp"
#include "minetrace/attribution/attribution.hpp"
#include "minetrace/core/chain.hpp"
#include "minetrace/report/render.hpp"

namespace minetrace::cli {

namespace {

using json = nlohmann::json;

std::vector<ChainBlock> load_chain(const std::string& path)
{
    Input in(path);
    return read_chain_snapshot(in.stream());
}

attribution::AttributionReport load_report(const std::string& path)
{
    Input in(path);
    return attribution::read_report(in.stream());
}

struct AttributeArgs {
    std::vector<std::string> job_logs;
    std::string chain;
    std::string key = "0:00";
    std::string out;
    std::string format = "text";
};

void run_attribute(const AttributeArgs& args, RunState& state)
{
    const auto format = report::parse_format(args.format);
    std::vector<pool::Job> jobs;
    std::size_t bad_lines = 0;
    for (const auto& path : args.job_logs) {
        Input in(path);
        auto log = pool::read_job_log(in.stream());
        bad_lines += log.bad_lines;
        jobs.insert(jobs.end(), std::make_move_iterator(log.jobs.begin()), std::make_move_iterator(log.jobs.end()));
    }
    const auto clusters = attribution::cluster_jobs(jobs, parse_key(args.key));
    const auto chain = load_chain(args.chain);
    const auto result = attribution::attribute(clusters.clusters, chain);

    if (!args.out.empty()) {
        Output out(args.out);
        attribution::write_report(out.stream(), result);
    }
    std::cout << report::render_attribution(result, format);
    if (bad_lines > 0 || clusters.malformed > 0) {
        std::cerr << "minetrace: " << bad_lines << " unreadable log lines, " << clusters.malformed
                  << " malformed blobs\n";
        state.status = exit_partial;
    }
    for (const auto& gap : result.gaps)
        std::cerr << "minetrace: chain gap between " << gap.after_height << " and " << gap.before_height << '\n';
}

struct EstimateArgs {
    std::string report;
    std::string chain;
    double difficulty = 0;
    double blocks_per_day = 0;
    std::string total_xmr;
    double price = 120;
    std::string split = "0.30";
    double rate_low = 20;
    double rate_high = 100;
    double block_time = 120;
    std::string format = "text";
};

void run_estimate(const EstimateArgs& args, RunState&)
{
    const auto format = report::parse_format(args.format);
    attribution::EstimateOptions options;
    options.client_rates = {args.rate_low, args.rate_high};
    options.block_time = args.block_time;
    options.blocks_per_day = 86'400 / args.block_time;
    const auto split = attribution::parse_split(args.split);

    if (!args.report.empty()) {
        const auto result = load_report(args.report);
        const auto e = args.chain.empty() ? attribution::estimate(result, options)
                                          : attribution::estimate(result, load_chain(args.chain), options);
        const std::uint64_t total = args.total_xmr.empty() ? result.reward_sum : parse_xmr(args.total_xmr);
        std::cout << report::render_estimate(e, attribution::revenue(total, split, args.price), format);
        return;
    }
    if (args.difficulty <= 0 || args.blocks_per_day < 0)
        throw UsageError("give --report, or --difficulty and --blocks-per-day");
    const auto e = attribution::estimate_from_rates(args.difficulty, args.blocks_per_day, options);
    const std::uint64_t total = args.total_xmr.empty() ? 0 : parse_xmr(args.total_xmr);
    std::cout << report::render_estimate(e, attribution::revenue(total, split, args.price), format);
}

struct ReportArgs {
    std::vector<std::string> rows;
    std::string detections;
    std::string attribution;
    std::string format = "text";
};

report::ScanSummary parse_row(const std::string& text)
{
    // dataset:nocoin:wasm:overlap, the dataset may itself contain ':'
    std::vector<std::uint64_t> counts;
    std::string rest = text;
    for (int i = 0; i < 3; ++i) {
        const auto colon = rest.rfind(':');
        if (colon == std::string::npos)
            throw UsageError("row must be dataset:nocoin:wasm:overlap");
        try {
            counts.insert(counts.begin(), std::stoull(rest.substr(colon + 1)));
        } catch (const std::exception&) {
            throw UsageError("row must be dataset:nocoin:wasm:overlap");
        }
        rest.resize(colon);
    }
    return report::summary_from_counts(rest, counts[0], counts[1], counts[2]);
}

void run_report(const ReportArgs& args, RunState& state)
{
    const auto format = report::parse_format(args.format);
    std::vector<report::ScanSummary> rows;
    for (const auto& row : args.rows)
        rows.push_back(parse_row(row));
    if (!args.detections.empty()) {
        Input in(args.detections);
        std::size_t number = 0;
        std::string line;
        while (std::getline(in.stream(), line)) {
            ++number;
            if (line.empty())
                continue;
            try {
                const auto record = json::parse(line);
                if (record.value("type", "") != "detection")
                    continue;
                auto summary = report::summary_from_counts(record.at("dataset"), record.at("nocoin"),
                                                           record.at("wasm"), record.at("both"));
                summary.total_domains = record.value("total_domains", std::uint64_t{0});
                rows.push_back(std::move(summary));
            } catch (const std::exception& e) {
                std::cerr << "minetrace: line " << number << ": " << e.what() << '\n';
                state.status = exit_partial;
            }
        }
    }
    if (!args.attribution.empty()) {
        std::cout << report::render_attribution(load_report(args.attribution), format);
        if (rows.empty())
            return;
    }
    std::cout << report::render_detection(rows, format);
}

}  // namespace

void add_analysis_commands(CLI::App& app, RunState& state)
{
    auto at = std::make_shared<AttributeArgs>();
    auto* attribute = app.add_subcommand("attribute", "Match collected jobs against the chain");
    attribute->add_option("-j,--jobs", at->job_logs, "Job logs")->required();
    attribute->add_option("--chain", at->chain, "Chain snapshot")->required();
    attribute->add_option("--key", at->key, "Blob obfuscation offset:hexbyte")->capture_default_str();
    attribute->add_option("-o,--out", at->out, "Write the attribution report");
    attribute->add_option("--format", at->format, "text or jsonl")->capture_default_str();
    attribute->callback([at, &state] { run_attribute(*at, state); });

    auto es = std::make_shared<EstimateArgs>();
    auto* estimate = app.add_subcommand("estimate", "Hash rate, user count and revenue estimates");
    estimate->add_option("--report", es->report, "Attribution report");
    estimate->add_option("--chain", es->chain, "Take the median difficulty from this snapshot");
    estimate->add_option("--difficulty", es->difficulty, "Median network difficulty");
    estimate->add_option("--blocks-per-day", es->blocks_per_day, "Pool blocks per day");
    estimate->add_option("--total-xmr", es->total_xmr, "Reward total for the revenue split");
    estimate->add_option("--price", es->price, "Fiat per XMR")->capture_default_str();
    estimate->add_option("--split", es->split, "Operator share")->capture_default_str();
    estimate->add_option("--rate-low", es->rate_low, "Slow client h/s")->capture_default_str();
    estimate->add_option("--rate-high", es->rate_high, "Fast client h/s")->capture_default_str();
    estimate->add_option("--block-time", es->block_time, "Seconds")->capture_default_str();
    estimate->add_option("--format", es->format, "text or jsonl")->capture_default_str();
    estimate->callback([es, &state] { run_estimate(*es, state); });

    auto re = std::make_shared<ReportArgs>();
    auto* rep = app.add_subcommand("report", "Render detection tables and attribution reports");
    rep->add_option("--row", re->rows, "dataset:nocoin:wasm:overlap");
    rep->add_option("--detections", re->detections, "Detection records from scan --format jsonl");
    rep->add_option("--attribution", re->attribution, "Attribution report");
    rep->add_option("--format", re->format, "text or jsonl")->capture_default_str();
    rep->callback([re, &state] { run_report(*re, state); });
}

}  // namespace minetrace::cli
