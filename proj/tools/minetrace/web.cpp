#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "common.hpp"
#include "minetrace/filter/fetch.hpp"
#include "minetrace/filter/rules.hpp"
#include "minetrace/report/capture.hpp"
#include "minetrace/report/render.hpp"
#include "minetrace/report/scan.hpp"
#include "minetrace/wasm/classify.hpp"
#include "minetrace/wasm/module.hpp"

namespace minetrace::cli {

namespace {

using json = nlohmann::ordered_json;

struct FetchArgs {
    std::vector<std::string> domains;
    std::string domains_file;
    std::size_t parallel = 4;
    filter::FetchOptions options;
    std::int64_t timeout_ms = 15'000;
    std::string out = "-";
};

void run_fetch(const FetchArgs& args, RunState& state)
{
    std::vector<std::string> domains = args.domains;
    if (!args.domains_file.empty()) {
        Input in(args.domains_file);
        for (auto& line : read_lines(in.stream()))
            if (line.front() != '#')
                domains.push_back(std::move(line));
    }
    filter::FetchOptions options = args.options;
    options.timeout = std::chrono::milliseconds(args.timeout_ms);
    const auto results = filter::fetch_batch(domains, options, args.parallel);

    Output out(args.out);
    for (const auto& r : results) {
        json line = {{"domain", r.domain},
                     {"final_url", r.final_url},
                     {"status", r.status},
                     {"error", r.error == filter::FetchError::none ? json(nullptr) : json(to_string(r.error))}};
        if (!r.detail.empty())
            line["detail"] = r.detail;
        if (r.page) {
            line["truncated_at"] = r.page->truncated_at ? json(*r.page->truncated_at) : json(nullptr);
            line["body_b64"] = base64_encode(as_bytes(r.page->body));
        } else {
            state.status = exit_partial;
        }
        out.stream() << line.dump() << '\n';
    }
}

struct MatchArgs {
    std::string filters;
    std::string pages = "-";
    std::string html;
    std::string domain = "page";
    bool fold_case = false;
    std::string format = "text";
};

std::vector<filter::FilterRule> load_rules(const std::string& path)
{
    auto rules = filter::load_filter_list(read_text(path));
    for (const auto& rule : rules)
        if (!rule.usable)
            std::cerr << "minetrace: skipping rule " << std::quoted(rule.raw) << ": " << rule.error << '\n';
    return rules;
}

void run_match(const MatchArgs& args, RunState& state)
{
    const auto format = report::parse_format(args.format);
    const auto rules = load_rules(args.filters);
    const filter::MatchOptions options{args.fold_case};

    std::vector<std::pair<std::string, std::string>> pages;
    if (!args.html.empty()) {
        pages.emplace_back(args.domain, read_text(args.html));
    } else {
        Input in(args.pages);
        std::size_t number = 0;
        std::string line;
        while (std::getline(in.stream(), line)) {
            ++number;
            if (line.empty())
                continue;
            try {
                const auto record = json::parse(line);
                const std::string field = record.contains("html_b64") ? "html_b64" : "body_b64";
                if (!record.contains(field))
                    continue;  // fetch failures carry no body
                const Bytes body = base64_decode(record.at(field).get<std::string>());
                pages.emplace_back(record.at("domain").get<std::string>(), std::string(body.begin(), body.end()));
            } catch (const std::exception& e) {
                std::cerr << "minetrace: line " << number << ": " << e.what() << '\n';
                state.status = exit_partial;
            }
        }
    }

    std::ostream& out = std::cout;
    if (format == report::Format::text)
        out << "domain  scripts  labels\n";
    for (const auto& [domain, body] : pages) {
        const auto scripts = filter::extract_scripts(body);
        const auto hits = filter::match_page(scripts, rules, options);
        const auto labels = filter::page_labels(hits);
        if (format == report::Format::text) {
            std::string joined;
            for (const auto& label : labels)
                joined += (joined.empty() ? "" : ",") + label;
            out << domain << "  " << scripts.size() << "  " << (joined.empty() ? "-" : joined) << '\n';
            continue;
        }
        json hit_list = json::array();
        for (const auto& hit : hits) {
            const auto& script = scripts[hit.script];
            hit_list.push_back({{"rule", rules[hit.rule].raw},
                                {"label", hit.label},
                                {"src", script.src ? json(*script.src) : json(nullptr)},
                                {"position", script.position}});
        }
        out << json{{"type", "match"}, {"domain", domain}, {"labels", labels}, {"hits", hit_list}}.dump() << '\n';
    }
}

struct ScanArgs {
    std::string captures;
    std::string db;
    std::string filters;
    std::string dataset = "captures";
    bool fold_case = false;
    double tolerance = wasm::default_feature_tolerance;
    std::string format = "text";
    std::string verdicts;
};

std::vector<wasm::SignatureRecord> load_db(const std::string& path)
{
    Input in(path);
    return wasm::read_signature_db(in.stream());
}

void run_scan(const ScanArgs& args, RunState& state)
{
    const auto format = report::parse_format(args.format);
    const auto ingest = report::ingest_captures(std::filesystem::path(args.captures));
    for (const auto& skipped : ingest.skipped)
        std::cerr << "minetrace: line " << skipped.line << ": " << skipped.reason << '\n';
    if (!ingest.skipped.empty())
        state.status = exit_partial;

    const auto db = load_db(args.db);
    const auto rules = load_rules(args.filters);
    report::ScanOptions options;
    options.dataset = args.dataset;
    options.match.fold_case = args.fold_case;
    options.feature_tolerance = args.tolerance;

    std::vector<report::PageVerdict> verdicts;
    const auto summary = report::scan(ingest.records, db, rules, options, &verdicts);
    std::cout << report::render_detection(std::span(&summary, 1), format);
    if (format == report::Format::text)
        std::cout << '\n';
    std::cout << report::render_labels(summary, format);
    if (format == report::Format::text)
        std::cout << "\nrecords " << ingest.records.size() << "  skipped " << ingest.skipped.size()
                  << "  unparsable modules " << summary.unparsable_modules << '\n';

    if (!args.verdicts.empty()) {
        Output out(args.verdicts);
        for (const auto& v : verdicts)
            out.stream() << json{{"domain", v.domain},
                                 {"wasm_labels", v.wasm_labels},
                                 {"nocoin_labels", v.nocoin_labels},
                                 {"unparsable_modules", v.unparsable_modules}}
                                .dump()
                         << '\n';
    }
}

struct FingerprintArgs {
    std::vector<std::string> files;
    std::string db;
    std::string label;
    std::string notes;
    double tolerance = wasm::default_feature_tolerance;
    std::string format = "text";
};

void run_fingerprint(const FingerprintArgs& args, RunState& state)
{
    const auto format = report::parse_format(args.format);
    std::vector<wasm::SignatureRecord> db;
    if (!args.db.empty())
        db = load_db(args.db);

    if (args.label.empty() && format == report::Format::text)
        std::cout << "file  digest  xor  shift  load  store  functions  instructions  match  label\n";
    for (const auto& file : args.files) {
        try {
            const auto module = wasm::parse_wasm(read_binary(file));
            const auto sig = wasm::signature(module);
            const auto feat = wasm::features(module);
            if (!args.label.empty()) {
                std::cout << wasm::to_db_line({sig.hex(), args.label, feat, args.notes}) << '\n';
                continue;
            }
            wasm::Classification verdict;
            if (!db.empty())
                verdict = wasm::classify(sig, feat, db, args.tolerance);
            if (format == report::Format::jsonl) {
                std::cout << json{{"type", "fingerprint"},
                                  {"file", file},
                                  {"digest", sig.hex()},
                                  {"xor", feat.xor_count},
                                  {"shift", feat.shift_count},
                                  {"load", feat.load_count},
                                  {"store", feat.store_count},
                                  {"functions", feat.function_count},
                                  {"instructions", feat.total_instruction_count},
                                  {"name_hints", feat.name_hints},
                                  {"match", to_string(verdict.kind)},
                                  {"label", verdict.label}}
                                 .dump()
                          << '\n';
            } else {
                std::cout << file << "  " << sig.hex() << "  " << feat.xor_count << "  " << feat.shift_count << "  "
                          << feat.load_count << "  " << feat.store_count << "  " << feat.function_count << "  "
                          << feat.total_instruction_count << "  " << to_string(verdict.kind) << "  "
                          << (verdict.label.empty() ? "-" : verdict.label) << '\n';
            }
        } catch (const std::exception& e) {
            std::cerr << "minetrace: " << file << ": " << e.what() << '\n';
            state.status = exit_partial;
        }
    }
}

}  // namespace

void add_web_commands(CLI::App& app, RunState& state)
{
    auto fetch_args = std::make_shared<FetchArgs>();
    auto* fetch = app.add_subcommand("fetch", "Download landing pages as JSON lines");
    fetch->add_option("domains", fetch_args->domains, "Domains to fetch");
    fetch->add_option("--domain-file", fetch_args->domains_file, "File with one domain per line");
    fetch->add_option("--parallel", fetch_args->parallel, "Concurrent fetches")->check(CLI::PositiveNumber);
    fetch->add_option("--limit", fetch_args->options.limit, "Body bytes kept per page")->capture_default_str();
    fetch->add_option("--timeout-ms", fetch_args->timeout_ms, "Per-page deadline")->capture_default_str();
    fetch->add_option("--max-redirects", fetch_args->options.max_redirects)->capture_default_str();
    fetch->add_option("--prefix", fetch_args->options.url_prefix, "URL prefix")->capture_default_str();
    fetch->add_option("--suffix", fetch_args->options.url_suffix, "URL suffix")->capture_default_str();
    fetch->add_option("-o,--out", fetch_args->out, "Output file")->capture_default_str();
    fetch->callback([fetch_args, &state] { run_fetch(*fetch_args, state); });

    auto match_args = std::make_shared<MatchArgs>();
    auto* match = app.add_subcommand("match", "Match page scripts against a filter list");
    match->add_option("-f,--filters", match_args->filters, "Filter list")->required();
    match->add_option("--pages", match_args->pages, "JSON lines from fetch or capture")->capture_default_str();
    match->add_option("--html", match_args->html, "Single HTML file instead of --pages");
    match->add_option("--domain", match_args->domain, "Domain reported for --html");
    match->add_flag("--fold-case", match_args->fold_case, "Case-insensitive rules");
    match->add_option("--format", match_args->format, "text or jsonl")->capture_default_str();
    match->callback([match_args, &state] { run_match(*match_args, state); });

    auto scan_args = std::make_shared<ScanArgs>();
    auto* scan = app.add_subcommand("scan", "Compare filter-list and Wasm-signature detection on captures");
    scan->add_option("-c,--captures", scan_args->captures, "Capture records (JSON lines)")->required();
    scan->add_option("--db", scan_args->db, "Signature database")->required();
    scan->add_option("-f,--filters", scan_args->filters, "Filter list")->required();
    scan->add_option("--dataset", scan_args->dataset, "Dataset label")->capture_default_str();
    scan->add_flag("--fold-case", scan_args->fold_case, "Case-insensitive rules");
    scan->add_option("--tolerance", scan_args->tolerance, "Feature match tolerance")->capture_default_str();
    scan->add_option("--format", scan_args->format, "text or jsonl")->capture_default_str();
    scan->add_option("--verdicts", scan_args->verdicts, "Write per-page verdicts to this file");
    scan->callback([scan_args, &state] { run_scan(*scan_args, state); });

    auto fp_args = std::make_shared<FingerprintArgs>();
    auto* fp = app.add_subcommand("fingerprint", "Signature and features of Wasm modules");
    fp->add_option("files", fp_args->files, "Wasm files")->required()->check(CLI::ExistingFile);
    fp->add_option("--db", fp_args->db, "Classify against this signature database");
    fp->add_option("--label", fp_args->label, "Emit database records with this label");
    fp->add_option("--notes", fp_args->notes, "Notes for emitted records");
    fp->add_option("--tolerance", fp_args->tolerance, "Feature match tolerance")->capture_default_str();
    fp->add_option("--format", fp_args->format, "text or jsonl")->capture_default_str();
    fp->callback([fp_args, &state] { run_fingerprint(*fp_args, state); });
}

}  // namespace minetrace::cli
