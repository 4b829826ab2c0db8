#include "minetrace/report/scan.hpp"

#include <algorithm>

#include "minetrace/filter/scripts.hpp"
#include "minetrace/wasm/module.hpp"

namespace minetrace::report {

PageVerdict scan_page(const CaptureRecord& capture, std::span<const wasm::SignatureRecord> db,
                      std::span<const filter::FilterRule> rules, const ScanOptions& options)
{
    PageVerdict verdict;
    verdict.domain = capture.domain;
    for (const Bytes& bytes : capture.wasm_modules) {
        wasm::Classification c;
        try {
            c = wasm::classify(wasm::parse_wasm(bytes), db, options.feature_tolerance);
        } catch (const Error&) {
            ++verdict.unparsable_modules;
            continue;
        }
        if (c.kind == wasm::MatchKind::none || c.label.empty() || c.label == wasm::non_miner_label)
            continue;
        if (std::find(verdict.wasm_labels.begin(), verdict.wasm_labels.end(), c.label) == verdict.wasm_labels.end())
            verdict.wasm_labels.push_back(c.label);
    }
    const auto scripts = filter::extract_scripts(capture.html);
    const auto hits = filter::match_page(scripts, rules, options.match);
    verdict.nocoin_labels = filter::page_labels(hits);
    return verdict;
}

ScanSummary scan(std::span<const CaptureRecord> captures, std::span<const wasm::SignatureRecord> db,
                 std::span<const filter::FilterRule> rules, const ScanOptions& options,
                 std::vector<PageVerdict>* verdicts)
{
    ScanSummary summary;
    summary.dataset = options.dataset;
    for (const CaptureRecord& capture : captures) {
        PageVerdict v = scan_page(capture, db, rules, options);
        ++summary.total_domains;
        summary.unparsable_modules += v.unparsable_modules;
        summary.wasm_hits += v.wasm_hit();
        summary.nocoin_hits += v.nocoin_hit();
        summary.overlap += v.wasm_hit() && v.nocoin_hit();
        for (const auto& label : v.wasm_labels)
            ++summary.wasm_label_counts[label];
        for (const auto& label : v.nocoin_labels)
            ++summary.nocoin_label_counts[label];
        if (verdicts)
            verdicts->push_back(std::move(v));
    }
    return summary;
}

ScanSummary summary_from_counts(std::string dataset, std::uint64_t nocoin, std::uint64_t wasm, std::uint64_t overlap)
{
    if (overlap > nocoin || overlap > wasm)
        throw std::invalid_argument("overlap exceeds a hit count");
    ScanSummary s;
    s.dataset = std::move(dataset);
    s.nocoin_hits = nocoin;
    s.wasm_hits = wasm;
    s.overlap = overlap;
    return s;
}

}  // namespace minetrace::report
