#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "minetrace/filter/rules.hpp"
#include "minetrace/report/capture.hpp"
#include "minetrace/wasm/classify.hpp"

namespace minetrace::report {

struct ScanOptions {
    std::string dataset = "captures";
    filter::MatchOptions match;
    double feature_tolerance = wasm::default_feature_tolerance;
};

struct PageVerdict {
    std::string domain;
    std::vector<std::string> wasm_labels;  // distinct miner labels from classified modules
    std::vector<std::string> nocoin_labels;  // distinct filter labels
    std::size_t unparsable_modules = 0;

    bool wasm_hit() const noexcept { return !wasm_labels.empty(); }
    bool nocoin_hit() const noexcept { return !nocoin_labels.empty(); }
};

struct ScanSummary {
    std::string dataset;
    std::uint64_t total_domains = 0;
    std::uint64_t wasm_hits = 0;
    std::uint64_t nocoin_hits = 0;
    std::uint64_t overlap = 0;  // found by both, i.e. blocked by the list
    std::uint64_t unparsable_modules = 0;
    std::map<std::string, std::uint64_t> wasm_label_counts;  // pages per miner label
    std::map<std::string, std::uint64_t> nocoin_label_counts;

    std::uint64_t missed() const noexcept { return wasm_hits - overlap; }
    std::uint64_t nocoin_only() const noexcept { return nocoin_hits - overlap; }
};

PageVerdict scan_page(const CaptureRecord& capture, std::span<const wasm::SignatureRecord> db,
                      std::span<const filter::FilterRule> rules, const ScanOptions& options = {});

/// Classifies every Wasm module with the signature database and matches the
/// HTML scripts against the filter list, then aggregates. Independent of
/// record order.
ScanSummary scan(std::span<const CaptureRecord> captures, std::span<const wasm::SignatureRecord> db,
                 std::span<const filter::FilterRule> rules, const ScanOptions& options = {},
                 std::vector<PageVerdict>* verdicts = nullptr);

/// A Table-3 row built from bare counts.
ScanSummary summary_from_counts(std::string dataset, std::uint64_t nocoin, std::uint64_t wasm,
                                std::uint64_t overlap);

}  // namespace minetrace::report
