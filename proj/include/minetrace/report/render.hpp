#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "minetrace/attribution/attribution.hpp"
#include "minetrace/report/scan.hpp"

namespace minetrace::report {

enum class Format {
    text,
    jsonl,
};

/// Throws std::invalid_argument for anything but "text" or "jsonl".
Format parse_format(std::string_view name);

/// round(100 * part / whole) with halves rounded up; 0 when whole is 0.
std::uint64_t percent_half_up(std::uint64_t part, std::uint64_t whole) noexcept;

/// Same with one decimal place, as text.
std::string percent_one_decimal(std::uint64_t part, std::uint64_t whole);

/// Detection table: dataset, NoCoin, Wasm, both, missed by NoCoin (with %).
std::string render_detection(std::span<const ScanSummary> rows, Format format);

/// Per-label shares of mining pages for one summary.
std::string render_labels(const ScanSummary& summary, Format format);

std::string render_estimate(const attribution::HashrateEstimate& estimate, const attribution::Revenue& revenue,
                            Format format);

std::string render_attribution(const attribution::AttributionReport& report, Format format);

}  // namespace minetrace::report
