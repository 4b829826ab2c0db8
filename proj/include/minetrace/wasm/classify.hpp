#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minetrace/core/error.hpp"
#include "minetrace/wasm/fingerprint.hpp"

namespace minetrace::wasm {

MINETRACE_DEFINE_ERROR(DatabaseError);

inline constexpr std::string_view non_miner_label = "non-miner";

struct SignatureRecord {
    std::string digest;  // lowercase hex
    std::string label;
    FeatureVector features;
    std::string notes;

    bool is_miner() const noexcept { return !label.empty() && label != non_miner_label; }
};

enum class MatchKind {
    exact,
    feature,
    none,
};

std::string_view to_string(MatchKind kind) noexcept;

struct Classification {
    MatchKind kind = MatchKind::none;
    std::string label;
    std::optional<std::size_t> record;  // index into the database
    double deviation = 0.0;  // summed relative deviation of a feature match
};

inline constexpr double default_feature_tolerance = 0.10;

/// Exact digest match first; otherwise the miner record whose six counts
/// are each within `tolerance` (relative to the record) with the smallest
/// summed deviation, earliest record on ties.
Classification classify(const WasmSignature& sig, const FeatureVector& feat,
                        std::span<const SignatureRecord> db,
                        double tolerance = default_feature_tolerance);

Classification classify(const WasmModule& module, std::span<const SignatureRecord> db,
                        double tolerance = default_feature_tolerance);

/// Line-delimited records. Throws DatabaseError on a schema violation or a
/// repeated digest.
std::vector<SignatureRecord> read_signature_db(std::istream& in);
void write_signature_db(std::ostream& out, std::span<const SignatureRecord> db);

std::string to_db_line(const SignatureRecord& record);

}  // namespace minetrace::wasm
