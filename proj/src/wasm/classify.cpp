#include "minetrace/wasm/classify.hpp"

#include <array>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

namespace minetrace::wasm {

using nlohmann::json;

std::string_view to_string(MatchKind kind) noexcept
{
    switch (kind) {
    case MatchKind::exact:
        return "exact";
    case MatchKind::feature:
        return "feature";
    case MatchKind::none:
        return "none";
    }
    return "none";
}

namespace {

std::array<std::uint64_t, 6> counts(const FeatureVector& f) noexcept
{
    return {f.xor_count, f.shift_count, f.load_count, f.store_count, f.function_count, f.total_instruction_count};
}

/// Summed relative deviation, or nullopt when some count is out of tolerance.
std::optional<double> deviation(const FeatureVector& candidate, const FeatureVector& reference, double tolerance)
{
    const auto a = counts(candidate);
    const auto b = counts(reference);
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (b[i] == 0) {
            if (a[i] != 0)
                return std::nullopt;
            continue;
        }
        const double diff = a[i] > b[i] ? static_cast<double>(a[i] - b[i]) : static_cast<double>(b[i] - a[i]);
        const double rel = diff / static_cast<double>(b[i]);
        if (rel > tolerance)
            return std::nullopt;
        total += rel;
    }
    return total;
}

}  // namespace

Classification classify(const WasmSignature& sig, const FeatureVector& feat, std::span<const SignatureRecord> db,
                        double tolerance)
{
    const auto hex = sig.hex();
    for (std::size_t i = 0; i < db.size(); ++i)
        if (db[i].digest == hex)
            return {MatchKind::exact, db[i].label, i, 0.0};

    Classification best;
    double best_dev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < db.size(); ++i) {
        if (!db[i].is_miner())
            continue;
        const auto dev = deviation(feat, db[i].features, tolerance);
        if (dev && *dev < best_dev) {
            best_dev = *dev;
            best = {MatchKind::feature, db[i].label, i, *dev};
        }
    }
    return best;
}

Classification classify(const WasmModule& module, std::span<const SignatureRecord> db, double tolerance)
{
    return classify(signature(module), features(module), db, tolerance);
}

std::string to_db_line(const SignatureRecord& r)
{
    const auto& f = r.features;
    json j = {
        {"digest", r.digest},
        {"label", r.label},
        {"features",
         {
             {"xor_count", f.xor_count},
             {"shift_count", f.shift_count},
             {"load_count", f.load_count},
             {"store_count", f.store_count},
             {"function_count", f.function_count},
             {"total_instruction_count", f.total_instruction_count},
             {"name_hints", f.name_hints},
         }},
        {"notes", r.notes},
    };
    return j.dump();
}

std::vector<SignatureRecord> read_signature_db(std::istream& in)
{
    std::vector<SignatureRecord> db;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        SignatureRecord r;
        try {
            const auto j = json::parse(line);
            r.digest = j.at("digest").get<std::string>();
            r.label = j.at("label").get<std::string>();
            const auto& f = j.at("features");
            r.features.xor_count = f.value("xor_count", std::uint64_t{0});
            r.features.shift_count = f.value("shift_count", std::uint64_t{0});
            r.features.load_count = f.value("load_count", std::uint64_t{0});
            r.features.store_count = f.value("store_count", std::uint64_t{0});
            r.features.function_count = f.value("function_count", std::uint64_t{0});
            r.features.total_instruction_count = f.value("total_instruction_count", std::uint64_t{0});
            r.features.name_hints = f.value("name_hints", std::vector<std::string>{});
            r.notes = j.value("notes", std::string{});
            (void)HashDigest::from_hex(r.digest);
        } catch (const std::exception& e) {
            throw DatabaseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!seen.insert(r.digest).second)
            throw DatabaseError("line " + std::to_string(line_no) + ": duplicate digest " + r.digest);
        db.push_back(std::move(r));
    }
    return db;
}

void write_signature_db(std::ostream& out, std::span<const SignatureRecord> db)
{
    for (const auto& r : db)
        out << to_db_line(r) << '\n';
}

}  // namespace minetrace::wasm
