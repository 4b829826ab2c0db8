#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "minetrace/core/bytes.hpp"
#include "minetrace/core/hash_digest.hpp"

namespace minetrace {

/// One record of a chain snapshot.
struct ChainBlock {
    std::uint64_t height = 0;
    HashDigest block_hash{};
    HashDigest prev_id{};
    std::uint64_t timestamp = 0;
    std::uint64_t difficulty = 1;
    std::uint64_t reward = 0;  // atomic units
    std::vector<HashDigest> tx_hashes;  // Coinbase first
    std::optional<Bytes> header_blob;

    bool operator==(const ChainBlock&) const = default;
};

inline constexpr std::uint64_t atomic_units_per_xmr = 1'000'000'000'000ULL;

std::string to_snapshot_line(const ChainBlock& block);

/// Throws SnapshotError on schema violations.
ChainBlock chain_block_from_line(std::string_view line);

/// Reads a line-delimited snapshot. Blank lines are ignored; any bad line throws.
std::vector<ChainBlock> read_chain_snapshot(std::istream& in);
void write_chain_snapshot(std::ostream& out, const std::vector<ChainBlock>& chain);

}  // namespace minetrace
