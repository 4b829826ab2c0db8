#pragma once

// Top-down reference for the CryptoNote tree hash, written independently of
// the layer-by-layer production routine.

#include <cstddef>
#include <span>
#include <vector>

#include "minetrace/core/bytes.hpp"
#include "minetrace/core/digest.hpp"

namespace minetrace::testing {

namespace detail {

inline HashDigest hash_two(const HashDigest& a, const HashDigest& b, DigestFunction digest)
{
    Bytes buf(a.bytes.begin(), a.bytes.end());
    buf.insert(buf.end(), b.bytes.begin(), b.bytes.end());
    return digest(buf);
}

// The bottom layer has `slots` positions; the first `singles` positions
// hold one leaf each, the rest hold a pair. Returns the root over
// [first_slot, first_slot + span_slots) consuming leaves from `leaf`.
inline HashDigest subtree(std::span<const HashDigest> leaves, std::size_t singles, std::size_t first_slot,
                          std::size_t span_slots, DigestFunction digest)
{
    auto leaf_index = [singles](std::size_t slot) {
        return slot <= singles ? slot : singles + 2 * (slot - singles);
    };
    if (span_slots == 1) {
        const auto at = leaf_index(first_slot);
        if (first_slot < singles)
            return leaves[at];
        return hash_two(leaves[at], leaves[at + 1], digest);
    }
    const auto half = span_slots / 2;
    return hash_two(subtree(leaves, singles, first_slot, half, digest),
                    subtree(leaves, singles, first_slot + half, half, digest), digest);
}

}  // namespace detail

inline HashDigest reference_tree_hash(std::span<const HashDigest> leaves, DigestFunction digest)
{
    const std::size_t n = leaves.size();
    if (n == 1)
        return leaves[0];
    std::size_t slots = 1;
    while (slots * 2 < n)
        slots *= 2;
    // slots pairs/singles cover n leaves: singles + 2 * (slots - singles) == n
    const std::size_t singles = 2 * slots - n;
    return detail::subtree(leaves, singles, 0, slots, digest);
}

}  // namespace minetrace::testing
