#pragma once

#include <cstdint>

#include "minetrace/core/hash_digest.hpp"

namespace minetrace {

class Difficulty {
public:
    /// Throws std::invalid_argument for zero.
    explicit Difficulty(std::uint64_t value);

    std::uint64_t value() const noexcept { return value_; }

    auto operator<=>(const Difficulty&) const = default;

private:
    std::uint64_t value_;
};

/// H * difficulty < 2^256 with H read as a little-endian 256-bit integer.
bool meets_difficulty(const HashDigest& pow_hash, Difficulty difficulty) noexcept;

/// floor((2^32 - 1) / difficulty), the 4-byte share target sent with jobs.
std::uint32_t compact_target(Difficulty difficulty) noexcept;

/// Hash bytes [28, 32) as a little-endian integer, compared strictly
/// against target. The all-ones target (difficulty 1) accepts everything.
bool meets_compact_target(const HashDigest& pow_hash, std::uint32_t target) noexcept;

/// Share difficulty represented by a compact target; zero maps to the maximum.
std::uint64_t target_difficulty(std::uint32_t target) noexcept;

}  // namespace minetrace
