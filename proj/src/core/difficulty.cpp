#include "minetrace/core/difficulty.hpp"

#include <stdexcept>

namespace minetrace {

Difficulty::Difficulty(std::uint64_t value) : value_(value)
{
    if (value == 0)
        throw std::invalid_argument("difficulty must be at least 1");
}

bool meets_difficulty(const HashDigest& pow_hash, Difficulty difficulty) noexcept
{
    // 4x64-bit limbs times a 64-bit multiplier; the product is below 2^256
    // iff the final carry out of the top limb is zero.
    unsigned __int128 carry = 0;
    for (int limb = 0; limb < 4; ++limb) {
        std::uint64_t word = 0;
        for (int b = 7; b >= 0; --b)
            word = (word << 8) | pow_hash.bytes[static_cast<std::size_t>(8 * limb + b)];
        const unsigned __int128 product =
            static_cast<unsigned __int128>(word) * difficulty.value() + carry;
        carry = product >> 64;
    }
    return carry == 0;
}

std::uint32_t compact_target(Difficulty difficulty) noexcept
{
    return static_cast<std::uint32_t>(0xFFFFFFFFULL / difficulty.value());
}

bool meets_compact_target(const HashDigest& pow_hash, std::uint32_t target) noexcept
{
    if (target == 0xFFFFFFFFU)
        return true;
    std::uint32_t top = 0;
    for (int b = 31; b >= 28; --b)
        top = (top << 8) | pow_hash.bytes[static_cast<std::size_t>(b)];
    return top < target;
}

std::uint64_t target_difficulty(std::uint32_t target) noexcept
{
    if (target == 0)
        return 0xFFFFFFFFULL;
    return 0xFFFFFFFFULL / target;
}

}  // namespace minetrace
