#include "minetrace/core/digest.hpp"

#include <openssl/sha.h>

#include <array>
#include <cstring>
#include <vector>

#include "minetrace/core/error.hpp"

namespace minetrace {

namespace {

constexpr std::array<std::uint64_t, 24> keccak_round_constants = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808AULL, 0x8000000080008000ULL,
    0x000000000000808BULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008AULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000AULL,
    0x000000008000808BULL, 0x800000000000008BULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800AULL, 0x800000008000000AULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

constexpr std::array<int, 25> rho_offsets = {
    0, 1, 62, 28, 27, 36, 44, 6, 55, 20, 3, 10, 43, 25, 39, 41, 45, 15, 21, 8, 18, 2, 61, 56, 14,
};

constexpr std::uint64_t rotl64(std::uint64_t x, int n) noexcept
{
    return n == 0 ? x : (x << n) | (x >> (64 - n));
}

void keccak_f1600(std::array<std::uint64_t, 25>& a) noexcept
{
    for (auto rc : keccak_round_constants) {
        std::array<std::uint64_t, 5> c{};
        for (int x = 0; x < 5; ++x)
            c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
        for (int x = 0; x < 5; ++x) {
            const auto d = c[(x + 4) % 5] ^ rotl64(c[(x + 1) % 5], 1);
            for (int y = 0; y < 25; y += 5)
                a[y + x] ^= d;
        }
        // rho + pi: lane (x, y) moves to (y, 2x + 3y)
        std::array<std::uint64_t, 25> b{};
        for (int x = 0; x < 5; ++x)
            for (int y = 0; y < 5; ++y)
                b[y + 5 * ((2 * x + 3 * y) % 5)] = rotl64(a[x + 5 * y], rho_offsets[x + 5 * y]);
        for (int y = 0; y < 25; y += 5)
            for (int x = 0; x < 5; ++x)
                a[y + x] = b[y + x] ^ (~b[y + (x + 1) % 5] & b[y + (x + 2) % 5]);
        a[0] ^= rc;
    }
}

}  // namespace

HashDigest sha256(ByteView data)
{
    HashDigest out;
    SHA256(data.data(), data.size(), out.bytes.data());
    return out;
}

HashDigest keccak256(ByteView data)
{
    constexpr std::size_t rate = 136;
    std::array<std::uint64_t, 25> state{};

    auto absorb = [&state](const std::uint8_t* block) {
        for (std::size_t i = 0; i < rate / 8; ++i) {
            std::uint64_t lane = 0;
            for (int b = 7; b >= 0; --b)
                lane = (lane << 8) | block[8 * i + static_cast<std::size_t>(b)];
            state[i] ^= lane;
        }
        keccak_f1600(state);
    };

    std::size_t offset = 0;
    for (; data.size() - offset >= rate; offset += rate)
        absorb(data.data() + offset);

    std::array<std::uint8_t, rate> last{};
    std::memcpy(last.data(), data.data() + offset, data.size() - offset);
    last[data.size() - offset] ^= 0x01;
    last[rate - 1] ^= 0x80;
    absorb(last.data());

    HashDigest out;
    for (std::size_t i = 0; i < HashDigest::size; ++i)
        out.bytes[i] = static_cast<std::uint8_t>(state[i / 8] >> (8 * (i % 8)));
    return out;
}

DigestFunction digest_by_name(std::string_view name)
{
    if (name == "keccak")
        return keccak256;
    if (name == "sha256")
        return sha256;
    throw Error("unknown digest '" + std::string(name) + "'");
}

namespace {

HashDigest hash_pair(const HashDigest& left, const HashDigest& right, DigestFunction digest)
{
    std::array<std::uint8_t, 2 * HashDigest::size> buf;
    std::memcpy(buf.data(), left.bytes.data(), HashDigest::size);
    std::memcpy(buf.data() + HashDigest::size, right.bytes.data(), HashDigest::size);
    return digest(buf);
}

}  // namespace

HashDigest tree_hash(std::span<const HashDigest> leaves, DigestFunction digest)
{
    const std::size_t count = leaves.size();
    if (count == 0)
        throw EmptyLeaves("tree hash needs at least one leaf");
    if (count == 1)
        return leaves[0];
    if (count == 2)
        return hash_pair(leaves[0], leaves[1], digest);

    // largest power of two strictly below count
    std::size_t cnt = 2;
    while (cnt < count)
        cnt <<= 1;
    cnt >>= 1;

    std::vector<HashDigest> layer(cnt);
    const std::size_t carried = 2 * cnt - count;
    std::copy_n(leaves.begin(), carried, layer.begin());
    for (std::size_t i = carried, j = carried; j < cnt; i += 2, ++j)
        layer[j] = hash_pair(leaves[i], leaves[i + 1], digest);

    while (cnt > 2) {
        cnt >>= 1;
        for (std::size_t i = 0, j = 0; j < cnt; i += 2, ++j)
            layer[j] = hash_pair(layer[i], layer[i + 1], digest);
    }
    return hash_pair(layer[0], layer[1], digest);
}

}  // namespace minetrace
