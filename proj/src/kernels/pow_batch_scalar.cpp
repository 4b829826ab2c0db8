#include <bit>
#include <stdexcept>

#include "sha256_lanes.hpp"

namespace minetrace::kernels::detail {

namespace {

constexpr std::uint32_t rotr(std::uint32_t x, int n) noexcept
{
    return std::rotr(x, n);
}

}  // namespace

void compress(State& state, const Block& block) noexcept
{
    std::array<std::uint32_t, 64> w;
    for (std::size_t i = 0; i < 16; ++i)
        w[i] = block[i];
    for (std::size_t i = 16; i < 64; ++i) {
        const auto s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
        const auto s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
        w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }

    auto [a, b, c, d, e, f, g, h] = state;
    for (std::size_t i = 0; i < 64; ++i) {
        const auto t1 = h + (rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25)) + ((e & f) ^ (~e & g)) +
                        sha256_k[i] + w[i];
        const auto t2 = (rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22)) + ((a & b) ^ (a & c) ^ (b & c));
        h = g;
        g = f;
        f = e;
        e = d + t1;
        d = c;
        c = b;
        b = a;
        a = t1 + t2;
    }
    state[0] += a;
    state[1] += b;
    state[2] += c;
    state[3] += d;
    state[4] += e;
    state[5] += f;
    state[6] += g;
    state[7] += h;
}

PreparedBlob prepare(ByteView blob, std::size_t nonce_offset)
{
    if (nonce_offset > blob.size() || blob.size() - nonce_offset < 4)
        throw std::invalid_argument("nonce does not fit inside the blob");

    Bytes padded(blob.begin(), blob.end());
    padded.push_back(0x80);
    while (padded.size() % 64 != 56)
        padded.push_back(0);
    const std::uint64_t bits = static_cast<std::uint64_t>(blob.size()) * 8;
    for (int i = 7; i >= 0; --i)
        padded.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));

    std::vector<Block> blocks(padded.size() / 64);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (std::size_t i = 0; i < 16; ++i) {
            const auto* p = padded.data() + 64 * b + 4 * i;
            blocks[b][i] = (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
                           (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
        }

    PreparedBlob prepared;
    prepared.midstate = sha256_iv;
    const std::size_t first_varying = nonce_offset / 64;
    for (std::size_t b = 0; b < first_varying; ++b)
        compress(prepared.midstate, blocks[b]);
    prepared.tail.assign(blocks.begin() + static_cast<std::ptrdiff_t>(first_varying), blocks.end());
    prepared.nonce_offset_in_tail = nonce_offset - 64 * first_varying;
    return prepared;
}

void PreparedBlob::patch_nonce(std::span<Block> blocks, std::uint32_t nonce) const noexcept
{
    for (std::size_t k = 0; k < 4; ++k) {
        const std::size_t pos = nonce_offset_in_tail + k;
        auto& word = blocks[pos / 64][(pos % 64) / 4];
        const int shift = 24 - 8 * static_cast<int>(pos % 4);
        const auto byte = (nonce >> (8 * k)) & 0xFFu;
        word = (word & ~(0xFFu << shift)) | (byte << shift);
    }
}

Block digest_block(const State& digest) noexcept
{
    Block block{};
    for (std::size_t i = 0; i < 8; ++i)
        block[i] = digest[i];
    block[8] = 0x80000000u;
    block[15] = 256;
    return block;
}

HashDigest state_to_digest(const State& state) noexcept
{
    HashDigest out;
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t b = 0; b < 4; ++b)
            out.bytes[4 * i + b] = static_cast<std::uint8_t>(state[i] >> (24 - 8 * b));
    return out;
}

void batch_scalar(const PreparedBlob& prepared, std::uint32_t first_nonce, std::span<HashDigest> out)
{
    std::vector<Block> tail = prepared.tail;
    for (std::size_t n = 0; n < out.size(); ++n) {
        prepared.patch_nonce(tail, first_nonce + static_cast<std::uint32_t>(n));
        State inner = prepared.midstate;
        for (const auto& block : tail)
            compress(inner, block);
        State outer = sha256_iv;
        compress(outer, digest_block(inner));
        out[n] = state_to_digest(outer);
    }
}

}  // namespace minetrace::kernels::detail
