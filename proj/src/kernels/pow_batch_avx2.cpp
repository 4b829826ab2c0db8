// Built with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include "sha256_lanes.hpp"

namespace minetrace::kernels::detail {

namespace {

constexpr std::size_t lanes = 8;

inline __m256i rotr(__m256i x, int n) noexcept
{
    return _mm256_or_si256(_mm256_srli_epi32(x, n), _mm256_slli_epi32(x, 32 - n));
}

inline __m256i add(__m256i a, __m256i b) noexcept
{
    return _mm256_add_epi32(a, b);
}

struct LaneState {
    __m256i v[8];

    __m256i& operator[](std::size_t i) noexcept { return v[i]; }
};

struct MessageBlock {
    __m256i v[16];

    __m256i& operator[](std::size_t i) noexcept { return v[i]; }
    const __m256i& operator[](std::size_t i) const noexcept { return v[i]; }
};

void compress8(LaneState& state, const MessageBlock& block) noexcept
{
    __m256i w[64];
    for (std::size_t i = 0; i < 16; ++i)
        w[i] = block[i];
    for (std::size_t i = 16; i < 64; ++i) {
        const auto x = w[i - 15];
        const auto y = w[i - 2];
        const auto s0 = _mm256_xor_si256(_mm256_xor_si256(rotr(x, 7), rotr(x, 18)), _mm256_srli_epi32(x, 3));
        const auto s1 = _mm256_xor_si256(_mm256_xor_si256(rotr(y, 17), rotr(y, 19)), _mm256_srli_epi32(y, 10));
        w[i] = add(add(w[i - 16], s0), add(w[i - 7], s1));
    }

    auto a = state[0], b = state[1], c = state[2], d = state[3];
    auto e = state[4], f = state[5], g = state[6], h = state[7];
    for (std::size_t i = 0; i < 64; ++i) {
        const auto big_s1 = _mm256_xor_si256(_mm256_xor_si256(rotr(e, 6), rotr(e, 11)), rotr(e, 25));
        const auto ch = _mm256_xor_si256(_mm256_and_si256(e, f), _mm256_andnot_si256(e, g));
        const auto k = _mm256_set1_epi32(static_cast<int>(sha256_k[i]));
        const auto t1 = add(add(add(h, big_s1), add(ch, k)), w[i]);
        const auto big_s0 = _mm256_xor_si256(_mm256_xor_si256(rotr(a, 2), rotr(a, 13)), rotr(a, 22));
        const auto maj = _mm256_xor_si256(_mm256_xor_si256(_mm256_and_si256(a, b), _mm256_and_si256(a, c)),
                                          _mm256_and_si256(b, c));
        const auto t2 = add(big_s0, maj);
        h = g;
        g = f;
        f = e;
        e = add(d, t1);
        d = c;
        c = b;
        b = a;
        a = add(t1, t2);
    }
    state[0] = add(state[0], a);
    state[1] = add(state[1], b);
    state[2] = add(state[2], c);
    state[3] = add(state[3], d);
    state[4] = add(state[4], e);
    state[5] = add(state[5], f);
    state[6] = add(state[6], g);
    state[7] = add(state[7], h);
}

LaneState broadcast(const State& s) noexcept
{
    LaneState out;
    for (std::size_t i = 0; i < 8; ++i)
        out[i] = _mm256_set1_epi32(static_cast<int>(s[i]));
    return out;
}

void run_group(const PreparedBlob& prepared, std::uint32_t first_nonce,
               std::array<std::vector<Block>, lanes>& lane_tails, std::array<HashDigest, lanes>& digests) noexcept
{
    for (std::size_t l = 0; l < lanes; ++l)
        prepared.patch_nonce(lane_tails[l], first_nonce + static_cast<std::uint32_t>(l));

    LaneState inner = broadcast(prepared.midstate);
    alignas(32) std::array<std::uint32_t, lanes> gather;
    MessageBlock block;
    for (std::size_t b = 0; b < prepared.tail.size(); ++b) {
        for (std::size_t i = 0; i < 16; ++i) {
            for (std::size_t l = 0; l < lanes; ++l)
                gather[l] = lane_tails[l][b][i];
            block[i] = _mm256_load_si256(reinterpret_cast<const __m256i*>(gather.data()));
        }
        compress8(inner, block);
    }

    // The inner digest words are the outer message words directly.
    for (std::size_t i = 0; i < 8; ++i)
        block[i] = inner[i];
    block[8] = _mm256_set1_epi32(static_cast<int>(0x80000000u));
    for (std::size_t i = 9; i < 15; ++i)
        block[i] = _mm256_setzero_si256();
    block[15] = _mm256_set1_epi32(256);
    LaneState outer = broadcast(sha256_iv);
    compress8(outer, block);

    alignas(32) std::array<std::array<std::uint32_t, lanes>, 8> words;
    for (std::size_t i = 0; i < 8; ++i)
        _mm256_store_si256(reinterpret_cast<__m256i*>(words[i].data()), outer[i]);
    for (std::size_t l = 0; l < lanes; ++l) {
        State s;
        for (std::size_t i = 0; i < 8; ++i)
            s[i] = words[i][l];
        digests[l] = state_to_digest(s);
    }
}

}  // namespace

void batch_avx2(const PreparedBlob& prepared, std::uint32_t first_nonce, std::span<HashDigest> out)
{
    std::array<std::vector<Block>, lanes> lane_tails;
    lane_tails.fill(prepared.tail);
    std::array<HashDigest, lanes> digests;

    std::size_t n = 0;
    for (; n < out.size(); n += lanes) {
        run_group(prepared, first_nonce + static_cast<std::uint32_t>(n), lane_tails, digests);
        const std::size_t take = std::min(lanes, out.size() - n);
        std::copy_n(digests.begin(), take, out.begin() + static_cast<std::ptrdiff_t>(n));
    }
}

}  // namespace minetrace::kernels::detail
