#include <doctest.h>

#include <random>

#include "minetrace/core/blob.hpp"
#include "minetrace/core/pow.hpp"
#include "minetrace/kernels/pow_batch.hpp"
#include "support/random.hpp"

using namespace minetrace;
using kernels::Isa;

namespace {

std::vector<HashDigest> oracle(ByteView blob, std::size_t offset, std::uint32_t first, std::size_t count)
{
    const auto& pow = pow_function("test-pow");
    Bytes work(blob.begin(), blob.end());
    std::vector<HashDigest> out;
    for (std::size_t i = 0; i < count; ++i) {
        const auto n = first + static_cast<std::uint32_t>(i);
        for (std::size_t k = 0; k < 4; ++k)
            work[offset + k] = static_cast<std::uint8_t>(n >> (8 * k));
        out.push_back(pow.evaluate(work));
    }
    return out;
}

std::vector<Isa> available()
{
    std::vector<Isa> out{Isa::scalar};
    if (kernels::isa_supported(Isa::avx2))
        out.push_back(Isa::avx2);
    return out;
}

}  // namespace

TEST_CASE("every kernel variant matches OpenSSL on header blobs")
{
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 40; ++rep) {
        const auto blob = serialize_blob(testing::random_header(rng));
        const auto offset = nonce_offset(blob);
        const auto first = static_cast<std::uint32_t>(rng());
        const std::size_t count = 1 + rng() % 37;
        const auto expected = oracle(blob, offset, first, count);
        for (auto isa : available()) {
            std::vector<HashDigest> got(count);
            kernels::test_pow_nonce_batch(blob, offset, first, got, isa);
            INFO("isa=" << kernels::isa_name(isa) << " count=" << count);
            REQUIRE(got == expected);
        }
    }
}

TEST_CASE("arbitrary message lengths and nonce positions, including block straddles")
{
    std::mt19937_64 rng(43);
    for (std::size_t len : {4u, 55u, 56u, 63u, 64u, 65u, 119u, 120u, 128u, 200u}) {
        const auto msg = testing::random_bytes(rng, len);
        std::vector<std::size_t> offsets{0, len - 4};
        for (std::size_t o : {58u, 60u, 62u, 63u, 64u, 126u})
            if (o + 4 <= len)
                offsets.push_back(o);
        for (auto offset : offsets) {
            const auto expected = oracle(msg, offset, 0xFFFFFFFCu, 11);  // wraps past 2^32
            for (auto isa : available()) {
                std::vector<HashDigest> got(11);
                kernels::test_pow_nonce_batch(msg, offset, 0xFFFFFFFCu, got, isa);
                INFO("isa=" << kernels::isa_name(isa) << " len=" << len << " offset=" << offset);
                REQUIRE(got == expected);
            }
        }
    }
}

TEST_CASE("NonceHasher reuses prepared state across batches")
{
    std::mt19937_64 rng(44);
    const auto blob = serialize_blob(testing::random_header(rng));
    const auto offset = nonce_offset(blob);
    const auto expected = oracle(blob, offset, 1000, 64);
    for (auto isa : available()) {
        kernels::NonceHasher hasher(blob, offset, isa);
        std::vector<HashDigest> got(64);
        hasher.hash(1000, std::span(got).first(24));
        hasher.hash(1024, std::span(got).subspan(24));
        REQUIRE(got == expected);
    }
}

TEST_CASE("rejects a nonce outside the blob")
{
    std::vector<HashDigest> out(1);
    const Bytes tiny{1, 2, 3};
    CHECK_THROWS_AS(kernels::test_pow_nonce_batch(tiny, 0, 0, out, Isa::scalar), std::invalid_argument);
    const Bytes eight(8, 0);
    CHECK_THROWS_AS(kernels::test_pow_nonce_batch(eight, 5, 0, out, Isa::scalar), std::invalid_argument);
}

TEST_CASE("dispatch reports a usable variant")
{
    const auto best = kernels::best_isa();
    CHECK(kernels::isa_supported(best));
    CHECK(kernels::lane_width(Isa::scalar) == 1);
    CHECK(kernels::isa_name(Isa::avx2) == "avx2");
}
