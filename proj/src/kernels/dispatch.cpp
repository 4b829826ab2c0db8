#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "minetrace/kernels/pow_batch.hpp"
#include "sha256_lanes.hpp"

namespace minetrace::kernels {

std::string_view isa_name(Isa isa) noexcept
{
    switch (isa) {
    case Isa::scalar:
        return "scalar";
    case Isa::avx2:
        return "avx2";
    }
    return "unknown";
}

bool isa_supported(Isa isa) noexcept
{
    switch (isa) {
    case Isa::scalar:
        return true;
    case Isa::avx2:
#if defined(MINETRACE_HAVE_AVX2)
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    }
    return false;
}

Isa best_isa() noexcept
{
    if (const char* forced = std::getenv("MINETRACE_ISA")) {
        const std::string_view name(forced);
        if (name == "scalar")
            return Isa::scalar;
        if (name == "avx2" && isa_supported(Isa::avx2))
            return Isa::avx2;
    }
    return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::size_t lane_width(Isa isa) noexcept
{
    return isa == Isa::avx2 ? 8 : 1;
}

namespace {

void run(const detail::PreparedBlob& prepared, std::uint32_t first_nonce, std::span<HashDigest> out, Isa isa)
{
    switch (isa) {
    case Isa::scalar:
        detail::batch_scalar(prepared, first_nonce, out);
        return;
    case Isa::avx2:
#if defined(MINETRACE_HAVE_AVX2)
        detail::batch_avx2(prepared, first_nonce, out);
        return;
#else
        break;
#endif
    }
    throw std::invalid_argument("kernel variant not built");
}

void require_supported(Isa isa)
{
    if (!isa_supported(isa))
        throw std::invalid_argument("kernel variant not supported on this machine");
}

}  // namespace

void test_pow_nonce_batch(ByteView blob, std::size_t nonce_offset, std::uint32_t first_nonce,
                          std::span<HashDigest> out, Isa isa)
{
    require_supported(isa);
    run(detail::prepare(blob, nonce_offset), first_nonce, out, isa);
}

NonceHasher::NonceHasher(ByteView blob, std::size_t nonce_offset, Isa isa)
    : isa_(isa)
{
    require_supported(isa);
    prepared_ = std::make_unique<const detail::PreparedBlob>(detail::prepare(blob, nonce_offset));
}

NonceHasher::~NonceHasher() = default;
NonceHasher::NonceHasher(NonceHasher&&) noexcept = default;
NonceHasher& NonceHasher::operator=(NonceHasher&&) noexcept = default;

void NonceHasher::hash(std::uint32_t first_nonce, std::span<HashDigest> out) const
{
    run(*prepared_, first_nonce, out, isa_);
}

}  // namespace minetrace::kernels
