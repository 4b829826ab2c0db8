#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>

#include "minetrace/core/bytes.hpp"
#include "minetrace/core/hash_digest.hpp"

namespace minetrace::kernels {

enum class Isa {
    scalar,
    avx2,
};

std::string_view isa_name(Isa isa) noexcept;

/// Whether this binary was built with the variant and the CPU can run it.
bool isa_supported(Isa isa) noexcept;

/// Widest supported variant. MINETRACE_ISA=scalar|avx2 overrides the choice
/// when the requested variant is supported.
Isa best_isa() noexcept;

/// Lanes one kernel invocation processes; batch sizes that are a multiple of
/// this avoid a padded tail.
std::size_t lane_width(Isa isa) noexcept;

/// Test-pow digests (SHA-256 applied twice) of `blob` with the nonces
/// first_nonce, first_nonce + 1, ... written little-endian at nonce_offset.
/// out.size() digests are produced; nonces wrap modulo 2^32.
///
/// Throws std::invalid_argument if the nonce does not fit inside the blob
/// or if `isa` is not supported.
void test_pow_nonce_batch(ByteView blob, std::size_t nonce_offset, std::uint32_t first_nonce,
                          std::span<HashDigest> out, Isa isa);

namespace detail {
struct PreparedBlob;
}

/// Holds a padded blob and its midstate so repeated batches over one job
/// skip the setup work of test_pow_nonce_batch.
class NonceHasher {
public:
    NonceHasher(ByteView blob, std::size_t nonce_offset, Isa isa);
    ~NonceHasher();
    NonceHasher(NonceHasher&&) noexcept;
    NonceHasher& operator=(NonceHasher&&) noexcept;

    void hash(std::uint32_t first_nonce, std::span<HashDigest> out) const;
    Isa isa() const noexcept { return isa_; }

private:
    std::unique_ptr<const detail::PreparedBlob> prepared_;
    Isa isa_;
};

}  // namespace minetrace::kernels
