#pragma once

#include <span>
#include <string_view>

#include "minetrace/core/bytes.hpp"
#include "minetrace/core/hash_digest.hpp"

namespace minetrace {

using DigestFunction = HashDigest (*)(ByteView);

HashDigest sha256(ByteView data);

/// Keccak-256 with the original 0x01 domain padding (CryptoNote cn_fast_hash),
/// not FIPS-202 SHA3-256.
HashDigest keccak256(ByteView data);

/// Resolves "keccak" or "sha256"; throws Error otherwise.
DigestFunction digest_by_name(std::string_view name);

/// CryptoNote tree hash. For counts that are not a power of two, the first
/// 2*cnt - count leaves are carried into the first reduced layer unchanged.
/// Throws EmptyLeaves.
HashDigest tree_hash(std::span<const HashDigest> leaves, DigestFunction digest = keccak256);

}  // namespace minetrace
