#pragma once

#include <cstdint>

#include "minetrace/core/bytes.hpp"
#include "minetrace/core/hash_digest.hpp"

namespace minetrace {

/// The block hashing blob a pool hands to miners.
///
/// Wire layout: varint major, varint minor, varint timestamp, prev_id (32),
/// nonce (4, little-endian), merkle_root (32), varint tx_count.
struct BlockHeaderBlob {
    std::uint64_t major_version = 0;
    std::uint64_t minor_version = 0;
    std::uint64_t timestamp = 0;
    HashDigest prev_id{};
    std::uint32_t nonce = 0;
    HashDigest merkle_root{};
    std::uint64_t tx_count = 1;

    bool operator==(const BlockHeaderBlob&) const = default;
};

/// Throws std::invalid_argument when tx_count is zero.
Bytes serialize_blob(const BlockHeaderBlob& header);

/// Strict inverse of serialize_blob: trailing bytes are rejected.
BlockHeaderBlob parse_blob(ByteView bytes);

/// Byte offset of the nonce inside a well-formed blob.
std::size_t nonce_offset(ByteView blob);

Bytes set_nonce(ByteView blob, std::uint32_t nonce);

/// Copy of blob with the nonce bytes cleared; the canonical identity of a job.
Bytes zero_nonce(ByteView blob);

}  // namespace minetrace
