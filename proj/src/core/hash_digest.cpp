#include "minetrace/core/hash_digest.hpp"

#include <algorithm>

#include "minetrace/core/error.hpp"

namespace minetrace {

HashDigest HashDigest::from_hex(std::string_view hex)
{
    if (hex.size() != 2 * size)
        throw Error("digest hex must be 64 characters, got " + std::to_string(hex.size()));
    return from_bytes(minetrace::from_hex(hex));
}

HashDigest HashDigest::from_bytes(ByteView raw)
{
    if (raw.size() != size)
        throw Error("digest must be 32 bytes");
    HashDigest d;
    std::copy(raw.begin(), raw.end(), d.bytes.begin());
    return d;
}

}  // namespace minetrace
