#pragma once

#include <string_view>

#include "minetrace/core/bytes.hpp"
#include "minetrace/core/hash_digest.hpp"

namespace minetrace {

class PowHashFunction {
public:
    virtual ~PowHashFunction() = default;

    virtual std::string_view identifier() const noexcept = 0;
    virtual HashDigest evaluate(ByteView input) const = 0;
};

/// SHA-256 applied twice. Stand-in for Cryptonight in every desk-scale path.
class TestPow final : public PowHashFunction {
public:
    std::string_view identifier() const noexcept override { return "test-pow"; }
    HashDigest evaluate(ByteView input) const override;
};

/// Looks up a registered PoW function. "cryptonight" is a declared slot
/// without an implementation and raises UnsupportedPowFunction, as does any
/// unknown identifier.
const PowHashFunction& pow_function(std::string_view identifier);

}  // namespace minetrace
