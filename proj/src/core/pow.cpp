#include "minetrace/core/pow.hpp"

#include "minetrace/core/digest.hpp"
#include "minetrace/core/error.hpp"

namespace minetrace {

HashDigest TestPow::evaluate(ByteView input) const
{
    const auto first = sha256(input);
    return sha256(first.bytes);
}

const PowHashFunction& pow_function(std::string_view identifier)
{
    static const TestPow test_pow;
    if (identifier == test_pow.identifier())
        return test_pow;
    if (identifier == "cryptonight")
        throw UnsupportedPowFunction("cryptonight adapter is not linked into this build");
    throw UnsupportedPowFunction("unknown PoW function '" + std::string(identifier) + "'");
}

}  // namespace minetrace
