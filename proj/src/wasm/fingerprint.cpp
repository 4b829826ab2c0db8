#include "minetrace/wasm/fingerprint.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <memory>

#include "minetrace/wasm/opcodes.hpp"

namespace minetrace::wasm {

namespace {

std::string lowercase(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

WasmSignature signature(const WasmModule& module)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 context setup failed");
    for (const auto& fn : module.functions) {
        EVP_DigestUpdate(ctx.get(), fn.locals_declaration.data(), fn.locals_declaration.size());
        EVP_DigestUpdate(ctx.get(), fn.code.data(), fn.code.size());
    }
    WasmSignature sig;
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), sig.digest.bytes.data(), &len);
    return sig;
}

const std::vector<std::string>& default_name_keywords()
{
    static const std::vector<std::string> keywords = {
        "keccak", "cn_", "cryptonight", "hash", "skein", "blake", "groestl", "jh",
    };
    return keywords;
}

FeatureVector features(const WasmModule& module, std::span<const std::string> keywords)
{
    FeatureVector fv;
    fv.function_count = module.functions.size();
    for (const auto& fn : module.functions) {
        std::size_t pos = 0;
        try {
            while (pos < fn.code.size()) {
                const auto op = decode_instruction(fn.code, pos);
                ++fv.total_instruction_count;
                switch (classify_opcode(op)) {
                case OpcodeClass::xor_op:
                    ++fv.xor_count;
                    break;
                case OpcodeClass::shift:
                    ++fv.shift_count;
                    break;
                case OpcodeClass::load:
                    ++fv.load_count;
                    break;
                case OpcodeClass::store:
                    ++fv.store_count;
                    break;
                case OpcodeClass::other:
                    break;
                }
            }
        } catch (const OpcodeDecodeError& e) {
            throw OpcodeDecodeError("function " + std::to_string(fn.index) + ": " + e.what());
        }
    }

    std::vector<std::string> lowered;
    lowered.reserve(keywords.size());
    for (const auto& k : keywords)
        lowered.push_back(lowercase(k));
    for (const auto& [index, name] : module.names) {
        const auto lname = lowercase(name);
        const bool hit = std::any_of(lowered.begin(), lowered.end(), [&](const std::string& k) {
            return !k.empty() && lname.find(k) != std::string::npos;
        });
        if (hit)
            fv.name_hints.push_back(name);
    }
    return fv;
}

}  // namespace minetrace::wasm
