#include "common.hpp"

#include <charconv>
#include <iostream>
#include <iterator>

namespace minetrace::cli {

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Bytes read_binary(const std::filesystem::path& path)
{
    const std::string text = read_text(path);
    return {text.begin(), text.end()};
}

Output::Output(const std::string& path, bool append)
{
    if (path.empty() || path == "-") {
        out_ = &std::cout;
        return;
    }
    file_ = std::make_unique<std::ofstream>(path, append ? std::ios::app : std::ios::trunc);
    if (!*file_)
        throw UsageError("cannot write " + path);
    out_ = file_.get();
}

Input::Input(const std::string& path)
{
    if (path.empty() || path == "-") {
        in_ = &std::cin;
        return;
    }
    file_ = std::make_unique<std::ifstream>(path);
    if (!*file_)
        throw UsageError("cannot open " + path);
    in_ = file_.get();
}

pool::ObfuscationKey parse_key(std::string_view text)
{
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw UsageError("key must be offset:hexbyte");
    pool::ObfuscationKey key;
    unsigned value = 0;
    const auto off = text.substr(0, colon);
    const auto val = text.substr(colon + 1);
    if (std::from_chars(off.data(), off.data() + off.size(), key.offset).ec != std::errc{} ||
        std::from_chars(val.data(), val.data() + val.size(), value, 16).ec != std::errc{} || value > 0xff)
        throw UsageError("key must be offset:hexbyte");
    key.value = static_cast<std::uint8_t>(value);
    return key;
}

std::uint64_t parse_xmr(std::string_view text)
{
    const auto dot = text.find('.');
    const auto whole = text.substr(0, dot);
    const auto frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty() || frac.size() > 12)
        throw UsageError("bad XMR amount: " + std::string(text));
    std::uint64_t units = 0;
    if (std::from_chars(whole.data(), whole.data() + whole.size(), units).ec != std::errc{} ||
        units > UINT64_MAX / 1'000'000'000'000ULL)
        throw UsageError("bad XMR amount: " + std::string(text));
    std::uint64_t fraction = 0;
    for (std::size_t i = 0; i < 12; ++i) {
        const char c = i < frac.size() ? frac[i] : '0';
        if (c < '0' || c > '9')
            throw UsageError("bad XMR amount: " + std::string(text));
        fraction = fraction * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return units * 1'000'000'000'000ULL + fraction;
}

std::vector<std::string> read_lines(std::istream& in)
{
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            lines.push_back(std::move(line));
    return lines;
}

}  // namespace minetrace::cli
