#include "minetrace/filter/scripts.hpp"

#include <algorithm>
#include <cctype>

namespace minetrace::filter {

namespace {

char lower(char c) noexcept
{
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool is_space(char c) noexcept
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) noexcept
{
    if (s.size() - pos < prefix.size())
        return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (lower(s[pos + i]) != prefix[i])
            return false;
    return true;
}

std::size_t find_ci(std::string_view s, std::size_t pos, std::string_view needle) noexcept
{
    for (; pos + needle.size() <= s.size(); ++pos)
        if (starts_with_ci(s, pos, needle))
            return pos;
    return std::string_view::npos;
}

struct Tag {
    std::optional<std::string> src;
    std::size_t end = 0;  // one past '>' or body size
    bool closed = false;
};

// Parses attributes starting right after "<script".
Tag parse_open_tag(std::string_view s, std::size_t pos)
{
    Tag tag;
    while (pos < s.size()) {
        while (pos < s.size() && (is_space(s[pos]) || s[pos] == '/'))
            ++pos;
        if (pos >= s.size())
            break;
        if (s[pos] == '>') {
            tag.end = pos + 1;
            tag.closed = true;
            return tag;
        }
        std::string name;
        while (pos < s.size() && !is_space(s[pos]) && s[pos] != '=' && s[pos] != '>' && s[pos] != '/')
            name.push_back(lower(s[pos++]));
        while (pos < s.size() && is_space(s[pos]))
            ++pos;
        std::optional<std::string> value;
        if (pos < s.size() && s[pos] == '=') {
            ++pos;
            while (pos < s.size() && is_space(s[pos]))
                ++pos;
            std::string v;
            if (pos < s.size() && (s[pos] == '"' || s[pos] == '\'')) {
                const char quote = s[pos++];
                while (pos < s.size() && s[pos] != quote)
                    v.push_back(s[pos++]);
                if (pos < s.size())
                    ++pos;
            } else {
                while (pos < s.size() && !is_space(s[pos]) && s[pos] != '>')
                    v.push_back(s[pos++]);
            }
            value = std::move(v);
        }
        if (name == "src" && value && !tag.src)
            tag.src = std::move(value);
    }
    tag.end = s.size();
    return tag;
}

}  // namespace

std::vector<ScriptItem> extract_scripts(std::string_view body)
{
    std::vector<ScriptItem> items;
    std::size_t pos = 0;
    while (pos < body.size()) {
        const std::size_t lt = body.find('<', pos);
        if (lt == std::string_view::npos)
            break;
        if (body.compare(lt, 4, "<!--") == 0) {
            const std::size_t close = body.find("-->", lt + 4);
            pos = close == std::string_view::npos ? body.size() : close + 3;
            continue;
        }
        const std::size_t after = lt + 7;
        if (!starts_with_ci(body, lt, "<script") ||
            (after < body.size() && !is_space(body[after]) && body[after] != '>' && body[after] != '/')) {
            pos = lt + 1;
            continue;
        }

        ScriptItem item;
        item.position = lt;
        Tag tag = parse_open_tag(body, after);
        item.src = std::move(tag.src);
        if (!tag.closed) {
            if (!item.src)
                item.inline_code = std::string();
            items.push_back(std::move(item));
            break;
        }
        const std::size_t close = find_ci(body, tag.end, "</script");
        const std::size_t body_end = close == std::string_view::npos ? body.size() : close;
        std::string code(body.substr(tag.end, body_end - tag.end));
        if (!item.src || !code.empty())
            item.inline_code = std::move(code);
        items.push_back(std::move(item));
        if (close == std::string_view::npos)
            break;
        const std::size_t gt = body.find('>', close);
        pos = gt == std::string_view::npos ? body.size() : gt + 1;
    }
    return items;
}

std::optional<std::string> url_host(std::string_view url)
{
    std::size_t start;
    if (const std::size_t scheme = url.find("://");
        scheme != std::string_view::npos && url.find_first_of("/?#") > scheme) {
        start = scheme + 3;
    } else if (url.starts_with("//")) {
        start = 2;
    } else {
        return std::nullopt;
    }
    std::size_t end = url.find_first_of("/?#", start);
    if (end == std::string_view::npos)
        end = url.size();
    std::string_view authority = url.substr(start, end - start);
    if (const std::size_t at = authority.rfind('@'); at != std::string_view::npos)
        authority.remove_prefix(at + 1);
    if (authority.starts_with('[')) {
        const std::size_t rb = authority.find(']');
        authority = authority.substr(0, rb == std::string_view::npos ? authority.size() : rb + 1);
    } else if (const std::size_t colon = authority.find(':'); colon != std::string_view::npos) {
        authority = authority.substr(0, colon);
    }
    if (authority.empty())
        return std::nullopt;
    std::string host(authority);
    std::transform(host.begin(), host.end(), host.begin(), lower);
    while (host.ends_with('.'))
        host.pop_back();
    return host;
}

}  // namespace minetrace::filter
