#include "minetrace/filter/rules.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace minetrace::filter {

std::string_view to_string(RuleKind kind) noexcept
{
    switch (kind) {
    case RuleKind::domain_anchor:
        return "domain_anchor";
    case RuleKind::substring:
        return "substring";
    case RuleKind::regex:
        return "regex";
    case RuleKind::comment:
        return "comment";
    }
    return "unknown";
}

namespace {

std::string_view trim(std::string_view s) noexcept
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::string lowered(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view strip_options(std::string_view s) noexcept
{
    const std::size_t dollar = s.rfind('$');
    return dollar == std::string_view::npos ? s : s.substr(0, dollar);
}

std::string second_level_label(std::string_view host)
{
    const std::size_t last = host.rfind('.');
    if (last == std::string_view::npos)
        return std::string(host);
    const std::size_t prev = host.rfind('.', last - 1);
    const std::size_t start = prev == std::string_view::npos ? 0 : prev + 1;
    return std::string(host.substr(start, last - start));
}

FilterRule parse_line(std::string_view line)
{
    FilterRule rule;
    rule.raw = std::string(line);
    if (line.starts_with('!') || line.starts_with('[')) {
        rule.kind = RuleKind::comment;
        return rule;
    }
    if (line.starts_with("||")) {
        std::string_view rest = strip_options(line.substr(2));
        const std::size_t host_end = rest.find_first_of("^/*:|");
        rule.kind = RuleKind::domain_anchor;
        rule.host = lowered(rest.substr(0, host_end));
        if (host_end != std::string_view::npos && rest[host_end] == '/') {
            std::string_view path = rest.substr(host_end);
            path = path.substr(0, path.find_first_of("^*|"));
            rule.path = std::string(path);
        }
        rule.label = second_level_label(rule.host);
        if (rule.host.empty()) {
            rule.usable = false;
            rule.error = "empty host";
        }
        return rule;
    }
    rule.label = rule.raw;
    if (line.size() >= 2 && line.front() == '/' && line.back() == '/') {
        rule.kind = RuleKind::regex;
        rule.text = std::string(line.substr(1, line.size() - 2));
        try {
            rule.pattern = std::make_shared<const std::regex>(rule.text, std::regex::ECMAScript);
            rule.pattern_folded =
                std::make_shared<const std::regex>(rule.text, std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
            rule.usable = false;
            rule.error = std::string("BadRegex: ") + e.what();
        }
        return rule;
    }
    rule.kind = RuleKind::substring;
    rule.text = std::string(strip_options(line));
    if (rule.text.empty()) {
        rule.usable = false;
        rule.error = "empty pattern";
    }
    return rule;
}

bool host_matches(std::string_view host, std::string_view rule_host) noexcept
{
    if (host == rule_host)
        return true;
    return host.size() > rule_host.size() && host.ends_with(rule_host) &&
           host[host.size() - rule_host.size() - 1] == '.';
}

std::string_view url_path(std::string_view url) noexcept
{
    std::size_t start = url.find("://");
    start = start == std::string_view::npos ? (url.starts_with("//") ? 2 : 0) : start + 3;
    const std::size_t slash = url.find_first_of("/?#", start);
    return slash == std::string_view::npos ? std::string_view{} : url.substr(slash);
}

bool contains(std::string_view hay, std::string_view needle, bool fold)
{
    if (!fold)
        return hay.find(needle) != std::string_view::npos;
    return lowered(hay).find(lowered(needle)) != std::string::npos;
}

bool matches(const FilterRule& rule, const ScriptItem& script, const MatchOptions& options)
{
    if (!rule.usable)
        return false;
    switch (rule.kind) {
    case RuleKind::comment:
        return false;
    case RuleKind::domain_anchor: {
        if (!script.src)
            return false;
        const auto host = url_host(*script.src);
        if (!host || !host_matches(*host, rule.host))
            return false;
        return rule.path.empty() || url_path(*script.src).starts_with(rule.path);
    }
    case RuleKind::substring:
        return (script.src && contains(*script.src, rule.text, options.fold_case)) ||
               (script.inline_code && contains(*script.inline_code, rule.text, options.fold_case));
    case RuleKind::regex: {
        const std::regex& re = options.fold_case ? *rule.pattern_folded : *rule.pattern;
        return (script.src && std::regex_search(*script.src, re)) ||
               (script.inline_code && std::regex_search(*script.inline_code, re));
    }
    }
    return false;
}

}  // namespace

std::vector<FilterRule> load_filter_list(std::string_view text)
{
    std::vector<FilterRule> rules;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        const std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty())
            rules.push_back(parse_line(line));
    }
    return rules;
}

std::vector<Hit> match_page(std::span<const ScriptItem> scripts, std::span<const FilterRule> rules,
                            const MatchOptions& options)
{
    std::vector<Hit> hits;
    for (std::size_t r = 0; r < rules.size(); ++r)
        for (std::size_t s = 0; s < scripts.size(); ++s)
            if (matches(rules[r], scripts[s], options))
                hits.push_back({r, s, rules[r].label});
    return hits;
}

std::vector<std::string> page_labels(std::span<const Hit> hits)
{
    std::vector<std::string> labels;
    std::unordered_set<std::string> seen;
    for (const Hit& hit : hits)
        if (seen.insert(hit.label).second)
            labels.push_back(hit.label);
    return labels;
}

}  // namespace minetrace::filter
