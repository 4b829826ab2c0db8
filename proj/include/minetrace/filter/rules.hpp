#pragma once

#include <cstddef>
#include <memory>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "minetrace/filter/scripts.hpp"

namespace minetrace::filter {

enum class RuleKind {
    domain_anchor,
    substring,
    regex,
    comment,
};

std::string_view to_string(RuleKind kind) noexcept;

struct FilterRule {
    std::string raw;
    RuleKind kind = RuleKind::comment;
    std::string host;  // domain_anchor
    std::string path;  // domain_anchor, optional "/..." prefix
    std::string text;  // substring text or regex source
    std::shared_ptr<const std::regex> pattern;
    std::shared_ptr<const std::regex> pattern_folded;
    std::string label;
    bool usable = true;  // false for rules that failed to compile (BadRegex)
    std::string error;
};

/// One rule per non-blank line: "!" comments, "||host^" anchors, "/re/"
/// regular expressions, anything else a substring. A trailing "$options"
/// segment is dropped from anchor and substring rules.
std::vector<FilterRule> load_filter_list(std::string_view text);

struct MatchOptions {
    /// Fold case for substring and regex rules. Hosts always compare
    /// case-insensitively.
    bool fold_case = false;
};

struct Hit {
    std::size_t rule = 0;  // index into the rule list
    std::size_t script = 0;  // index into the script list
    std::string label;
};

/// Every (rule, script) pair that matches, in rule-major order.
std::vector<Hit> match_page(std::span<const ScriptItem> scripts, std::span<const FilterRule> rules,
                            const MatchOptions& options = {});

/// Distinct labels in first-hit order.
std::vector<std::string> page_labels(std::span<const Hit> hits);

}  // namespace minetrace::filter
