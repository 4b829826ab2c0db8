#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace minetrace::filter {

struct ScriptItem {
    std::optional<std::string> src;
    std::optional<std::string> inline_code;
    std::size_t position = 0;  // offset of the opening '<'
};

/// Non-validating scan for <script> elements. An element cut off by the
/// end of the buffer still yields whatever part of it is present. HTML
/// comments are skipped.
std::vector<ScriptItem> extract_scripts(std::string_view body);

/// Host part of an absolute or protocol-relative URL, lowercased, without
/// userinfo or port. Relative URLs have no host.
std::optional<std::string> url_host(std::string_view url);

}  // namespace minetrace::filter
