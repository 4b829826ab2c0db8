#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace minetrace::filter {

enum class PageSource {
    fetched,
    capture,
};

struct PageDocument {
    std::string domain;
    std::string body;  // raw bytes, at most the configured limit
    std::optional<std::size_t> truncated_at;
    PageSource source = PageSource::fetched;
};

enum class FetchError {
    none,
    dns_failure,
    tls_failure,
    timeout,
    too_many_redirects,
    connect_failure,
    transfer_failure,
};

std::string_view to_string(FetchError error) noexcept;

struct FetchOptions {
    std::size_t limit = 256 * 1024;
    std::chrono::milliseconds timeout{15'000};  // whole fetch, redirects included
    int max_redirects = 5;
    std::string url_prefix = "https://www.";
    std::string url_suffix = "/";
};

struct FetchResult {
    std::string domain;
    std::string final_url;
    long status = 0;
    std::optional<PageDocument> page;  // set when error == none
    FetchError error = FetchError::none;
    std::string detail;
};

/// Requests prefix + domain + suffix and keeps at most `limit` body bytes.
/// Redirects are followed only while they stay on the same host. Failures
/// are returned in the result, never thrown.
FetchResult fetch_landing(std::string_view domain, const FetchOptions& options = {});

/// Fetches with at most `parallelism` requests in flight. Results keep the
/// input order.
std::vector<FetchResult> fetch_batch(std::span<const std::string> domains, const FetchOptions& options,
                                     std::size_t parallelism);

}  // namespace minetrace::filter
