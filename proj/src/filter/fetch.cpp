#include "minetrace/filter/fetch.hpp"

#include <curl/curl.h>

#include <algorithm>
#include <atomic>
#include <memory>
#include <mutex>
#include <thread>

#include "minetrace/filter/scripts.hpp"

namespace minetrace::filter {

std::string_view to_string(FetchError error) noexcept
{
    switch (error) {
    case FetchError::none:
        return "none";
    case FetchError::dns_failure:
        return "DnsFailure";
    case FetchError::tls_failure:
        return "TlsFailure";
    case FetchError::timeout:
        return "Timeout";
    case FetchError::too_many_redirects:
        return "TooManyRedirects";
    case FetchError::connect_failure:
        return "ConnectFailure";
    case FetchError::transfer_failure:
        return "TransferFailure";
    }
    return "unknown";
}

namespace {

void global_init()
{
    static std::once_flag once;
    std::call_once(once, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

struct Sink {
    std::string body;
    std::size_t limit = 0;
    bool truncated = false;
};

std::size_t on_body(char* data, std::size_t size, std::size_t nmemb, void* user)
{
    auto* sink = static_cast<Sink*>(user);
    const std::size_t n = size * nmemb;
    const std::size_t room = sink->limit - sink->body.size();
    if (n > room) {
        sink->body.append(data, room);
        sink->truncated = true;
        return 0;  // abort the transfer
    }
    sink->body.append(data, n);
    return n;
}

FetchError classify(CURLcode code) noexcept
{
    switch (code) {
    case CURLE_COULDNT_RESOLVE_HOST:
    case CURLE_COULDNT_RESOLVE_PROXY:
        return FetchError::dns_failure;
    case CURLE_OPERATION_TIMEDOUT:
        return FetchError::timeout;
    case CURLE_SSL_CONNECT_ERROR:
    case CURLE_PEER_FAILED_VERIFICATION:
    case CURLE_SSL_CERTPROBLEM:
    case CURLE_SSL_CIPHER:
    case CURLE_SSL_CACERT_BADFILE:
    case CURLE_SSL_ENGINE_NOTFOUND:
    case CURLE_SSL_ENGINE_SETFAILED:
    case CURLE_USE_SSL_FAILED:
    case CURLE_SSL_CRL_BADFILE:
    case CURLE_SSL_ISSUER_ERROR:
    case CURLE_SSL_PINNEDPUBKEYNOTMATCH:
    case CURLE_SSL_INVALIDCERTSTATUS:
        return FetchError::tls_failure;
    case CURLE_COULDNT_CONNECT:
        return FetchError::connect_failure;
    default:
        return FetchError::transfer_failure;
    }
}

using CurlHandle = std::unique_ptr<CURL, decltype(&curl_easy_cleanup)>;

bool same_host(std::string_view a, std::string_view b)
{
    const auto ha = url_host(a);
    const auto hb = url_host(b);
    return ha && hb && *ha == *hb;
}

}  // namespace

FetchResult fetch_landing(std::string_view domain, const FetchOptions& options)
{
    global_init();
    FetchResult result;
    result.domain = std::string(domain);
    std::string url = options.url_prefix + std::string(domain) + options.url_suffix;

    const auto deadline = std::chrono::steady_clock::now() + options.timeout;
    for (int hop = 0;; ++hop) {
        CurlHandle curl(curl_easy_init(), curl_easy_cleanup);
        if (!curl) {
            result.error = FetchError::transfer_failure;
            result.detail = "curl_easy_init failed";
            return result;
        }
        const auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            result.error = FetchError::timeout;
            result.detail = "deadline reached between redirects";
            return result;
        }

        Sink sink;
        sink.limit = options.limit;
        char error_buffer[CURL_ERROR_SIZE] = {};
        curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
        curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 0L);
        curl_easy_setopt(curl.get(), CURLOPT_NOSIGNAL, 1L);
        curl_easy_setopt(curl.get(), CURLOPT_TIMEOUT_MS, static_cast<long>(remaining.count()));
        curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, on_body);
        curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &sink);
        curl_easy_setopt(curl.get(), CURLOPT_ERRORBUFFER, error_buffer);
        curl_easy_setopt(curl.get(), CURLOPT_USERAGENT, "minetrace/0.1");
        curl_easy_setopt(curl.get(), CURLOPT_ACCEPT_ENCODING, "");

        const CURLcode code = curl_easy_perform(curl.get());
        result.final_url = url;
        curl_easy_getinfo(curl.get(), CURLINFO_RESPONSE_CODE, &result.status);

        if (code != CURLE_OK && !(code == CURLE_WRITE_ERROR && sink.truncated)) {
            result.error = classify(code);
            result.detail = error_buffer[0] ? error_buffer : curl_easy_strerror(code);
            return result;
        }

        char* location = nullptr;
        curl_easy_getinfo(curl.get(), CURLINFO_REDIRECT_URL, &location);
        if (result.status >= 300 && result.status < 400 && location && same_host(url, location)) {
            if (hop + 1 > options.max_redirects) {
                result.error = FetchError::too_many_redirects;
                result.detail = "more than " + std::to_string(options.max_redirects) + " redirects";
                return result;
            }
            url = location;
            continue;
        }

        PageDocument page;
        page.domain = result.domain;
        page.body = std::move(sink.body);
        if (sink.truncated)
            page.truncated_at = options.limit;
        page.source = PageSource::fetched;
        result.page = std::move(page);
        return result;
    }
}

std::vector<FetchResult> fetch_batch(std::span<const std::string> domains, const FetchOptions& options,
                                     std::size_t parallelism)
{
    std::vector<FetchResult> results(domains.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < domains.size(); i = next++)
            results[i] = fetch_landing(domains[i], options);
    };
    const std::size_t n = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(domains.size(), 1));
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < n; ++i)
        pool.emplace_back(worker);
    worker();
    return results;
}

}  // namespace minetrace::filter
