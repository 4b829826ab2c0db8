#pragma once

// JSON shapes shared by the client and the mock server.

#include <json.hpp>

#include "minetrace/pool/job.hpp"
#include "minetrace/pool/session.hpp"

namespace minetrace::pool::wire {

inline nlohmann::json job_json(const std::string& job_id, ByteView blob, std::uint32_t target)
{
    return {{"job_id", job_id}, {"blob", to_hex(blob)}, {"target", target_to_hex(target)}};
}

inline Job parse_job(const nlohmann::json& j, const std::string& endpoint)
{
    try {
        Job job;
        job.job_id = j.at("job_id").get<std::string>();
        job.blob = from_hex(j.at("blob").get<std::string>());
        job.target = target_from_hex(j.at("target").get<std::string>());
        job.endpoint = endpoint;
        if (job.job_id.empty() || job.blob.empty())
            throw ProtocolError("empty job field");
        return job;
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("bad job: ") + e.what());
    } catch (const ProtocolError&) {
        throw;
    } catch (const Error& e) {
        throw ProtocolError(std::string("bad job: ") + e.what());
    }
}

inline nlohmann::json link_json(const LinkStatus& link)
{
    nlohmann::json j = {{"id", link.id}, {"credited", link.credited}, {"required", link.required}};
    if (link.url)
        j["url"] = *link.url;
    return j;
}

inline LinkStatus parse_link(const nlohmann::json& j)
{
    try {
        LinkStatus link;
        link.id = j.at("id").get<std::string>();
        link.credited = j.at("credited").get<std::uint64_t>();
        link.required = j.at("required").get<std::uint64_t>();
        if (j.contains("url"))
            link.url = j.at("url").get<std::string>();
        return link;
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("bad link status: ") + e.what());
    }
}

inline std::string nonce_to_hex(std::uint32_t nonce)
{
    return target_to_hex(nonce);
}

inline std::uint32_t nonce_from_hex(std::string_view hex)
{
    return target_from_hex(hex);
}

namespace code {
inline constexpr const char* auth_rejected = "auth_rejected";
inline constexpr const char* stale_job = "stale_job";
inline constexpr const char* invalid_share = "invalid_share";
inline constexpr const char* bad_request = "bad_request";
}  // namespace code

}  // namespace minetrace::pool::wire
