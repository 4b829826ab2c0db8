#include "minetrace/pool/job.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace minetrace::pool {

Bytes deobfuscate(ByteView blob, ObfuscationKey key)
{
    if (key.offset >= blob.size())
        throw OffsetOutOfRange("offset " + std::to_string(key.offset) + " outside a " +
                               std::to_string(blob.size()) + "-byte blob");
    Bytes out(blob.begin(), blob.end());
    out[key.offset] ^= key.value;
    return out;
}

EndpointAddress parse_endpoint_url(std::string_view url)
{
    if (url.starts_with("tcp://"))
        url.remove_prefix(6);
    EndpointAddress address;
    if (const std::size_t slash = url.find('/'); slash != std::string_view::npos) {
        address.name = std::string(url.substr(slash + 1));
        url = url.substr(0, slash);
    }
    const std::size_t colon = url.rfind(':');
    if (colon == std::string_view::npos || colon == 0)
        throw std::invalid_argument("endpoint url needs host:port: " + std::string(url));
    address.host = std::string(url.substr(0, colon));
    const std::string_view port = url.substr(colon + 1);
    unsigned value = 0;
    const auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc{} || end != port.data() + port.size() || value == 0 || value > 65535)
        throw std::invalid_argument("bad port in endpoint url: " + std::string(port));
    address.port = static_cast<std::uint16_t>(value);
    return address;
}

void validate(const PoolEndpoint& endpoint)
{
    if (endpoint.poll_interval.count() <= 0)
        throw std::invalid_argument("poll_interval must be positive");
    parse_endpoint_url(endpoint.url);
}

std::string target_to_hex(std::uint32_t target)
{
    const std::uint8_t le[4] = {static_cast<std::uint8_t>(target), static_cast<std::uint8_t>(target >> 8),
                                static_cast<std::uint8_t>(target >> 16), static_cast<std::uint8_t>(target >> 24)};
    return to_hex(le);
}

std::uint32_t target_from_hex(std::string_view hex)
{
    const Bytes le = from_hex(hex);
    if (le.size() != 4)
        throw Error("compact target must be 4 bytes, got " + std::to_string(le.size()));
    return le[0] | (le[1] << 8) | (le[2] << 16) | (static_cast<std::uint32_t>(le[3]) << 24);
}

std::string to_log_line(const Job& job)
{
    nlohmann::ordered_json j;
    j["endpoint"] = job.endpoint;
    j["received_at"] = job.received_at;
    j["job_id"] = job.job_id;
    j["blob_hex"] = to_hex(job.blob);
    j["target_hex"] = target_to_hex(job.target);
    return j.dump();
}

Job job_from_log_line(std::string_view line)
{
    try {
        const auto j = nlohmann::json::parse(line);
        Job job;
        job.endpoint = j.at("endpoint").get<std::string>();
        job.received_at = j.at("received_at").get<std::int64_t>();
        job.job_id = j.at("job_id").get<std::string>();
        job.blob = from_hex(j.at("blob_hex").get<std::string>());
        job.target = target_from_hex(j.at("target_hex").get<std::string>());
        return job;
    } catch (const nlohmann::json::exception& e) {
        throw JobLogError(e.what());
    } catch (const Error& e) {
        throw JobLogError(e.what());
    }
}

JobLog read_job_log(std::istream& in)
{
    JobLog log;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            log.jobs.push_back(job_from_log_line(line));
        } catch (const JobLogError&) {
            ++log.bad_lines;
        }
    }
    return log;
}

void JobLogWriter::append(const Job& job)
{
    const std::string line = to_log_line(job);
    std::lock_guard lock(mutex_);
    out_ << line << '\n';
    out_.flush();
}

std::int64_t now_ms()
{
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace minetrace::pool
