#include "minetrace/pool/session.hpp"

#include "wire.hpp"

namespace minetrace::pool {

namespace {

using nlohmann::json;

[[noreturn]] void raise(const json& error)
{
    const std::string code = error.value("code", "");
    const std::string message = error.value("message", "");
    if (code == wire::code::auth_rejected)
        throw AuthRejected(message);
    if (code == wire::code::stale_job)
        throw StaleJob(message);
    if (code == wire::code::invalid_share)
        throw InvalidShare(message);
    throw ProtocolError(code + ": " + message);
}

json parse_frame(const std::string& line)
{
    json frame = json::parse(line, nullptr, false);
    if (frame.is_discarded() || !frame.is_object())
        throw ProtocolError("not a message: " + line.substr(0, 80));
    return frame;
}

}  // namespace

PoolSession PoolSession::login(const PoolEndpoint& endpoint, const SessionOptions& options)
{
    validate(endpoint);
    const EndpointAddress address = parse_endpoint_url(endpoint.url);
    PoolSession session;
    session.endpoint_ = endpoint.url;
    session.io_timeout_ = options.io_timeout;
    session.socket_ = LineSocket::connect(address.host, address.port, options.io_timeout);

    json params = {{"token", endpoint.token}, {"endpoint", address.name}};
    if (options.link_id)
        params["link"] = *options.link_id;
    const json result = json::parse(session.request("login", params.dump()));
    if (!result.contains("job"))
        throw ProtocolError("login response without a job");
    session.initial_job_ = wire::parse_job(result["job"], session.endpoint_);
    session.initial_job_.received_at = now_ms();
    if (result.contains("link"))
        session.link_ = wire::parse_link(result["link"]);
    return session;
}

std::string PoolSession::request(std::string_view method, std::string params_json)
{
    const std::uint64_t id = next_id_++;
    json message = {{"id", id}, {"method", method}, {"params", json::parse(params_json)}};
    socket_.send_line(message.dump());

    const auto deadline = std::chrono::steady_clock::now() + io_timeout_;
    for (;;) {
        const auto line = socket_.read_line(deadline);
        if (!line)
            throw ConnectFailure("no response to " + std::string(method) + " within " +
                                 std::to_string(io_timeout_.count()) + " ms");
        const json frame = parse_frame(*line);
        if (frame.value("method", "") == "job" && !frame.contains("id")) {
            Job job = wire::parse_job(frame.value("params", json::object()), endpoint_);
            job.received_at = now_ms();
            pushed_.push_back(std::move(job));
            continue;
        }
        if (!frame.contains("id") || !frame["id"].is_number_unsigned() || frame["id"].get<std::uint64_t>() != id)
            throw ProtocolError("unexpected frame: " + line->substr(0, 80));
        if (frame.contains("error") && !frame["error"].is_null())
            raise(frame["error"]);
        if (!frame.contains("result") || !frame["result"].is_object())
            throw ProtocolError("response without result");
        return frame["result"].dump();
    }
}

Job PoolSession::get_job()
{
    const json result = json::parse(request("getjob", "{}"));
    if (!result.contains("job"))
        throw ProtocolError("getjob response without a job");
    Job job = wire::parse_job(result["job"], endpoint_);
    job.received_at = now_ms();
    return job;
}

ShareVerdict PoolSession::submit_share(const std::string& job_id, std::uint32_t nonce, const HashDigest& result)
{
    const json params = {{"job_id", job_id}, {"nonce", wire::nonce_to_hex(nonce)}, {"result", result.hex()}};
    const json reply = json::parse(request("submit", params.dump()));
    ShareVerdict verdict;
    verdict.accepted = reply.value("status", "") == "OK";
    if (!verdict.accepted)
        throw ProtocolError("submit response without status OK");
    if (reply.contains("link")) {
        link_ = wire::parse_link(reply["link"]);
        verdict.link = link_;
    }
    return verdict;
}

std::optional<Job> PoolSession::wait_push(std::chrono::steady_clock::time_point deadline)
{
    for (;;) {
        if (!pushed_.empty()) {
            Job job = std::move(pushed_.front());
            pushed_.pop_front();
            return job;
        }
        const auto line = socket_.read_line(deadline);
        if (!line)
            return std::nullopt;
        const json frame = parse_frame(*line);
        if (frame.value("method", "") != "job" || frame.contains("id"))
            throw ProtocolError("unsolicited frame: " + line->substr(0, 80));
        Job job = wire::parse_job(frame.value("params", json::object()), endpoint_);
        job.received_at = now_ms();
        pushed_.push_back(std::move(job));
    }
}

}  // namespace minetrace::pool
