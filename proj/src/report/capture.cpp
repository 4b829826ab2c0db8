#include "minetrace/report/capture.hpp"

#include <fstream>

#include <json.hpp>

namespace minetrace::report {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* name)
{
    if (!j.contains(name))
        throw SchemaError(std::string("missing field ") + name);
    return j[name];
}

std::string string_field(const json& j, const char* name)
{
    const json& v = field(j, name);
    if (!v.is_string())
        throw SchemaError(std::string(name) + " must be a string");
    return v.get<std::string>();
}

Bytes base64_field(const json& v, const std::string& name)
{
    if (!v.is_string())
        throw SchemaError(name + " must be a base64 string");
    try {
        return base64_decode(v.get<std::string>());
    } catch (const Error& e) {
        throw SchemaError(name + ": " + e.what());
    }
}

}  // namespace

CaptureRecord parse_capture_line(std::string_view line)
{
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw SchemaError("not a JSON object");

    CaptureRecord record;
    record.domain = string_field(j, "domain");
    if (record.domain.empty())
        throw SchemaError("empty domain");
    record.final_url = string_field(j, "final_url");
    const Bytes html = base64_field(field(j, "html_b64"), "html_b64");
    if (html.size() > max_capture_html)
        throw SchemaError("html is " + std::to_string(html.size()) + " bytes, cap is " +
                          std::to_string(max_capture_html));
    record.html.assign(html.begin(), html.end());

    const json& modules = field(j, "wasm_modules");
    if (!modules.is_array())
        throw SchemaError("wasm_modules must be an array");
    for (std::size_t i = 0; i < modules.size(); ++i)
        record.wasm_modules.push_back(base64_field(modules[i], "wasm_modules[" + std::to_string(i) + "]"));

    const json& frames = field(j, "ws_frames");
    if (!frames.is_array())
        throw SchemaError("ws_frames must be an array");
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const json& f = frames[i];
        const std::string where = "ws_frames[" + std::to_string(i) + "]";
        if (!f.is_object())
            throw SchemaError(where + " must be an object");
        WebSocketFrame frame;
        const std::string direction = string_field(f, "direction");
        if (direction == "sent")
            frame.direction = FrameDirection::sent;
        else if (direction == "received")
            frame.direction = FrameDirection::received;
        else
            throw SchemaError(where + ".direction must be sent or received");
        const json& ts = field(f, "timestamp_ms");
        if (!ts.is_number_integer())
            throw SchemaError(where + ".timestamp_ms must be an integer");
        frame.timestamp_ms = ts.get<std::int64_t>();
        frame.payload = base64_field(field(f, "payload_b64"), where + ".payload_b64");
        record.ws_frames.push_back(std::move(frame));
    }

    const std::string state = string_field(j, "load_state");
    if (state == "loaded")
        record.load_state = LoadState::loaded;
    else if (state == "timeout")
        record.load_state = LoadState::timeout;
    else
        throw SchemaError("load_state must be loaded or timeout");

    if (j.contains("error") && !j["error"].is_null()) {
        if (!j["error"].is_string())
            throw SchemaError("error must be a string");
        record.error = j["error"].get<std::string>();
    }
    return record;
}

std::string to_capture_line(const CaptureRecord& record)
{
    nlohmann::ordered_json j;
    j["domain"] = record.domain;
    j["final_url"] = record.final_url;
    j["html_b64"] = base64_encode(as_bytes(record.html));
    j["wasm_modules"] = nlohmann::ordered_json::array();
    for (const Bytes& m : record.wasm_modules)
        j["wasm_modules"].push_back(base64_encode(m));
    j["ws_frames"] = nlohmann::ordered_json::array();
    for (const WebSocketFrame& f : record.ws_frames)
        j["ws_frames"].push_back({{"direction", f.direction == FrameDirection::sent ? "sent" : "received"},
                                  {"timestamp_ms", f.timestamp_ms},
                                  {"payload_b64", base64_encode(f.payload)}});
    j["load_state"] = record.load_state == LoadState::loaded ? "loaded" : "timeout";
    if (record.error)
        j["error"] = *record.error;
    return j.dump();
}

IngestResult ingest_captures(std::istream& in)
{
    IngestResult result;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            result.records.push_back(parse_capture_line(line));
        } catch (const SchemaError& e) {
            result.skipped.push_back({number, e.what()});
        }
    }
    return result;
}

IngestResult ingest_captures(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FileError("cannot open " + path.string());
    return ingest_captures(in);
}

}  // namespace minetrace::report
