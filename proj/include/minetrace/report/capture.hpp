#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minetrace/core/bytes.hpp"
#include "minetrace/core/error.hpp"

namespace minetrace::report {

MINETRACE_DEFINE_ERROR(SchemaError);
MINETRACE_DEFINE_ERROR(FileError);

inline constexpr std::size_t max_capture_html = 65'536;

enum class FrameDirection {
    sent,
    received,
};

enum class LoadState {
    loaded,
    timeout,
};

struct WebSocketFrame {
    FrameDirection direction = FrameDirection::received;
    std::int64_t timestamp_ms = 0;
    Bytes payload;

    bool operator==(const WebSocketFrame&) const = default;
};

/// One browser visit as written by the capture harness.
struct CaptureRecord {
    std::string domain;
    std::string final_url;
    std::string html;  // at most max_capture_html bytes
    std::vector<Bytes> wasm_modules;
    std::vector<WebSocketFrame> ws_frames;
    LoadState load_state = LoadState::loaded;
    std::optional<std::string> error;

    bool operator==(const CaptureRecord&) const = default;
};

/// Field names: domain, final_url, html_b64, wasm_modules (base64 strings),
/// ws_frames ({direction, timestamp_ms, payload_b64}), load_state, error.
/// Throws SchemaError.
CaptureRecord parse_capture_line(std::string_view line);
std::string to_capture_line(const CaptureRecord& record);

struct SkippedLine {
    std::size_t line = 0;  // 1-based
    std::string reason;
};

struct IngestResult {
    std::vector<CaptureRecord> records;
    std::vector<SkippedLine> skipped;
};

IngestResult ingest_captures(std::istream& in);
/// Throws FileError when the file cannot be opened.
IngestResult ingest_captures(const std::filesystem::path& path);

}  // namespace minetrace::report
