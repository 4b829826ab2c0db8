#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "minetrace/core/bytes.hpp"
#include "minetrace/core/error.hpp"
#include "minetrace/pool/job.hpp"

namespace minetrace::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_partial = 1,
    exit_fatal = 2,
};

MINETRACE_DEFINE_ERROR(UsageError);

/// Result of the selected command; set by subcommand callbacks.
struct RunState {
    int status = exit_ok;
};

std::string read_text(const std::filesystem::path& path);
Bytes read_binary(const std::filesystem::path& path);

/// "-" selects stdout.
class Output {
public:
    explicit Output(const std::string& path, bool append = false);
    std::ostream& stream() noexcept { return *out_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
};

/// "-" selects stdin.
class Input {
public:
    explicit Input(const std::string& path);
    std::istream& stream() noexcept { return *in_; }

private:
    std::unique_ptr<std::ifstream> file_;
    std::istream* in_;
};

/// "offset:value" with the value in hex, e.g. "39:a5".
pool::ObfuscationKey parse_key(std::string_view text);

/// Exact decimal XMR amount to atomic units.
std::uint64_t parse_xmr(std::string_view text);

std::vector<std::string> read_lines(std::istream& in);

void add_web_commands(CLI::App& app, RunState& state);
void add_pool_commands(CLI::App& app, RunState& state);
void add_analysis_commands(CLI::App& app, RunState& state);

}  // namespace minetrace::cli
