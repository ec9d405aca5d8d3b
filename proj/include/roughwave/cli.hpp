#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "roughwave/experiments.hpp"

namespace roughwave {

/// Config parse or validation failure. Messages name the line and key when
/// they are known.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parses `key = value` lines ('#' starts a comment). Recognized keys:
/// equation, numflux, hurst, resolutions, reference_exponent, t_final,
/// samples, base_seed, cfl, boundary, snapshot_times, beta.
/// Defaults: t_final = 1, cfl = 0.5, boundary = outflow, no snapshots.
/// The result is validated before it is returned.
StudyConfig parse_config_text(std::string_view text, std::string_view source = "<config>");
StudyConfig parse_config(const std::filesystem::path& path);

/// Canonical text form; parse_config_text(to_config_text(c)) == c.
std::string to_config_text(const StudyConfig& cfg);

/// Shortest decimal that round-trips to the same double.
std::string format_number(double v);

/// RFC 4180 CSV with LF line endings: header row then one line per row.
std::string format_csv(const StudyResult& result);

/// Writes format_csv(result) to `path` via a temporary file and rename.
void write_csv(const StudyResult& result, const std::filesystem::path& path);

struct RunManifest {
    std::string command;
    std::string config_path;
    StudyConfig config;
    unsigned workers = 1;
    std::vector<std::string> outputs;
    double wall_seconds = 0.0;
};

std::string manifest_json(const RunManifest& manifest);

/// Runs PRNG known-answer tests and flux consistency/monotonicity probes,
/// printing one line per check. Returns true if every check passed.
bool selfcheck(std::ostream& out);

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2 };

/// Command-line entry point: args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace roughwave
