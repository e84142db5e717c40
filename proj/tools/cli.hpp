#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fdnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Effective settings after merging defaults, FDNET_SEED, the config file
/// and command-line flags (later sources win).
struct CliConfig {
  std::optional<double> lambda;
  double theta = 1.0;
  double r_link = 1.0;
  double alpha = 4.0;
  std::optional<double> p0, p1, p2;
  std::uint64_t trials = 100000;
  std::optional<double> window;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// Parses a flat key=value file. Blank lines and lines starting with '#'
/// are ignored. Keys: lambda theta r alpha p0 p1 p2 trials window seed threads.
/// Throws std::invalid_argument on unknown keys or malformed values.
void apply_config_text(const std::string& text, CliConfig& config);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Runs one CLI invocation. argv[0] is the program name. Returns the exit code.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err,
        const EnvLookup& env);

/// run() with the process environment.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace fdnet::cli
