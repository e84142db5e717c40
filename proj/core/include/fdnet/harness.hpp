#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdnet/analytic.hpp"

namespace fdnet::harness {

using analytic::MacProfile;
using analytic::NetworkConfig;

std::string_view tool_version();

enum class SweepVariable { Lambda, Theta, Alpha, RLink, P1, P2 };

std::string_view to_string(SweepVariable variable);
/// Parses "lambda", "theta", "alpha", "r" / "r_link", "p1", "p2".
SweepVariable parse_sweep_variable(std::string_view name);

/// Which analytic column groups a sweep fills in.
struct Quantities {
  bool ps = true;          // ps, ps_lower, ps_upper
  bool throughput = true;  // T at the row's MAC profile
  bool optima = false;     // t_hd_max, t_fd_max, p1_opt, p2_opt
  bool gain = false;       // tg, tg_lower, tg_upper
};

struct SimSettings {
  std::uint64_t n_trials = 100000;
  std::optional<double> window_radius;  // default rule when empty
  std::uint64_t master_seed = 0;
  unsigned threads = 0;
};

struct SweepSpec {
  NetworkConfig base;
  /// Empty means "optimize": each row uses the throughput-optimal MAC profile.
  std::optional<MacProfile> mac;
  SweepVariable variable = SweepVariable::Lambda;
  std::vector<double> grid;
  Quantities quantities;
  std::optional<SimSettings> sim;
};

struct SweepRow {
  double x = 0.0;
  double p1 = 0.0;  // MAC profile actually evaluated
  double p2 = 0.0;
  std::optional<double> ps, ps_lower, ps_upper;
  std::optional<double> t;
  std::optional<double> t_hd_max, t_fd_max, p1_opt, p2_opt;
  std::optional<double> tg, tg_lower, tg_upper;
  std::optional<double> ps_sim_mean, ps_sim_half_width;
};

struct SweepResult {
  SweepVariable variable = SweepVariable::Lambda;
  std::vector<SweepRow> rows;
};

/// Evaluates the requested quantities at every grid point, in grid order.
/// Errors are rethrown with the offending grid value in the message.
SweepResult run_sweep(const SweepSpec& spec);

/// CSV with a header row; only columns populated in every row are written.
/// Numbers use 15 significant digits, LF line endings.
void write_csv(const SweepResult& result, std::ostream& out);

/// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

struct FigureOptions {
  SimSettings sim;             // used by figure 1 only
  std::optional<int> points;   // 20 for figure 1, 40 otherwise
  std::vector<double> thetas = {1.0, 10.0};  // figure 4
};

struct FigureFiles {
  std::filesystem::path csv;
  std::filesystem::path script;
  std::filesystem::path metadata;
  /// Figure 1 only: every simulated point within [lower - 3hw, upper + 3hw].
  bool sim_within_bounds = true;
};

/// Success probability vs density (alpha=4, theta=1, R=1, p1=p2=0.5):
/// simulation, quadrature value and the two closed-form bounds.
FigureFiles figure1(const std::filesystem::path& out_dir, const FigureOptions& options = {});
/// Optimal HD and FD access probabilities vs density (alpha=4, R=1, theta=1).
FigureFiles figure3(const std::filesystem::path& out_dir, const FigureOptions& options = {});
/// Throughput gain and its bounds vs density for each theta (alpha=4, R=1).
FigureFiles figure4(const std::filesystem::path& out_dir, const FigureOptions& options = {});

}  // namespace fdnet::harness
