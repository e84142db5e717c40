#include "fdnet/harness.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <utility>

#include "fdnet/error.hpp"
#include "fdnet/mcsim.hpp"

#ifndef FDNET_VERSION_STRING
#define FDNET_VERSION_STRING "unknown"
#endif

namespace fdnet::harness {

namespace {

constexpr double kBoundSlack = 1e-6;
constexpr int kCsvDigits = 15;

struct Column {
  std::string_view name;
  std::function<std::optional<double>(const SweepRow&)> get;
};

const std::vector<Column>& optional_columns() {
  static const std::vector<Column> columns = {
      {"ps", [](const SweepRow& r) { return r.ps; }},
      {"ps_lower", [](const SweepRow& r) { return r.ps_lower; }},
      {"ps_upper", [](const SweepRow& r) { return r.ps_upper; }},
      {"T", [](const SweepRow& r) { return r.t; }},
      {"t_hd_max", [](const SweepRow& r) { return r.t_hd_max; }},
      {"t_fd_max", [](const SweepRow& r) { return r.t_fd_max; }},
      {"p1_opt", [](const SweepRow& r) { return r.p1_opt; }},
      {"p2_opt", [](const SweepRow& r) { return r.p2_opt; }},
      {"tg", [](const SweepRow& r) { return r.tg; }},
      {"tg_lower", [](const SweepRow& r) { return r.tg_lower; }},
      {"tg_upper", [](const SweepRow& r) { return r.tg_upper; }},
      {"ps_sim_mean", [](const SweepRow& r) { return r.ps_sim_mean; }},
      {"ps_sim_half_width", [](const SweepRow& r) { return r.ps_sim_half_width; }},
  };
  return columns;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(kCsvDigits);
  os << v;
  return os.str();
}

// Columns present in every row, in canonical order.
std::vector<const Column*> populated_columns(const SweepResult& result) {
  std::vector<const Column*> out;
  for (const Column& c : optional_columns()) {
    bool everywhere = !result.rows.empty();
    for (const SweepRow& row : result.rows) everywhere = everywhere && c.get(row).has_value();
    if (everywhere) out.push_back(&c);
  }
  return out;
}

void write_csv_with_prefix(const SweepResult& result, std::ostream& out, std::string_view prefix_name,
                           const std::string& prefix_value, bool header) {
  const auto columns = populated_columns(result);
  if (header) {
    if (!prefix_name.empty()) out << prefix_name << ',';
    out << to_string(result.variable) << ",p1,p2";
    for (const Column* c : columns) out << ',' << c->name;
    out << '\n';
  }
  for (const SweepRow& row : result.rows) {
    if (!prefix_name.empty()) out << prefix_value << ',';
    out << format_number(row.x) << ',' << format_number(row.p1) << ',' << format_number(row.p2);
    for (const Column* c : columns) out << ',' << format_number(*c->get(row));
    out << '\n';
  }
}

std::pair<NetworkConfig, std::optional<MacProfile>> apply_variable(const SweepSpec& spec, double x) {
  const NetworkConfig& base = spec.base;
  switch (spec.variable) {
    case SweepVariable::Lambda: return {base.with_lambda(x), spec.mac};
    case SweepVariable::Theta: return {base.with_theta(x), spec.mac};
    case SweepVariable::Alpha: return {base.with_alpha(x), spec.mac};
    case SweepVariable::RLink: return {base.with_r_link(x), spec.mac};
    case SweepVariable::P1:
    case SweepVariable::P2: {
      if (!spec.mac) throw DomainError("sweeping p1 or p2 needs an explicit MAC profile");
      const bool p1_axis = spec.variable == SweepVariable::P1;
      const double p1 = p1_axis ? x : spec.mac->p1();
      const double p2 = p1_axis ? spec.mac->p2() : x;
      return {base, MacProfile::from_access(p1, p2)};
    }
  }
  throw DomainError("unknown sweep variable");
}

void check_ordered(double lower, double value, double upper, const char* what) {
  if (lower > upper * (1.0 + kBoundSlack) || value < lower * (1.0 - kBoundSlack) ||
      value > upper * (1.0 + kBoundSlack)) {
    std::ostringstream os;
    os.precision(12);
    os << what << " ordering violated: " << lower << " <= " << value << " <= " << upper;
    throw ConsistencyError(os.str());
  }
}

SweepRow evaluate_row(const SweepSpec& spec, double x) {
  auto [config, explicit_mac] = apply_variable(spec, x);
  MacProfile mac = explicit_mac ? *explicit_mac : [&] {
    const analytic::OptimumReport best = analytic::optimal_mixed(config);
    return MacProfile::from_access(best.p1_opt, best.p2_opt);
  }();

  SweepRow row;
  row.x = x;
  row.p1 = mac.p1();
  row.p2 = mac.p2();
  const Quantities& q = spec.quantities;
  if (q.ps) {
    row.ps = analytic::success_probability(config, mac);
    const analytic::SuccessBounds b = analytic::success_bounds(config, mac);
    row.ps_lower = b.lower;
    row.ps_upper = b.upper;
    check_ordered(b.lower, *row.ps, b.upper, "success probability");
  }
  if (q.throughput) row.t = analytic::throughput(config, mac);
  if (q.optima) {
    const analytic::OptimumReport hd = analytic::optimal_hd(config);
    const analytic::OptimumReport fd = analytic::optimal_fd(config);
    row.t_hd_max = hd.t_max;
    row.t_fd_max = fd.t_max;
    row.p1_opt = hd.p1_opt;
    row.p2_opt = fd.p2_opt;
  }
  if (q.gain) {
    const analytic::GainReport gain = analytic::throughput_gain(config);
    row.tg = gain.tg;
    row.tg_lower = gain.lower;
    row.tg_upper = gain.upper;
    check_ordered(gain.lower, gain.tg, gain.upper, "throughput gain");
  }
  if (spec.sim) {
    const SimSettings& sim = *spec.sim;
    const double window = sim.window_radius ? *sim.window_radius : mcsim::default_window_radius(config, mac);
    const mcsim::Estimate est =
        mcsim::estimate_ps(config, mac, sim.n_trials, window, sim.master_seed, sim.threads);
    row.ps_sim_mean = est.mean;
    row.ps_sim_half_width = est.half_width_95;
  }
  return row;
}

std::string annotation(SweepVariable variable, double x) {
  std::ostringstream os;
  os.precision(12);
  os << "at " << to_string(variable) << "=" << x << ": ";
  return os.str();
}

void write_metadata(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

FigureFiles figure_paths(const std::filesystem::path& out_dir, std::string_view stem) {
  std::filesystem::create_directories(out_dir);
  FigureFiles files;
  files.csv = out_dir / (std::string(stem) + ".csv");
  files.script = out_dir / (std::string(stem) + ".gp");
  files.metadata = out_dir / (std::string(stem) + ".meta");
  return files;
}

std::string join(const std::vector<double>& values, char sep = ';') {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += sep;
    out += format_number(v);
  }
  return out;
}

}  // namespace

std::string_view tool_version() { return FDNET_VERSION_STRING; }

std::string_view to_string(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::Lambda: return "lambda";
    case SweepVariable::Theta: return "theta";
    case SweepVariable::Alpha: return "alpha";
    case SweepVariable::RLink: return "r_link";
    case SweepVariable::P1: return "p1";
    case SweepVariable::P2: return "p2";
  }
  return "unknown";
}

SweepVariable parse_sweep_variable(std::string_view name) {
  if (name == "lambda") return SweepVariable::Lambda;
  if (name == "theta") return SweepVariable::Theta;
  if (name == "alpha") return SweepVariable::Alpha;
  if (name == "r" || name == "r_link") return SweepVariable::RLink;
  if (name == "p1") return SweepVariable::P1;
  if (name == "p2") return SweepVariable::P2;
  throw DomainError("unknown sweep variable '" + std::string(name) + "'");
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw DomainError("log_grid needs 0 < lo < hi and n >= 2");
  std::vector<double> grid(static_cast<std::size_t>(n));
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.grid.empty()) throw DomainError("sweep grid is empty");
  for (std::size_t i = 1; i < spec.grid.size(); ++i) {
    if (!(spec.grid[i] > spec.grid[i - 1])) throw DomainError("sweep grid must be strictly increasing");
  }
  if (spec.sim && spec.sim->n_trials < 1) throw DomainError("simulation needs n_trials >= 1");

  SweepResult result;
  result.variable = spec.variable;
  result.rows.reserve(spec.grid.size());
  for (double x : spec.grid) {
    try {
      result.rows.push_back(evaluate_row(spec, x));
    } catch (const NonConvergenceError& e) {
      throw NonConvergenceError(annotation(spec.variable, x) + e.what(), e.estimate(), e.error_bound());
    } catch (const DomainError& e) {
      throw DomainError(annotation(spec.variable, x) + e.what());
    } catch (const ConsistencyError& e) {
      throw ConsistencyError(annotation(spec.variable, x) + e.what());
    }
  }
  return result;
}

void write_csv(const SweepResult& result, std::ostream& out) {
  write_csv_with_prefix(result, out, {}, {}, true);
}

FigureFiles figure1(const std::filesystem::path& out_dir, const FigureOptions& options) {
  const NetworkConfig base(0.01, 1.0, 1.0, 4.0);
  SweepSpec spec{base, MacProfile(0.0, 0.5, 0.5), SweepVariable::Lambda,
                 log_grid(0.01, 1.0, options.points.value_or(20)), Quantities{true, false, false, false},
                 options.sim};
  const SweepResult result = run_sweep(spec);

  FigureFiles files = figure_paths(out_dir, "figure1");
  for (const SweepRow& row : result.rows) {
    const double hw = *row.ps_sim_half_width;
    if (*row.ps_sim_mean < *row.ps_lower - 3.0 * hw || *row.ps_sim_mean > *row.ps_upper + 3.0 * hw) {
      files.sim_within_bounds = false;
    }
  }
  {
    auto csv = open_output(files.csv);
    write_csv(result, csv);
  }
  {
    auto gp = open_output(files.script);
    gp << "set datafile separator ','\n"
          "set terminal pngcairo size 800,600\n"
          "set output 'figure1.png'\n"
          "set logscale x\n"
          "set xlabel 'node density lambda'\n"
          "set ylabel 'success probability'\n"
          "set key top right\n"
          "plot 'figure1.csv' every ::1 using 1:7:8 with yerrorbars title 'simulation', \\\n"
          "     '' every ::1 using 1:4 with lines title 'quadrature', \\\n"
          "     '' every ::1 using 1:5 with lines dt 2 title 'lower bound', \\\n"
          "     '' every ::1 using 1:6 with lines dt 3 title 'upper bound'\n";
  }
  write_metadata(files.metadata,
                 {{"figure", "1"},
                  {"alpha", "4"},
                  {"theta", "1"},
                  {"r_link", "1"},
                  {"p0", "0"},
                  {"p1", "0.5"},
                  {"p2", "0.5"},
                  {"lambda_grid", "log-spaced 0.01..1"},
                  {"points", std::to_string(result.rows.size())},
                  {"n_trials", std::to_string(options.sim.n_trials)},
                  {"seed", std::to_string(options.sim.master_seed)},
                  {"window_rule", options.sim.window_radius ? format_number(*options.sim.window_radius)
                                                            : std::string("default")},
                  {"sim_within_bounds", files.sim_within_bounds ? "true" : "false"},
                  {"tool_version", std::string(tool_version())}});
  return files;
}

FigureFiles figure3(const std::filesystem::path& out_dir, const FigureOptions& options) {
  const NetworkConfig base(0.01, 1.0, 1.0, 4.0);
  SweepSpec spec{base, std::nullopt, SweepVariable::Lambda,
                 log_grid(0.01, 10.0, options.points.value_or(40)), Quantities{false, false, true, false},
                 std::nullopt};
  const SweepResult result = run_sweep(spec);

  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const SweepRow& row = result.rows[i];
    if (*row.p2_opt > *row.p1_opt) throw ConsistencyError("figure 3: p2_opt exceeds p1_opt");
    if (i > 0 && (*row.p1_opt > *result.rows[i - 1].p1_opt || *row.p2_opt > *result.rows[i - 1].p2_opt)) {
      throw ConsistencyError("figure 3: optimal access probabilities increase with lambda");
    }
  }

  FigureFiles files = figure_paths(out_dir, "figure3");
  {
    auto csv = open_output(files.csv);
    write_csv(result, csv);
  }
  const double g = analytic::hd_functional(base);
  const double f = analytic::fd_functional(base);
  {
    auto gp = open_output(files.script);
    gp << "set datafile separator ','\n"
          "set terminal pngcairo size 800,600\n"
          "set output 'figure3.png'\n"
          "set logscale x\n"
          "set xlabel 'node density lambda'\n"
          "set ylabel 'optimal access probability'\n"
          "set arrow from " << format_number(1.0 / f) << ", graph 0 to " << format_number(1.0 / f)
       << ", graph 1 nohead dt 2\n"
          "set arrow from " << format_number(1.0 / g) << ", graph 0 to " << format_number(1.0 / g)
       << ", graph 1 nohead\n"
          "plot 'figure3.csv' every ::1 using 1:6 with lines title 'HD p1_opt', \\\n"
          "     '' every ::1 using 1:7 with lines title 'FD p2_opt'\n";
  }
  write_metadata(files.metadata, {{"figure", "3"},
                                  {"alpha", "4"},
                                  {"theta", "1"},
                                  {"r_link", "1"},
                                  {"lambda_grid", "log-spaced 0.01..10"},
                                  {"points", std::to_string(result.rows.size())},
                                  {"G", format_number(g)},
                                  {"F", format_number(f)},
                                  {"inv_F", format_number(1.0 / f)},
                                  {"inv_G", format_number(1.0 / g)},
                                  {"tool_version", std::string(tool_version())}});
  return files;
}

FigureFiles figure4(const std::filesystem::path& out_dir, const FigureOptions& options) {
  if (options.thetas.empty()) throw DomainError("figure 4 needs at least one theta");
  const std::vector<double> grid = log_grid(0.001, 10.0, options.points.value_or(40));

  FigureFiles files = figure_paths(out_dir, "figure4");
  std::vector<std::pair<std::string, std::string>> meta = {
      {"figure", "4"},
      {"alpha", "4"},
      {"r_link", "1"},
      {"thetas", join(options.thetas)},
      {"theta_choice", "second theta value is not stated for the original figure; chosen here"},
      {"lambda_grid", "log-spaced 0.001..10"},
      {"points", std::to_string(grid.size())}};

  auto csv = open_output(files.csv);
  bool header = true;
  for (double theta : options.thetas) {
    const NetworkConfig base(grid.front(), theta, 1.0, 4.0);
    SweepSpec spec{base, std::nullopt, SweepVariable::Lambda, grid, Quantities{false, false, false, true},
                   std::nullopt};
    const SweepResult result = run_sweep(spec);

    const double g = analytic::hd_functional(base);
    const double f = analytic::fd_functional(base);
    const double saturated_tg = 2.0 * g / f;
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      const SweepRow& row = result.rows[i];
      if (i > 0 && *row.tg > *result.rows[i - 1].tg * (1.0 + 1e-12)) {
        throw ConsistencyError("figure 4: throughput gain increases with lambda");
      }
      if (row.x * g >= 1.0 && std::abs(*row.tg - saturated_tg) > 1e-9) {
        throw ConsistencyError("figure 4: throughput gain not constant beyond 1/G");
      }
    }
    write_csv_with_prefix(result, csv, "theta", format_number(theta), header);
    header = false;

    const std::string suffix = "_theta_" + format_number(theta);
    meta.emplace_back("G" + suffix, format_number(g));
    meta.emplace_back("F" + suffix, format_number(f));
    meta.emplace_back("inv_F" + suffix, format_number(1.0 / f));
    meta.emplace_back("inv_G" + suffix, format_number(1.0 / g));
  }
  meta.emplace_back("tool_version", std::string(tool_version()));
  write_metadata(files.metadata, meta);

  auto gp = open_output(files.script);
  gp << "set datafile separator ','\n"
        "set terminal pngcairo size 800,600\n"
        "set output 'figure4.png'\n"
        "set logscale x\n"
        "set xlabel 'node density lambda'\n"
        "set ylabel 'throughput gain'\n"
        "plot for [th in '" << join(options.thetas, ' ') << "'] 'figure4.csv' every ::1 "
        "using ($1==th+0 ? $2 : 1/0):5 with lines title 'TG theta='.th, \\\n"
        "     for [th in '" << join(options.thetas, ' ') << "'] '' every ::1 "
        "using ($1==th+0 ? $2 : 1/0):6 with lines dt 2 title 'lower theta='.th, \\\n"
        "     for [th in '" << join(options.thetas, ' ') << "'] '' every ::1 "
        "using ($1==th+0 ? $2 : 1/0):7 with lines dt 3 title 'upper theta='.th\n";
  return files;
}

}  // namespace fdnet::harness
