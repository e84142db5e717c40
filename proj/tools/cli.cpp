#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fdnet/analytic.hpp"
#include "fdnet/error.hpp"
#include "fdnet/harness.hpp"
#include "fdnet/mcsim.hpp"

namespace fdnet::cli {

namespace {

using analytic::MacProfile;
using analytic::NetworkConfig;

// Values given on the command line; unset ones fall back to the file/defaults.
struct FlagValues {
  std::optional<double> lambda, theta, r_link, alpha, p0, p1, p2, window;
  std::optional<std::uint64_t> trials, seed;
  std::optional<unsigned> threads;
  std::string config_path;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) {
    throw std::invalid_argument("config key '" + key + "' has non-numeric value '" + value + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("config key '" + key + "' needs a non-negative integer, got '" + value + "'");
  }
  return std::stoull(value);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
void override_with(std::optional<T>& target, const std::optional<T>& flag) {
  if (flag) target = flag;
}

template <class T>
void override_with(T& target, const std::optional<T>& flag) {
  if (flag) target = *flag;
}

CliConfig effective_config(const FlagValues& flags, const EnvLookup& env) {
  CliConfig config;
  if (const auto seed = env("FDNET_SEED")) {
    try {
      config.seed = parse_unsigned("FDNET_SEED", trim(*seed));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (!flags.config_path.empty()) {
    try {
      apply_config_text(read_file(flags.config_path), config);
    } catch (const std::invalid_argument& e) {
      throw UsageError(flags.config_path + ": " + e.what());
    }
  }
  override_with(config.lambda, flags.lambda);
  override_with(config.theta, flags.theta);
  override_with(config.r_link, flags.r_link);
  override_with(config.alpha, flags.alpha);
  override_with(config.p0, flags.p0);
  override_with(config.p1, flags.p1);
  override_with(config.p2, flags.p2);
  override_with(config.window, flags.window);
  override_with(config.trials, flags.trials);
  override_with(config.seed, flags.seed);
  override_with(config.threads, flags.threads);
  return config;
}

NetworkConfig network_of(const CliConfig& config) {
  if (!config.lambda) throw UsageError("--lambda is required (flag or config file)");
  return NetworkConfig(*config.lambda, config.theta, config.r_link, config.alpha);
}

// No probability given: p1 = p2 = 0.5. Otherwise unspecified p1/p2 are 0 and
// an unspecified p0 completes the sum.
MacProfile mac_of(const CliConfig& config) {
  if (!config.p0 && !config.p1 && !config.p2) return MacProfile(0.0, 0.5, 0.5);
  const double p1 = config.p1.value_or(0.0);
  const double p2 = config.p2.value_or(0.0);
  if (config.p0) return MacProfile(*config.p0, p1, p2);
  return MacProfile::from_access(p1, p2);
}

void require_trials(const CliConfig& config) {
  if (config.trials < 1) throw UsageError("--trials must be >= 1");
}

double window_of(const CliConfig& config, const NetworkConfig& network, const MacProfile& mac) {
  if (config.window) {
    if (!(*config.window > 0.0)) throw UsageError("--window must be > 0");
    return *config.window;
  }
  return mcsim::default_window_radius(network, mac);
}

class Printer {
 public:
  explicit Printer(std::ostream& out) : out_(out) { out_ << std::setprecision(12); }
  Printer& operator()(std::string_view name, double value) {
    out_ << name << '=' << value << '\n';
    return *this;
  }
  Printer& operator()(std::string_view name, std::string_view value) {
    out_ << name << '=' << value << '\n';
    return *this;
  }
  Printer& operator()(std::string_view name, std::uint64_t value) {
    out_ << name << '=' << value << '\n';
    return *this;
  }

 private:
  std::ostream& out_;
};

void add_network_flags(CLI::App* cmd, FlagValues& flags) {
  cmd->add_option("--lambda", flags.lambda, "link density per unit area");
  cmd->add_option("--theta", flags.theta, "SIR threshold (default 1)");
  cmd->add_option("--r", flags.r_link, "link distance R (default 1)");
  cmd->add_option("--alpha", flags.alpha, "path-loss exponent, > 2 (default 4)");
  cmd->add_option("--config", flags.config_path, "key=value config file; flags override it");
}

void add_mac_flags(CLI::App* cmd, FlagValues& flags) {
  cmd->add_option("--p0", flags.p0, "silence probability");
  cmd->add_option("--p1", flags.p1, "half-duplex access probability");
  cmd->add_option("--p2", flags.p2, "full-duplex access probability");
}

void add_sim_flags(CLI::App* cmd, FlagValues& flags) {
  cmd->add_option("--trials", flags.trials, "Monte Carlo trials (default 100000)");
  cmd->add_option("--window", flags.window, "simulation window radius (default: truncation rule)");
  cmd->add_option("--seed", flags.seed, "master seed (default FDNET_SEED or 0)");
  cmd->add_option("--threads", flags.threads, "worker threads, 0 = all cores");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      grid.push_back(parse_double("grid", trim(item)));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return grid;
}

harness::Quantities parse_quantities(const std::string& text) {
  harness::Quantities q{false, false, false, false};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item == "ps") q.ps = true;
    else if (item == "throughput") q.throughput = true;
    else if (item == "optima") q.optima = true;
    else if (item == "gain") q.gain = true;
    else throw UsageError("unknown quantity '" + item + "' (ps, throughput, optima, gain)");
  }
  return q;
}

}  // namespace

void apply_config_text(const std::string& text, CliConfig& config) {
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "lambda") config.lambda = parse_double(key, value);
    else if (key == "theta") config.theta = parse_double(key, value);
    else if (key == "r" || key == "r_link") config.r_link = parse_double(key, value);
    else if (key == "alpha") config.alpha = parse_double(key, value);
    else if (key == "p0") config.p0 = parse_double(key, value);
    else if (key == "p1") config.p1 = parse_double(key, value);
    else if (key == "p2") config.p2 = parse_double(key, value);
    else if (key == "window") config.window = parse_double(key, value);
    else if (key == "trials") config.trials = parse_unsigned(key, value);
    else if (key == "seed") config.seed = parse_unsigned(key, value);
    else if (key == "threads") config.threads = static_cast<unsigned>(parse_unsigned(key, value));
    else throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Throughput analysis of mixed full/half-duplex ALOHA networks", "fdnet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(harness::tool_version()));

  FlagValues flags;
  auto* ps = app.add_subcommand("ps", "success probability of the typical link");
  auto* bounds = app.add_subcommand("bounds", "closed-form bounds on the success probability");
  auto* tput = app.add_subcommand("throughput", "throughput (p1 + 2 p2) p_s");
  auto* optimize = app.add_subcommand("optimize", "throughput-optimal access probabilities");
  auto* gain = app.add_subcommand("gain", "FD over HD maximal-throughput gain");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo success probability");
  auto* sweep = app.add_subcommand("sweep", "parameter sweep written as CSV");
  auto* figure = app.add_subcommand("figure", "reproduce a figure: fig1, fig3 or fig4");

  for (auto* cmd : {ps, bounds, tput, optimize, gain, simulate, sweep}) add_network_flags(cmd, flags);
  for (auto* cmd : {ps, bounds, tput, simulate, sweep}) add_mac_flags(cmd, flags);
  for (auto* cmd : {simulate, sweep, figure}) add_sim_flags(cmd, flags);

  std::optional<double> laplace_s;
  simulate->add_option("--laplace", laplace_s,
                       "estimate E[exp(-s I)] over FD-only realizations at this s instead of p_s");

  std::string sweep_var = "lambda";
  std::string sweep_grid;
  std::optional<double> sweep_from, sweep_to;
  int sweep_points = 20;
  bool sweep_log = false;
  bool sweep_optimize = false;
  bool sweep_simulate = false;
  std::string sweep_quantities = "ps,throughput";
  std::string sweep_out;
  sweep->add_option("--var", sweep_var, "lambda, theta, alpha, r, p1 or p2");
  sweep->add_option("--grid", sweep_grid, "comma-separated grid values");
  sweep->add_option("--from", sweep_from, "first grid value");
  sweep->add_option("--to", sweep_to, "last grid value");
  sweep->add_option("--points", sweep_points, "number of grid points with --from/--to");
  sweep->add_flag("--log", sweep_log, "log-spaced grid with --from/--to");
  sweep->add_flag("--optimize", sweep_optimize, "evaluate each row at the optimal MAC profile");
  sweep->add_flag("--simulate", sweep_simulate, "add Monte Carlo success probability columns");
  sweep->add_option("--quantities", sweep_quantities, "comma list of ps, throughput, optima, gain");
  sweep->add_option("--out", sweep_out, "CSV output path (default stdout)");

  std::string figure_name;
  std::string figure_out = ".";
  std::optional<int> figure_points;
  std::vector<double> figure_thetas;
  figure->add_option("name", figure_name, "fig1, fig3 or fig4")->required();
  figure->add_option("--out", figure_out, "output directory");
  figure->add_option("--points", figure_points, "grid points");
  figure->add_option("--thetas", figure_thetas, "theta values for fig4")->delimiter(',');

  std::vector<const char*> raw;
  raw.reserve(argv.size());
  for (const std::string& a : argv) raw.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Printer print(out);
  try {
    const CliConfig config = effective_config(flags, env);

    if (*ps) {
      const NetworkConfig network = network_of(config);
      print("ps", analytic::success_probability(network, mac_of(config)));
    } else if (*bounds) {
      const NetworkConfig network = network_of(config);
      const MacProfile mac = mac_of(config);
      const analytic::SuccessBounds b = analytic::success_bounds(network, mac);
      print("ps_lower", b.lower)("ps_upper", b.upper)("ps_colocated", analytic::ps_colocated_approx(network, mac));
    } else if (*tput) {
      print("T", analytic::throughput(network_of(config), mac_of(config)));
    } else if (*optimize) {
      const NetworkConfig network = network_of(config);
      const analytic::OptimumReport mixed = analytic::optimal_mixed(network);
      const analytic::OptimumReport hd = analytic::optimal_hd(network);
      print("p1_opt", mixed.p1_opt)("p2_opt", mixed.p2_opt)("t_max", mixed.t_max)(
          "regime", analytic::to_string(mixed.regime))("hd_p1_opt", hd.p1_opt)("hd_t_max", hd.t_max)(
          "hd_regime", analytic::to_string(hd.regime));
    } else if (*gain) {
      const NetworkConfig network = network_of(config);
      const analytic::GainReport report = analytic::throughput_gain(network);
      const double g = analytic::hd_functional(network);
      const double f = analytic::fd_functional(network);
      print("tg", report.tg)("tg_lower", report.lower)("tg_upper", report.upper)(
          "branch", analytic::to_string(report.branch))("G", g)("F", f)("inv_G", 1.0 / g)("inv_F", 1.0 / f);
    } else if (*simulate) {
      require_trials(config);
      const NetworkConfig network = network_of(config);
      if (laplace_s) {
        if (!(*laplace_s > 0.0)) throw UsageError("--laplace must be > 0");
        const double window = config.window ? window_of(config, network, MacProfile(0.0, 0.0, 1.0))
                                            : mcsim::default_laplace_window_radius(network, *laplace_s);
        const mcsim::Estimate est =
            mcsim::estimate_laplace_fd(network, *laplace_s, config.trials, window, config.seed, config.threads);
        print("laplace_mean", est.mean)("laplace_half_width_95", est.half_width_95)(
            "laplace_analytic", std::exp(-network.lambda() *
                                         analytic::f_fn(*laplace_s, network.alpha(), network.r_link())))(
            "n_trials", est.n_trials)("seed", est.seed)("window_radius", window);
      } else {
        const MacProfile mac = mac_of(config);
        const double window = window_of(config, network, mac);
        const mcsim::Estimate est =
            mcsim::estimate_ps(network, mac, config.trials, window, config.seed, config.threads);
        print("ps_sim_mean", est.mean)("ps_sim_half_width_95", est.half_width_95)("n_trials", est.n_trials)(
            "seed", est.seed)("window_radius", window);
      }
    } else if (*sweep) {
      // The swept variable may stand in for a missing --lambda.
      CliConfig base_config = config;
      const harness::SweepVariable variable = harness::parse_sweep_variable(sweep_var);
      std::vector<double> grid;
      if (!sweep_grid.empty()) {
        grid = parse_grid(sweep_grid);
      } else if (sweep_from && sweep_to) {
        if (sweep_log) {
          grid = harness::log_grid(*sweep_from, *sweep_to, sweep_points);
        } else {
          if (sweep_points < 2 || !(*sweep_to > *sweep_from)) throw UsageError("--from/--to need from < to, points >= 2");
          for (int i = 0; i < sweep_points; ++i) {
            grid.push_back(*sweep_from + (*sweep_to - *sweep_from) * i / (sweep_points - 1));
          }
        }
      } else {
        throw UsageError("sweep needs --grid or --from/--to");
      }
      if (grid.empty()) throw UsageError("sweep grid is empty");
      if (variable == harness::SweepVariable::Lambda && !base_config.lambda) base_config.lambda = grid.front();

      harness::SweepSpec spec{network_of(base_config), std::nullopt, variable, grid,
                              parse_quantities(sweep_quantities), std::nullopt};
      if (!sweep_optimize) spec.mac = mac_of(base_config);
      if (sweep_simulate) {
        require_trials(config);
        spec.sim = harness::SimSettings{config.trials, config.window, config.seed, config.threads};
      }
      const harness::SweepResult result = harness::run_sweep(spec);
      if (sweep_out.empty()) {
        harness::write_csv(result, out);
      } else {
        std::ofstream file(sweep_out, std::ios::binary);
        if (!file) throw UsageError("cannot write '" + sweep_out + "'");
        harness::write_csv(result, file);
        print("csv", sweep_out);
      }
    } else if (*figure) {
      harness::FigureOptions options;
      options.sim = harness::SimSettings{config.trials, config.window, config.seed, config.threads};
      options.points = figure_points;
      if (!figure_thetas.empty()) options.thetas = figure_thetas;
      require_trials(config);
      harness::FigureFiles files;
      if (figure_name == "fig1") files = harness::figure1(figure_out, options);
      else if (figure_name == "fig3") files = harness::figure3(figure_out, options);
      else if (figure_name == "fig4") files = harness::figure4(figure_out, options);
      else throw UsageError("unknown figure '" + figure_name + "' (fig1, fig3, fig4)");
      print("csv", files.csv.string())("script", files.script.string())("metadata", files.metadata.string());
      if (figure_name == "fig1") print("sim_within_bounds", files.sim_within_bounds ? "true" : "false");
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  } catch (const NonConvergenceError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConsistencyError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    // I/O problems (unwritable output paths and the like).
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  return run(argv, out, err, [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  });
}

}  // namespace fdnet::cli
