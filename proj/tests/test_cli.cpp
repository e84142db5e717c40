#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fdnet/analytic.hpp"
#include "cli.hpp"

using namespace fdnet;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
  std::map<std::string, std::string> values;
};

Result invoke(std::vector<std::string> args, std::map<std::string, std::string> env = {}) {
  args.insert(args.begin(), "fdnet");
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err, [&](const std::string& key) -> std::optional<std::string> {
    const auto it = env.find(key);
    if (it == env.end()) return std::nullopt;
    return it->second;
  });
  r.out = out.str();
  r.err = err.str();
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) r.values[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return r;
}

double num(const Result& r, const std::string& key) { return std::stod(r.values.at(key)); }

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

}  // namespace

TEST_CASE("ps for an HD-only network") {
  const Result r = invoke({"ps", "--lambda", "0.1", "--theta", "1", "--r", "1", "--alpha", "4", "--p1", "1", "--p2", "0"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(num(r, "ps") == doctest::Approx(std::exp(-std::numbers::pi * std::numbers::pi / 20.0)).epsilon(1e-11));
  CHECK(r.out == "ps=0.610498025266\n");
}

TEST_CASE("optimize at lambda = 1") {
  const Result r = invoke({"optimize", "--lambda", "1", "--theta", "1", "--r", "1", "--alpha", "4"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(num(r, "p1_opt") == 0.0);
  CHECK(num(r, "p2_opt") == doctest::Approx(1.0 / analytic::f_fn(1.0, 4.0, 1.0)).epsilon(1e-11));
  CHECK(r.values.at("regime") == "saturated");
}

TEST_CASE("bounds, throughput and gain subcommands") {
  const Result b = invoke({"bounds", "--lambda", "0.1"});
  REQUIRE(b.code == 0);
  CHECK(num(b, "ps_lower") == doctest::Approx(0.477008804553).epsilon(1e-11));
  CHECK(num(b, "ps_upper") == doctest::Approx(0.539641485816).epsilon(1e-11));
  CHECK(num(b, "ps_colocated") == num(b, "ps_upper"));

  const Result t = invoke({"throughput", "--lambda", "0.1", "--p1", "1"});
  CHECK(num(t, "T") == doctest::Approx(0.610498025266).epsilon(1e-11));

  const Result g = invoke({"gain", "--lambda", "1e-9"});
  CHECK(num(g, "tg") == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(g.values.at("branch") == "unsaturated");
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(invoke({"simulate", "--lambda", "0.1", "--trials", "0"}).code == cli::kExitUsage);
  CHECK(invoke({"ps"}).code == cli::kExitUsage);
  CHECK(invoke({"ps", "--lambda", "0.1", "--alpha", "2"}).code == cli::kExitUsage);
  CHECK(invoke({"ps", "--lambda", "0.1", "--p1", "0.7", "--p2", "0.7"}).code == cli::kExitUsage);
  CHECK(invoke({"ps", "--lambda", "abc"}).code == cli::kExitUsage);
  CHECK(invoke({"nonsense"}).code == cli::kExitUsage);
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"ps", "--lambda", "0.1"}, {{"FDNET_SEED", "x"}}).code == cli::kExitUsage);
  CHECK(invoke({"figure", "fig9", "--out", "/tmp"}).code == cli::kExitUsage);
  CHECK(invoke({"sweep", "--var", "lambda"}).code == cli::kExitUsage);
  const Result bad = invoke({"ps", "--lambda", "-1"});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(!bad.err.empty());
  CHECK(bad.out.empty());
}

TEST_CASE("config file, environment and flag precedence") {
  const fs::path file = write_temp("fdnet_test.cfg", "# comment\nlambda = 0.2\ntheta=1\np1=1\nseed=9\ntrials=100\n");
  const Result from_file = invoke({"ps", "--config", file.string()});
  REQUIRE(from_file.code == 0);
  CHECK(num(from_file, "ps") == doctest::Approx(std::exp(-0.2 * std::numbers::pi * std::numbers::pi / 2.0)));

  const Result flag_wins = invoke({"ps", "--config", file.string(), "--lambda", "0.1"});
  CHECK(flag_wins.out == "ps=0.610498025266\n");

  // Seed: env < file < flag.
  const Result env_only = invoke({"simulate", "--lambda", "0.1", "--trials", "100"}, {{"FDNET_SEED", "5"}});
  CHECK(env_only.values.at("seed") == "5");
  const Result file_over_env = invoke({"simulate", "--config", file.string()}, {{"FDNET_SEED", "5"}});
  CHECK(file_over_env.values.at("seed") == "9");
  const Result flag_over_all =
      invoke({"simulate", "--config", file.string(), "--seed", "11"}, {{"FDNET_SEED", "5"}});
  CHECK(flag_over_all.values.at("seed") == "11");
  CHECK(invoke({"simulate", "--lambda", "0.1", "--trials", "100"}).values.at("seed") == "0");

  const fs::path broken = write_temp("fdnet_broken.cfg", "lambda=0.1\ncolour=blue\n");
  CHECK(invoke({"ps", "--config", broken.string()}).code == cli::kExitUsage);
  CHECK(invoke({"ps", "--config", "/nonexistent/fdnet.cfg"}).code == cli::kExitUsage);
  fs::remove(file);
  fs::remove(broken);
}

TEST_CASE("apply_config_text") {
  cli::CliConfig c;
  cli::apply_config_text("alpha=3\n\n  r = 2.5 \n", c);
  CHECK(c.alpha == 3.0);
  CHECK(c.r_link == 2.5);
  CHECK(!c.lambda);
  CHECK_THROWS_AS(cli::apply_config_text("trials=-4\n", c), std::invalid_argument);
  CHECK_THROWS_AS(cli::apply_config_text("theta\n", c), std::invalid_argument);
  CHECK_THROWS_AS(cli::apply_config_text("theta=1x\n", c), std::invalid_argument);
}

TEST_CASE("simulation output is byte-identical across thread counts") {
  const std::vector<std::string> base = {"simulate", "--lambda", "0.1", "--p1", "0.5", "--p2", "0.5",
                                         "--trials", "20000", "--seed", "42"};
  auto with_threads = [&](const std::string& t) {
    auto args = base;
    args.insert(args.end(), {"--threads", t});
    return invoke(args);
  };
  const Result one = with_threads("1");
  REQUIRE(one.code == 0);
  for (const char* t : {"2", "7", "0"}) CHECK(with_threads(t).out == one.out);

  const Result lap1 = invoke({"simulate", "--lambda", "0.05", "--laplace", "1", "--trials", "5000", "--threads", "1"});
  const Result lap4 = invoke({"simulate", "--lambda", "0.05", "--laplace", "1", "--trials", "5000", "--threads", "4"});
  REQUIRE(lap1.code == 0);
  CHECK(lap1.out == lap4.out);
  CHECK(invoke({"simulate", "--lambda", "0.05", "--laplace", "0"}).code == cli::kExitUsage);
}

TEST_CASE("sweep writes CSV") {
  const Result r = invoke({"sweep", "--var", "lambda", "--grid", "0.1,0.2", "--p1", "1"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "lambda,p1,p2,ps,ps_lower,ps_upper,T");
  CHECK(row.rfind("0.1,1,0,0.610498025265797,", 0) == 0);

  const Result log = invoke({"sweep", "--var", "lambda", "--from", "0.01", "--to", "1", "--points", "3", "--log",
                             "--optimize", "--quantities", "gain"});
  REQUIRE(log.code == 0);
  CHECK(log.out.rfind("lambda,p1,p2,tg,tg_lower,tg_upper\n", 0) == 0);
  CHECK(invoke({"sweep", "--var", "lambda", "--grid", "0.2,0.1"}).code == cli::kExitUsage);
  CHECK(invoke({"sweep", "--var", "lambda", "--grid", "0.1", "--quantities", "bogus"}).code == cli::kExitUsage);
}

TEST_CASE("figure subcommand writes files and prints their paths") {
  const fs::path dir = fs::temp_directory_path() / "fdnet_cli_fig";
  fs::remove_all(dir);
  const Result r = invoke({"figure", "fig3", "--out", dir.string(), "--points", "10"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(r.values.at("csv")));
  CHECK(fs::exists(r.values.at("script")));
  CHECK(fs::exists(r.values.at("metadata")));
  fs::remove_all(dir);
}
