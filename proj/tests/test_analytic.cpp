#include <doctest.h>

#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "fdnet/analytic.hpp"
#include "fdnet/error.hpp"
#include "fdnet/numerics.hpp"

using namespace fdnet;
using namespace fdnet::analytic;
using std::numbers::pi;

namespace {

const double kG14 = pi * pi / 2.0;  // G(1, 4)

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

// Midpoint rule over the full circle; spectrally accurate for smooth periodic integrands.
double k_midpoint(double s, double r, double big_r, double alpha, int panels) {
  const double h = 2.0 * pi / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double phi = (i + 0.5) * h;
    const double d2 = std::max(0.0, r * r + big_r * big_r + 2.0 * r * big_r * std::cos(phi));
    sum += 1.0 / (1.0 + s * std::pow(d2, -0.5 * alpha));
  }
  return sum * h;
}

// The normalized F integrand, literally: (2 pi - K / (1 + s r^-alpha)) r,
// integrated by composite Simpson on [0, r_max] plus the leading-order tail
// 4 pi s r^(1-alpha) beyond r_max. Independent of the production route
// (which uses the 2G - J split and adaptive Gauss-Kronrod).
double f_literal_oracle(double s, double alpha, double big_r, double r_max, int r_panels, int phi_panels) {
  const auto integrand = [&](double r) {
    if (r == 0.0) return 0.0;
    const double k = k_midpoint(s, r, big_r, alpha, phi_panels);
    return (2.0 * pi - k / (1.0 + s * std::pow(r, -alpha))) * r;
  };
  const double h = r_max / r_panels;
  double sum = integrand(0.0) + integrand(r_max);
  for (int i = 1; i < r_panels; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * h);
  const double body = sum * h / 3.0;
  const double tail = 4.0 * pi * s * std::pow(r_max, 2.0 - alpha) / (alpha - 2.0);
  return body + tail;
}

struct GridPoint {
  double alpha, theta, r_link;
};

std::vector<GridPoint> criterion_grid() {
  std::vector<GridPoint> grid;
  for (double alpha : {2.5, 3.0, 4.0, 6.0})
    for (double theta : {0.1, 1.0, 10.0})
      for (double r_link : {0.25, 1.0, 4.0}) grid.push_back({alpha, theta, r_link});
  return grid;
}

}  // namespace

TEST_CASE("NetworkConfig and MacProfile validate their invariants") {
  const NetworkConfig c(0.1, 2.0, 1.5, 4.0);
  CHECK(c.delta() == 0.5);
  CHECK(c.s() == doctest::Approx(2.0 * std::pow(1.5, 4.0)));
  CHECK_THROWS_AS(NetworkConfig(0.1, 1.0, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(NetworkConfig(-0.1, 1.0, 1.0, 4.0), DomainError);
  CHECK_THROWS_AS(NetworkConfig(0.1, 0.0, 1.0, 4.0), DomainError);
  CHECK_THROWS_AS(NetworkConfig(0.1, 1.0, 0.0, 4.0), DomainError);
  CHECK_NOTHROW(NetworkConfig(0.0, 1.0, 1.0, 4.0));

  CHECK_NOTHROW(MacProfile(0.2, 0.3, 0.5));
  CHECK_THROWS_AS(MacProfile(0.2, 0.3, 0.6), DomainError);
  CHECK_THROWS_AS(MacProfile(-0.1, 0.6, 0.5), DomainError);
  const MacProfile m = MacProfile::from_access(0.25, 0.5);
  CHECK(m.p0() == doctest::Approx(0.25));
  CHECK(m.transmit_load() == doctest::Approx(1.25));
  CHECK_THROWS_AS(MacProfile::from_access(0.7, 0.7), DomainError);
}

TEST_CASE("g_fn closed form, gamma form and scaling") {
  CHECK(g_fn(1.0, 4.0) == doctest::Approx(4.934802200544679).epsilon(1e-14));
  CHECK(g_fn(16.0, 4.0) == doctest::Approx(4.0 * kG14).epsilon(1e-14));
  const double d = 0.01;
  CHECK(rel_close(g_fn(1.0, 200.0), pi * numerics::gamma_fn(1.0 + d) * numerics::gamma_fn(1.0 - d), 1e-10));
  CHECK(g_fn(1.0, 200.0) == doctest::Approx(pi * pi * d / std::sin(pi * d)).epsilon(1e-14));
  CHECK(g_fn(1.0, 200.0) == doctest::Approx(3.14211).epsilon(1e-5));

  for (double alpha : {2.5, 3.0, 4.0, 6.0, 9.0}) {
    const double delta = 2.0 / alpha;
    for (double s : {0.01, 0.3, 1.0, 7.0, 1e3}) {
      CHECK(rel_close(g_fn(s, alpha),
                      pi * numerics::gamma_fn(1.0 + delta) * numerics::gamma_fn(1.0 - delta) * std::pow(s, delta), 1e-10));
      CHECK(rel_close(g_fn(s, alpha), std::pow(s, delta) * g_fn(1.0, alpha), 1e-14));
    }
  }
  CHECK_THROWS_AS(g_fn(0.0, 4.0), DomainError);
  CHECK_THROWS_AS(g_fn(1.0, 2.0), DomainError);
}

TEST_CASE("k_fn examples and brute-force angular oracle") {
  // With r = R the partner can sit on the origin, so the s -> 0 limit loses
  // (pi / sqrt 2) s^(1/4) from the integral over a dip of width s^(1/4).
  CHECK(k_fn(1e-12, 1.0, 1.0, 4.0) == doctest::Approx(2.0 * pi).epsilon(1e-3));
  CHECK(k_fn(1e-12, 1.0, 1.0, 4.0) == doctest::Approx(2.0 * pi - pi / std::sqrt(2.0) * 1e-3).epsilon(1e-9));
  CHECK(k_fn(1e-12, 0.5, 1.0, 4.0) == doctest::Approx(2.0 * pi).epsilon(1e-10));
  CHECK(k_fn(1.0, 0.0, 1.0, 4.0) == doctest::Approx(pi).epsilon(1e-12));

  const double k = k_fn(1.0, 1.0, 1.0, 4.0);
  CHECK(k > 0.0);
  CHECK(k < 2.0 * pi);
  CHECK(k == doctest::Approx(k_midpoint(1.0, 1.0, 1.0, 4.0, 1000000)).epsilon(1e-9));

  for (double r : {0.0, 0.3, 0.999, 1.0, 2.5, 40.0}) {
    for (double alpha : {2.5, 4.0, 6.0}) {
      const double direct = k_fn(0.7, r, 1.0, alpha);
      const double complement = k_complement_fn(0.7, r, 1.0, alpha);
      CHECK(direct + complement == doctest::Approx(2.0 * pi).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(k_fn(1.0, -1.0, 1.0, 4.0), DomainError);
  CHECK_THROWS_AS(k_fn(1.0, 1.0, 0.0, 4.0), DomainError);
}

TEST_CASE("f_fn at (1, 4, 1) agrees with the literal integrand and an external quadrature") {
  const double f = f_fn(1.0, 4.0, 1.0);
  CHECK(f >= 1.5 * kG14);
  CHECK(f <= 2.0 * kG14);
  // Frozen from scipy.integrate.quad on the same corrected integrand (separate language and algorithm).
  CHECK(f == doctest::Approx(8.221315324002408).epsilon(1e-9));
  const double oracle = f_literal_oracle(1.0, 4.0, 1.0, 60.0, 6000, 2000);
  CHECK(f == doctest::Approx(oracle).epsilon(2e-6));
}

TEST_CASE("f_fn limits in the link length") {
  // Co-located pair: both endpoints see the same path loss, F -> (1 + delta) G.
  CHECK(f_fn(1.0, 4.0, 1e-4) == doctest::Approx(1.5 * kG14).epsilon(1e-3));
  // Far-apart endpoints act as two independent interferers, F -> 2 G.
  CHECK(f_fn(1.0, 4.0, 1e4) == doctest::Approx(2.0 * kG14).epsilon(1e-3));
}

TEST_CASE("f_fn memoization returns bit-identical values, also across threads") {
  const numerics::QuadratureSpec spec{1e-10, 1e-13, 2000};
  const double first = f_fn(0.37, 3.3, 0.8, spec);
  CHECK(f_fn(0.37, 3.3, 0.8, spec) == first);

  std::vector<double> values(4);
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < values.size(); ++i) {
      pool.emplace_back([&values, i] { values[i] = f_fn(2.2, 5.1, 1.7); });
    }
  }
  for (double v : values) CHECK(v == values.front());
}

TEST_CASE("f_fn sandwich (1 + delta) G <= F <= 2 G over the parameter grid") {
  for (const GridPoint& p : criterion_grid()) {
    const NetworkConfig c(1.0, p.theta, p.r_link, p.alpha);
    const double g = hd_functional(c);
    const double f = fd_functional(c);
    CHECK(f >= (1.0 + c.delta()) * g * (1.0 - 1e-6));
    CHECK(f <= 2.0 * g * (1.0 + 1e-6));
  }
}

TEST_CASE("success_probability examples") {
  const NetworkConfig c(0.1, 1.0, 1.0, 4.0);
  CHECK(success_probability(c, MacProfile(1.0, 0.0, 0.0)) == 1.0);
  CHECK(success_probability(c, MacProfile(0.0, 1.0, 0.0)) == doctest::Approx(std::exp(-0.1 * kG14)).epsilon(1e-13));

  const MacProfile mixed(0.0, 0.5, 0.5);
  const double ps = success_probability(c, mixed);
  CHECK(ps == doctest::Approx(std::exp(-0.05 * kG14 - 0.05 * fd_functional(c))).epsilon(1e-13));
  CHECK(ps > 0.47700);
  CHECK(ps < 0.53968);
}

TEST_CASE("success_bounds and the co-located approximation") {
  const NetworkConfig c(0.1, 1.0, 1.0, 4.0);
  const SuccessBounds none = success_bounds(c, MacProfile(1.0, 0.0, 0.0));
  CHECK(none.lower == 1.0);
  CHECK(none.upper == 1.0);

  const SuccessBounds b = success_bounds(c, MacProfile(0.0, 0.5, 0.5));
  CHECK(b.lower == doctest::Approx(0.477008804553026).epsilon(1e-12));
  CHECK(b.upper == doctest::Approx(0.539641485816297).epsilon(1e-12));
  CHECK(ps_colocated_approx(c, MacProfile(0.0, 0.5, 0.5)) == doctest::Approx(0.539641485816297).epsilon(1e-12));
  CHECK(ps_colocated_approx(c, MacProfile(1.0, 0.0, 0.0)) == 1.0);

  const SuccessBounds hd = success_bounds(c, MacProfile(0.2, 0.8, 0.0));
  CHECK(hd.lower == doctest::Approx(hd.upper).epsilon(1e-15));
  CHECK(hd.lower == doctest::Approx(std::exp(-0.1 * 0.8 * kG14)).epsilon(1e-14));
}

TEST_CASE("bounds bracket p_s, equal the co-located form and tighten as lambda -> 0") {
  for (const GridPoint& p : criterion_grid()) {
    for (double lambda : {1e-6, 0.05, 0.3, 1.0}) {
      for (auto [p1, p2] : {std::pair{0.0, 1.0}, std::pair{0.3, 0.4}, std::pair{0.5, 0.5}}) {
        const NetworkConfig c(lambda, p.theta, p.r_link, p.alpha);
        const MacProfile mac = MacProfile::from_access(p1, p2);
        const SuccessBounds b = success_bounds(c, mac);
        const double ps = success_probability(c, mac);
        CHECK(b.lower <= ps * (1.0 + 1e-9));
        CHECK(ps <= b.upper * (1.0 + 1e-9));
        CHECK(std::abs(ps_colocated_approx(c, mac) - b.upper) <= 1e-12);
        const double ratio = std::exp(lambda * p2 * (1.0 - c.delta()) * hd_functional(c));
        if (b.lower > 1e-250) CHECK(rel_close(b.upper / b.lower, ratio, 1e-10));
      }
    }
  }
  const NetworkConfig tiny(1e-9, 1.0, 1.0, 4.0);
  const SuccessBounds b = success_bounds(tiny, MacProfile(0.0, 0.0, 1.0));
  CHECK(b.upper / b.lower == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("success_probability decreases strictly in lambda and theta") {
  const MacProfile mac(0.1, 0.4, 0.5);
  for (const GridPoint& p : criterion_grid()) {
    const NetworkConfig c(0.2, p.theta, p.r_link, p.alpha);
    const double ps = success_probability(c, mac);
    CHECK(success_probability(c.with_lambda(0.2 * 1.01), mac) < ps);
    CHECK(success_probability(c.with_theta(p.theta * 1.01), mac) < ps);
  }
}

TEST_CASE("throughput examples and single-mode consistency") {
  const NetworkConfig c(0.1, 1.0, 1.0, 4.0);
  CHECK(throughput(c, MacProfile(1.0, 0.0, 0.0)) == 0.0);
  CHECK(throughput(c, MacProfile(0.0, 1.0, 0.0)) == doctest::Approx(std::exp(-0.1 * kG14)).epsilon(1e-13));
  CHECK(throughput(c.with_lambda(1e-6), MacProfile(0.0, 0.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(throughput_hd(c, 0.0) == 0.0);

  const NetworkConfig unit(1.0 / kG14, 1.0, 1.0, 4.0);
  CHECK(throughput_hd(unit, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));

  for (double p : {0.0, 0.1, 0.55, 1.0}) {
    CHECK(std::abs(throughput_fd(c, p) - throughput(c, MacProfile(1.0 - p, 0.0, p))) <= 1e-12);
    CHECK(std::abs(throughput_hd(c, p) - throughput(c, MacProfile(1.0 - p, p, 0.0))) <= 1e-12);
  }
  for (double p1 : {0.0, 0.2, 0.5}) {
    for (double p2 : {0.0, 0.3, 0.5}) {
      const double t = throughput(c, MacProfile::from_access(p1, p2));
      CHECK(t >= 0.0);
      CHECK(t <= 2.0);
      CHECK((t == 0.0) == (p1 == 0.0 && p2 == 0.0));
    }
  }
}

TEST_CASE("optimal_hd and optimal_fd branches") {
  const OptimumReport light = optimal_hd(NetworkConfig(0.1, 1.0, 1.0, 4.0));
  CHECK(light.p1_opt == 1.0);
  CHECK(light.t_max == doctest::Approx(std::exp(-0.1 * kG14)).epsilon(1e-12));
  CHECK(light.regime == Regime::Unsaturated);

  const OptimumReport heavy = optimal_hd(NetworkConfig(1.0, 1.0, 1.0, 4.0));
  CHECK(heavy.p1_opt == doctest::Approx(0.202642367284676).epsilon(1e-12));
  CHECK(heavy.t_max == doctest::Approx(0.0745479608343446).epsilon(1e-12));
  CHECK(heavy.regime == Regime::Saturated);

  const OptimumReport fd = optimal_fd(NetworkConfig(1e-9, 1.0, 1.0, 4.0));
  CHECK(fd.p2_opt == 1.0);
  CHECK(fd.t_max == doctest::Approx(2.0).epsilon(1e-7));

  // Boundary lambda G = 1 takes the saturated branch, and both branches agree there.
  const OptimumReport edge = optimal_hd(NetworkConfig(1.0 / kG14, 1.0, 1.0, 4.0));
  CHECK(edge.p1_opt == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(edge.t_max == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("single-mode optima beat a fine grid search") {
  for (double lambda : {0.01, 0.1, 0.3, 1.0, 5.0}) {
    const NetworkConfig c(lambda, 1.0, 1.0, 4.0);
    const OptimumReport hd = optimal_hd(c);
    const OptimumReport fd = optimal_fd(c);
    for (int i = 0; i <= 2000; ++i) {
      const double p = i / 2000.0;
      CHECK(throughput_hd(c, p) <= hd.t_max + 1e-12);
      CHECK(throughput_fd(c, p) <= fd.t_max + 1e-12);
    }
    CHECK(throughput_hd(c, hd.p1_opt) == doctest::Approx(hd.t_max).epsilon(1e-12));
    CHECK(throughput_fd(c, fd.p2_opt) == doctest::Approx(fd.t_max).epsilon(1e-12));
  }
}

TEST_CASE("optimal_mixed puts all access on FD and bounds the simplex") {
  const NetworkConfig light(0.1, 1.0, 1.0, 4.0);
  const OptimumReport a = optimal_mixed(light);
  CHECK(a.p1_opt == 0.0);
  CHECK(a.p2_opt == 1.0);
  CHECK(a.t_max >= 0.7455);
  CHECK(a.t_max <= 0.9541);

  const OptimumReport b = optimal_mixed(light.with_lambda(1.0));
  CHECK(b.p1_opt == 0.0);
  CHECK(b.p2_opt == doctest::Approx(1.0 / fd_functional(light)).epsilon(1e-14));
  CHECK(b.regime == Regime::Saturated);
  CHECK(b.t_max >= 0.07455);
  CHECK(b.t_max <= 0.09939);

  const SimplexSearch search = search_simplex(light.with_lambda(0.3));
  const OptimumReport best = optimal_mixed(light.with_lambda(0.3));
  CHECK(search.grid_best_t <= best.t_max + 1e-9);
  CHECK(search.refined_best_t <= best.t_max + 1e-9);
  CHECK(search.grid_best_p1 == 0.0);
  CHECK(search.refined_best_t == doctest::Approx(best.t_max).epsilon(1e-9));
}

TEST_CASE("throughput_gain branches, limits and continuity") {
  const NetworkConfig base(1.0, 1.0, 1.0, 4.0);
  const double g = hd_functional(base);
  const double f = fd_functional(base);

  const GainReport low = throughput_gain(base.with_lambda(1e-9));
  CHECK(low.branch == GainBranch::Unsaturated);
  CHECK(low.tg == doctest::Approx(2.0).epsilon(1e-6));

  const GainReport sat = throughput_gain(base);
  CHECK(sat.branch == GainBranch::BothSaturated);
  CHECK(sat.tg == doctest::Approx(2.0 * g / f).epsilon(1e-14));
  CHECK(sat.tg > 1.0);
  CHECK(sat.tg < 2.0 / 1.5);
  CHECK(sat.lower == 1.0);
  CHECK(sat.upper == doctest::Approx(4.0 / 3.0));

  const GainReport mid = throughput_gain(base.with_lambda(0.5 * (1.0 / f + 1.0 / g)));
  CHECK(mid.branch == GainBranch::FdSaturated);

  // lambda = 1/F: branch formulas agree.
  const double at_f = 1.0 / f;
  const double branch1 = 2.0 * std::exp(at_f * (g - f));
  const double branch2 = 2.0 / (at_f * f) * std::exp(at_f * g - 1.0);
  CHECK(branch1 == doctest::Approx(branch2).epsilon(1e-12));

  for (double edge : {1.0 / f, 1.0 / g}) {
    const double below = throughput_gain(base.with_lambda(edge * (1.0 - 1e-12))).tg;
    const double above = throughput_gain(base.with_lambda(edge * (1.0 + 1e-12))).tg;
    CHECK(std::abs(below - above) <= 1e-9);
  }
}

TEST_CASE("throughput gain exceeds 1 everywhere and respects its bounds") {
  for (const GridPoint& p : criterion_grid()) {
    for (double lambda : {1e-4, 0.01, 0.05, 0.3, 1.0, 5.0, 50.0}) {
      const NetworkConfig c(lambda, p.theta, p.r_link, p.alpha);
      const GainReport r = throughput_gain(c);
      CHECK(r.tg > 1.0);
      CHECK(r.lower <= r.upper);
      CHECK(r.tg >= r.lower * (1.0 - 1e-6));
      CHECK(r.tg <= r.upper * (1.0 + 1e-6));
      if (r.branch == GainBranch::BothSaturated) CHECK(r.tg < 2.0 / (1.0 + c.delta()));
      CHECK(rel_close(r.tg, optimal_fd(c).t_max / optimal_hd(c).t_max, 1e-12));
    }
  }
}
