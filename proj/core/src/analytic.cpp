#include "fdnet/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include "fdnet/error.hpp"

namespace fdnet::analytic {

namespace {

using numerics::QuadratureSpec;
constexpr double kPi = std::numbers::pi;
constexpr double kSandwichSlack = 1e-6;

void require_s_alpha(double s, double alpha) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("s must be finite and > 0");
  if (!(alpha > 2.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and > 2");
}

void require_geometry(double r, double big_r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("r must be finite and >= 0");
  if (!(big_r > 0.0) || !std::isfinite(big_r)) throw DomainError("R must be finite and > 0");
}

// |x + R e^{i phi}|^2 for |x| = r, written as (r - R)^2 + 4 r R cos^2(phi/2):
// the textbook r^2 + R^2 + 2 r R cos(phi) cancels near phi = pi when r ~ R >> 1.
double partner_distance_sq(double r, double big_r, double phi) {
  const double c = std::cos(0.5 * phi);
  return (r - big_r) * (r - big_r) + 4.0 * r * big_r * c * c;
}

// Inner quadratures run tighter than the outer F integral so their error
// does not show up as noise in the outer error estimate.
QuadratureSpec inner_spec(const QuadratureSpec& outer) {
  QuadratureSpec inner = outer;
  inner.rel_tol = std::max(outer.rel_tol * 1e-3, 1e-14);
  inner.abs_tol = 0.0;
  return inner;
}

using FKey = std::tuple<double, double, double, double, double, int>;

std::mutex& f_cache_mutex() {
  static std::mutex m;
  return m;
}

std::map<FKey, double>& f_cache() {
  static std::map<FKey, double> cache;
  return cache;
}

// J = int_0^inf r Kbar(r) / (1 + r^alpha / s) dr, so that F = 2G - J.
// The integrand decays like r^(1 - 2 alpha).
double f_correlation_term(double s, double alpha, double big_r, const QuadratureSpec& spec) {
  const QuadratureSpec inner = inner_spec(spec);
  const numerics::Integrand integrand = [&](double r) {
    if (r == 0.0) return 0.0;
    const double kbar = k_complement_fn(s, r, big_r, alpha, inner);
    return r * kbar / (1.0 + std::pow(r, alpha) / s);
  };
  // Split at the link length, where the partner can sit on the origin.
  const double near = numerics::integrate_finite(integrand, 0.0, big_r, spec);
  const double far = numerics::integrate_semi_infinite(integrand, big_r, spec);
  return near + far;
}

void check_probability_triple(double p0, double p1, double p2) {
  for (double p : {p0, p1, p2}) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("MAC probabilities must lie in [0, 1]");
  }
  if (std::abs(p0 + p1 + p2 - 1.0) > MacProfile::kSumTolerance) {
    throw DomainError("MAC probabilities must satisfy p0 + p1 + p2 = 1");
  }
}

double simplex_throughput(double lambda, double g, double f, double p1, double p2) {
  return (p1 + 2.0 * p2) * std::exp(-lambda * (p1 * g + p2 * f));
}

}  // namespace

NetworkConfig::NetworkConfig(double lambda, double theta, double r_link, double alpha)
    : lambda_(lambda), theta_(theta), r_link_(r_link), alpha_(alpha) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and >= 0");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("theta must be finite and > 0");
  if (!(r_link > 0.0) || !std::isfinite(r_link)) throw DomainError("R must be finite and > 0");
  if (!(alpha > 2.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and > 2");
}

double NetworkConfig::s() const { return theta_ * std::pow(r_link_, alpha_); }

MacProfile::MacProfile(double p0, double p1, double p2) : p0_(p0), p1_(p1), p2_(p2) {
  check_probability_triple(p0, p1, p2);
}

MacProfile MacProfile::from_access(double p1, double p2) {
  double p0 = 1.0 - p1 - p2;
  if (p0 < 0.0 && p0 > -kSumTolerance) p0 = 0.0;
  return {p0, p1, p2};
}

std::string_view to_string(Regime regime) {
  return regime == Regime::Saturated ? "saturated" : "unsaturated";
}

std::string_view to_string(GainBranch branch) {
  switch (branch) {
    case GainBranch::Unsaturated: return "unsaturated";
    case GainBranch::FdSaturated: return "fd_saturated";
    case GainBranch::BothSaturated: return "both_saturated";
  }
  return "unknown";
}

double g_fn(double s, double alpha) {
  require_s_alpha(s, alpha);
  const double delta = 2.0 / alpha;
  return kPi * kPi * delta * std::pow(s, delta) / std::sin(kPi * delta);
}

double k_fn(double s, double r, double big_r, double alpha, const QuadratureSpec& spec) {
  require_s_alpha(s, alpha);
  require_geometry(r, big_r);
  const numerics::Integrand integrand = [=](double phi) {
    const double d_alpha = std::pow(partner_distance_sq(r, big_r, phi), 0.5 * alpha);
    return 1.0 / (1.0 + s / d_alpha);
  };
  // The integrand is even about phi = pi.
  return 2.0 * numerics::integrate_finite(integrand, 0.0, kPi, spec);
}

double k_complement_fn(double s, double r, double big_r, double alpha, const QuadratureSpec& spec) {
  require_s_alpha(s, alpha);
  require_geometry(r, big_r);
  const numerics::Integrand integrand = [=](double phi) {
    const double d_alpha = std::pow(partner_distance_sq(r, big_r, phi), 0.5 * alpha);
    return 1.0 / (1.0 + d_alpha / s);
  };
  return 2.0 * numerics::integrate_finite(integrand, 0.0, kPi, spec);
}

double f_fn(double s, double alpha, double big_r, const QuadratureSpec& spec) {
  require_s_alpha(s, alpha);
  require_geometry(0.0, big_r);
  spec.validate();

  const FKey key{s, alpha, big_r, spec.rel_tol, spec.abs_tol, spec.max_subdivisions};
  {
    std::lock_guard lock(f_cache_mutex());
    if (auto it = f_cache().find(key); it != f_cache().end()) return it->second;
  }

  const double g = g_fn(s, alpha);
  const double delta = 2.0 / alpha;
  double correlation = 0.0;
  try {
    correlation = f_correlation_term(s, alpha, big_r, spec);
  } catch (const NonConvergenceError& e) {
    std::ostringstream os;
    os.precision(12);
    os << "F(s=" << s << ", alpha=" << alpha << ", R=" << big_r << "): " << e.what();
    throw NonConvergenceError(os.str(), 2.0 * g - e.estimate(), e.error_bound());
  }
  const double f = 2.0 * g - correlation;

  if (f < (1.0 + delta) * g * (1.0 - kSandwichSlack) || f > 2.0 * g * (1.0 + kSandwichSlack)) {
    std::ostringstream os;
    os.precision(12);
    os << "F(s=" << s << ", alpha=" << alpha << ", R=" << big_r << ") = " << f
       << " violates (1+delta)G <= F <= 2G with G = " << g;
    throw ConsistencyError(os.str());
  }

  std::lock_guard lock(f_cache_mutex());
  f_cache().emplace(key, f);
  return f;
}

double hd_functional(const NetworkConfig& config) { return g_fn(config.s(), config.alpha()); }

double fd_functional(const NetworkConfig& config, const QuadratureSpec& spec) {
  return f_fn(config.s(), config.alpha(), config.r_link(), spec);
}

double success_probability(const NetworkConfig& config, const MacProfile& mac, const QuadratureSpec& spec) {
  const double lambda = config.lambda();
  const double hd_term = std::exp(-lambda * mac.p1() * hd_functional(config));
  if (mac.p2() == 0.0 || lambda == 0.0) return hd_term;
  return hd_term * std::exp(-lambda * mac.p2() * fd_functional(config, spec));
}

SuccessBounds success_bounds(const NetworkConfig& config, const MacProfile& mac) {
  const double lg = config.lambda() * hd_functional(config);
  const double lower = std::exp(-lg * (mac.p1() + 2.0 * mac.p2()));
  const double upper = std::exp(-lg * (mac.p1() + (1.0 + config.delta()) * mac.p2()));
  return {lower, upper};
}

double ps_colocated_approx(const NetworkConfig& config, const MacProfile& mac) {
  const double lg = config.lambda() * hd_functional(config);
  return std::exp(-lg * mac.p1()) * std::exp(-lg * mac.p2() * (1.0 + config.delta()));
}

double throughput(const NetworkConfig& config, const MacProfile& mac, const QuadratureSpec& spec) {
  return mac.transmit_load() * success_probability(config, mac, spec);
}

double throughput_hd(const NetworkConfig& config, double p1) {
  return throughput(config, MacProfile::from_access(p1, 0.0));
}

double throughput_fd(const NetworkConfig& config, double p2, const QuadratureSpec& spec) {
  return throughput(config, MacProfile::from_access(0.0, p2), spec);
}

OptimumReport optimal_hd(const NetworkConfig& config) {
  const double lg = config.lambda() * hd_functional(config);
  if (lg >= 1.0) return {1.0 / lg, 0.0, std::exp(-1.0) / lg, Regime::Saturated};
  return {1.0, 0.0, std::exp(-lg), Regime::Unsaturated};
}

OptimumReport optimal_fd(const NetworkConfig& config, const QuadratureSpec& spec) {
  const double lf = config.lambda() * fd_functional(config, spec);
  if (lf >= 1.0) return {0.0, 1.0 / lf, 2.0 * std::exp(-1.0) / lf, Regime::Saturated};
  return {0.0, 1.0, 2.0 * std::exp(-lf), Regime::Unsaturated};
}

OptimumReport optimal_mixed(const NetworkConfig& config, const QuadratureSpec& spec) {
  // The throughput surface over the simplex peaks on the p1 = 0 edge for
  // every configuration, so the mixed optimum is the FD-only one.
  return optimal_fd(config, spec);
}

SimplexSearch search_simplex(const NetworkConfig& config, int steps, const QuadratureSpec& spec) {
  if (steps < 1) throw DomainError("search_simplex needs steps >= 1");
  const double lambda = config.lambda();
  const double g = hd_functional(config);
  const double f = fd_functional(config, spec);
  const double h = 1.0 / steps;

  SimplexSearch out;
  out.grid_best_t = -1.0;
  for (int i = 0; i <= steps; ++i) {
    const double p1 = i * h;
    for (int j = 0; i + j <= steps; ++j) {
      const double p2 = j * h;
      const double t = simplex_throughput(lambda, g, f, p1, p2);
      if (t > out.grid_best_t) {
        out.grid_best_t = t;
        out.grid_best_p1 = p1;
        out.grid_best_p2 = p2;
      }
    }
  }

  out.refined_best_t = out.grid_best_t;
  out.refined_best_p1 = out.grid_best_p1;
  out.refined_best_p2 = out.grid_best_p2;
  constexpr int kSub = 20;
  double radius = h;
  for (int round = 0; round < 4; ++round) {
    const double c1 = out.refined_best_p1;
    const double c2 = out.refined_best_p2;
    for (int a = -kSub; a <= kSub; ++a) {
      const double p1 = c1 + radius * a / kSub;
      if (p1 < 0.0 || p1 > 1.0) continue;
      for (int b = -kSub; b <= kSub; ++b) {
        const double p2 = c2 + radius * b / kSub;
        if (p2 < 0.0 || p1 + p2 > 1.0) continue;
        const double t = simplex_throughput(lambda, g, f, p1, p2);
        if (t > out.refined_best_t) {
          out.refined_best_t = t;
          out.refined_best_p1 = p1;
          out.refined_best_p2 = p2;
        }
      }
    }
    radius /= kSub;
  }
  return out;
}

GainReport throughput_gain(const NetworkConfig& config, const QuadratureSpec& spec) {
  const double lambda = config.lambda();
  const double delta = config.delta();
  const double g = hd_functional(config);
  const double f = fd_functional(config, spec);
  const double lg = lambda * g;
  const double lf = lambda * f;

  GainReport report;
  if (lf < 1.0) {
    if (lg >= 1.0) throw ConsistencyError("lambda F < 1 with lambda G >= 1 contradicts F > G");
    report.branch = GainBranch::Unsaturated;
    report.tg = 2.0 * std::exp(lambda * (g - f));
    report.lower = 2.0 * std::exp(-lg);
    report.upper = 2.0 * std::exp(-delta * lg);
  } else if (lg < 1.0) {
    report.branch = GainBranch::FdSaturated;
    report.tg = 2.0 / lf * std::exp(lg - 1.0);
    report.lower = std::exp(lg - 1.0) / lg;
    report.upper = 2.0 * std::exp(lg - 1.0) / ((1.0 + delta) * lg);
  } else {
    report.branch = GainBranch::BothSaturated;
    report.tg = 2.0 * g / f;
    report.lower = 1.0;
    report.upper = 2.0 / (1.0 + delta);
  }

  if (report.lower > report.upper || report.tg < report.lower * (1.0 - kSandwichSlack) ||
      report.tg > report.upper * (1.0 + kSandwichSlack)) {
    std::ostringstream os;
    os.precision(12);
    os << "throughput gain " << report.tg << " outside [" << report.lower << ", " << report.upper << "]";
    throw ConsistencyError(os.str());
  }
  return report;
}

}  // namespace fdnet::analytic
