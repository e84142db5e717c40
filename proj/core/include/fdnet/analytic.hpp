#pragma once

#include <string_view>

#include "fdnet/numerics.hpp"

namespace fdnet::analytic {

/// A network configuration (lambda, theta, R, alpha). lambda is the link
/// density per unit area, theta the SIR threshold, R the link length and
/// alpha the path-loss exponent. lambda = 0 is accepted as the empty network.
class NetworkConfig {
 public:
  NetworkConfig(double lambda, double theta, double r_link, double alpha);

  double lambda() const noexcept { return lambda_; }
  double theta() const noexcept { return theta_; }
  double r_link() const noexcept { return r_link_; }
  double alpha() const noexcept { return alpha_; }

  /// 2 / alpha, in (0, 1).
  double delta() const noexcept { return 2.0 / alpha_; }
  /// theta * R^alpha, the Laplace argument at which interference is evaluated.
  double s() const;

  NetworkConfig with_lambda(double lambda) const { return {lambda, theta_, r_link_, alpha_}; }
  NetworkConfig with_theta(double theta) const { return {lambda_, theta, r_link_, alpha_}; }
  NetworkConfig with_r_link(double r_link) const { return {lambda_, theta_, r_link, alpha_}; }
  NetworkConfig with_alpha(double alpha) const { return {lambda_, theta_, r_link_, alpha}; }

  bool operator==(const NetworkConfig&) const = default;

 private:
  double lambda_;
  double theta_;
  double r_link_;
  double alpha_;
};

/// ALOHA state probabilities: silent (p0), half duplex (p1), full duplex (p2).
class MacProfile {
 public:
  static constexpr double kSumTolerance = 1e-12;

  MacProfile(double p0, double p1, double p2);

  /// Completes p0 = 1 - p1 - p2.
  static MacProfile from_access(double p1, double p2);

  double p0() const noexcept { return p0_; }
  double p1() const noexcept { return p1_; }
  double p2() const noexcept { return p2_; }

  /// Expected number of transmitting nodes per link, p1 + 2 p2.
  double transmit_load() const noexcept { return p1_ + 2.0 * p2_; }

  bool operator==(const MacProfile&) const = default;

 private:
  double p0_;
  double p1_;
  double p2_;
};

enum class Regime { Unsaturated, Saturated };

struct OptimumReport {
  double p1_opt = 0.0;
  double p2_opt = 0.0;
  double t_max = 0.0;
  Regime regime = Regime::Unsaturated;
};

/// Which closed form of the throughput gain applies.
enum class GainBranch {
  Unsaturated,    // lambda F < 1, lambda G < 1
  FdSaturated,    // lambda F >= 1, lambda G < 1
  BothSaturated,  // lambda F >= 1, lambda G >= 1
};

struct GainReport {
  double tg = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  GainBranch branch = GainBranch::Unsaturated;
};

struct SuccessBounds {
  double lower = 0.0;
  double upper = 0.0;
};

std::string_view to_string(Regime regime);
std::string_view to_string(GainBranch branch);

/// HD interference functional G(s, alpha) = pi^2 delta s^delta / sin(pi delta).
double g_fn(double s, double alpha);

/// K(s, r, R, alpha) = int_0^{2pi} dphi / (1 + s d^-alpha), where
/// d^2 = r^2 + R^2 + 2 r R cos(phi) is the distance to the partner node.
double k_fn(double s, double r, double big_r, double alpha, const numerics::QuadratureSpec& spec = {});

/// 2pi - K, computed without cancellation as int_0^{2pi} dphi / (1 + d^alpha / s).
double k_complement_fn(double s, double r, double big_r, double alpha,
                       const numerics::QuadratureSpec& spec = {});

/// FD interference functional
///   F(s, alpha, R) = int_0^inf (2pi - K(s, r, R, alpha) / (1 + s r^-alpha)) r dr.
/// Results are memoized per (s, alpha, R, spec). Every result is checked
/// against (1 + delta) G <= F <= 2 G (1e-6 relative slack); a violation
/// raises ConsistencyError.
double f_fn(double s, double alpha, double big_r, const numerics::QuadratureSpec& spec = {});

/// G and F evaluated at the configuration's (theta R^alpha, alpha, R).
double hd_functional(const NetworkConfig& config);
double fd_functional(const NetworkConfig& config, const numerics::QuadratureSpec& spec = {});

double success_probability(const NetworkConfig& config, const MacProfile& mac,
                           const numerics::QuadratureSpec& spec = {});

/// Closed-form bounds exp(-lambda (p1 + 2 p2) G) <= p_s <= exp(-lambda (p1 + (1 + delta) p2) G).
SuccessBounds success_bounds(const NetworkConfig& config, const MacProfile& mac);

/// Success probability when each FD pair is treated as co-located. Equal to
/// success_bounds().upper.
double ps_colocated_approx(const NetworkConfig& config, const MacProfile& mac);

/// (p1 + 2 p2) p_s.
double throughput(const NetworkConfig& config, const MacProfile& mac,
                  const numerics::QuadratureSpec& spec = {});
double throughput_hd(const NetworkConfig& config, double p1);
double throughput_fd(const NetworkConfig& config, double p2,
                     const numerics::QuadratureSpec& spec = {});

OptimumReport optimal_hd(const NetworkConfig& config);
OptimumReport optimal_fd(const NetworkConfig& config, const numerics::QuadratureSpec& spec = {});

/// Best (p1, p2) over the whole simplex. Always p1 = 0 with the FD-only optimum.
OptimumReport optimal_mixed(const NetworkConfig& config, const numerics::QuadratureSpec& spec = {});

/// Brute-force check of optimal_mixed: a (steps+1) x (steps+1) grid over
/// {p1, p2 >= 0, p1 + p2 <= 1}, followed by a local grid refinement around
/// the best grid point.
struct SimplexSearch {
  double grid_best_t = 0.0;
  double grid_best_p1 = 0.0;
  double grid_best_p2 = 0.0;
  double refined_best_t = 0.0;
  double refined_best_p1 = 0.0;
  double refined_best_p2 = 0.0;
};
SimplexSearch search_simplex(const NetworkConfig& config, int steps = 400,
                             const numerics::QuadratureSpec& spec = {});

/// Ratio of the FD-only to the HD-only maximal throughput with its closed-form bounds.
GainReport throughput_gain(const NetworkConfig& config, const numerics::QuadratureSpec& spec = {});

}  // namespace fdnet::analytic
