#pragma once

#include <cstdint>
#include <vector>

#include "fdnet/analytic.hpp"
#include "fdnet/random.hpp"

namespace fdnet::mcsim {

using analytic::MacProfile;
using analytic::NetworkConfig;

enum class LinkState : std::uint8_t { Silent, HalfDuplex, FullDuplex };

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// One interfering link: transmitter x, partner m(x) = x + R (cos phi, sin phi).
struct LinkSample {
  Point x;
  double phi = 0.0;
  LinkState state = LinkState::Silent;
  double h_x = 1.0;   // fading power from x to the origin
  double h_mx = 1.0;  // fading power from m(x) to the origin
};

Point partner(const LinkSample& link, double r_link);

struct NetworkRealization {
  std::vector<LinkSample> links;
  double window_radius = 0.0;
  NetworkConfig config;
  MacProfile mac;
};

/// A Monte Carlo mean with its normal-approximation 95% half-width.
struct Estimate {
  double mean = 0.0;
  double half_width_95 = 0.0;
  std::uint64_t n_trials = 0;
  std::uint64_t seed = 0;
};

struct TrialOutcome {
  bool success = false;
  double sir = 0.0;  // +inf when there is no interference
  double interference = 0.0;
  std::size_t link_count = 0;
};

/// Expected interference from beyond the window must stay below this
/// fraction of theta^-1 R^-alpha (the success threshold on I).
inline constexpr double kWindowTruncation = 1e-4;
/// Floor on the window radius, in link lengths.
inline constexpr double kMinWindowLinks = 50.0;

/// max(50 R, W) where W solves 2 pi lambda_t W^(2-alpha) / (alpha-2) = 1e-4 / (theta R^alpha)
/// and lambda_t = lambda (p1 + 2 p2) is the density of transmitting nodes.
double default_window_radius(const NetworkConfig& config, const MacProfile& mac);

/// Same rule for the FD-only Laplace experiment at argument s_arg.
double default_laplace_window_radius(const NetworkConfig& config, double s_arg);

/// Draws the links whose transmitter lies in the disk of radius
/// window_radius around the origin. Draw order per realization: Poisson
/// count, then for each link (radius, angle, mark, state, h_x, h_mx).
NetworkRealization sample_realization(const NetworkConfig& config, const MacProfile& mac,
                                      double window_radius, CounterRng& rng);

/// Interference at the origin: HD links radiate from x, FD links from x and m(x).
double interference_at_origin(const NetworkRealization& realization);

/// One typical-link experiment: draws the desired fading, then a realization,
/// and compares h R^-alpha against theta I.
TrialOutcome sir_trial(const NetworkConfig& config, const MacProfile& mac, double window_radius,
                       CounterRng& rng);

/// Same draws and decision as sir_trial without materializing the
/// realization; stops as soon as the accumulated interference already
/// forces an outage.
bool sir_trial_success(const NetworkConfig& config, const MacProfile& mac, double window_radius,
                       CounterRng& rng);

/// Stream purposes; trial i uses CounterRng(seed, i, purpose).
inline constexpr std::uint64_t kSirStream = 1;
inline constexpr std::uint64_t kLaplaceStream = 2;

/// threads = 0 uses std::thread::hardware_concurrency(). The result does not
/// depend on the thread count.
Estimate estimate_ps(const NetworkConfig& config, const MacProfile& mac, std::uint64_t n_trials,
                     double window_radius, std::uint64_t master_seed, unsigned threads = 0);

/// Empirical E[exp(-s_arg I2)] over FD-only realizations (p2 = 1).
Estimate estimate_laplace_fd(const NetworkConfig& config, double s_arg, std::uint64_t n_trials,
                             double window_radius, std::uint64_t master_seed, unsigned threads = 0);

}  // namespace fdnet::mcsim
