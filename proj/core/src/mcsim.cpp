#include "fdnet/mcsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "fdnet/error.hpp"

namespace fdnet::mcsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kChunkTrials = 1024;
constexpr std::uint64_t kDrawsPerLink = 6;

// Received power per unit fading at squared distance d2.
inline double path_gain(double d2, double alpha) {
  if (alpha == 4.0) return 1.0 / (d2 * d2);
  return std::pow(d2, -0.5 * alpha);
}

LinkState state_from_uniform(double u, const MacProfile& mac) {
  if (u < mac.p0()) return LinkState::Silent;
  if (u < mac.p0() + mac.p1()) return LinkState::HalfDuplex;
  return LinkState::FullDuplex;
}

std::uint64_t draw_link_count(double lambda, double window_radius, CounterRng& rng) {
  const double mean = lambda * std::numbers::pi * window_radius * window_radius;
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> count(mean);
  return count(rng);
}

void require_window(double window_radius) {
  if (!(window_radius > 0.0) || !std::isfinite(window_radius)) {
    throw DomainError("window_radius must be finite and > 0");
  }
}

// Streams one realization and returns the interference at the origin. Stops
// early (returning a partial sum) once the sum reaches stop_at.
double stream_interference(const NetworkConfig& config, const MacProfile& mac, double window_radius,
                           CounterRng& rng, double stop_at) {
  const double alpha = config.alpha();
  const double big_r = config.r_link();
  const double w2 = window_radius * window_radius;
  const std::uint64_t n = draw_link_count(config.lambda(), window_radius, rng);

  double interference = 0.0;
  for (std::uint64_t k = 0; k < n; ++k) {
    const double u_radius = rng.uniform();
    const double u_angle = rng.uniform();
    const double u_mark = rng.uniform();
    const LinkState state = state_from_uniform(rng.uniform(), mac);
    if (state == LinkState::Silent) {
      rng.discard(2);
      continue;
    }
    const double r2 = w2 * u_radius;
    interference += rng.exponential() * path_gain(r2, alpha);
    if (state == LinkState::FullDuplex) {
      // Only the angle between x and the mark direction matters for |m(x)|.
      const double r = std::sqrt(r2);
      const double cos_rel = std::cos(kTwoPi * u_mark - kTwoPi * u_angle);
      const double m2 = std::max(0.0, r2 + big_r * big_r + 2.0 * r * big_r * cos_rel);
      interference += rng.exponential() * path_gain(m2, alpha);
    } else {
      rng.discard(1);
    }
    if (interference >= stop_at) return interference;
  }
  return interference;
}

struct ChunkSum {
  double sum = 0.0;
  double sum_sq = 0.0;
};

// Evaluates trial_value(i) for i in [0, n_trials) over a fixed chunking and
// reduces chunk sums in index order, so the result is independent of the
// number of worker threads.
template <class TrialValue>
ChunkSum run_trials(std::uint64_t n_trials, unsigned threads, const TrialValue& trial_value) {
  const std::uint64_t n_chunks = (n_trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<ChunkSum> chunks(n_chunks);

  auto work = [&](std::atomic<std::uint64_t>& next) {
    for (std::uint64_t c = next++; c < n_chunks; c = next++) {
      const std::uint64_t begin = c * kChunkTrials;
      const std::uint64_t end = std::min(n_trials, begin + kChunkTrials);
      ChunkSum local;
      for (std::uint64_t i = begin; i < end; ++i) {
        const double v = trial_value(i);
        local.sum += v;
        local.sum_sq += v * v;
      }
      chunks[c] = local;
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n_chunks));
  std::atomic<std::uint64_t> next{0};
  if (threads <= 1) {
    work(next);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back([&] { work(next); });
  }

  ChunkSum total;
  for (const ChunkSum& c : chunks) {
    total.sum += c.sum;
    total.sum_sq += c.sum_sq;
  }
  return total;
}

}  // namespace

Point partner(const LinkSample& link, double r_link) {
  return {link.x.x + r_link * std::cos(link.phi), link.x.y + r_link * std::sin(link.phi)};
}

double default_window_radius(const NetworkConfig& config, const MacProfile& mac) {
  const double floor = kMinWindowLinks * config.r_link();
  const double active_density = config.lambda() * mac.transmit_load();
  if (active_density <= 0.0) return floor;
  const double alpha = config.alpha();
  const double needed = std::pow(
      kTwoPi * active_density * config.s() / ((alpha - 2.0) * kWindowTruncation), 1.0 / (alpha - 2.0));
  return std::max(floor, needed);
}

double default_laplace_window_radius(const NetworkConfig& config, double s_arg) {
  if (!(s_arg > 0.0)) throw DomainError("s_arg must be > 0");
  const double floor = kMinWindowLinks * config.r_link();
  const double active_density = 2.0 * config.lambda();
  if (active_density <= 0.0) return floor;
  const double alpha = config.alpha();
  const double needed = std::pow(
      kTwoPi * active_density * s_arg / ((alpha - 2.0) * kWindowTruncation), 1.0 / (alpha - 2.0));
  return std::max(floor, needed);
}

NetworkRealization sample_realization(const NetworkConfig& config, const MacProfile& mac,
                                      double window_radius, CounterRng& rng) {
  require_window(window_radius);
  NetworkRealization out{{}, window_radius, config, mac};
  const std::uint64_t n = draw_link_count(config.lambda(), window_radius, rng);
  out.links.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    const double radius = window_radius * std::sqrt(rng.uniform());
    const double angle = kTwoPi * rng.uniform();
    LinkSample link;
    link.x = {radius * std::cos(angle), radius * std::sin(angle)};
    link.phi = kTwoPi * rng.uniform();
    link.state = state_from_uniform(rng.uniform(), mac);
    link.h_x = rng.exponential();
    link.h_mx = rng.exponential();
    out.links.push_back(link);
  }
  return out;
}

double interference_at_origin(const NetworkRealization& realization) {
  const double alpha = realization.config.alpha();
  const double big_r = realization.config.r_link();
  double interference = 0.0;
  for (const LinkSample& link : realization.links) {
    if (link.state == LinkState::Silent) continue;
    interference += link.h_x * path_gain(link.x.x * link.x.x + link.x.y * link.x.y, alpha);
    if (link.state == LinkState::FullDuplex) {
      const Point m = partner(link, big_r);
      interference += link.h_mx * path_gain(m.x * m.x + m.y * m.y, alpha);
    }
  }
  return interference;
}

TrialOutcome sir_trial(const NetworkConfig& config, const MacProfile& mac, double window_radius,
                       CounterRng& rng) {
  const double signal = rng.exponential() * std::pow(config.r_link(), -config.alpha());
  const NetworkRealization realization = sample_realization(config, mac, window_radius, rng);
  TrialOutcome out;
  out.link_count = realization.links.size();
  out.interference = interference_at_origin(realization);
  out.sir = out.interference > 0.0 ? signal / out.interference : std::numeric_limits<double>::infinity();
  out.success = signal > config.theta() * out.interference;
  return out;
}

bool sir_trial_success(const NetworkConfig& config, const MacProfile& mac, double window_radius,
                       CounterRng& rng) {
  require_window(window_radius);
  const double signal = rng.exponential() * std::pow(config.r_link(), -config.alpha());
  // Outage once theta * I >= signal.
  const double outage_at = signal / config.theta();
  const double interference = stream_interference(config, mac, window_radius, rng, outage_at);
  return signal > config.theta() * interference;
}

Estimate estimate_ps(const NetworkConfig& config, const MacProfile& mac, std::uint64_t n_trials,
                     double window_radius, std::uint64_t master_seed, unsigned threads) {
  if (n_trials < 1) throw DomainError("n_trials must be >= 1");
  require_window(window_radius);
  const ChunkSum total = run_trials(n_trials, threads, [&](std::uint64_t i) {
    CounterRng rng(master_seed, i, kSirStream);
    return sir_trial_success(config, mac, window_radius, rng) ? 1.0 : 0.0;
  });
  const double n = static_cast<double>(n_trials);
  const double mean = total.sum / n;
  return {mean, 1.96 * std::sqrt(mean * (1.0 - mean) / n), n_trials, master_seed};
}

Estimate estimate_laplace_fd(const NetworkConfig& config, double s_arg, std::uint64_t n_trials,
                             double window_radius, std::uint64_t master_seed, unsigned threads) {
  if (!(s_arg > 0.0) || !std::isfinite(s_arg)) throw DomainError("s_arg must be finite and > 0");
  if (n_trials < 1) throw DomainError("n_trials must be >= 1");
  require_window(window_radius);
  const MacProfile fd_only(0.0, 0.0, 1.0);
  const double no_stop = std::numeric_limits<double>::infinity();
  const ChunkSum total = run_trials(n_trials, threads, [&](std::uint64_t i) {
    CounterRng rng(master_seed, i, kLaplaceStream);
    return std::exp(-s_arg * stream_interference(config, fd_only, window_radius, rng, no_stop));
  });
  const double n = static_cast<double>(n_trials);
  const double mean = total.sum / n;
  const double variance = n > 1.0 ? std::max(0.0, (total.sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, 1.96 * std::sqrt(variance / n), n_trials, master_seed};
}

}  // namespace fdnet::mcsim
