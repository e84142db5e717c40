#pragma once

#include <stdexcept>
#include <string>

namespace fdnet {

// Argument outside the domain of an operation (alpha <= 2, p0+p1+p2 != 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Adaptive quadrature ran out of subdivisions. Carries the best estimate
// reached and its error bound so callers can decide whether to accept it.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

// A mathematical identity that must hold did not (e.g. F outside its
// (1+delta)G..2G sandwich, or an impossible throughput-gain regime).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace fdnet
