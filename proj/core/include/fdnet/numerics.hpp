#pragma once

#include <functional>

namespace fdnet::numerics {

/// Tolerance contract for the adaptive integrators. A result Q is accepted
/// once the summed error estimate is below max(abs_tol, rel_tol * |Q|).
struct QuadratureSpec {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;

  /// Throws DomainError unless rel_tol > 0, abs_tol >= 0, max_subdivisions >= 1.
  void validate() const;
};

/// Upper end of the mapped variable t for semi-infinite integrals.
inline constexpr double kSemiInfiniteCutoff = 1.0 - 1e-12;

using Integrand = std::function<double(double)>;

/// Global adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
/// Deterministic: the same inputs always produce the same bits.
double integrate_finite(const Integrand& f, double a, double b,
                        const QuadratureSpec& spec = {});

/// Integral of f over [a, inf) through r = a + t/(1-t), dr = dt/(1-t)^2,
/// evaluated on t in [0, kSemiInfiniteCutoff].
double integrate_semi_infinite(const Integrand& f, double a,
                               const QuadratureSpec& spec = {});

/// Gamma function for x > 0 (Lanczos approximation, relative error ~1e-15).
double gamma_fn(double x);

}  // namespace fdnet::numerics
