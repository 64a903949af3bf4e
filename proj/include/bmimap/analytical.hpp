#ifndef BMIMAP_ANALYTICAL_HPP
#define BMIMAP_ANALYTICAL_HPP

#include "bmimap/types.hpp"

namespace bmimap::analytical {

// Closed-form mean of P = Phi(Z) when Z ~ N(m_z, s_z^2):
// Phi(m_z / sqrt(1 + s_z^2)).
double expected_percentile(const ZDistribution& d);

// Closed-form variance of P = Phi(Z):
// Phi(u) - 2 T(u, v) - Phi(u)^2 with u = m_z/sqrt(1+s_z^2),
// v = 1/sqrt(1+2 s_z^2). Always in (0, 0.25).
double variance_percentile(const ZDistribution& d);

struct SolveDiagnostics {
  std::size_t iterations = 0;
  double mean_residual = 0.0;
  double sd_residual = 0.0;
  bool converged = false;
};

struct SolveResult {
  ZDistribution dist;
  SolveDiagnostics diag;
};

struct non_convergence_error : std::runtime_error {
  non_convergence_error(const std::string& what, SolveResult best)
      : std::runtime_error(what), best_iterate(best) {}
  SolveResult best_iterate;
};

// Inverts the forward map: finds (m_z, s_z) whose percentile mean/sd
// match the observation. Damped Newton on (m_z, log s_z) with a
// finite-difference Jacobian.
SolveResult map_percentile_to_z_analytical(const PercentileMoments& obs,
                                           double tol = 1e-9,
                                           std::size_t max_iter = 100);

}  // namespace bmimap::analytical

#endif
