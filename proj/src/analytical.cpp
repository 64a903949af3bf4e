#include "bmimap/analytical.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "bmimap/specfun.hpp"

namespace bmimap::analytical {

namespace {

using Vec2 = std::array<double, 2>;

// Residual of the simultaneous equations at (m_z, s_z = exp(u)).
Vec2 residual(double m, double u, const PercentileMoments& obs) {
  const ZDistribution d{m, std::exp(u)};
  const double r_mean = expected_percentile(d) - obs.mean;
  const double r_sd = std::sqrt(std::max(variance_percentile(d), 0.0)) - obs.sd;
  return {r_mean, r_sd};
}

double norm_inf(const Vec2& r) {
  return std::max(std::abs(r[0]), std::abs(r[1]));
}

}  // namespace

double expected_percentile(const ZDistribution& d) {
  return specfun::std_normal_cdf(d.m_z / std::sqrt(1.0 + d.s_z * d.s_z));
}

double variance_percentile(const ZDistribution& d) {
  const double u = d.m_z / std::sqrt(1.0 + d.s_z * d.s_z);
  const double v = 1.0 / std::sqrt(1.0 + 2.0 * d.s_z * d.s_z);
  const double phi_u = specfun::std_normal_cdf(u);
  return phi_u - 2.0 * specfun::owens_t(u, v) - phi_u * phi_u;
}

SolveResult map_percentile_to_z_analytical(const PercentileMoments& obs,
                                           double tol, std::size_t max_iter) {
  const double eps_edge = 1e-6;
  if (obs.mean < eps_edge || obs.mean > 1.0 - eps_edge)
    throw infeasible_input_error(
        "percentile mean too close to 0 or 1 for a meaningful solve");
  if (!(obs.sd > 0.0) || obs.sd * obs.sd >= obs.mean * (1.0 - obs.mean))
    throw infeasible_input_error(
        "percentile sd violates the attainable-variance bound");

  // Exact at s_z = 1: mean = Phi(m/sqrt(2)).
  double m = specfun::std_normal_quantile(obs.mean) * std::sqrt(2.0);
  double u = 0.0;  // log s_z

  Vec2 r = residual(m, u, obs);
  SolveResult best{{m, std::exp(u)}, {0, r[0], r[1], false}};
  double best_norm = norm_inf(r);

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    if (norm_inf(r) <= tol) {
      best = {{m, std::exp(u)}, {iter, r[0], r[1], true}};
      return best;
    }
    // Central-difference Jacobian.
    const double hm = 1e-6 * std::max(1.0, std::abs(m));
    const double hu = 1e-6;
    const Vec2 rm_p = residual(m + hm, u, obs), rm_m = residual(m - hm, u, obs);
    const Vec2 ru_p = residual(m, u + hu, obs), ru_m = residual(m, u - hu, obs);
    const double j00 = (rm_p[0] - rm_m[0]) / (2.0 * hm);
    const double j10 = (rm_p[1] - rm_m[1]) / (2.0 * hm);
    const double j01 = (ru_p[0] - ru_m[0]) / (2.0 * hu);
    const double j11 = (ru_p[1] - ru_m[1]) / (2.0 * hu);
    const double det = j00 * j11 - j01 * j10;
    if (det == 0.0 || !std::isfinite(det)) break;
    const double dm = -(j11 * r[0] - j01 * r[1]) / det;
    const double du = -(-j10 * r[0] + j00 * r[1]) / det;

    // Backtracking line search on the residual norm.
    double step = 1.0;
    bool accepted = false;
    const double r0 = norm_inf(r);
    for (int bt = 0; bt < 40; ++bt) {
      const double m_try = m + step * dm;
      const double u_try = std::clamp(u + step * du, -40.0, 40.0);
      const Vec2 r_try = residual(m_try, u_try, obs);
      if (norm_inf(r_try) < r0) {
        m = m_try;
        u = u_try;
        r = r_try;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    if (norm_inf(r) < best_norm) {
      best_norm = norm_inf(r);
      best = {{m, std::exp(u)}, {iter + 1, r[0], r[1], false}};
    }
  }

  if (norm_inf(r) <= tol) {
    return {{m, std::exp(u)}, {max_iter, r[0], r[1], true}};
  }
  throw non_convergence_error("analytical solver did not converge", best);
}

}  // namespace bmimap::analytical
