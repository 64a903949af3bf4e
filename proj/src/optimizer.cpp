#include "bmimap/optimizer.hpp"

#include <cmath>
#include <vector>

#include "bmimap/rng.hpp"
#include "bmimap/sampler.hpp"
#include "bmimap/transforms.hpp"

namespace bmimap::optimizer {

OptimConfig default_percentile_config(std::uint64_t seed) {
  return {0.002, 0.005, 5000, 1000, seed};
}

OptimConfig default_bmi_config(std::uint64_t seed) {
  return {0.01, 0.1, 5000, 1000, seed};
}

double smooth_update(double z, double m_z, double s_z, double delta_m,
                     double delta_s) {
  if (!(s_z > 0.0))
    throw std::domain_error("smooth_update: s_z must be positive");
  if (!(s_z + delta_s > 0.0))
    throw std::domain_error("smooth_update: step would make s_z non-positive");
  return (1.0 + delta_s / s_z) * (z - m_z) + (m_z + delta_m);
}

double delta_from_comparison(double simulated, double observed,
                             const OptimConfig& cfg) {
  const double diff = simulated - observed;
  if (std::abs(diff) <= cfg.delta_tol) return 0.0;
  return diff < 0.0 ? cfg.delta_step : -cfg.delta_step;
}

double truncate_z(double z, double lambda, double sigma) {
  const double bound = charts::z_upper_bound(lambda, sigma);
  // At z == bound the Box-Cox base is exactly zero, so the boundary
  // itself must truncate too.
  return z >= bound ? 0.99 * bound : z;
}

namespace {

// Period-2 limit-cycle detector on the applied delta sequence.
class OscillationTracker {
 public:
  void observe(double delta) {
    if (delta != 0.0 && delta == -prev_ && prev_ != 0.0)
      ++run_;
    else
      run_ = 0;
    prev_ = delta;
    if (run_ > 50) detected_ = true;
  }
  bool detected() const { return detected_; }

 private:
  double prev_ = 0.0;
  int run_ = 0;
  bool detected_ = false;
};

}  // namespace

MappedAggregate map_percentile_to_z_optim(const PercentileMoments& obs,
                                          const OptimConfig& cfg) {
  if (!obs.feasible())
    throw infeasible_input_error("percentile moments infeasible");
  if (cfg.n_samples < 2) throw std::domain_error("n_samples must be >= 2");

  Rng rng(cfg.seed);
  double m = 0.0, s = 1.0;
  std::vector<double> z(cfg.n_samples);
  for (auto& zi : z) zi = rng.normal();

  std::vector<double> p(cfg.n_samples);
  OscillationTracker osc_m, osc_s;
  std::size_t t = 0;
  bool converged = false;
  for (;;) {
    for (std::size_t i = 0; i < cfg.n_samples; ++i)
      p[i] = transforms::percentile_from_z(z[i]);
    auto [pbar, psd] = sampler::mean_sd(p);
    double dm = delta_from_comparison(pbar, obs.mean, cfg);
    double ds = delta_from_comparison(psd, obs.sd, cfg);
    if (dm == 0.0 && ds == 0.0) {
      converged = true;
      break;
    }
    if (t >= cfg.n_max) break;
    if (s + ds <= 0.0) ds = cfg.delta_step - s;  // keep s_z positive
    for (auto& zi : z) zi = smooth_update(zi, m, s, dm, ds);
    m += dm;
    s += ds;
    ++t;
    osc_m.observe(dm);
    osc_s.observe(ds);
  }

  auto [zbar, zsd] = sampler::mean_sd(z);
  MappedAggregate out;
  out.mean = zbar;
  out.sd = zsd;
  out.method = Method::optim;
  out.n_samples = cfg.n_samples;
  out.converged = converged;
  out.iterations = t;
  out.dist_mean = m;
  out.dist_sd = s;
  out.oscillation_detected = osc_m.detected() || osc_s.detected();
  return out;
}

MappedAggregate map_bmi_to_z_optim(const AggregateOutcome& obs,
                                   const Demographics& demo,
                                   const charts::LmsChart& chart,
                                   AgeDist age_kind, const OptimConfig& cfg) {
  if (obs.scale != Scale::bmi)
    throw std::domain_error("map_bmi_to_z_optim: outcome is not on BMI");
  if (!(obs.mean > 0.0) || !(obs.sd > 0.0))
    throw std::domain_error("BMI mean and sd must be positive");
  if (cfg.n_samples < 2) throw std::domain_error("n_samples must be >= 2");

  Rng rng(cfg.seed);
  const std::size_t n = cfg.n_samples;
  double m = 0.0, s = 1.0;
  std::vector<double> z(n);
  std::vector<charts::LmsParams> lms(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = rng.normal();
    const charts::Sex sex = rng.bernoulli(demo.prop_male)
                                ? charts::Sex::male
                                : charts::Sex::female;
    const double age = sampler::sample_age(age_kind, demo, chart, rng);
    lms[i] = chart.lookup(age, sex);
  }

  // The running z vector stays untruncated so the smooth-update
  // invariant holds; truncation applies when converting to BMI and to
  // the final sample estimates.
  std::vector<double> z_trunc(n), b(n);
  OscillationTracker osc_m, osc_s;
  std::size_t t = 0;
  std::size_t truncated = 0;
  bool converged = false;
  for (;;) {
    truncated = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& q = lms[i];
      if (q.lambda == 0.0) {
        z_trunc[i] = z[i];
        b[i] = q.mu * std::exp(q.sigma * z[i]);
      } else if (q.lambda < 0.0) {
        z_trunc[i] = truncate_z(z[i], q.lambda, q.sigma);
        if (z_trunc[i] != z[i]) ++truncated;
        b[i] = transforms::bmi_from_z(z_trunc[i], q.lambda, q.mu, q.sigma);
      } else {
        // Positive lambda bounds z from below instead.
        const double lower = -1.0 / (q.lambda * q.sigma);
        z_trunc[i] = z[i] <= lower ? 0.99 * lower : z[i];
        if (z_trunc[i] != z[i]) ++truncated;
        b[i] = transforms::bmi_from_z(z_trunc[i], q.lambda, q.mu, q.sigma);
      }
    }
    auto [bbar, bsd] = sampler::mean_sd(b);
    double dm = delta_from_comparison(bbar, obs.mean, cfg);
    double ds = delta_from_comparison(bsd, obs.sd, cfg);
    if (dm == 0.0 && ds == 0.0) {
      converged = true;
      break;
    }
    if (t >= cfg.n_max) break;
    if (s + ds <= 0.0) ds = cfg.delta_step - s;
    for (auto& zi : z) zi = smooth_update(zi, m, s, dm, ds);
    m += dm;
    s += ds;
    ++t;
    osc_m.observe(dm);
    osc_s.observe(ds);
  }

  auto [zbar, zsd] = sampler::mean_sd(z_trunc);
  MappedAggregate out;
  out.mean = zbar;
  out.sd = zsd;
  out.method = Method::optim;
  out.n_samples = n;
  out.converged = converged;
  out.iterations = t;
  out.dist_mean = m;
  out.dist_sd = s;
  out.truncated_fraction = static_cast<double>(truncated) / n;
  out.oscillation_detected = osc_m.detected() || osc_s.detected();
  return out;
}

}  // namespace bmimap::optimizer
