#include "bmimap/sampler.hpp"

#include <cmath>
#include <vector>

#include "bmimap/transforms.hpp"

namespace bmimap::sampler {

std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) throw std::domain_error("mean_sd: need at least 2 values");
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

BetaParams beta_params_from_moments(double mean, double sd) {
  if (!(mean > 0.0 && mean < 1.0) || !(sd > 0.0) ||
      sd * sd >= mean * (1.0 - mean))
    throw infeasible_input_error(
        "beta moments infeasible: need 0<mean<1 and sd^2 < mean(1-mean)");
  const double alpha = mean * mean * ((1.0 - mean) / (sd * sd) - 1.0 / mean);
  const double beta = alpha * (1.0 / mean - 1.0);
  return {alpha, beta};
}

LognormalParams lognormal_params_from_moments(double mean, double sd) {
  if (!(mean > 0.0) || !(sd > 0.0))
    throw std::domain_error("lognormal moments require mean>0 and sd>0");
  const double m = std::log(mean * mean / std::sqrt(mean * mean + sd * sd));
  const double s_sq = std::log1p(sd * sd / (mean * mean));
  return {m, s_sq};
}

double sample_age(AgeDist kind, const Demographics& demo,
                  const charts::LmsChart& chart, Rng& rng) {
  const double lo = chart.age_min_months();
  const double hi = chart.age_max_months();
  if (demo.sd_age_months == 0.0) {
    if (demo.mean_age_months < lo || demo.mean_age_months > hi)
      throw sampling_error("degenerate age outside chart range");
    return demo.mean_age_months;
  }
  const int kMaxRetries = 1000;
  for (int i = 0; i < kMaxRetries; ++i) {
    double a;
    if (kind == AgeDist::normal) {
      a = demo.mean_age_months + demo.sd_age_months * rng.normal();
    } else {
      a = demo.mean_age_months - 2.0 * demo.sd_age_months +
          4.0 * demo.sd_age_months * rng.uniform();
    }
    if (a >= lo && a <= hi) return a;
  }
  throw sampling_error("age retry budget exhausted for chart '" + chart.id() +
                       "'");
}

MappedAggregate map_percentile_to_z_sampling(const PercentileMoments& obs,
                                             std::size_t n,
                                             std::uint64_t seed) {
  if (n < 2) throw std::domain_error("sampling requires n >= 2");
  const BetaParams bp = beta_params_from_moments(obs.mean, obs.sd);
  Rng rng(seed);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double p;
    do {
      p = rng.beta(bp.alpha, bp.beta);
    } while (p <= 0.0 || p >= 1.0);
    z[i] = transforms::z_from_percentile(p);
  }
  auto [mean, sd] = mean_sd(z);
  MappedAggregate out;
  out.mean = mean;
  out.sd = sd;
  out.method = Method::sampling;
  out.n_samples = n;
  out.converged = true;
  out.iterations = 0;
  return out;
}

MappedAggregate map_bmi_to_z_sampling(const AggregateOutcome& obs,
                                      const Demographics& demo,
                                      const charts::LmsChart& chart,
                                      std::size_t n, AgeDist age_kind,
                                      std::uint64_t seed) {
  if (obs.scale != Scale::bmi)
    throw std::domain_error("map_bmi_to_z_sampling: outcome is not on BMI");
  if (n < 2) throw std::domain_error("sampling requires n >= 2");
  const LognormalParams lp = lognormal_params_from_moments(obs.mean, obs.sd);
  const double s = std::sqrt(lp.s_sq);
  Rng rng(seed);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = std::exp(lp.m + s * rng.normal());
    const charts::Sex sex = rng.bernoulli(demo.prop_male)
                                ? charts::Sex::male
                                : charts::Sex::female;
    const double age = sample_age(age_kind, demo, chart, rng);
    const charts::LmsParams lms = chart.lookup(age, sex);
    z[i] = transforms::z_from_bmi(b, lms.lambda, lms.mu, lms.sigma);
  }
  auto [mean, sd] = mean_sd(z);
  MappedAggregate out;
  out.mean = mean;
  out.sd = sd;
  out.method = Method::sampling;
  out.n_samples = n;
  out.converged = true;
  out.iterations = 0;
  return out;
}

}  // namespace bmimap::sampler
