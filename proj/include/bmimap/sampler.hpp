#ifndef BMIMAP_SAMPLER_HPP
#define BMIMAP_SAMPLER_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "bmimap/charts.hpp"
#include "bmimap/rng.hpp"
#include "bmimap/types.hpp"

namespace bmimap::sampler {

struct BetaParams {
  double alpha;
  double beta;
};

struct LognormalParams {
  double m;      // log-scale mean
  double s_sq;   // log-scale variance
};

// Moment-matched Beta parameters for a [0,1] observation.
BetaParams beta_params_from_moments(double mean, double sd);

// Moment-matched lognormal parameters for a positive observation.
LognormalParams lognormal_params_from_moments(double mean, double sd);

// One age draw: N(mean, sd^2) or Unif(mean - 2 sd, mean + 2 sd); draws
// outside the chart range are redrawn, up to 1000 retries.
double sample_age(AgeDist kind, const Demographics& demo,
                  const charts::LmsChart& chart, Rng& rng);

// Percentile -> zBMI: n Beta draws pushed through the normal quantile.
MappedAggregate map_percentile_to_z_sampling(const PercentileMoments& obs,
                                             std::size_t n,
                                             std::uint64_t seed);

// BMI -> zBMI: per draw samples BMI (lognormal), sex (Bernoulli) and
// age, looks up LMS parameters, and applies the Box-Cox z-score.
MappedAggregate map_bmi_to_z_sampling(const AggregateOutcome& obs,
                                      const Demographics& demo,
                                      const charts::LmsChart& chart,
                                      std::size_t n, AgeDist age_kind,
                                      std::uint64_t seed);

// Sample mean and n-1 SD.
std::pair<double, double> mean_sd(const std::vector<double>& xs);

}  // namespace bmimap::sampler

#endif
