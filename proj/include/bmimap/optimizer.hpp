#ifndef BMIMAP_OPTIMIZER_HPP
#define BMIMAP_OPTIMIZER_HPP

#include <cstdint>

#include "bmimap/charts.hpp"
#include "bmimap/types.hpp"

namespace bmimap::optimizer {

struct OptimConfig {
  double delta_step = 0.002;
  double delta_tol = 0.005;
  std::size_t n_max = 5000;
  std::size_t n_samples = 1000;
  std::uint64_t seed = 0;
};

// Defaults tuned separately per source scale.
OptimConfig default_percentile_config(std::uint64_t seed = 0);
OptimConfig default_bmi_config(std::uint64_t seed = 0);

// Rescales one sample so its standard-normal coordinate is preserved
// when the fitted mean/SD move by (delta_m, delta_s):
// (1 + delta_s/s)(z - m) + (m + delta_m).
double smooth_update(double z, double m_z, double s_z, double delta_m,
                     double delta_s);

// Fixed-step delta: 0 inside the tolerance band, +step when the
// simulated statistic is below the observation, -step when above.
double delta_from_comparison(double simulated, double observed,
                             const OptimConfig& cfg);

// Clamps z below the validity bound -1/(lambda*sigma): values beyond it
// map to 0.99 times the bound (Box-Cox base becomes exactly 0.01).
double truncate_z(double z, double lambda, double sigma);

// Percentile -> zBMI by iterative adjustment of a normal z-sample until
// the simulated percentile mean/SD match the observation.
MappedAggregate map_percentile_to_z_optim(const PercentileMoments& obs,
                                          const OptimConfig& cfg);

// BMI -> zBMI: z, sex and age are sampled once; each iteration
// recomputes BMI (with truncation) and nudges the z-distribution.
MappedAggregate map_bmi_to_z_optim(const AggregateOutcome& obs,
                                   const Demographics& demo,
                                   const charts::LmsChart& chart,
                                   AgeDist age_kind, const OptimConfig& cfg);

}  // namespace bmimap::optimizer

#endif
