#ifndef BMIMAP_TYPES_HPP
#define BMIMAP_TYPES_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace bmimap {

enum class Scale { bmi, zbmi, percentile };

std::string to_string(Scale s);
Scale scale_from_string(const std::string& s);

struct infeasible_input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct sampling_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mean/SD summary of one arm at one time point on a given scale.
struct AggregateOutcome {
  Scale scale;
  double mean;
  double sd;
  std::optional<std::size_t> n;
};

// Normal model for zBMI in a trial sample.
struct ZDistribution {
  double m_z;
  double s_z;  // > 0
};

// Observed percentile moments on the [0,1] scale.
struct PercentileMoments {
  double mean;  // in (0,1)
  double sd;    // >= 0; sd^2 < mean*(1-mean)

  bool feasible() const {
    return mean > 0.0 && mean < 1.0 && sd > 0.0 &&
           sd * sd < mean * (1.0 - mean);
  }
};

// Arm-level demographics needed for the BMI <-> zBMI paths.
struct Demographics {
  double mean_age_months;
  double sd_age_months;  // >= 0
  double prop_male;      // in [0,1]
  std::string chart_id;
};

enum class AgeDist { normal, uniform };

enum class Method { analytical, sampling, optim };

std::string to_string(Method m);
std::string to_string(AgeDist a);

// Result of any aggregate mapping, with method diagnostics.
struct MappedAggregate {
  double mean = 0.0;
  double sd = 0.0;
  Method method = Method::sampling;
  std::size_t n_samples = 0;
  bool converged = true;
  std::size_t iterations = 0;
  // Optimization-only: final fitted normal parameters.
  std::optional<double> dist_mean;
  std::optional<double> dist_sd;
  // Optimization BMI path: fraction of samples truncated at the last
  // iteration, and limit-cycle detection.
  double truncated_fraction = 0.0;
  bool oscillation_detected = false;
};

}  // namespace bmimap

#endif
