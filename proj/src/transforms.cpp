#include "bmimap/transforms.hpp"

#include <cmath>

#include "bmimap/specfun.hpp"

namespace bmimap::transforms {

double z_from_bmi(double bmi, double lambda, double mu, double sigma) {
  if (!(bmi > 0.0)) throw std::domain_error("z_from_bmi: BMI must be positive");
  if (!(mu > 0.0) || !(sigma > 0.0))
    throw std::domain_error("z_from_bmi: mu and sigma must be positive");
  if (lambda == 0.0) return std::log(bmi / mu) / sigma;
  return (std::pow(bmi / mu, lambda) - 1.0) / (lambda * sigma);
}

double bmi_from_z(double z, double lambda, double mu, double sigma) {
  if (lambda == 0.0)
    throw std::domain_error("bmi_from_z: lambda must be nonzero");
  if (!(mu > 0.0) || !(sigma > 0.0))
    throw std::domain_error("bmi_from_z: mu and sigma must be positive");
  const double base = 1.0 + lambda * sigma * z;
  if (!(base > 0.0))
    throw validity_error("bmi_from_z: base 1+lambda*sigma*z not positive");
  return mu * std::pow(base, 1.0 / lambda);
}

double percentile_from_z(double z) { return specfun::std_normal_cdf(z); }

double z_from_percentile(double p) { return specfun::std_normal_quantile(p); }

double induced_z_density(double z, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::domain_error("induced_z_density: shape parameters must be > 0");
  const double p = specfun::std_normal_cdf(z);
  if (p <= 0.0 || p >= 1.0) return 0.0;
  const double log_b = std::lgamma(alpha + beta) - std::lgamma(alpha) -
                       std::lgamma(beta) + (alpha - 1.0) * std::log(p) +
                       (beta - 1.0) * std::log1p(-p);
  return std::exp(log_b) * specfun::std_normal_pdf(z);
}

}  // namespace bmimap::transforms
