#ifndef BMIMAP_TRANSFORMS_HPP
#define BMIMAP_TRANSFORMS_HPP

#include <stdexcept>

namespace bmimap::transforms {

struct validity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Box-Cox z-score of a BMI value against LMS parameters. Uses the
// logarithmic branch when lambda is zero.
double z_from_bmi(double bmi, double lambda, double mu, double sigma);

// Inverse of z_from_bmi for lambda != 0. The base 1 + lambda*sigma*z
// must be positive; otherwise a validity_error signals that the caller
// must truncate z first.
double bmi_from_z(double z, double lambda, double mu, double sigma);

double percentile_from_z(double z);

double z_from_percentile(double p);

// Density of Z = Phi^{-1}(P) when P ~ Beta(alpha, beta):
// f_Z(z) = f_P(Phi(z)) * phi(z).
double induced_z_density(double z, double alpha, double beta);

}  // namespace bmimap::transforms

#endif
