#ifndef BMIMAP_SPECFUN_HPP
#define BMIMAP_SPECFUN_HPP

#include <stdexcept>

namespace bmimap::specfun {

// Standard normal density (1/sqrt(2*pi)) * exp(-x^2/2).
double std_normal_pdf(double x);

// Standard normal cdf. Accepts +/-inf (maps to 1/0); NaN is rejected.
double std_normal_cdf(double x);

// Inverse of std_normal_cdf on (0,1). Rational initial guess refined by
// Newton steps on the cdf; absolute round-trip error below 1e-14 away
// from the extreme tails.
double std_normal_quantile(double p);

// Owen's T function T(h,a). Evaluated by reducing |a| to [0,1] with the
// standard addition identity and applying fixed-order Gauss-Legendre
// quadrature to the defining integral.
double owens_t(double h, double a);

struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct boundary_error : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace bmimap::specfun

#endif
