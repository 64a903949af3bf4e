#include "bmimap/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace bmimap::specfun {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;
constexpr double kTwoPi = 6.2831853071795864769252867665590058;

// 64-point Gauss-Legendre nodes/weights on [-1,1], computed once by
// Newton iteration on the Legendre polynomial.
struct GaussLegendre64 {
  std::array<double, 64> x{};
  std::array<double, 64> w{};
  GaussLegendre64() {
    const int n = 64;
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        double z1 = z;
        z = z1 - p0 / pp;
        if (std::abs(z - z1) < 1e-15) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
  }
};

const GaussLegendre64& gl64() {
  static const GaussLegendre64 tbl;
  return tbl;
}

// Owen's T for h >= 0, 0 <= a <= 1 by quadrature of the defining
// integral over [0, a].
double owens_t_base(double h, double a) {
  if (a == 0.0) return 0.0;
  const auto& g = gl64();
  const double hh = -0.5 * h * h;
  const double half = 0.5 * a;
  double sum = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double t = half * (g.x[i] + 1.0);
    sum += g.w[i] * std::exp(hh * (1.0 + t * t)) / (1.0 + t * t);
  }
  return half * sum / kTwoPi;
}

}  // namespace

double std_normal_pdf(double x) {
  if (!std::isfinite(x)) throw domain_error("std_normal_pdf: non-finite input");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) {
  if (std::isnan(x)) throw domain_error("std_normal_cdf: NaN input");
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_quantile(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0)
    throw domain_error("std_normal_quantile: p outside [0,1]");
  if (p == 0.0 || p == 1.0)
    throw boundary_error("std_normal_quantile: p on boundary {0,1}");

  // Acklam's rational approximation, ~1.1e-9 absolute error.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Two Newton refinements on the cdf.
  for (int i = 0; i < 2; ++i) {
    double e = std_normal_cdf(x) - p;
    double g = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    if (g <= 0.0) break;
    x -= e / g;
  }
  return x;
}

double owens_t(double h, double a) {
  if (!std::isfinite(h) || !std::isfinite(a))
    throw domain_error("owens_t: non-finite input");
  // T(-h,a) = T(h,a); T(h,-a) = -T(h,a).
  double sign = 1.0;
  h = std::abs(h);
  if (a < 0.0) {
    sign = -1.0;
    a = -a;
  }
  if (a == 0.0) return 0.0;
  if (h == 0.0) return sign * std::atan(a) / kTwoPi;

  double t;
  if (a <= 1.0) {
    t = owens_t_base(h, a);
  } else {
    // T(h,a) = (Phi(h)+Phi(ah))/2 - Phi(h)Phi(ah) - T(ah, 1/a)
    const double ah = a * h;
    const double ph = std_normal_cdf(h);
    const double pah = std_normal_cdf(ah);
    t = 0.5 * (ph + pah) - ph * pah - owens_t_base(ah, 1.0 / a);
  }
  return sign * t;
}

}  // namespace bmimap::specfun
