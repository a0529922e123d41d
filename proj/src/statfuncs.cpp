#include "agrisk/statfuncs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "agrisk/errors.hpp"

namespace agrisk::stat {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kTiny = 1e-300;
constexpr double kCfEpsilon = std::numeric_limits<double>::epsilon();
constexpr int kMaxCfIterations = 20000;

double lgamma_positive(double x) {
#if defined(__GLIBC__)
  // lgamma() writes the global signgam; the reentrant form does not.
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

// AS 241 (PPND16) lower-half rational approximation, p in (0, 0.5].
double ppnd16_lower(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = std::sqrt(-std::log(p));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxCfIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kCfEpsilon) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge (x=" +
                             std::to_string(x) + ", a=" + std::to_string(a) +
                             ", b=" + std::to_string(b) + ")",
                         h, std::numeric_limits<double>::quiet_NaN());
}

struct IncompleteBeta {
  double value;
  double log_value;
  // ln(x^a (1-x)^b / B(a,b))
  double log_front;
};

// I_x(a, b) for x in (0, 1) given ln x explicitly, so callers iterating in
// log space never round-trip through exp/log. x may underflow to 0.
IncompleteBeta incomplete_beta(double log_x, double x, double a, double b, double lnb) {
  const double log_front = a * log_x + b * std::log1p(-x) - lnb;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double log_value = log_front + std::log(beta_continued_fraction(x, a, b) / a);
    return {std::exp(log_value), log_value, log_front};
  }
  const double complement = std::exp(log_front) * beta_continued_fraction(1.0 - x, b, a) / b;
  return {1.0 - complement, std::log1p(-complement), log_front};
}

void check_shape(double a, double b, const char* fn) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError(std::string(fn) + ": shape parameters must be positive and finite");
  }
}

// Starting point for the log-space Newton solve of I_y(a, b) = target.
double initial_log_guess(double target, double log_target, double a, double b, double lnb) {
  if (a >= 1.0 && b >= 1.0) {
    // Cornish-Fisher style normal approximation.
    const double pp = target < 0.5 ? target : 1.0 - target;
    const double t = std::sqrt(-2.0 * std::log(pp));
    double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (target < 0.5) z = -z;
    const double al = (z * z - 3.0) / 6.0;
    const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
    const double w = z * std::sqrt(al + h) / h -
                     (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
    const double two_w = 2.0 * w;
    if (two_w > 700.0) return std::log(a) - std::log(b) - two_w;
    return std::log(a) - std::log(a + b * std::exp(two_w));
  }
  // Leading series term at y -> 0: I_y(a, b) ~ y^a / (a B(a, b)).
  return (log_target + std::log(a) + lnb) / a;
}

}  // namespace

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) {
  if (!std::isfinite(x)) throw DomainError("normal_cdf: argument must be finite");
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  // Evaluate in the lower half; 1 - p is exact for p >= 0.5.
  const bool upper = p > 0.5;
  const double lower_p = upper ? 1.0 - p : p;
  double x = ppnd16_lower(lower_p);
  const double density = normal_pdf(x);
  if (density > 0.0) x -= (0.5 * std::erfc(-x * kInvSqrt2) - lower_p) / density;
  return upper ? -x : x;
}

double ln_beta(double a, double b) {
  check_shape(a, b, "ln_beta");
  return lgamma_positive(a) + lgamma_positive(b) - lgamma_positive(a + b);
}

double beta_cdf(double x, double a, double b) {
  check_shape(a, b, "beta_cdf");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("beta_cdf: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return incomplete_beta(std::log(x), x, a, b, ln_beta(a, b)).value;
}

double log_beta_cdf(double x, double a, double b) {
  check_shape(a, b, "log_beta_cdf");
  if (!(x > 0.0 && x <= 1.0)) throw DomainError("log_beta_cdf: x must lie in (0, 1]");
  if (x == 1.0) return 0.0;
  return incomplete_beta(std::log(x), x, a, b, ln_beta(a, b)).log_value;
}

double beta_quantile(double p, double a, double b, Precision precision) {
  check_shape(a, b, "beta_quantile");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("beta_quantile: p must lie in [0, 1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  const double lnb = ln_beta(a, b);
  const double mean = a / (a + b);
  const bool lower = p <= incomplete_beta(std::log(mean), mean, a, b, lnb).value;

  // Solve for whichever of x and 1 - x lies below the mean, so the unknown
  // keeps full relative precision. The upper half is the lower half of
  // Beta(b, a) by reflection.
  const double fa = lower ? a : b;
  const double fb = lower ? b : a;
  const double target = lower ? p : 1.0 - p;
  const double log_target = std::log(target);
  const auto finish = [lower](double u) { return lower ? std::exp(u) : -std::expm1(u); };

  const double rel_tol = precision == Precision::kDouble ? 1e-12 : 1e-7;
  const double step_tol = precision == Precision::kDouble ? 1e-14 : 1e-8;

  // Newton on g(u) = ln I_{e^u} - ln target, u = ln y, bracketed by [lo, hi].
  double hi = std::log(lower ? mean : b / (a + b));
  double lo = -std::numeric_limits<double>::infinity();
  double u = std::min(initial_log_guess(target, log_target, fa, fb, lnb), hi);
  double residual = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 0; iter < kBetaQuantileMaxIterations; ++iter) {
    const double y = std::exp(u);
    const IncompleteBeta ib = incomplete_beta(u, y, fa, fb, lnb);
    const double g = ib.log_value - log_target;
    residual = std::fabs(ib.value - target);
    if (std::fabs(std::expm1(g)) <= rel_tol) return finish(u);
    if (g < 0.0) {
      lo = u;
    } else {
      hi = u;
    }
    // d ln I / d ln y = y f(y) / I
    const double slope = std::exp(ib.log_front - std::log1p(-y) - ib.log_value);
    double next = u - g / slope;
    if (!(next > lo && next < hi)) {
      next = std::isfinite(lo) ? 0.5 * (lo + hi) : hi - (1.0 + std::fabs(hi));
    }
    if (std::fabs(next - u) <= step_tol) return finish(next);
    u = next;
  }
  throw ConvergenceError("beta_quantile did not converge (p=" + std::to_string(p) +
                             ", a=" + std::to_string(a) + ", b=" + std::to_string(b) + ")",
                         finish(u), residual);
}

}  // namespace agrisk::stat
