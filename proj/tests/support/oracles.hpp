#pragma once

// Slow, independent reference computations used as test oracles. Nothing
// here shares code with the library kernels under test.

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "agrisk/rng.hpp"

namespace oracle {

// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth = 60);

// Root of an increasing function on [lo, hi] by bisection until the bracket
// is narrower than tol.
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol);

// Standard normal CDF from Simpson integration of the density.
double normal_cdf(double x);

// Regularized incomplete beta by adaptive Gauss-Kronrod integration of the
// unnormalized density divided by B(a, b) from std::lgamma.
double beta_cdf(double x, double a, double b);

// Inverse of beta_cdf above by bisection.
double beta_quantile(double p, double a, double b);

// Pair of independent standard normals (Box-Muller).
std::pair<double, double> box_muller(agrisk::Xoshiro256& rng);

// Straightforward empirical measures, written independently of the library.
double pml(std::span<const double> ylt, double return_period);
double var(std::span<const double> ylt, double q);
double tvar(std::span<const double> ylt, double q);

}  // namespace oracle
