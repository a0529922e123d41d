#pragma once

// Normal and beta distribution kernels used by the secondary-uncertainty
// pipeline. All functions are pure and safe to call concurrently.

namespace agrisk {

// Working precision of the engine hot path. The kernels always evaluate in
// double; kSingle only relaxes the beta quantile stopping rule to what a
// float result can resolve.
enum class Precision { kDouble, kSingle };

namespace stat {

// Standard normal CDF. Throws DomainError for non-finite x.
double normal_cdf(double x);

// Standard normal density.
double normal_pdf(double x) noexcept;

// Inverse of normal_cdf on the open interval (0, 1). Callers clamp tails;
// p outside (0, 1) throws DomainError.
double normal_quantile(double p);

// ln B(a, b) for a, b > 0.
double ln_beta(double a, double b);

// Regularized incomplete beta I_x(a, b).
double beta_cdf(double x, double a, double b);

// ln I_x(a, b); finite for every x in (0, 1] even where I_x underflows.
double log_beta_cdf(double x, double a, double b);

// Inverse of beta_cdf in x. Throws ConvergenceError after the iteration cap.
double beta_quantile(double p, double a, double b, Precision precision = Precision::kDouble);

inline constexpr int kBetaQuantileMaxIterations = 200;

}  // namespace stat
}  // namespace agrisk
