#pragma once

#include <optional>

#include "agrisk/model.hpp"
#include "agrisk/statfuncs.hpp"

namespace agrisk {

// Uniform draws are clamped into [kDrawFloor, 1 - kDrawFloor] before the
// normal quantile so the deviates stay finite.
inline constexpr double kDrawFloor = 1e-12;
// sigma_beta is capped at sigma_beta_max * (1 - kSigmaCapEpsilon).
inline constexpr double kSigmaCapEpsilon = 1e-6;

// Intermediate values of the standard deviation combination.
struct SecondaryDraw {
  // sigma_i + sigma_c
  double sigma = 0.0;
  double v_prog_e = 0.0;
  double v_e = 0.0;
  // Linear combination of the two deviates weighted by sigma share.
  double lc = 0.0;
  // Unit-variance combined deviate.
  double v = 0.0;
  // Final uniform draw fed to the beta quantile.
  double z = 0.0;
};

struct BetaParams {
  double sigma_b = 0.0;
  double mu_b = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double sigma_b_max = 0.0;
};

double clamp_draw(double z) noexcept;

// Combines the program-occurrence and event-occurrence draws into one
// uniform draw. nullopt when both standard deviations are zero.
std::optional<SecondaryDraw> combine_draws(double z_prog_e, double z_e, double sigma_i, double sigma_c);

// Moment-matched beta parameters on [0, max_l]. nullopt when the
// distribution is degenerate (mu_l outside (0, max_l) or sigma <= 0).
std::optional<BetaParams> beta_params(double mu_l, double sigma, double max_l);

// Sampled loss for one record and one occurrence draw, in [0, max_loss].
// Degenerate records return their distributional limit without sampling.
double apply_secondary_uncertainty(const LossSlot& rec, double z_prog_e, Precision precision = Precision::kDouble);
double apply_secondary_uncertainty(const XeltRecord& rec, double z_prog_e, Precision precision = Precision::kDouble);

}  // namespace agrisk
