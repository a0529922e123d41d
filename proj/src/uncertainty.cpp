#include "agrisk/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "agrisk/errors.hpp"

namespace agrisk {

double clamp_draw(double z) noexcept { return std::clamp(z, kDrawFloor, 1.0 - kDrawFloor); }

std::optional<SecondaryDraw> combine_draws(double z_prog_e, double z_e, double sigma_i, double sigma_c) {
  SecondaryDraw d;
  d.sigma = sigma_i + sigma_c;
  if (!(d.sigma > 0.0)) return std::nullopt;
  d.v_prog_e = stat::normal_quantile(clamp_draw(z_prog_e));
  d.v_e = stat::normal_quantile(clamp_draw(z_e));
  const double w_i = sigma_i / d.sigma;
  const double w_c = sigma_c / d.sigma;
  d.lc = d.v_prog_e * w_i + d.v_e * w_c;
  d.v = d.lc / std::sqrt(w_i * w_i + w_c * w_c);
  d.z = stat::normal_cdf(d.v);
  return d;
}

std::optional<BetaParams> beta_params(double mu_l, double sigma, double max_l) {
  if (!(max_l > 0.0) || !(sigma > 0.0) || !(mu_l > 0.0) || !(mu_l < max_l)) return std::nullopt;
  BetaParams bp;
  bp.sigma_b = sigma / max_l;
  bp.mu_b = mu_l / max_l;
  bp.sigma_b_max = std::sqrt(bp.mu_b * (1.0 - bp.mu_b));
  if (bp.sigma_b >= bp.sigma_b_max) bp.sigma_b = bp.sigma_b_max * (1.0 - kSigmaCapEpsilon);
  const double ratio = bp.sigma_b_max / bp.sigma_b;
  const double k = ratio * ratio - 1.0;
  bp.alpha = bp.mu_b * k;
  bp.beta = (1.0 - bp.mu_b) * k;
  return bp;
}

double apply_secondary_uncertainty(const LossSlot& rec, double z_prog_e, Precision precision) {
  if (rec.mean_loss <= 0.0) return 0.0;
  if (rec.mean_loss >= rec.max_loss) return rec.max_loss;
  const auto draw = combine_draws(z_prog_e, rec.z_e, rec.sigma_i, rec.sigma_c);
  if (!draw) return rec.mean_loss;
  const auto bp = beta_params(rec.mean_loss, draw->sigma, rec.max_loss);
  if (!bp) return rec.mean_loss;
  try {
    return rec.max_loss * stat::beta_quantile(draw->z, bp->alpha, bp->beta, precision);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string(e.what()) + " while sampling loss (mean_loss=" +
                               std::to_string(rec.mean_loss) + ", max_loss=" + std::to_string(rec.max_loss) +
                               ", sigma_i=" + std::to_string(rec.sigma_i) + ", sigma_c=" +
                               std::to_string(rec.sigma_c) + ", z=" + std::to_string(draw->z) + ")",
                           e.last_iterate(), e.residual());
  }
}

double apply_secondary_uncertainty(const XeltRecord& rec, double z_prog_e, Precision precision) {
  return apply_secondary_uncertainty(LossSlot{rec.mean_loss, rec.z_e, rec.sigma_i, rec.sigma_c, rec.max_loss},
                                     z_prog_e, precision);
}

}  // namespace agrisk
