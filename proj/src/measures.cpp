#include "agrisk/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "agrisk/errors.hpp"

namespace agrisk {
namespace {

void require_nonempty(std::span<const double> ylt) {
  if (ylt.empty()) throw DomainError("year loss table is empty");
}

void require_level(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("tail level must lie in (0, 1)");
}

std::vector<double> sorted_ascending(std::span<const double> ylt) {
  std::vector<double> v(ylt.begin(), ylt.end());
  std::sort(v.begin(), v.end());
  return v;
}

double var_sorted(const std::vector<double>& asc, double q) {
  const auto n = asc.size();
  const auto k = std::min(static_cast<std::size_t>(std::floor(static_cast<double>(n) * q)), n - 1);
  return asc[k];
}

double tvar_sorted(const std::vector<double>& asc, double q) {
  const double var = var_sorted(asc, q);
  const auto first = std::lower_bound(asc.begin(), asc.end(), var);
  double sum = 0.0;
  for (auto it = first; it != asc.end(); ++it) sum += *it;
  return sum / static_cast<double>(asc.end() - first);
}

}  // namespace

ExceedanceCurve exceedance_curve(std::span<const double> ylt) {
  require_nonempty(ylt);
  ExceedanceCurve c;
  c.losses.assign(ylt.begin(), ylt.end());
  std::sort(c.losses.begin(), c.losses.end(), std::greater<>());
  const double denom = static_cast<double>(c.losses.size() + 1);
  c.probabilities.resize(c.losses.size());
  for (std::size_t i = 0; i < c.losses.size(); ++i) c.probabilities[i] = static_cast<double>(i + 1) / denom;
  return c;
}

double pml(const ExceedanceCurve& curve, double return_period) {
  if (!(return_period > 1.0) || !std::isfinite(return_period)) {
    throw DomainError("return period must be finite and greater than 1");
  }
  if (curve.losses.empty()) throw DomainError("exceedance curve is empty");
  const double p = 1.0 / return_period;
  const auto& probs = curve.probabilities;
  if (p <= probs.front()) return curve.losses.front();
  if (p >= probs.back()) return curve.losses.back();
  // First rank whose probability is >= p; interpolate from the rank before.
  const auto hi = static_cast<std::size_t>(std::lower_bound(probs.begin(), probs.end(), p) - probs.begin());
  if (probs[hi] == p) return curve.losses[hi];
  const std::size_t lo = hi - 1;
  const double w = (p - probs[lo]) / (probs[hi] - probs[lo]);
  return curve.losses[lo] + w * (curve.losses[hi] - curve.losses[lo]);
}

double value_at_risk(std::span<const double> ylt, double q) {
  require_nonempty(ylt);
  require_level(q);
  return var_sorted(sorted_ascending(ylt), q);
}

double tvar(std::span<const double> ylt, double q) {
  require_nonempty(ylt);
  require_level(q);
  return tvar_sorted(sorted_ascending(ylt), q);
}

RiskMeasures risk_measures(std::span<const double> ylt, std::span<const double> return_periods, double level) {
  require_nonempty(ylt);
  require_level(level);
  RiskMeasures m;
  const auto curve = exceedance_curve(ylt);
  for (double rp : return_periods) m.pml_by_return_period[rp] = pml(curve, rp);
  const auto asc = sorted_ascending(ylt);
  m.level = level;
  m.var = var_sorted(asc, level);
  m.tvar = tvar_sorted(asc, level);
  return m;
}

}  // namespace agrisk
