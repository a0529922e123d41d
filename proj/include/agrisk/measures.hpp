#pragma once

#include <map>
#include <span>
#include <vector>

namespace agrisk {

// Empirical exceedance-probability curve. losses are sorted descending and
// rank i (1-based) carries exceedance probability i / (N + 1).
struct ExceedanceCurve {
  std::vector<double> losses;
  std::vector<double> probabilities;
};

struct RiskMeasures {
  std::map<double, double> pml_by_return_period;
  double level = 0.0;
  double var = 0.0;
  double tvar = 0.0;
};

ExceedanceCurve exceedance_curve(std::span<const double> ylt);

// Loss at exceedance probability 1 / return_period, linearly interpolated
// between ranks and clamped to the curve ends. return_period must exceed 1.
double pml(const ExceedanceCurve& curve, double return_period);

// Empirical quantile at level q using the upper order statistic: the
// (floor(N q) + 1)-th smallest loss.
double value_at_risk(std::span<const double> ylt, double q);

// Mean of all losses at or above value_at_risk(ylt, q).
double tvar(std::span<const double> ylt, double q);

RiskMeasures risk_measures(std::span<const double> ylt, std::span<const double> return_periods, double level);

}  // namespace agrisk
