#include "agrisk/model.hpp"

#include <cmath>
#include <string>

#include "agrisk/errors.hpp"

namespace agrisk {
namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

std::string layer_path(std::size_t p, std::size_t l) {
  return "program[" + std::to_string(p) + "].layer[" + std::to_string(l) + "]";
}

}  // namespace

void YearEventTable::add_trial(std::span<const EventOccurrence> occurrences) {
  occurrences_.insert(occurrences_.end(), occurrences.begin(), occurrences.end());
  offsets_.push_back(occurrences_.size());
}

void YearEventTable::reserve(std::size_t trials, std::size_t occurrences) {
  offsets_.reserve(trials + 1);
  occurrences_.reserve(occurrences);
}

std::vector<std::string> YearEventTable::validate() const {
  std::vector<std::string> out;
  for (std::size_t t = 0; t < num_trials(); ++t) {
    const auto occ = trial(t);
    for (std::size_t k = 0; k < occ.size(); ++k) {
      const auto& e = occ[k];
      const std::string where = "trial[" + std::to_string(t) + "].event[" + std::to_string(k) + "]";
      if (e.event_id >= catalogue_size_) out.push_back(where + ": event id outside catalogue");
      if (!(e.timestamp >= 0.0 && e.timestamp < 1.0)) out.push_back(where + ": timestamp outside [0, 1)");
      if (!(e.z_prog_e >= 0.0 && e.z_prog_e <= 1.0)) out.push_back(where + ": z_prog_e outside [0, 1]");
      if (k > 0 && e.timestamp < occ[k - 1].timestamp) out.push_back(where + ": timestamps out of order");
    }
  }
  return out;
}

std::size_t Portfolio::num_layers() const {
  std::size_t n = 0;
  for (const auto& p : programs) n += p.layers.size();
  return n;
}

LossTable build_loss_table(const XeltSet& xelts, std::size_t catalogue_size) {
  LossTable table;
  table.num_xelts_ = xelts.size();
  table.catalogue_size_ = catalogue_size;
  table.slots_.assign(xelts.size() * catalogue_size, LossSlot{kAbsentMeanLoss, 0.0, 0.0, 0.0, 0.0});
  for (std::size_t x = 0; x < xelts.size(); ++x) {
    LossSlot* row = table.slots_.data() + x * catalogue_size;
    for (const auto& rec : xelts[x]) {
      if (rec.event_id >= catalogue_size) {
        throw ValidationError("xelt " + std::to_string(x) + ": event id " + std::to_string(rec.event_id) +
                              " outside catalogue of size " + std::to_string(catalogue_size));
      }
      LossSlot& slot = row[rec.event_id];
      if (slot.present()) {
        throw ValidationError("xelt " + std::to_string(x) + ": duplicate event id " + std::to_string(rec.event_id));
      }
      if (!(rec.mean_loss >= 0.0)) {
        // The sentinel encoding cannot hold a negative or NaN mean.
        throw ValidationError("xelt " + std::to_string(x) + ": event " + std::to_string(rec.event_id) +
                              " has a negative mean loss");
      }
      slot = {rec.mean_loss, rec.z_e, rec.sigma_i, rec.sigma_c, rec.max_loss};
      ++table.num_present_;
    }
  }
  return table;
}

std::optional<XeltRecord> lookup(const LossTable& table, std::size_t xelt_index, EventId event_id) {
  if (xelt_index >= table.num_xelts() || event_id >= table.catalogue_size()) {
    throw ValidationError("lookup index out of range (xelt " + std::to_string(xelt_index) + ", event " +
                          std::to_string(event_id) + ")");
  }
  const LossSlot& s = table.slot(xelt_index, event_id);
  if (!s.present()) return std::nullopt;
  return XeltRecord{event_id, s.mean_loss, s.z_e, s.sigma_i, s.sigma_c, s.max_loss};
}

XeltSet extract_records(const LossTable& table) {
  XeltSet out(table.num_xelts());
  for (std::size_t x = 0; x < table.num_xelts(); ++x) {
    const LossSlot* row = table.row(x);
    for (std::size_t e = 0; e < table.catalogue_size(); ++e) {
      if (row[e].present()) {
        out[x].push_back({static_cast<EventId>(e), row[e].mean_loss, row[e].z_e, row[e].sigma_i, row[e].sigma_c,
                          row[e].max_loss});
      }
    }
  }
  return out;
}

std::string record_violation(const XeltRecord& rec) {
  if (!finite_pos(rec.max_loss)) return "max_loss must be positive";
  if (!finite_nonneg(rec.mean_loss)) return "mean_loss must be non-negative";
  if (rec.mean_loss > rec.max_loss) return "mean_loss exceeds max_loss";
  if (!finite_nonneg(rec.sigma_i) || !finite_nonneg(rec.sigma_c)) return "standard deviations must be non-negative";
  if (!(rec.z_e >= 0.0 && rec.z_e <= 1.0)) return "z_e outside [0, 1]";
  return {};
}

std::vector<Finding> validate_portfolio(const Portfolio& pf, const LossTable& table) {
  std::vector<Finding> out;
  if (pf.programs.empty()) out.push_back({"portfolio", "no programs"});
  std::vector<bool> referenced(table.num_xelts(), false);
  for (std::size_t p = 0; p < pf.programs.size(); ++p) {
    const Program& prog = pf.programs[p];
    if (prog.layers.empty()) out.push_back({"program[" + std::to_string(p) + "]", "no layers"});
    for (std::size_t l = 0; l < prog.layers.size(); ++l) {
      const Layer& layer = prog.layers[l];
      const std::string path = layer_path(p, l);
      if (layer.xelt_ids.empty()) out.push_back({path, "layer covers no XELTs"});
      if (layer.xelt_terms.size() != layer.xelt_ids.size()) {
        out.push_back({path, "xelt_terms count does not match xelt_ids"});
      }
      const LayerTerms& t = layer.terms;
      if (!finite_nonneg(t.occ_retention)) out.push_back({path, "occurrence retention must be finite and >= 0"});
      if (!finite_pos(t.occ_limit)) out.push_back({path, "occurrence limit must be finite and > 0"});
      if (!finite_nonneg(t.agg_retention)) out.push_back({path, "aggregate retention must be finite and >= 0"});
      if (!finite_pos(t.agg_limit)) out.push_back({path, "aggregate limit must be finite and > 0"});
      std::vector<std::size_t> seen;
      for (std::size_t j = 0; j < layer.xelt_ids.size(); ++j) {
        const std::size_t id = layer.xelt_ids[j];
        const std::string xpath = path + ".xelt[" + std::to_string(j) + "]";
        if (id >= table.num_xelts()) {
          out.push_back({xpath, "xelt index " + std::to_string(id) + " out of range (" +
                                    std::to_string(table.num_xelts()) + " XELTs)"});
        } else {
          referenced[id] = true;
        }
        for (std::size_t prev : seen) {
          if (prev == id) out.push_back({xpath, "duplicate xelt index " + std::to_string(id)});
        }
        seen.push_back(id);
        if (j < layer.xelt_terms.size()) {
          const XeltTerms& xt = layer.xelt_terms[j];
          if (!finite_nonneg(xt.retention)) out.push_back({xpath, "xelt retention must be finite and >= 0"});
          if (!finite_pos(xt.limit)) out.push_back({xpath, "xelt limit must be finite and > 0"});
          if (!(std::isfinite(xt.share) && xt.share > 0.0 && xt.share <= 1.0)) {
            out.push_back({xpath, "xelt share must lie in (0, 1]"});
          }
        }
      }
    }
  }
  for (std::size_t x = 0; x < table.num_xelts(); ++x) {
    if (!referenced[x]) continue;
    const LossSlot* row = table.row(x);
    for (std::size_t e = 0; e < table.catalogue_size(); ++e) {
      if (!row[e].present()) continue;
      const XeltRecord rec{static_cast<EventId>(e), row[e].mean_loss, row[e].z_e, row[e].sigma_i, row[e].sigma_c,
                           row[e].max_loss};
      if (auto msg = record_violation(rec); !msg.empty()) {
        out.push_back({"xelt[" + std::to_string(x) + "].event[" + std::to_string(e) + "]", msg});
      }
    }
  }
  return out;
}

}  // namespace agrisk
