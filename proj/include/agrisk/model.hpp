#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace agrisk {

using EventId = std::uint32_t;

// One event occurrence inside a simulated year.
struct EventOccurrence {
  EventId event_id = 0;
  // Fraction of the year, in [0, 1).
  double timestamp = 0.0;
  // Program-and-event-occurrence specific uniform draw.
  double z_prog_e = 0.0;

  friend bool operator==(const EventOccurrence&, const EventOccurrence&) = default;
};

// Pre-simulated trials stored back to back; trial i spans
// occurrences[offsets[i], offsets[i + 1]).
class YearEventTable {
 public:
  YearEventTable() = default;
  explicit YearEventTable(std::size_t catalogue_size) : catalogue_size_(catalogue_size) {}

  // Appends a trial. Occurrences must already be in timestamp order.
  void add_trial(std::span<const EventOccurrence> occurrences);
  void reserve(std::size_t trials, std::size_t occurrences);

  std::size_t num_trials() const noexcept { return offsets_.size() - 1; }
  std::size_t num_occurrences() const noexcept { return occurrences_.size(); }
  std::size_t catalogue_size() const noexcept { return catalogue_size_; }

  std::span<const EventOccurrence> trial(std::size_t i) const {
    assert(i < num_trials());
    return {occurrences_.data() + offsets_[i], occurrences_.data() + offsets_[i + 1]};
  }

  // Every violated invariant, one message each. Empty when valid.
  std::vector<std::string> validate() const;

  friend bool operator==(const YearEventTable&, const YearEventTable&) = default;

 private:
  std::size_t catalogue_size_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<EventOccurrence> occurrences_;
};

// Event loss distribution parameters for one event in one XELT.
struct XeltRecord {
  EventId event_id = 0;
  double mean_loss = 0.0;
  // Event-occurrence specific uniform draw.
  double z_e = 0.0;
  double sigma_i = 0.0;
  double sigma_c = 0.0;
  double max_loss = 0.0;

  friend bool operator==(const XeltRecord&, const XeltRecord&) = default;
};

// Sparse input form: one record list per XELT.
using XeltRecordList = std::vector<XeltRecord>;
using XeltSet = std::vector<XeltRecordList>;

// Per-XELT financial terms: share * min(max(loss - retention, 0), limit).
// Limits default to the largest finite double, i.e. unlimited.
inline constexpr double kUnlimited = std::numeric_limits<double>::max();

struct XeltTerms {
  double retention = 0.0;
  double limit = kUnlimited;
  double share = 1.0;

  static XeltTerms identity() { return {}; }
  friend bool operator==(const XeltTerms&, const XeltTerms&) = default;
};

struct LayerTerms {
  double occ_retention = 0.0;
  double occ_limit = kUnlimited;
  double agg_retention = 0.0;
  double agg_limit = kUnlimited;

  friend bool operator==(const LayerTerms&, const LayerTerms&) = default;
};

struct Layer {
  std::vector<std::size_t> xelt_ids;
  // Parallel to xelt_ids.
  std::vector<XeltTerms> xelt_terms;
  LayerTerms terms;

  friend bool operator==(const Layer&, const Layer&) = default;
};

struct Program {
  std::vector<Layer> layers;
  friend bool operator==(const Program&, const Program&) = default;
};

struct Portfolio {
  std::vector<Program> programs;

  std::size_t num_layers() const;
  friend bool operator==(const Portfolio&, const Portfolio&) = default;
};

// Dense payload of one loss-table slot. Absent slots carry a negative
// mean_loss sentinel.
struct LossSlot {
  double mean_loss;
  double z_e;
  double sigma_i;
  double sigma_c;
  double max_loss;

  bool present() const noexcept { return mean_loss >= 0.0; }
};

inline constexpr double kAbsentMeanLoss = -1.0;

// Direct-access table indexed [xelt][event]. Immutable once built; each XELT
// occupies one contiguous row of catalogue_size slots.
class LossTable {
 public:
  LossTable() = default;

  std::size_t num_xelts() const noexcept { return num_xelts_; }
  std::size_t catalogue_size() const noexcept { return catalogue_size_; }
  std::size_t num_slots() const noexcept { return slots_.size(); }
  std::size_t num_present() const noexcept { return num_present_; }

  // Unchecked hot-path access.
  const LossSlot& slot(std::size_t xelt, EventId event) const noexcept {
    assert(xelt < num_xelts_ && event < catalogue_size_);
    return slots_[xelt * catalogue_size_ + event];
  }

  // Row pointer for one XELT.
  const LossSlot* row(std::size_t xelt) const noexcept {
    assert(xelt < num_xelts_);
    return slots_.data() + xelt * catalogue_size_;
  }

  friend LossTable build_loss_table(const XeltSet& xelts, std::size_t catalogue_size);

 private:
  std::size_t num_xelts_ = 0;
  std::size_t catalogue_size_ = 0;
  std::size_t num_present_ = 0;
  std::vector<LossSlot> slots_;
};

// Throws ValidationError on an out-of-range or duplicate event id.
LossTable build_loss_table(const XeltSet& xelts, std::size_t catalogue_size);

// Bounds-checked lookup; throws ValidationError on out-of-range indices.
std::optional<XeltRecord> lookup(const LossTable& table, std::size_t xelt_index, EventId event_id);

// Reconstructs the sparse record lists, ordered by event id.
XeltSet extract_records(const LossTable& table);

struct Finding {
  // e.g. "program[0].layer[1].xelt[2]"
  std::string path;
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

// Every violated invariant in the portfolio and in the records its layers
// reference. Empty iff the portfolio can be run against the table.
std::vector<Finding> validate_portfolio(const Portfolio& pf, const LossTable& table);

// Record-level invariant check; empty string when valid.
std::string record_violation(const XeltRecord& rec);

}  // namespace agrisk
