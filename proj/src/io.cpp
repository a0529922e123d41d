#include "agrisk/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "agrisk/errors.hpp"

namespace agrisk::io {
namespace {

constexpr std::size_t kBufferBytes = 1 << 16;
// Upper bound on up-front reservations driven by header counts, so a corrupt
// header cannot trigger a huge allocation before the truncation is noticed.
constexpr std::size_t kMaxReserve = 1 << 20;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) { buf_.reserve(kBufferBytes); }
  ~Writer() { flush(); }
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void raw(const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n);
    if (buf_.size() >= kBufferBytes) flush();
  }
  void u8(std::uint8_t v) { raw(&v, 1); }
  void u16(std::uint16_t v) { le(v); }
  void u32(std::uint32_t v) { le(v); }
  void u64(std::uint64_t v) { le(v); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }

  void flush() {
    if (!buf_.empty()) out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    buf_.clear();
  }

 private:
  template <typename U>
  void le(U v) {
    std::array<char, sizeof(U)> b;
    for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    raw(b.data(), b.size());
  }

  std::ostream& out_;
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in), buf_(kBufferBytes) {}

  std::uint64_t offset() const noexcept { return offset_; }

  void raw(void* dst, std::size_t n, const char* what) {
    auto* d = static_cast<char*>(dst);
    while (n > 0) {
      if (pos_ == len_) refill(what);
      const std::size_t take = std::min(n, len_ - pos_);
      std::memcpy(d, buf_.data() + pos_, take);
      pos_ += take;
      offset_ += take;
      d += take;
      n -= take;
    }
  }
  std::uint8_t u8(const char* what) {
    std::uint8_t v;
    raw(&v, 1, what);
    return v;
  }
  std::uint16_t u16(const char* what) { return le<std::uint16_t>(what); }
  std::uint32_t u32(const char* what) { return le<std::uint32_t>(what); }
  std::uint64_t u64(const char* what) { return le<std::uint64_t>(what); }
  double f64(const char* what) { return std::bit_cast<double>(le<std::uint64_t>(what)); }

  bool at_end() {
    if (pos_ < len_) return false;
    in_.read(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    len_ = static_cast<std::size_t>(in_.gcount());
    pos_ = 0;
    return len_ == 0;
  }

 private:
  void refill(const char* what) {
    in_.read(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    len_ = static_cast<std::size_t>(in_.gcount());
    pos_ = 0;
    if (len_ == 0) throw LoadError(std::string("truncated stream while reading ") + what, offset_);
  }

  template <typename U>
  U le(const char* what) {
    std::array<unsigned char, sizeof(U)> b;
    raw(b.data(), b.size(), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(b[i]) << (8 * i));
    return v;
  }

  std::istream& in_;
  std::vector<char> buf_;
  std::size_t pos_ = 0;
  std::size_t len_ = 0;
  std::uint64_t offset_ = 0;
};

void write_preamble(Writer& w, Kind kind) {
  w.raw(kMagic, sizeof kMagic);
  w.u8(static_cast<std::uint8_t>(kind));
  w.u16(kFormatVersion);
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::kYet: return "YET";
    case Kind::kXelt: return "XELT";
    case Kind::kPortfolio: return "PORTFOLIO";
    case Kind::kYlt: return "YLT";
  }
  return "unknown";
}

void read_preamble(Reader& r, Kind expected) {
  char magic[8];
  r.raw(magic, sizeof magic, "magic");
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw LoadError("bad magic", 0);
  const auto kind = r.u8("kind");
  if (kind != static_cast<std::uint8_t>(expected)) {
    throw LoadError(std::string("expected a ") + kind_name(expected) + " file, found kind " + std::to_string(kind), 8);
  }
  const auto version = r.u16("format version");
  if (version != kFormatVersion) throw LoadError("unsupported format version " + std::to_string(version), 9);
}

void require_end(Reader& r) {
  const auto off = r.offset();
  if (!r.at_end()) throw LoadError("trailing bytes after payload", off);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

std::string layer_terms_violation(const LayerTerms& t) {
  if (!finite_nonneg(t.occ_retention) || !finite_nonneg(t.agg_retention)) return "retentions must be finite and >= 0";
  if (!finite_pos(t.occ_limit) || !finite_pos(t.agg_limit)) return "limits must be finite and > 0";
  return {};
}

std::string xelt_terms_violation(const XeltTerms& t) {
  if (!finite_nonneg(t.retention)) return "xelt retention must be finite and >= 0";
  if (!finite_pos(t.limit)) return "xelt limit must be finite and > 0";
  if (!(std::isfinite(t.share) && t.share > 0.0 && t.share <= 1.0)) return "xelt share must lie in (0, 1]";
  return {};
}

std::string occurrence_violation(const EventOccurrence& e, std::size_t catalogue, double prev_timestamp) {
  if (e.event_id >= catalogue) return "event id outside catalogue";
  if (!(e.timestamp >= 0.0 && e.timestamp < 1.0)) return "timestamp outside [0, 1)";
  if (e.timestamp < prev_timestamp) return "timestamps out of order";
  if (!(e.z_prog_e >= 0.0 && e.z_prog_e <= 1.0)) return "z_prog_e outside [0, 1]";
  return {};
}

// --- CSV helpers -----------------------------------------------------------

std::string fmt(double v) {
  std::array<char, 32> b;
  const auto r = std::to_chars(b.data(), b.data() + b.size(), v, std::chars_format::general, 17);
  return std::string(b.data(), r.ptr);
}

class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads and checks the header row.
  void header(std::string_view expected) {
    if (!next_line() || line_ != expected) {
      throw LoadError("expected CSV header '" + std::string(expected) + "'", line_start_);
    }
  }

  // Splits the next non-empty line on `sep`; false at end of input.
  bool row(std::vector<std::string_view>& fields, char sep = ',') {
    do {
      if (!next_line()) return false;
    } while (line_.empty());
    fields.clear();
    std::string_view rest(line_);
    for (;;) {
      const auto cut = rest.find(sep);
      fields.push_back(rest.substr(0, cut));
      if (cut == std::string_view::npos) break;
      rest.remove_prefix(cut + 1);
    }
    return true;
  }

  std::uint64_t line_offset() const noexcept { return line_start_; }

  [[noreturn]] void fail(const std::string& what) const { throw LoadError(what, line_start_); }

  double real(std::string_view s) const {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail("malformed number '" + std::string(s) + "'");
    return v;
  }

  std::uint64_t integer(std::string_view s) const {
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail("malformed integer '" + std::string(s) + "'");
    return v;
  }

 private:
  bool next_line() {
    line_start_ = offset_;
    if (!std::getline(in_, line_)) return false;
    offset_ += line_.size() + 1;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    return true;
  }

  std::istream& in_;
  std::string line_;
  std::uint64_t offset_ = 0;
  std::uint64_t line_start_ = 0;
};

template <typename T>
T open_and(const std::filesystem::path& p, T (*fn)(std::istream&)) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return fn(in);
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot create " + p.string());
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& p) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace

Kind peek_kind(std::istream& in) {
  Reader r(in);
  char magic[8];
  r.raw(magic, sizeof magic, "magic");
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw LoadError("bad magic", 0);
  const auto kind = r.u8("kind");
  if (kind < 1 || kind > 4) throw LoadError("unknown file kind " + std::to_string(kind), 8);
  return static_cast<Kind>(kind);
}

// --- binary: YET -----------------------------------------------------------

void write_yet(std::ostream& out, const YearEventTable& yet) {
  Writer w(out);
  write_preamble(w, Kind::kYet);
  w.u64(yet.num_trials());
  w.u64(yet.num_occurrences());
  w.u64(yet.catalogue_size());
  for (std::size_t t = 0; t < yet.num_trials(); ++t) w.u64(yet.trial(t).size());
  for (std::size_t t = 0; t < yet.num_trials(); ++t) {
    for (const auto& e : yet.trial(t)) {
      w.u32(e.event_id);
      w.f64(e.timestamp);
      w.f64(e.z_prog_e);
    }
  }
}

YearEventTable read_yet(std::istream& in) {
  Reader r(in);
  read_preamble(r, Kind::kYet);
  const auto trials = r.u64("trial count");
  const auto occurrences = r.u64("occurrence count");
  const auto catalogue = r.u64("catalogue size");
  std::vector<std::uint64_t> lengths;
  lengths.reserve(std::min<std::uint64_t>(trials, kMaxReserve));
  std::uint64_t total = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto off = r.offset();
    lengths.push_back(r.u64("trial length"));
    total += lengths.back();
    if (total > occurrences) throw LoadError("trial lengths exceed occurrence count", off);
  }
  if (total != occurrences) throw LoadError("trial lengths do not sum to occurrence count", r.offset());

  YearEventTable yet(catalogue);
  yet.reserve(std::min<std::uint64_t>(trials, kMaxReserve), std::min<std::uint64_t>(occurrences, kMaxReserve));
  std::vector<EventOccurrence> trial;
  for (std::uint64_t t = 0; t < trials; ++t) {
    trial.resize(lengths[t]);
    double prev = 0.0;
    for (auto& e : trial) {
      const auto off = r.offset();
      e.event_id = r.u32("event id");
      e.timestamp = r.f64("timestamp");
      e.z_prog_e = r.f64("z_prog_e");
      if (auto msg = occurrence_violation(e, catalogue, prev); !msg.empty()) {
        throw LoadError("trial " + std::to_string(t) + ": " + msg, off);
      }
      prev = e.timestamp;
    }
    yet.add_trial(trial);
  }
  require_end(r);
  return yet;
}

// --- binary: XELT ----------------------------------------------------------

void write_xelts(std::ostream& out, const XeltSet& xelts, std::size_t catalogue_size) {
  Writer w(out);
  write_preamble(w, Kind::kXelt);
  std::uint64_t records = 0;
  for (const auto& x : xelts) records += x.size();
  w.u64(xelts.size());
  w.u64(records);
  w.u64(catalogue_size);
  for (const auto& x : xelts) w.u64(x.size());
  for (const auto& x : xelts) {
    for (const auto& rec : x) {
      w.u32(rec.event_id);
      w.f64(rec.mean_loss);
      w.f64(rec.z_e);
      w.f64(rec.sigma_i);
      w.f64(rec.sigma_c);
      w.f64(rec.max_loss);
    }
  }
}

XeltFile read_xelts(std::istream& in) {
  Reader r(in);
  read_preamble(r, Kind::kXelt);
  const auto num_xelts = r.u64("xelt count");
  const auto records = r.u64("record count");
  const auto catalogue = r.u64("catalogue size");
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  for (std::uint64_t x = 0; x < num_xelts; ++x) {
    const auto off = r.offset();
    counts.push_back(r.u64("record count"));
    total += counts.back();
    if (total > records) throw LoadError("xelt record counts exceed record total", off);
  }
  if (total != records) throw LoadError("xelt record counts do not sum to record total", r.offset());

  XeltFile file;
  file.catalogue_size = catalogue;
  file.xelts.resize(num_xelts);
  std::vector<bool> seen;
  for (std::uint64_t x = 0; x < num_xelts; ++x) {
    seen.assign(catalogue, false);
    auto& list = file.xelts[x];
    list.reserve(std::min<std::uint64_t>(counts[x], kMaxReserve));
    for (std::uint64_t i = 0; i < counts[x]; ++i) {
      const auto off = r.offset();
      XeltRecord rec;
      rec.event_id = r.u32("event id");
      rec.mean_loss = r.f64("mean loss");
      rec.z_e = r.f64("z_e");
      rec.sigma_i = r.f64("sigma_i");
      rec.sigma_c = r.f64("sigma_c");
      rec.max_loss = r.f64("max loss");
      const std::string where = "xelt " + std::to_string(x) + " event " + std::to_string(rec.event_id) + ": ";
      if (rec.event_id >= catalogue) throw LoadError(where + "event id outside catalogue", off);
      if (seen[rec.event_id]) throw LoadError(where + "duplicate event id", off);
      seen[rec.event_id] = true;
      if (auto msg = record_violation(rec); !msg.empty()) throw LoadError(where + msg, off);
      list.push_back(rec);
    }
  }
  require_end(r);
  return file;
}

// --- binary: Portfolio -----------------------------------------------------

void write_portfolio(std::ostream& out, const Portfolio& pf) {
  Writer w(out);
  write_preamble(w, Kind::kPortfolio);
  w.u64(pf.programs.size());
  w.u64(pf.num_layers());
  for (const auto& prog : pf.programs) {
    w.u64(prog.layers.size());
    for (const auto& layer : prog.layers) {
      w.f64(layer.terms.occ_retention);
      w.f64(layer.terms.occ_limit);
      w.f64(layer.terms.agg_retention);
      w.f64(layer.terms.agg_limit);
      w.u64(layer.xelt_ids.size());
      for (std::size_t j = 0; j < layer.xelt_ids.size(); ++j) {
        const XeltTerms xt = j < layer.xelt_terms.size() ? layer.xelt_terms[j] : XeltTerms::identity();
        w.u64(layer.xelt_ids[j]);
        w.f64(xt.retention);
        w.f64(xt.limit);
        w.f64(xt.share);
      }
    }
  }
}

Portfolio read_portfolio(std::istream& in) {
  Reader r(in);
  read_preamble(r, Kind::kPortfolio);
  const auto programs = r.u64("program count");
  const auto layers_total = r.u64("layer count");
  Portfolio pf;
  std::uint64_t layers_seen = 0;
  for (std::uint64_t p = 0; p < programs; ++p) {
    Program prog;
    const auto num_layers = r.u64("layer count");
    for (std::uint64_t l = 0; l < num_layers; ++l) {
      const auto off = r.offset();
      Layer layer;
      layer.terms.occ_retention = r.f64("occ retention");
      layer.terms.occ_limit = r.f64("occ limit");
      layer.terms.agg_retention = r.f64("agg retention");
      layer.terms.agg_limit = r.f64("agg limit");
      if (auto msg = layer_terms_violation(layer.terms); !msg.empty()) {
        throw LoadError("program " + std::to_string(p) + " layer " + std::to_string(l) + ": " + msg, off);
      }
      const auto nx = r.u64("xelt count");
      for (std::uint64_t j = 0; j < nx; ++j) {
        const auto xoff = r.offset();
        layer.xelt_ids.push_back(r.u64("xelt id"));
        XeltTerms xt;
        xt.retention = r.f64("xelt retention");
        xt.limit = r.f64("xelt limit");
        xt.share = r.f64("xelt share");
        if (auto msg = xelt_terms_violation(xt); !msg.empty()) throw LoadError(msg, xoff);
        layer.xelt_terms.push_back(xt);
      }
      prog.layers.push_back(std::move(layer));
      ++layers_seen;
    }
    pf.programs.push_back(std::move(prog));
  }
  if (layers_seen != layers_total) throw LoadError("layer count does not match header", r.offset());
  require_end(r);
  return pf;
}

// --- binary: YLT -----------------------------------------------------------

void write_ylt(std::ostream& out, const YearLossTable& ylt) {
  Writer w(out);
  write_preamble(w, Kind::kYlt);
  w.u64(ylt.losses.size());
  w.u64(ylt.program);
  w.u64(ylt.layer);
  for (std::size_t t = 0; t < ylt.losses.size(); ++t) {
    w.u64(t);
    w.f64(ylt.losses[t]);
  }
}

YearLossTable read_ylt(std::istream& in) {
  Reader r(in);
  read_preamble(r, Kind::kYlt);
  YearLossTable ylt;
  const auto trials = r.u64("trial count");
  ylt.program = r.u64("program index");
  ylt.layer = r.u64("layer index");
  ylt.losses.reserve(std::min<std::uint64_t>(trials, kMaxReserve));
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto off = r.offset();
    const auto id = r.u64("trial id");
    const double loss = r.f64("loss");
    if (id != t) throw LoadError("trial ids must run 0..N-1 in order", off);
    if (!finite_nonneg(loss)) throw LoadError("loss must be finite and >= 0", off);
    ylt.losses.push_back(loss);
  }
  require_end(r);
  return ylt;
}

// --- CSV -------------------------------------------------------------------

void write_yet_csv(std::ostream& out, const YearEventTable& yet) {
  out << "trial_id,event_id,timestamp,z_prog_e\n";
  for (std::size_t t = 0; t < yet.num_trials(); ++t) {
    for (const auto& e : yet.trial(t)) {
      out << t << ',' << e.event_id << ',' << fmt(e.timestamp) << ',' << fmt(e.z_prog_e) << '\n';
    }
  }
}

YearEventTable read_yet_csv(std::istream& in, std::size_t catalogue_size, std::size_t num_trials) {
  CsvReader csv(in);
  csv.header("trial_id,event_id,timestamp,z_prog_e");
  std::vector<std::vector<EventOccurrence>> trials(num_trials);
  std::vector<std::string_view> f;
  std::uint64_t last_trial = 0;
  while (csv.row(f)) {
    if (f.size() != 4) csv.fail("expected 4 fields");
    const auto t = csv.integer(f[0]);
    if (t < last_trial) csv.fail("trial ids must be non-decreasing");
    last_trial = t;
    const auto id = csv.integer(f[1]);
    if (id >= catalogue_size) csv.fail("event id outside catalogue");
    EventOccurrence e{static_cast<EventId>(id), csv.real(f[2]), csv.real(f[3])};
    if (num_trials != 0 && t >= num_trials) csv.fail("trial id beyond declared trial count");
    if (t >= trials.size()) trials.resize(t + 1);
    const double prev = trials[t].empty() ? 0.0 : trials[t].back().timestamp;
    if (auto msg = occurrence_violation(e, catalogue_size, prev); !msg.empty()) csv.fail(msg);
    trials[t].push_back(e);
  }
  YearEventTable yet(catalogue_size);
  for (const auto& t : trials) yet.add_trial(t);
  return yet;
}

void write_xelts_csv(std::ostream& out, const XeltSet& xelts) {
  out << "xelt_id,event_id,mean_loss,z_e,sigma_i,sigma_c,max_loss\n";
  for (std::size_t x = 0; x < xelts.size(); ++x) {
    for (const auto& r : xelts[x]) {
      out << x << ',' << r.event_id << ',' << fmt(r.mean_loss) << ',' << fmt(r.z_e) << ',' << fmt(r.sigma_i) << ','
          << fmt(r.sigma_c) << ',' << fmt(r.max_loss) << '\n';
    }
  }
}

XeltSet read_xelts_csv(std::istream& in, std::size_t catalogue_size, std::size_t num_xelts) {
  CsvReader csv(in);
  csv.header("xelt_id,event_id,mean_loss,z_e,sigma_i,sigma_c,max_loss");
  XeltSet xelts(num_xelts);
  std::vector<std::vector<bool>> seen(num_xelts);
  std::vector<std::string_view> f;
  while (csv.row(f)) {
    if (f.size() != 7) csv.fail("expected 7 fields");
    const auto x = csv.integer(f[0]);
    if (num_xelts != 0 && x >= num_xelts) csv.fail("xelt id beyond declared xelt count");
    const auto id = csv.integer(f[1]);
    if (id >= catalogue_size) csv.fail("event id outside catalogue");
    XeltRecord rec{static_cast<EventId>(id), csv.real(f[2]), csv.real(f[3]), csv.real(f[4]), csv.real(f[5]),
                   csv.real(f[6])};
    if (auto msg = record_violation(rec); !msg.empty()) csv.fail(msg);
    if (x >= xelts.size()) {
      xelts.resize(x + 1);
      seen.resize(x + 1);
    }
    if (seen[x].empty()) seen[x].assign(catalogue_size, false);
    if (seen[x][id]) csv.fail("duplicate event id in xelt");
    seen[x][id] = true;
    xelts[x].push_back(rec);
  }
  return xelts;
}

void write_portfolio_csv(std::ostream& out, const Portfolio& pf) {
  out << "program_id,layer_id,occ_retention,occ_limit,agg_retention,agg_limit,xelts\n";
  for (std::size_t p = 0; p < pf.programs.size(); ++p) {
    const auto& layers = pf.programs[p].layers;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& layer = layers[l];
      out << p << ',' << l << ',' << fmt(layer.terms.occ_retention) << ',' << fmt(layer.terms.occ_limit) << ','
          << fmt(layer.terms.agg_retention) << ',' << fmt(layer.terms.agg_limit) << ',';
      for (std::size_t j = 0; j < layer.xelt_ids.size(); ++j) {
        const XeltTerms xt = j < layer.xelt_terms.size() ? layer.xelt_terms[j] : XeltTerms::identity();
        if (j > 0) out << ';';
        out << layer.xelt_ids[j] << ':' << fmt(xt.retention) << ':' << fmt(xt.limit) << ':' << fmt(xt.share);
      }
      out << '\n';
    }
  }
}

Portfolio read_portfolio_csv(std::istream& in) {
  CsvReader csv(in);
  csv.header("program_id,layer_id,occ_retention,occ_limit,agg_retention,agg_limit,xelts");
  Portfolio pf;
  std::vector<std::string_view> f;
  while (csv.row(f)) {
    if (f.size() != 7) csv.fail("expected 7 fields");
    const auto p = csv.integer(f[0]);
    const auto l = csv.integer(f[1]);
    if (p == pf.programs.size()) pf.programs.emplace_back();
    if (p + 1 != pf.programs.size()) csv.fail("program ids must be contiguous from 0");
    auto& layers = pf.programs.back().layers;
    if (l != layers.size()) csv.fail("layer ids must be contiguous from 0 within a program");
    Layer layer;
    layer.terms = {csv.real(f[2]), csv.real(f[3]), csv.real(f[4]), csv.real(f[5])};
    if (auto msg = layer_terms_violation(layer.terms); !msg.empty()) csv.fail(msg);
    std::string_view rest = f[6];
    while (!rest.empty()) {
      const auto cut = rest.find(';');
      const std::string_view item = rest.substr(0, cut);
      rest = cut == std::string_view::npos ? std::string_view{} : rest.substr(cut + 1);
      std::array<std::string_view, 4> parts;
      std::string_view it = item;
      for (std::size_t k = 0; k < 4; ++k) {
        const auto c = it.find(':');
        if ((k < 3) == (c == std::string_view::npos)) csv.fail("xelt entry must be id:retention:limit:share");
        parts[k] = it.substr(0, c);
        if (c != std::string_view::npos) it.remove_prefix(c + 1);
      }
      layer.xelt_ids.push_back(csv.integer(parts[0]));
      const XeltTerms xt{csv.real(parts[1]), csv.real(parts[2]), csv.real(parts[3])};
      if (auto msg = xelt_terms_violation(xt); !msg.empty()) csv.fail(msg);
      layer.xelt_terms.push_back(xt);
    }
    layers.push_back(std::move(layer));
  }
  return pf;
}

void write_ylt_csv(std::ostream& out, const YearLossTable& ylt) {
  out << "trial_id,loss\n";
  for (std::size_t t = 0; t < ylt.losses.size(); ++t) out << t << ',' << fmt(ylt.losses[t]) << '\n';
}

YearLossTable read_ylt_csv(std::istream& in) {
  CsvReader csv(in);
  csv.header("trial_id,loss");
  YearLossTable ylt;
  std::vector<std::string_view> f;
  while (csv.row(f)) {
    if (f.size() != 2) csv.fail("expected 2 fields");
    if (csv.integer(f[0]) != ylt.losses.size()) csv.fail("trial ids must run 0..N-1 in order");
    const double loss = csv.real(f[1]);
    if (!finite_nonneg(loss)) csv.fail("loss must be finite and >= 0");
    ylt.losses.push_back(loss);
  }
  return ylt;
}

// --- files -----------------------------------------------------------------

void save_yet(const std::filesystem::path& p, const YearEventTable& yet) {
  auto out = open_out(p);
  write_yet(out, yet);
  close_out(out, p);
}

YearEventTable load_yet(const std::filesystem::path& p) { return open_and<YearEventTable>(p, &read_yet); }

void save_xelts(const std::filesystem::path& p, const XeltSet& xelts, std::size_t catalogue_size) {
  auto out = open_out(p);
  write_xelts(out, xelts, catalogue_size);
  close_out(out, p);
}

XeltFile load_xelts(const std::filesystem::path& p) { return open_and<XeltFile>(p, &read_xelts); }

void save_portfolio(const std::filesystem::path& p, const Portfolio& pf) {
  auto out = open_out(p);
  write_portfolio(out, pf);
  close_out(out, p);
}

Portfolio load_portfolio(const std::filesystem::path& p) { return open_and<Portfolio>(p, &read_portfolio); }

void save_ylt(const std::filesystem::path& p, const YearLossTable& ylt) {
  auto out = open_out(p);
  write_ylt(out, ylt);
  close_out(out, p);
}

YearLossTable load_ylt(const std::filesystem::path& p) { return open_and<YearLossTable>(p, &read_ylt); }

void save_ylt_csv(const std::filesystem::path& p, const YearLossTable& ylt) {
  auto out = open_out(p);
  write_ylt_csv(out, ylt);
  close_out(out, p);
}

YearLossTable load_ylt_any(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  char head[8] = {};
  in.read(head, sizeof head);
  const bool binary = in.gcount() == sizeof head && std::memcmp(head, kMagic, sizeof head) == 0;
  in.clear();
  in.seekg(0);
  return binary ? read_ylt(in) : read_ylt_csv(in);
}

}  // namespace agrisk::io
