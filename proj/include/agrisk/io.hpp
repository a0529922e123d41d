#pragma once

// Binary and CSV serialization.
//
// Binary layout (all integers and IEEE-754 doubles little-endian, no padding):
//
//   header   magic "AGRISK01" (8 bytes) | kind u8 | format_version u16
//            followed by the kind's count fields (u64 each):
//     YET        num_trials, num_occurrences, catalogue_size
//     XELT       num_xelts, num_records, catalogue_size
//     PORTFOLIO  num_programs, num_layers
//     YLT        num_trials, program, layer
//
//   YET        num_trials x u64 trial length, then per occurrence
//              u32 event_id | f64 timestamp | f64 z_prog_e             (20 B)
//   XELT       num_xelts x u64 record count, then per record
//              u32 event_id | f64 mean_loss | f64 z_e | f64 sigma_i |
//              f64 sigma_c | f64 max_loss                              (44 B)
//   PORTFOLIO  per program: u64 num_layers; per layer: f64 occ_retention |
//              f64 occ_limit | f64 agg_retention | f64 agg_limit |
//              u64 num_xelts, then per XELT u64 xelt_id | f64 retention |
//              f64 limit | f64 share
//   YLT        per trial: u64 trial_id | f64 loss                      (16 B)
//
// CSV files carry a header row and use 17 significant digits:
//   YET        trial_id,event_id,timestamp,z_prog_e
//   XELT       xelt_id,event_id,mean_loss,z_e,sigma_i,sigma_c,max_loss
//   PORTFOLIO  program_id,layer_id,occ_retention,occ_limit,agg_retention,
//              agg_limit,xelts   with xelts = id:retention:limit:share;...
//   YLT        trial_id,loss

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "agrisk/engine.hpp"
#include "agrisk/model.hpp"

namespace agrisk::io {

inline constexpr char kMagic[8] = {'A', 'G', 'R', 'I', 'S', 'K', '0', '1'};
inline constexpr std::uint16_t kFormatVersion = 1;

enum class Kind : std::uint8_t { kYet = 1, kXelt = 2, kPortfolio = 3, kYlt = 4 };

inline constexpr std::size_t kPreambleBytes = 8 + 1 + 2;
inline constexpr std::size_t kYltHeaderBytes = kPreambleBytes + 3 * 8;
inline constexpr std::size_t kYltEntryBytes = 16;

// Reads the kind byte of a binary file without decoding the rest.
Kind peek_kind(std::istream& in);

void write_yet(std::ostream& out, const YearEventTable& yet);
YearEventTable read_yet(std::istream& in);
void write_xelts(std::ostream& out, const XeltSet& xelts, std::size_t catalogue_size);
struct XeltFile {
  XeltSet xelts;
  std::size_t catalogue_size = 0;
};
XeltFile read_xelts(std::istream& in);
void write_portfolio(std::ostream& out, const Portfolio& pf);
Portfolio read_portfolio(std::istream& in);
void write_ylt(std::ostream& out, const YearLossTable& ylt);
YearLossTable read_ylt(std::istream& in);

void write_yet_csv(std::ostream& out, const YearEventTable& yet);
// num_trials = 0 infers the count from the largest trial id.
YearEventTable read_yet_csv(std::istream& in, std::size_t catalogue_size, std::size_t num_trials = 0);
void write_xelts_csv(std::ostream& out, const XeltSet& xelts);
// num_xelts = 0 infers the count from the largest xelt id.
XeltSet read_xelts_csv(std::istream& in, std::size_t catalogue_size, std::size_t num_xelts = 0);
void write_portfolio_csv(std::ostream& out, const Portfolio& pf);
Portfolio read_portfolio_csv(std::istream& in);
void write_ylt_csv(std::ostream& out, const YearLossTable& ylt);
YearLossTable read_ylt_csv(std::istream& in);

// Path helpers: open the file, throw LoadError / std::runtime_error on I/O
// failure and dispatch to the stream functions above.
void save_yet(const std::filesystem::path& p, const YearEventTable& yet);
YearEventTable load_yet(const std::filesystem::path& p);
void save_xelts(const std::filesystem::path& p, const XeltSet& xelts, std::size_t catalogue_size);
XeltFile load_xelts(const std::filesystem::path& p);
void save_portfolio(const std::filesystem::path& p, const Portfolio& pf);
Portfolio load_portfolio(const std::filesystem::path& p);
void save_ylt(const std::filesystem::path& p, const YearLossTable& ylt);
YearLossTable load_ylt(const std::filesystem::path& p);
void save_ylt_csv(const std::filesystem::path& p, const YearLossTable& ylt);
// Loads a YLT in either encoding, chosen by the leading magic bytes.
YearLossTable load_ylt_any(const std::filesystem::path& p);

}  // namespace agrisk::io
