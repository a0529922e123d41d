#include "agrisk/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "agrisk/bench.hpp"
#include "agrisk/engine.hpp"
#include "agrisk/errors.hpp"
#include "agrisk/gen.hpp"
#include "agrisk/io.hpp"
#include "agrisk/measures.hpp"

namespace agrisk::cli {
namespace {

namespace fs = std::filesystem;

const std::map<std::string, Precision> kPrecisions{{"double", Precision::kDouble}, {"single", Precision::kSingle}};
const std::map<std::string, AggregateMode> kAggregateModes{{"running", AggregateMode::kRunning},
                                                           {"end", AggregateMode::kEndOfTrial}};

void add_spec_options(CLI::App* cmd, GenSpec& s) {
  cmd->add_option("--seed", s.seed, "Master random seed")->capture_default_str();
  cmd->add_option("--trials", s.num_trials, "Number of trials")->capture_default_str();
  cmd->add_option("--first-trial", s.first_trial, "Index of the first generated trial")->capture_default_str();
  cmd->add_option("--events-min", s.events_per_trial.lo, "Minimum events per trial")->capture_default_str();
  cmd->add_option("--events-max", s.events_per_trial.hi, "Maximum events per trial")->capture_default_str();
  cmd->add_option("--catalogue", s.catalogue_size, "Event catalogue size")->capture_default_str();
  cmd->add_option("--xelts", s.num_xelts, "Number of XELTs")->capture_default_str();
  cmd->add_option("--records-min", s.records_per_xelt.lo, "Minimum records per XELT")->capture_default_str();
  cmd->add_option("--records-max", s.records_per_xelt.hi, "Maximum records per XELT")->capture_default_str();
  cmd->add_option("--mean-loss-min", s.mean_loss.lo, "Lower bound of record mean losses")->capture_default_str();
  cmd->add_option("--mean-loss-max", s.mean_loss.hi, "Upper bound of record mean losses")->capture_default_str();
  cmd->add_option("--sigma-i-min", s.sigma_i_fraction.lo, "Lower bound of sigma_i / mean")->capture_default_str();
  cmd->add_option("--sigma-i-max", s.sigma_i_fraction.hi, "Upper bound of sigma_i / mean")->capture_default_str();
  cmd->add_option("--sigma-c-min", s.sigma_c_fraction.lo, "Lower bound of sigma_c / mean")->capture_default_str();
  cmd->add_option("--sigma-c-max", s.sigma_c_fraction.hi, "Upper bound of sigma_c / mean")->capture_default_str();
  cmd->add_option("--max-loss-multiplier", s.max_loss_multiplier, "max_loss / mean")->capture_default_str();
  cmd->add_option("--programs", s.num_programs, "Number of programs")->capture_default_str();
  cmd->add_option("--layers-per-program", s.layers_per_program, "Layers in each program")->capture_default_str();
  cmd->add_option("--xelts-per-layer-min", s.xelts_per_layer.lo, "Minimum XELTs covered by a layer")
      ->capture_default_str();
  cmd->add_option("--xelts-per-layer-max", s.xelts_per_layer.hi, "Maximum XELTs covered by a layer")
      ->capture_default_str();
  cmd->add_flag("!--no-xelt-terms", s.xelt_terms, "Give every XELT identity terms");
}

bool is_binary(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  char head[sizeof io::kMagic] = {};
  in.read(head, sizeof head);
  return in.gcount() == sizeof head && std::memcmp(head, io::kMagic, sizeof head) == 0;
}

bool wants_csv(const fs::path& p) { return p.extension() == ".csv"; }

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot create " + p.string());
  return out;
}

std::size_t require_catalogue(std::size_t catalogue, const fs::path& p) {
  if (catalogue == 0) throw ValidationError(p.string() + " is CSV; pass --catalogue to give the catalogue size");
  return catalogue;
}

// --- generate --------------------------------------------------------------

struct GenerateArgs {
  GenSpec spec;
  fs::path output_dir;
  std::string format = "bin";
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const auto problems = validate(a.spec);
  if (!problems.empty()) {
    std::string msg = "invalid generation settings:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationError(msg);
  }
  fs::create_directories(a.output_dir);
  const bool csv = a.format == "csv";
  const std::string ext = csv ? ".csv" : ".bin";
  const YearEventTable yet = generate_yet(a.spec);
  const XeltSet xelts = generate_xelts(a.spec);
  const Portfolio pf = generate_portfolio(a.spec);
  const fs::path yet_path = a.output_dir / ("yet" + ext);
  const fs::path xelt_path = a.output_dir / ("xelts" + ext);
  const fs::path pf_path = a.output_dir / ("portfolio" + ext);
  if (csv) {
    auto y = open_out(yet_path);
    io::write_yet_csv(y, yet);
    auto x = open_out(xelt_path);
    io::write_xelts_csv(x, xelts);
    auto p = open_out(pf_path);
    io::write_portfolio_csv(p, pf);
  } else {
    io::save_yet(yet_path, yet);
    io::save_xelts(xelt_path, xelts, a.spec.catalogue_size);
    io::save_portfolio(pf_path, pf);
  }
  out << "file,kind\n" << yet_path.string() << ",yet\n" << xelt_path.string() << ",xelt\n"
      << pf_path.string() << ",portfolio\n";
  return kExitOk;
}

// --- run -------------------------------------------------------------------

struct RunArgs {
  fs::path yet;
  fs::path xelts;
  fs::path portfolio;
  fs::path output;
  fs::path rollup;
  std::size_t catalogue = 0;
  std::size_t workers = 1;
  std::size_t chunk_size = 32;
  Precision precision = Precision::kDouble;
  AggregateMode aggregate = AggregateMode::kRunning;
  bool secondary_uncertainty = true;
  bool xelt_terms = true;
};

fs::path layer_path(const fs::path& base, std::size_t program, std::size_t layer) {
  fs::path p = base;
  p.replace_extension();
  p += ".p" + std::to_string(program) + ".l" + std::to_string(layer);
  p += base.extension();
  return p;
}

void save_any(const fs::path& p, const YearLossTable& ylt) {
  if (wants_csv(p)) {
    io::save_ylt_csv(p, ylt);
  } else {
    io::save_ylt(p, ylt);
  }
}

int cmd_run(const RunArgs& a, std::ostream& out) {
  XeltSet xelts;
  std::size_t catalogue = a.catalogue;
  if (is_binary(a.xelts)) {
    auto file = io::load_xelts(a.xelts);
    xelts = std::move(file.xelts);
    if (catalogue == 0) catalogue = file.catalogue_size;
  } else {
    auto in = open_in(a.xelts);
    xelts = io::read_xelts_csv(in, require_catalogue(catalogue, a.xelts));
  }
  YearEventTable yet;
  if (is_binary(a.yet)) {
    yet = io::load_yet(a.yet);
  } else {
    auto in = open_in(a.yet);
    yet = io::read_yet_csv(in, require_catalogue(catalogue, a.yet));
  }
  Portfolio pf;
  if (is_binary(a.portfolio)) {
    pf = io::load_portfolio(a.portfolio);
  } else {
    auto in = open_in(a.portfolio);
    pf = io::read_portfolio_csv(in);
  }

  const LossTable table = build_loss_table(xelts, std::max(catalogue, yet.catalogue_size()));
  EngineConfig cfg;
  cfg.num_workers = a.workers;
  cfg.chunk_size = a.chunk_size;
  cfg.precision = a.precision;
  cfg.aggregate_mode = a.aggregate;
  cfg.secondary_uncertainty_enabled = a.secondary_uncertainty;
  cfg.xelt_terms_enabled = a.xelt_terms;
  const RunResult result = run_portfolio(pf, yet, table, cfg);

  if (result.layers.size() == 1) {
    save_any(a.output, result.layers.front());
  } else {
    for (const auto& ylt : result.layers) save_any(layer_path(a.output, ylt.program, ylt.layer), ylt);
  }
  if (!a.rollup.empty()) {
    // The rollup has no single program or layer; both header fields are 0.
    save_any(a.rollup, YearLossTable{0, 0, portfolio_rollup(result.layers)});
  }

  const PhaseTimes& p = result.phases;
  out << "phase,wall_ms\n"
      << "lookup," << p.lookup_ms << '\n'
      << "secondary_uncertainty," << p.secondary_uncertainty_ms << '\n'
      << "financial_terms," << p.financial_terms_ms << '\n'
      << "total," << p.total_ms << '\n';
  return kExitOk;
}

// --- measures --------------------------------------------------------------

struct MeasuresArgs {
  fs::path ylt;
  fs::path output;
  std::vector<double> return_periods{10, 50, 100, 250, 500, 1000};
  std::vector<double> tvar_levels{0.99, 0.996};
};

std::string fmt17(double v) {
  char b[32];
  const auto r = std::to_chars(b, b + sizeof b, v, std::chars_format::general, 17);
  return std::string(b, r.ptr);
}

// Shortest text that reads back as v.
std::string fmt_short(double v) {
  char b[32];
  const auto r = std::to_chars(b, b + sizeof b, v);
  return std::string(b, r.ptr);
}

void write_measures(std::ostream& out, const MeasuresArgs& a, const YearLossTable& ylt) {
  const ExceedanceCurve curve = exceedance_curve(ylt.losses);
  out << "measure,parameter,value\n";
  for (double rp : a.return_periods) out << "pml," << fmt_short(rp) << ',' << fmt17(pml(curve, rp)) << '\n';
  for (double q : a.tvar_levels) out << "var," << fmt_short(q) << ',' << fmt17(value_at_risk(ylt.losses, q)) << '\n';
  for (double q : a.tvar_levels) out << "tvar," << fmt_short(q) << ',' << fmt17(tvar(ylt.losses, q)) << '\n';
}

int cmd_measures(const MeasuresArgs& a, std::ostream& out) {
  const YearLossTable ylt = io::load_ylt_any(a.ylt);
  if (ylt.losses.empty()) throw DomainError(a.ylt.string() + " holds no trials");
  if (a.output.empty()) {
    write_measures(out, a, ylt);
  } else {
    auto f = open_out(a.output);
    write_measures(f, a, ylt);
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + a.output.string());
  }
  return kExitOk;
}

// --- bench -----------------------------------------------------------------

struct BenchArgs {
  BenchConfig cfg;
  fs::path output;
  bool degenerate = false;
};

int cmd_bench(BenchArgs a, std::ostream& out) {
  if (a.degenerate) {
    a.cfg.spec.sigma_i_fraction = {0.0, 0.0};
    a.cfg.spec.sigma_c_fraction = {0.0, 0.0};
  }
  const BenchReport report = run_bench(a.cfg);
  if (a.output.empty()) {
    write_bench_csv(out, report);
  } else {
    auto f = open_out(a.output);
    write_bench_csv(f, report);
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Aggregate risk analysis with primary and secondary uncertainty", "agrisk"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read option defaults from a TOML file");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic YET, XELT set and portfolio");
  add_spec_options(generate, gen.spec);
  generate->add_option("--output-dir", gen.output_dir, "Directory for yet, xelts and portfolio files")->required();
  generate->add_option("--format", gen.format, "File encoding")
      ->check(CLI::IsMember({"bin", "csv"}))
      ->capture_default_str();

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Simulate every layer and write year loss tables");
  run_cmd->add_option("--yet", run_args.yet, "Year event table (binary or CSV)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--xelts", run_args.xelts, "XELT set (binary or CSV)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--portfolio", run_args.portfolio, "Portfolio (binary or CSV)")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--output", run_args.output,
                      "YLT path; .csv selects CSV. With several layers, BASE.p<program>.l<layer>.EXT per layer")
      ->required();
  run_cmd->add_option("--rollup", run_args.rollup, "Also write the per-trial sum over all layers");
  run_cmd->add_option("--catalogue", run_args.catalogue, "Catalogue size, required for CSV inputs");
  run_cmd->add_option("--workers", run_args.workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run_cmd->add_option("--chunk-size", run_args.chunk_size, "Trials per work unit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run_cmd->add_option("--precision", run_args.precision, "Arithmetic precision: double or single")
      ->transform(CLI::CheckedTransformer(kPrecisions, CLI::ignore_case))
      ->default_str("double");
  run_cmd->add_option("--aggregate", run_args.aggregate, "Aggregate terms: running or end")
      ->transform(CLI::CheckedTransformer(kAggregateModes, CLI::ignore_case))
      ->default_str("running");
  run_cmd->add_flag("!--no-secondary-uncertainty", run_args.secondary_uncertainty,
                    "Use record mean losses without sampling");
  run_cmd->add_flag("!--no-xelt-terms", run_args.xelt_terms, "Ignore per-XELT terms");

  MeasuresArgs meas;
  auto* measures = app.add_subcommand("measures", "PML, VaR and TVaR of a year loss table");
  measures->add_option("ylt", meas.ylt, "YLT file (binary or CSV)")->required()->check(CLI::ExistingFile);
  measures->add_option("--return-periods", meas.return_periods, "Return periods for PML")
      ->delimiter(',')
      ->capture_default_str();
  measures->add_option("--tvar-levels", meas.tvar_levels, "Confidence levels for VaR and TVaR")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  measures->add_option("--output", meas.output, "CSV path; standard output when omitted");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Phase timings over trial and worker sweeps");
  add_spec_options(bench_cmd, bench.cfg.spec);
  bench_cmd->remove_option(bench_cmd->get_option("--trials"));
  bench_cmd->remove_option(bench_cmd->get_option("--first-trial"));
  bench_cmd->add_option("--trials", bench.cfg.trials, "Trial counts to sweep")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--workers", bench.cfg.workers, "Worker counts to sweep")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--repeats", bench.cfg.repeats, "Timed runs per configuration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--warmup-trials", bench.cfg.warmup_trials, "Untimed trials run first; 0 disables")
      ->capture_default_str();
  bench_cmd->add_option("--batch-trials", bench.cfg.batch_trials, "Trials generated and held in memory at once")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--chunk-size", bench.cfg.chunk_size, "Trials per work unit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--precision", bench.cfg.precision, "Arithmetic precision: double or single")
      ->transform(CLI::CheckedTransformer(kPrecisions, CLI::ignore_case))
      ->default_str("double");
  bench_cmd->add_flag("--degenerate", bench.degenerate, "Zero every standard deviation");
  bench_cmd->add_option("--output", bench.output, "CSV path; standard output when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, out);
    if (run_cmd->parsed()) return cmd_run(run_args, out);
    if (measures->parsed()) return cmd_measures(meas, out);
    if (bench_cmd->parsed()) return cmd_bench(bench, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace agrisk::cli
