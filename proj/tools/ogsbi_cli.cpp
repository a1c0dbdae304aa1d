// SPDX-License-Identifier: Apache-2.0
//
// ogsbi: command line front end.
//
//   ogsbi synth    --spec scenario.json --out Y.csv
//   ogsbi estimate --input Y.csv --sources 2 --grid-deg 2 --out spectrum.csv
//   ogsbi bench    --spec experiment.json --out report.csv
//   ogsbi outliers --trials 50 --format json
//   ogsbi kstest   --snr-db 0,10 --grid-deg 0.5,1,2,4
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "ogsbi/matrix_io.hpp"
#include "ogsbi/report.hpp"
#include "ogsbi/svd_reduce.hpp"

namespace {

using namespace ogsbi;

struct Overrides {
  std::string spec;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::vector<double> grid_deg;
  std::vector<std::string> snr_db;
  std::optional<Index> snapshots;
  std::optional<int> trials;
  std::string algo;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--spec", o.spec, "JSON spec file")->check(CLI::ExistingFile);
  app->add_option("--out", o.out, "output file (default stdout)");
  app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--seed", o.seed, "base seed");
}

void add_bench_flags(CLI::App* app, Overrides& o) {
  add_common(app, o);
  app->add_option("--grid-deg", o.grid_deg, "grid interval(s) in degrees")->delimiter(',');
  app->add_option("--snr-db", o.snr_db, "SNR value(s) in dB, or inf")->delimiter(',');
  app->add_option("--snapshots", o.snapshots, "snapshots per trial");
  app->add_option("--trials", o.trials, "Monte Carlo trials per cell");
  app->add_option("--algo", o.algo, "ogsbi or ogsbi-svd")->check(CLI::IsMember({"ogsbi", "ogsbi-svd"}));
  app->add_option("--threads", o.threads, "worker threads, 0 = all cores");
}

std::vector<double> parse_snrs(const std::vector<std::string>& in) {
  std::vector<double> out;
  for (const auto& s : in) out.push_back(parse_double(s));
  return out;
}

// Flags override whatever the spec file (or the kind's defaults) set.
ExperimentSpec build_spec(ExperimentKind kind, const Overrides& o, bool force_kind) {
  ExperimentSpec s = o.spec.empty() ? default_spec(kind) : spec_from_json(read_text_file(o.spec));
  if (force_kind) s.kind = kind;
  if (o.seed) s.base_seed = *o.seed;
  if (!o.grid_deg.empty()) s.grid_deg = o.grid_deg;
  if (!o.snr_db.empty()) s.snr_db = parse_snrs(o.snr_db);
  if (o.snapshots) s.scenario.snapshots = *o.snapshots;
  if (o.trials) s.trials = *o.trials;
  if (!o.algo.empty()) s.algo = parse_algorithm(o.algo);
  if (o.threads) s.threads = *o.threads;
  return s;
}

template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  fn(os);
  if (!os) throw std::runtime_error("write failed: " + path);
}

void emit_report(const AggregateReport& report, const Overrides& o) {
  with_output(o.out, [&](std::ostream& os) {
    if (parse_format(o.format) == ReportFormat::csv)
      write_report_csv(report, os);
    else
      os << report_to_json(report) << '\n';
  });
  for (const auto& c : report.cells)
    if (c.degraded)
      std::cerr << "warning: cell snr=" << format_double(c.snr_db) << " r=" << format_double(c.r_deg) << " lost "
                << c.failures << " trials\n";
}

int cmd_synth(const Overrides& o) {
  ScenarioFile f;
  if (!o.spec.empty()) f = scenario_from_json(read_text_file(o.spec));
  else f.scenario.intervals_deg = {{58.0, 62.0}, {86.0, 90.0}};
  if (o.seed) f.seed = *o.seed;
  if (!o.snr_db.empty()) f.snr_db = parse_double(o.snr_db.front());
  if (o.snapshots) f.scenario.snapshots = *o.snapshots;

  Rng rng(f.seed);
  Scenario sc;
  if (f.scenario.doas_deg.empty()) {
    std::vector<std::pair<double, double>> iv;
    for (const auto& [lo, hi] : f.scenario.intervals_deg) iv.emplace_back(deg2rad(lo), deg2rad(hi));
    sc.doas = draw_doas(iv, rng);
  } else {
    for (double d : f.scenario.doas_deg) sc.doas.push_back(deg2rad(d));
  }
  sc.snapshots = f.scenario.snapshots;
  sc.snr_db = f.snr_db;
  sc.seed = rng();
  sc.source_model = f.scenario.source_model;
  const SnapshotData data = synthesize(sc, UlaConfig(f.scenario.sensors));

  with_output(o.out, [&](std::ostream& os) { write_snapshots_csv(data.Y, os); });
  std::cerr << "doas_deg:";
  for (double d : sc.doas) std::cerr << ' ' << format_double(rad2deg(d));
  std::cerr << '\n';
  return 0;
}

int cmd_estimate(const Overrides& o, const std::string& input, Index sources) {
  const CMatrix Y = load_snapshots(input);
  const double r = o.grid_deg.empty() ? 2.0 : o.grid_deg.front();
  const Dictionary dict = build_dictionary(Grid::from_degrees(r), UlaConfig(Y.rows()));
  InferenceConfig cfg;
  cfg.sources = sources;
  cfg.track_evidence = false;

  const bool svd = o.algo.empty() ? Y.cols() > 1 : parse_algorithm(o.algo) == Algorithm::ogsbi_svd;
  InferenceResult res;
  std::optional<Index> rank;
  if (svd) {
    SvdInferenceResult s = run_ogsbi_svd(Y, dict, cfg);
    rank = s.V1.cols();
    res = std::move(s.inference);
  } else {
    res = run_ogsbi(Y, dict, cfg);
  }
  const Spectrum spectrum = estimate_powers(res.posterior, res.state, dict.grid, Y.cols(), rank);
  const DoaEstimate est = extract_doas(spectrum, sources);

  with_output(o.out, [&](std::ostream& os) {
    if (parse_format(o.format) == ReportFormat::csv) {
      write_spectrum_csv(spectrum, dict.grid, os);
      return;
    }
    nlohmann::json j;
    j["iterations"] = res.trace.iterations();
    j["converged"] = res.trace.converged;
    for (double a : est.angles) j["doas_deg"].push_back(rad2deg(a));
    for (Index n = 0; n < dict.grid.size(); ++n) {
      j["spectrum"]["grid_deg"].push_back(rad2deg(dict.grid[n]));
      j["spectrum"]["power"].push_back(spectrum.powers[n]);
      j["spectrum"]["beta_deg"].push_back(rad2deg(res.state.beta[n]));
      j["spectrum"]["refined_deg"].push_back(rad2deg(spectrum.refined_angles[n]));
    }
    os << j.dump(2) << '\n';
  });
  std::cerr << "doas_deg:";
  for (double a : est.angles) std::cerr << ' ' << format_double(rad2deg(a));
  std::cerr << "  (" << res.trace.iterations() << " iterations" << (res.trace.converged ? "" : ", not converged")
            << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Off-grid sparse Bayesian DOA estimation"};
  app.require_subcommand(1);

  Overrides synth_o, est_o, bench_o, out_o, ks_o;
  auto* synth = app.add_subcommand("synth", "synthesize snapshots from a scenario file");
  add_common(synth, synth_o);
  synth->add_option("--snr-db", synth_o.snr_db, "SNR in dB, or inf");
  synth->add_option("--snapshots", synth_o.snapshots, "snapshots");

  std::string input;
  Index sources = 1;
  auto* est = app.add_subcommand("estimate", "estimate DOAs from a snapshot CSV");
  est->add_option("--out", est_o.out, "spectrum output (default stdout)");
  est->add_option("--format", est_o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  est->add_option("--input", input, "snapshot CSV")->required()->check(CLI::ExistingFile);
  est->add_option("--sources", sources, "number of sources K")->required()->check(CLI::PositiveNumber);
  est->add_option("--grid-deg", est_o.grid_deg, "grid interval in degrees");
  est->add_option("--algo", est_o.algo, "ogsbi or ogsbi-svd")->check(CLI::IsMember({"ogsbi", "ogsbi-svd"}));

  std::string kind = "mmv_sweep";
  auto* bench = app.add_subcommand("bench", "run a Monte Carlo experiment");
  add_bench_flags(bench, bench_o);
  bench->add_option("--kind", kind, "experiment kind when no spec file is given")
      ->check(CLI::IsMember({"mmv_sweep", "smv_table", "ks_validation", "outlier_study", "single_run"}));

  auto* outliers = app.add_subcommand("outliers", "outlier sensitivity study");
  add_bench_flags(outliers, out_o);
  auto* ks = app.add_subcommand("kstest", "Gaussianity check of the total noise");
  add_bench_flags(ks, ks_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(synth_o);
    if (est->parsed()) return cmd_estimate(est_o, input, sources);
    if (bench->parsed()) {
      emit_report(run_experiment(build_spec(parse_kind(kind), bench_o, false)), bench_o);
      return 0;
    }
    if (outliers->parsed()) {
      emit_report(outlier_study(build_spec(ExperimentKind::outlier_study, out_o, true)), out_o);
      return 0;
    }
    if (ks->parsed()) {
      emit_report(ks_validation(build_spec(ExperimentKind::ks_validation, ks_o, true)), ks_o);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
