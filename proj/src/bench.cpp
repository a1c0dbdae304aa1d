// SPDX-License-Identifier: Apache-2.0
#include "ogsbi/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include "ogsbi/spectrum.hpp"
#include "ogsbi/svd_reduce.hpp"

namespace ogsbi {
namespace {

constexpr int kMaxAttempts = 10;
constexpr double kDegradedFraction = 0.05;

Rng trial_rng(std::uint64_t base, int trial, int attempt) {
  const std::uint64_t s = base + static_cast<std::uint64_t>(trial);
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(attempt)};
  return Rng(seq);
}

std::vector<double> to_rad(const std::vector<double>& deg) {
  std::vector<double> out;
  for (double d : deg) out.push_back(deg2rad(d));
  return out;
}

struct CellSetup {
  double snr_db;
  double r_deg;
  std::optional<double> kappa;
  const Dictionary* dict;
};

enum class TrialMode { estimate, ks };

Scenario draw_scenario(const ExperimentSpec& spec, double snr_db, Rng& rng) {
  Scenario sc;
  if (spec.scenario.doas_deg.empty()) {
    std::vector<std::pair<double, double>> iv;
    for (const auto& [lo, hi] : spec.scenario.intervals_deg) iv.emplace_back(deg2rad(lo), deg2rad(hi));
    sc.doas = draw_doas(iv, rng);
  } else {
    sc.doas = to_rad(spec.scenario.doas_deg);
  }
  sc.snapshots = spec.scenario.snapshots;
  sc.snr_db = snr_db;
  sc.seed = rng();
  sc.source_model = spec.scenario.source_model;
  return sc;
}

void estimate_attempt(const ExperimentSpec& spec, const CellSetup& cell, Rng& rng, TrialResult& out) {
  const Dictionary& dict = *cell.dict;
  const Scenario sc = draw_scenario(spec, cell.snr_db, rng);
  SnapshotData data = synthesize(sc, dict.ula);
  // A collision makes the on-grid ground truth ambiguous; re-draw.
  ground_truth_map(sc, data.S, dict.grid);
  CMatrix Y = std::move(data.Y);
  if (cell.kappa) Y = inject_outliers(Y, spec.outlier_count, *cell.kappa, rng);

  InferenceConfig cfg = spec.inference;
  cfg.sources = sc.sources();
  cfg.track_evidence = false;

  const auto t0 = std::chrono::steady_clock::now();
  DoaEstimate est;
  InferenceTrace trace;
  if (spec.algo == Algorithm::ogsbi_svd) {
    SvdInferenceResult res = run_ogsbi_svd(Y, dict, cfg);
    const Spectrum s = estimate_powers(res.inference.posterior, res.inference.state, dict.grid, Y.cols(), res.V1.cols());
    est = extract_doas(s, cfg.sources);
    trace = std::move(res.inference.trace);
  } else {
    InferenceResult res = run_ogsbi(Y, dict, cfg);
    const Spectrum s = estimate_powers(res.posterior, res.state, dict.grid, Y.cols(), std::nullopt);
    est = extract_doas(s, cfg.sources);
    trace = std::move(res.trace);
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  out.true_doas = sc.doas;
  std::sort(out.true_doas.begin(), out.true_doas.end());
  out.estimated_doas = est.angles;
  out.squared_errors.clear();
  for (std::size_t k = 0; k < out.true_doas.size(); ++k) {
    const double e = out.estimated_doas[k] - out.true_doas[k];
    out.squared_errors.push_back(e * e);
  }
  out.iterations = trace.iterations();
  out.converged = trace.converged;
}

void ks_attempt(const ExperimentSpec& spec, const CellSetup& cell, Rng& rng, TrialResult& out) {
  const Dictionary& dict = *cell.dict;
  const Scenario sc = draw_scenario(spec, cell.snr_db, rng);
  const auto t0 = std::chrono::steady_clock::now();
  const SnapshotData data = synthesize(sc, dict.ula);
  const GroundTruthMap gt = ground_truth_map(sc, data.S, dict.grid);
  const CMatrix z = total_noise(data, dict, gt);
  double sigma2 = noise_variance(sc.snr_db);
  if (sigma2 == 0.0) {
    sigma2 = z.squaredNorm() / static_cast<double>(z.size());
    if (!(sigma2 > 0.0)) throw NumericalError("total noise is identically zero");
  }
  const KsResult ks = ks_gaussian_test(z, sigma2);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.true_doas = sc.doas;
  std::sort(out.true_doas.begin(), out.true_doas.end());
  out.ks_statistic = ks.statistic;
  out.ks_pass = ks.pass;
  out.converged = true;
}

TrialResult run_trial(const ExperimentSpec& spec, const CellSetup& cell, TrialMode mode, int index) {
  TrialResult out;
  out.index = index;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    out.attempts = attempt + 1;
    Rng rng = trial_rng(spec.base_seed, index, attempt);
    try {
      if (mode == TrialMode::ks)
        ks_attempt(spec, cell, rng, out);
      else
        estimate_attempt(spec, cell, rng, out);
      out.failed = false;
      out.error.clear();
      return out;
    } catch (const std::exception& e) {
      out.failed = true;
      out.error = e.what();
    }
  }
  out.true_doas.clear();
  out.estimated_doas.clear();
  out.squared_errors.clear();
  out.ks_statistic.reset();
  out.ks_pass.reset();
  return out;
}

std::vector<TrialResult> run_trials(const ExperimentSpec& spec, const CellSetup& cell, TrialMode mode) {
  std::vector<TrialResult> results(static_cast<std::size_t>(spec.trials));
  unsigned workers = spec.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : spec.threads;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(spec.trials));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < spec.trials; i = next++) results[static_cast<std::size_t>(i)] = run_trial(spec, cell, mode, i);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return results;
}

CellReport aggregate(const CellSetup& cell, std::vector<TrialResult> trials, TrialMode mode) {
  CellReport rep;
  rep.snr_db = cell.snr_db;
  rep.r_deg = cell.r_deg;
  rep.kappa = cell.kappa;
  rep.lower_bound_rad2 = lower_bound(deg2rad(cell.r_deg));
  double err = 0.0, time = 0.0;
  std::size_t count = 0, ok = 0, converged = 0, passed = 0;
  for (const TrialResult& t : trials) {
    if (t.failed) {
      ++rep.failures;
      continue;
    }
    ++ok;
    time += t.seconds;
    if (t.converged) ++converged;
    if (t.ks_pass && *t.ks_pass) ++passed;
    for (double e : t.squared_errors) {
      err += e;
      ++count;
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.mse_rad2 = count > 0 ? err / static_cast<double>(count) : nan;
  rep.mse_db = count > 0 ? to_db(rep.mse_rad2) : nan;
  rep.mean_time_s = ok > 0 ? time / static_cast<double>(ok) : nan;
  rep.convergence_rate = ok > 0 ? static_cast<double>(converged) / static_cast<double>(ok) : nan;
  if (mode == TrialMode::ks) rep.ks_pass_rate = ok > 0 ? static_cast<double>(passed) / static_cast<double>(ok) : nan;
  rep.degraded = static_cast<double>(rep.failures) > kDegradedFraction * static_cast<double>(trials.size());
  rep.trials = std::move(trials);
  return rep;
}

AggregateReport run_cells(const ExperimentSpec& spec, TrialMode mode, bool with_kappa) {
  validate(spec);
  const UlaConfig ula(spec.scenario.sensors);
  std::map<double, Dictionary> dicts;
  for (double r : spec.grid_deg)
    if (!dicts.contains(r)) dicts.emplace(r, build_dictionary(Grid::from_degrees(r), ula));

  AggregateReport report;
  report.kind = spec.kind;
  const std::vector<std::optional<double>> kappas = [&] {
    std::vector<std::optional<double>> k;
    if (with_kappa)
      for (double x : spec.kappas) k.emplace_back(x);
    else
      k.emplace_back(std::nullopt);
    return k;
  }();
  for (double snr : spec.snr_db)
    for (double r : spec.grid_deg)
      for (const auto& kappa : kappas) {
        const CellSetup cell{snr, r, kappa, &dicts.at(r)};
        report.cells.push_back(aggregate(cell, run_trials(spec, cell, mode), mode));
      }
  return report;
}

}  // namespace

ExperimentSpec default_spec(ExperimentKind kind) {
  ExperimentSpec s;
  s.kind = kind;
  const std::vector<std::pair<double, double>> mmv_intervals{{58.0, 62.0}, {86.0, 90.0}};
  const double inf = std::numeric_limits<double>::infinity();
  switch (kind) {
    case ExperimentKind::mmv_sweep:
    case ExperimentKind::ks_validation:
      s.grid_deg = {0.5, 1.0, 2.0, 4.0};
      s.snr_db = {0.0, 10.0};
      s.scenario.intervals_deg = mmv_intervals;
      break;
    case ExperimentKind::smv_table:
      s.grid_deg = {2.0, 4.0};
      s.snr_db = {20.0};
      s.scenario.snapshots = 1;
      s.scenario.doas_deg = {63.2, 90.3};
      s.scenario.source_model = SourceModel::unit_modulus;
      s.algo = Algorithm::ogsbi;
      break;
    case ExperimentKind::outlier_study:
      s.grid_deg = {2.0};
      s.snr_db = {inf};
      s.kappas = {1.0, 5.0, 10.0, 20.0, 50.0, 100.0};
      s.scenario.intervals_deg = mmv_intervals;
      break;
    case ExperimentKind::single_run:
      s.grid_deg = {2.0};
      s.snr_db = {inf};
      s.trials = 1;
      s.scenario.intervals_deg = mmv_intervals;
      break;
  }
  return s;
}

void validate(const ExperimentSpec& spec) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid experiment spec: " + msg); };
  if (spec.trials < 1) fail("trials must be at least 1");
  if (spec.grid_deg.empty()) fail("no grid intervals");
  if (spec.snr_db.empty()) fail("no SNR values");
  for (double r : spec.grid_deg) {
    try {
      (void)Grid::from_degrees(r);
    } catch (const std::exception& e) {
      fail(e.what());
    }
    if (static_cast<Index>(std::llround(180.0 / r)) + 1 <= spec.scenario.sensors) fail("grid must be finer than the array size");
  }
  for (double snr : spec.snr_db)
    if (std::isnan(snr) || snr == -std::numeric_limits<double>::infinity()) fail("SNR must be a number or +inf");
  const ScenarioTemplate& sc = spec.scenario;
  if (sc.sensors < 2) fail("at least two sensors required");
  if (sc.snapshots < 1) fail("snapshots must be positive");
  if (sc.doas_deg.empty() == sc.intervals_deg.empty()) fail("give exactly one of doas_deg and intervals_deg");
  if (sc.sources() >= sc.sensors) fail("source count must be below the sensor count");
  for (double d : sc.doas_deg)
    if (!(d >= 0.0 && d <= 180.0)) fail("DOAs must lie in [0, 180] degrees");
  for (std::size_t i = 0; i < sc.intervals_deg.size(); ++i) {
    const auto [lo, hi] = sc.intervals_deg[i];
    if (!(lo >= 0.0 && hi <= 180.0 && lo <= hi)) fail("DOA intervals must satisfy 0 <= lo <= hi <= 180");
    for (std::size_t j = 0; j < i; ++j)
      if (lo <= sc.intervals_deg[j].second && sc.intervals_deg[j].first <= hi) fail("DOA intervals overlap");
  }
  const InferenceConfig& c = spec.inference;
  if (!(c.rho > 0.0) || c.c < 0.0 || c.d < 0.0) fail("rho must be positive and c, d nonnegative");
  if (!(c.tol > 0.0) || c.max_iter < 1) fail("tolerance and iteration cap must be positive");
  if (spec.kind == ExperimentKind::outlier_study) {
    if (spec.kappas.empty()) fail("no kappa values");
    for (double k : spec.kappas)
      if (!std::isfinite(k)) fail("kappa must be finite");
    if (spec.outlier_count < 0 || spec.outlier_count > sc.sensors * sc.snapshots) fail("outlier count out of range");
  }
}

AggregateReport run_experiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::outlier_study:
      return outlier_study(spec);
    case ExperimentKind::ks_validation:
      return ks_validation(spec);
    default:
      return run_cells(spec, TrialMode::estimate, false);
  }
}

AggregateReport outlier_study(const ExperimentSpec& spec) {
  ExperimentSpec s = spec;
  s.kind = ExperimentKind::outlier_study;
  return run_cells(s, TrialMode::estimate, true);
}

AggregateReport ks_validation(const ExperimentSpec& spec) {
  ExperimentSpec s = spec;
  s.kind = ExperimentKind::ks_validation;
  return run_cells(s, TrialMode::ks, false);
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::mmv_sweep: return "mmv_sweep";
    case ExperimentKind::smv_table: return "smv_table";
    case ExperimentKind::ks_validation: return "ks_validation";
    case ExperimentKind::outlier_study: return "outlier_study";
    case ExperimentKind::single_run: return "single_run";
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::mmv_sweep, ExperimentKind::smv_table, ExperimentKind::ks_validation,
                 ExperimentKind::outlier_study, ExperimentKind::single_run})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown experiment kind: " + s);
}

std::string to_string(Algorithm algo) { return algo == Algorithm::ogsbi ? "ogsbi" : "ogsbi-svd"; }

Algorithm parse_algorithm(const std::string& s) {
  if (s == "ogsbi") return Algorithm::ogsbi;
  if (s == "ogsbi-svd" || s == "ogsbi_svd") return Algorithm::ogsbi_svd;
  throw std::invalid_argument("unknown algorithm: " + s);
}

}  // namespace ogsbi
