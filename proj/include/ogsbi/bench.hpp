// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo experiment runner. Every trial draws from its own generator
// seeded with (base_seed + trial index, attempt), so results do not depend on
// how trials are scheduled across threads.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ogsbi/inference.hpp"
#include "ogsbi/scenario.hpp"

namespace ogsbi {

enum class ExperimentKind { mmv_sweep, smv_table, ks_validation, outlier_study, single_run };
enum class Algorithm { ogsbi, ogsbi_svd };

struct ScenarioTemplate {
  Index sensors = 8;
  Index snapshots = 200;
  std::vector<double> doas_deg;                              // fixed DOAs, or
  std::vector<std::pair<double, double>> intervals_deg;      // one uniform draw per interval
  SourceModel source_model = SourceModel::gaussian;

  Index sources() const { return static_cast<Index>(doas_deg.empty() ? intervals_deg.size() : doas_deg.size()); }
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::mmv_sweep;
  std::vector<double> grid_deg{2.0};
  std::vector<double> snr_db{10.0};
  std::vector<double> kappas{1.0};
  Index outlier_count = 3;
  int trials = 200;
  ScenarioTemplate scenario;
  InferenceConfig inference;  // `sources` is taken from the scenario
  Algorithm algo = Algorithm::ogsbi_svd;
  std::uint64_t base_seed = 1;
  unsigned threads = 1;
};

/// Standard setups: MMV sweep over r and SNR, the two-source SMV table, the KS
/// check, the outlier study and a single noiseless run.
ExperimentSpec default_spec(ExperimentKind kind);

/// Throws std::invalid_argument on an inconsistent spec.
void validate(const ExperimentSpec& spec);

struct TrialResult {
  int index = 0;
  int attempts = 1;
  bool failed = false;
  std::string error;
  std::vector<double> true_doas;       // radians
  std::vector<double> estimated_doas;  // radians
  std::vector<double> squared_errors;  // rad^2
  int iterations = 0;
  bool converged = false;
  double seconds = 0.0;
  std::optional<double> ks_statistic;
  std::optional<bool> ks_pass;
};

struct CellReport {
  double snr_db = 0.0;
  double r_deg = 0.0;
  std::optional<double> kappa;
  double mse_rad2 = 0.0;
  double mse_db = 0.0;
  double lower_bound_rad2 = 0.0;
  double mean_time_s = 0.0;
  double convergence_rate = 0.0;
  std::optional<double> ks_pass_rate;
  int failures = 0;
  bool degraded = false;
  std::vector<TrialResult> trials;
};

struct AggregateReport {
  ExperimentKind kind = ExperimentKind::mmv_sweep;
  std::vector<CellReport> cells;
};

/// Runs every (snr, r) cell, or (snr, r, kappa) for the outlier study.
AggregateReport run_experiment(const ExperimentSpec& spec);
AggregateReport outlier_study(const ExperimentSpec& spec);
AggregateReport ks_validation(const ExperimentSpec& spec);

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& s);
std::string to_string(Algorithm algo);
Algorithm parse_algorithm(const std::string& s);

}  // namespace ogsbi
