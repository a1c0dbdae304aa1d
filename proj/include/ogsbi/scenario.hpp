// SPDX-License-Identifier: Apache-2.0
//
// Ground-truth scenarios, exact-manifold measurement synthesis, outlier
// injection and the Gaussianity check of the total off-grid-model noise.
#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "ogsbi/array_model.hpp"

namespace ogsbi {

using Rng = std::mt19937_64;

enum class SourceModel {
  gaussian,      // i.i.d. CN(0, 1)
  unit_modulus,  // exp(j phi), phi ~ U[0, 2 pi)
};

struct Scenario {
  std::vector<double> doas;  // radians, one per source
  Index snapshots = 1;
  double snr_db = 10.0;  // +inf for noiseless data
  std::uint64_t seed = 0;
  SourceModel source_model = SourceModel::gaussian;

  Index sources() const { return static_cast<Index>(doas.size()); }
};

struct SnapshotData {
  CMatrix Y;  // M x T
  CMatrix S;  // K x T
  CMatrix E;  // M x T
  Scenario scenario;
};

struct GroundTruthMap {
  std::vector<Index> nearest;
  RVector beta;  // N, nonzero only at source-adjacent grid points
  CMatrix X;     // N x T, rows nearest[k] hold the source signals
};

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;
  bool pass = false;
};

/// Per-entry noise variance 10^(-snr/10) for unit-power sources; 0 for +inf.
double noise_variance(double snr_db);

/// One uniform angle per [lo, hi] interval (radians). Intervals must lie in
/// [0, pi] and be pairwise disjoint.
std::vector<double> draw_doas(const std::vector<std::pair<double, double>>& intervals, Rng& rng);

/// K x T matrix of unit-power entries, i.i.d. CN(0, 1) by default.
CMatrix generate_sources(Index sources, Index snapshots, Rng& rng, SourceModel model = SourceModel::gaussian);

/// Y = A(theta) S + E with exact steering vectors; S then E are drawn from a
/// generator seeded with scenario.seed.
SnapshotData synthesize(const Scenario& scenario, const UlaConfig& ula);

/// Throws std::invalid_argument when two sources share a nearest grid point.
GroundTruthMap ground_truth_map(const Scenario& scenario, const CMatrix& sources, const Grid& grid);

/// Y - Phi(beta*) X*: measurement noise plus the linearization residual.
CMatrix total_noise(const SnapshotData& data, const Dictionary& dict, const GroundTruthMap& gt);

/// One-sample two-sided KS test of the pooled real and imaginary parts,
/// scaled by sqrt(sigma2 / 2), against N(0, 1) at the 5% level.
KsResult ks_gaussian_test(const CMatrix& noise, double sigma2);

/// Multiplies `count` distinct uniformly chosen entries by kappa.
CMatrix inject_outliers(const CMatrix& Y, Index count, double kappa, Rng& rng);

}  // namespace ogsbi
