// SPDX-License-Identifier: Apache-2.0
//
// Power spectrum over the grid, peak picking with off-grid refinement, and
// the accuracy metrics used by the benchmarks.
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "ogsbi/inference.hpp"

namespace ogsbi {

struct Spectrum {
  RVector powers;
  RVector refined_angles;  // grid point plus estimated offset, radians
};

struct DoaEstimate {
  std::vector<double> angles;  // ascending, radians
  std::vector<Index> peak_indices;
  std::vector<double> peak_powers;
};

/// p_n = |U^n|^2 / T + k Sigma_nn / T on the SVD path (k retained singular
/// vectors, pass `reduced_rank`), p_n = |U^n|^2 / T + Sigma_nn otherwise.
Spectrum estimate_powers(const Posterior& post, const HyperState& state, const Grid& grid, Index snapshots,
                         std::optional<Index> reduced_rank);

/// K largest local maxima (one-sided at the endpoints), topped up with the
/// largest remaining entries; throws on an all-zero spectrum.
DoaEstimate extract_doas(const Spectrum& spectrum, Index sources);

/// Mean squared error over trials and sources, pairing angles in ascending order.
double mse(const std::vector<std::vector<double>>& estimates, const std::vector<std::vector<double>>& truths);

double lower_bound(double interval);

inline double to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace ogsbi
