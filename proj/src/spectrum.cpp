// SPDX-License-Identifier: Apache-2.0
#include "ogsbi/spectrum.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "ogsbi/kernels.hpp"

namespace ogsbi {

Spectrum estimate_powers(const Posterior& post, const HyperState& state, const Grid& grid, Index snapshots,
                         std::optional<Index> reduced_rank) {
  const Index N = post.mu.rows();
  if (N != grid.size() || state.beta.size() != N) throw std::invalid_argument("posterior does not match the grid");
  if (snapshots < 1) throw std::invalid_argument("snapshot count must be positive");
  const double T = static_cast<double>(snapshots);
  const double cov_weight = reduced_rank ? static_cast<double>(*reduced_rank) / T : 1.0;

  RVector energy = RVector::Zero(N);
  for (Index t = 0; t < post.mu.cols(); ++t)
    kernels::accumulate_abs2(post.mu.col(t).data(), static_cast<std::size_t>(N), energy.data());

  Spectrum s;
  s.powers.resize(N);
  for (Index n = 0; n < N; ++n) s.powers[n] = energy[n] / T + cov_weight * std::max(0.0, post.sigma(n, n).real());
  s.refined_angles = grid.points() + state.beta;
  return s;
}

DoaEstimate extract_doas(const Spectrum& spectrum, Index sources) {
  const RVector& p = spectrum.powers;
  const Index N = p.size();
  if (sources < 1 || sources > N) throw std::invalid_argument("source count out of range");
  if (!(p.maxCoeff() > 0.0)) throw std::invalid_argument("spectrum is all zero");

  std::vector<Index> peaks;
  for (Index n = 0; n < N; ++n) {
    const bool left = n == 0 || p[n] >= p[n - 1];
    const bool right = n + 1 == N || p[n] >= p[n + 1];
    if (left && right) peaks.push_back(n);
  }
  auto by_power = [&](Index a, Index b) { return p[a] > p[b] || (p[a] == p[b] && a < b); };
  std::stable_sort(peaks.begin(), peaks.end(), by_power);
  if (static_cast<Index>(peaks.size()) > sources) peaks.resize(static_cast<std::size_t>(sources));

  if (static_cast<Index>(peaks.size()) < sources) {
    std::vector<Index> rest;
    for (Index n = 0; n < N; ++n)
      if (std::find(peaks.begin(), peaks.end(), n) == peaks.end()) rest.push_back(n);
    std::stable_sort(rest.begin(), rest.end(), by_power);
    for (std::size_t i = 0; static_cast<Index>(peaks.size()) < sources; ++i) peaks.push_back(rest[i]);
  }

  std::sort(peaks.begin(), peaks.end(),
            [&](Index a, Index b) { return spectrum.refined_angles[a] < spectrum.refined_angles[b] || (spectrum.refined_angles[a] == spectrum.refined_angles[b] && a < b); });
  DoaEstimate est;
  for (const Index n : peaks) {
    est.angles.push_back(spectrum.refined_angles[n]);
    est.peak_indices.push_back(n);
    est.peak_powers.push_back(p[n]);
  }
  return est;
}

double mse(const std::vector<std::vector<double>>& estimates, const std::vector<std::vector<double>>& truths) {
  if (estimates.size() != truths.size() || estimates.empty()) throw std::invalid_argument("trial count mismatch");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (estimates[i].size() != truths[i].size() || estimates[i].empty())
      throw std::invalid_argument("source count mismatch within a trial");
    std::vector<double> e = estimates[i];
    std::vector<double> t = truths[i];
    std::sort(e.begin(), e.end());
    std::sort(t.begin(), t.end());
    for (std::size_t k = 0; k < e.size(); ++k) sum += (e[k] - t[k]) * (e[k] - t[k]);
    count += e.size();
  }
  return sum / static_cast<double>(count);
}

double lower_bound(double interval) {
  if (!(interval > 0.0)) throw DomainError("grid interval must be positive");
  return interval * interval / 12.0;
}

}  // namespace ogsbi
