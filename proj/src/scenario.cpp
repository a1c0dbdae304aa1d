// SPDX-License-Identifier: Apache-2.0
#include "ogsbi/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ogsbi {

double noise_variance(double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  if (std::isnan(snr_db)) throw DomainError("SNR is NaN");
  return std::pow(10.0, -snr_db / 10.0);
}

std::vector<double> draw_doas(const std::vector<std::pair<double, double>>& intervals, Rng& rng) {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto [lo, hi] = intervals[i];
    if (!(lo >= 0.0 && hi <= kPi && lo <= hi)) throw DomainError("DOA interval must satisfy 0 <= lo <= hi <= pi");
    for (std::size_t j = 0; j < i; ++j) {
      if (lo <= intervals[j].second && intervals[j].first <= hi) throw DomainError("DOA intervals overlap");
    }
  }
  std::vector<double> out;
  out.reserve(intervals.size());
  for (const auto& [lo, hi] : intervals) {
    if (lo == hi) {
      out.push_back(lo);
    } else {
      std::uniform_real_distribution<double> u(lo, hi);
      out.push_back(u(rng));
    }
  }
  return out;
}

CMatrix generate_sources(Index sources, Index snapshots, Rng& rng, SourceModel model) {
  if (sources < 1 || snapshots < 1) throw std::invalid_argument("source and snapshot counts must be positive");
  CMatrix S(sources, snapshots);
  if (model == SourceModel::unit_modulus) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    for (Index t = 0; t < snapshots; ++t)
      for (Index k = 0; k < sources; ++k) S(k, t) = std::polar(1.0, phase(rng));
    return S;
  }
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  for (Index t = 0; t < snapshots; ++t)
    for (Index k = 0; k < sources; ++k) {
      const double re = g(rng);
      const double im = g(rng);
      S(k, t) = cd(re, im);
    }
  return S;
}

SnapshotData synthesize(const Scenario& scenario, const UlaConfig& ula) {
  if (scenario.sources() < 1) throw std::invalid_argument("scenario needs at least one source");
  if (scenario.sources() >= ula.sensors()) throw std::invalid_argument("source count must be below the sensor count");
  Rng rng(scenario.seed);
  const RVector doas = Eigen::Map<const RVector>(scenario.doas.data(), scenario.sources());
  CMatrix S = generate_sources(scenario.sources(), scenario.snapshots, rng, scenario.source_model);
  const double sigma2 = noise_variance(scenario.snr_db);
  CMatrix E = CMatrix::Zero(ula.sensors(), scenario.snapshots);
  if (sigma2 > 0.0) {
    std::normal_distribution<double> g(0.0, std::sqrt(0.5 * sigma2));
    for (Index t = 0; t < E.cols(); ++t)
      for (Index m = 0; m < E.rows(); ++m) {
        const double re = g(rng);
        const double im = g(rng);
        E(m, t) = cd(re, im);
      }
  }
  CMatrix Y = steering_matrix(doas, ula) * S + E;
  return SnapshotData{std::move(Y), std::move(S), std::move(E), scenario};
}

GroundTruthMap ground_truth_map(const Scenario& scenario, const CMatrix& sources, const Grid& grid) {
  if (sources.rows() != scenario.sources()) throw std::invalid_argument("source matrix does not match scenario");
  GroundTruthMap gt;
  gt.beta = RVector::Zero(grid.size());
  gt.X = CMatrix::Zero(grid.size(), sources.cols());
  for (Index k = 0; k < scenario.sources(); ++k) {
    const double theta = scenario.doas[static_cast<std::size_t>(k)];
    if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("DOA outside [0, pi]");
    const Index n = grid.nearest(theta);
    if (std::find(gt.nearest.begin(), gt.nearest.end(), n) != gt.nearest.end())
      throw std::invalid_argument("two sources share the nearest grid point");
    gt.nearest.push_back(n);
    gt.beta[n] = theta - grid[n];
    gt.X.row(n) = sources.row(k);
  }
  return gt;
}

CMatrix total_noise(const SnapshotData& data, const Dictionary& dict, const GroundTruthMap& gt) {
  // Only the K source rows of X* are nonzero.
  CMatrix out = data.Y;
  for (const Index n : gt.nearest) {
    const CVector phi_n = dict.A.col(n) + gt.beta[n] * dict.B.col(n);
    out.noalias() -= phi_n * gt.X.row(n);
  }
  return out;
}

KsResult ks_gaussian_test(const CMatrix& noise, double sigma2) {
  if (noise.size() == 0) throw std::invalid_argument("KS test needs at least one sample");
  if (!(sigma2 > 0.0)) throw DomainError("KS test needs a positive reference variance");
  const double scale = 1.0 / std::sqrt(0.5 * sigma2);
  std::vector<double> z;
  z.reserve(static_cast<std::size_t>(2 * noise.size()));
  for (Index i = 0; i < noise.size(); ++i) {
    z.push_back(noise.data()[i].real() * scale);
    z.push_back(noise.data()[i].imag() * scale);
  }
  std::sort(z.begin(), z.end());
  const auto n = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = 0.5 * std::erfc(-z[i] / std::numbers::sqrt2);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  KsResult r;
  r.statistic = d;
  r.critical = 1.358 / std::sqrt(n);
  r.pass = d < r.critical;
  return r;
}

CMatrix inject_outliers(const CMatrix& Y, Index count, double kappa, Rng& rng) {
  if (count < 0 || count > Y.size()) throw std::invalid_argument("outlier count must lie in [0, M*T]");
  if (!(kappa >= 0.0)) throw DomainError("outlier ratio must be nonnegative");
  std::vector<Index> all(static_cast<std::size_t>(Y.size()));
  std::iota(all.begin(), all.end(), Index{0});
  std::vector<Index> picked;
  picked.reserve(static_cast<std::size_t>(count));
  std::sample(all.begin(), all.end(), std::back_inserter(picked), count, rng);
  CMatrix out = Y;
  for (const Index i : picked) out.data()[i] *= kappa;
  return out;
}

}  // namespace ogsbi
