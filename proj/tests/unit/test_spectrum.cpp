// SPDX-License-Identifier: Apache-2.0
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "ogsbi/spectrum.hpp"
#include "ogsbi/svd_reduce.hpp"

using namespace ogsbi;

namespace {

Spectrum make(std::initializer_list<double> powers, const Grid& g) {
  Spectrum s;
  s.powers = RVector::Zero(g.size());
  Index i = 0;
  for (double p : powers) s.powers[i++] = p;
  s.refined_angles = g.points();
  return s;
}

}  // namespace

TEST_CASE("power formula on both paths") {
  const Grid g = Grid::from_degrees(60.0);  // 4 points
  Posterior post;
  post.mu = CMatrix::Zero(4, 2);
  post.mu(1, 0) = cd(5.0, 0.0);
  post.mu(1, 1) = cd(0.0, 5.0);  // |U^1|^2 = 50
  post.sigma = CMatrix::Zero(4, 4);
  post.sigma(1, 1) = 0.1;
  HyperState st;
  st.beta = RVector::Zero(4);
  st.beta[1] = 0.01;
  const Spectrum svd = estimate_powers(post, st, g, 200, Index{2});
  CHECK(svd.powers[1] == doctest::Approx(0.251));
  CHECK(svd.powers[0] == 0.0);
  CHECK(svd.refined_angles[1] == doctest::Approx(g[1] + 0.01));
  const Spectrum plain = estimate_powers(post, st, g, 2, std::nullopt);
  CHECK(plain.powers[1] == doctest::Approx(25.1));
  CHECK_THROWS(estimate_powers(post, st, Grid::from_degrees(90.0), 2, std::nullopt));
}

TEST_CASE("peak picking") {
  const Grid g = Grid::from_degrees(10.0);
  Spectrum s = make({0, 0, 0, 1.0}, g);
  s.refined_angles[3] += 0.01;
  const DoaEstimate one = extract_doas(s, 1);
  CHECK(one.peak_indices == std::vector<Index>{3});
  CHECK(one.angles[0] == doctest::Approx(g[3] + 0.01));

  // Two equal spikes come back in ascending order.
  const DoaEstimate two = extract_doas(make({0, 2.0, 0, 0, 0, 2.0}, g), 2);
  CHECK(two.peak_indices == std::vector<Index>{1, 5});

  // Only one local maximum: the second angle is the largest remaining entry.
  const DoaEstimate fill = extract_doas(make({1.0, 2.0, 3.0, 4.0}, Grid::from_degrees(60.0)), 2);
  CHECK(fill.peak_indices == std::vector<Index>{2, 3});

  // Endpoint maxima count, compared one-sided.
  Spectrum ends = make({5.0, 1.0}, g);
  ends.powers[g.size() - 1] = 4.0;
  CHECK(extract_doas(ends, 2).peak_indices == std::vector<Index>{0, g.size() - 1});

  CHECK_THROWS(extract_doas(make({}, g), 1));
}

TEST_CASE("peak picking is scale invariant") {
  const Grid g = Grid::from_degrees(5.0);
  Rng rng(2);
  Spectrum s = make({}, g);
  for (Index n = 0; n < g.size(); ++n) s.powers[n] = oracle::uniform(rng, 0.0, 1.0);
  Spectrum t = s;
  t.powers *= 37.5;
  CHECK(extract_doas(s, 3).peak_indices == extract_doas(t, 3).peak_indices);
}

TEST_CASE("mse and lower bound") {
  CHECK(mse({{1.0, 2.0}}, {{1.0, 2.0}}) == 0.0);
  CHECK(mse({{0.51}}, {{0.5}}) == doctest::Approx(1e-4));
  CHECK(mse({{1.01, 2.02}, {3.03, 4.04}}, {{1.0, 2.0}, {3.0, 4.0}}) == doctest::Approx(7.5e-4));
  CHECK(mse({{2.0, 1.0}}, {{1.0, 2.0}}) == 0.0);  // matched in ascending order
  CHECK_THROWS(mse({{1.0}}, {{1.0}, {2.0}}));
  CHECK_THROWS(mse({{1.0}}, {{1.0, 2.0}}));

  CHECK(lower_bound(deg2rad(2.0)) == doctest::Approx(1.01539e-4).epsilon(1e-5));
  CHECK(to_db(lower_bound(deg2rad(2.0))) == doctest::Approx(-39.93).epsilon(1e-4));
  CHECK_THROWS(lower_bound(0.0));

  // Variance of a uniform offset.
  Rng rng(99);
  const double r = 0.05;
  double acc = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double b = oracle::uniform(rng, -r / 2, r / 2);
    acc += b * b;
  }
  CHECK(acc / n == doctest::Approx(lower_bound(r)).epsilon(0.01));
}

TEST_CASE("noiseless single source: power near one and accurate DOA") {
  const UlaConfig ula(8);
  const Dictionary dict = build_dictionary(Grid::from_degrees(2.0), ula);
  Scenario sc;
  sc.doas = {deg2rad(100.0)};
  sc.snapshots = 400;
  sc.snr_db = std::numeric_limits<double>::infinity();
  sc.seed = 12;
  sc.source_model = SourceModel::unit_modulus;
  const SnapshotData d = synthesize(sc, ula);
  InferenceConfig cfg;
  cfg.sources = 1;
  const SvdInferenceResult res = run_ogsbi_svd(d.Y, dict, cfg);
  const Spectrum s = estimate_powers(res.inference.posterior, res.inference.state, dict.grid, 400, res.V1.cols());
  CHECK(s.powers[50] == doctest::Approx(1.0).epsilon(0.1));
  CHECK((s.powers.array() >= 0.0).all());
  const DoaEstimate e = extract_doas(s, 1);
  CHECK(std::abs(e.angles[0] - sc.doas[0]) < deg2rad(0.01));
}
