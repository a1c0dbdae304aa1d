// SPDX-License-Identifier: Apache-2.0
#include "ogsbi/inference.hpp"

#include <algorithm>
#include <iterator>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ogsbi/kernels.hpp"

namespace ogsbi {
namespace {

constexpr double kDenominatorFloor = 1e-300;
constexpr double kInvertibleRatio = 1e-10;
constexpr int kMaxSweeps = 1000;

// Cholesky factor of C = alpha0^-1 I + Phi diag(alpha) Phi^H. On failure a
// jitter of 1e-12 trace(C)/M is added and grown by 100x for two more tries.
Eigen::LLT<CMatrix> factor_marginal(const CMatrix& phi, const RVector& alpha, double alpha0) {
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) throw DomainError("alpha0 must be positive and finite");
  if (alpha.size() != phi.cols()) throw std::invalid_argument("alpha length must equal the grid size");
  if ((alpha.array() < 0.0).any()) throw DomainError("alpha must be nonnegative");
  const Index M = phi.rows();
  CMatrix C = phi * alpha.asDiagonal() * phi.adjoint();
  C.diagonal().array() += 1.0 / alpha0;
  C = 0.5 * (C + C.adjoint()).eval();
  Eigen::LLT<CMatrix> llt(C);
  double jitter = 1e-12 * C.trace().real() / static_cast<double>(M);
  for (int attempt = 0; llt.info() != Eigen::Success && attempt < 3; ++attempt) {
    CMatrix Cj = C;
    Cj.diagonal().array() += jitter;
    llt.compute(Cj);
    jitter *= 100.0;
  }
  if (llt.info() != Eigen::Success) throw NumericalError("marginal covariance is not positive definite");
  return llt;
}

// Beta is optimized on the K largest alpha plus every index that still
// carries a nonzero offset. Dropping such an index to zero can raise the
// expected residual, so it stays in the block until the minimizer moves it.
RVector truncated_beta_step(const CMatrix& Y, const Dictionary& dict, const Posterior& post, const RVector& alpha,
                            const RVector& previous_beta, Index sources) {
  const auto top = top_k_support(alpha, sources);
  std::vector<Index> carried;
  for (Index n = 0; n < previous_beta.size(); ++n)
    if (previous_beta[n] != 0.0) carried.push_back(n);
  std::vector<Index> block;
  std::set_union(top.begin(), top.end(), carried.begin(), carried.end(), std::back_inserter(block));
  return update_beta(beta_quadratic(Y, dict, post, block), dict.grid.interval(), previous_beta);
}

}  // namespace

HyperState init_hyperstate(const CMatrix& Y, const Dictionary& dict, const InferenceConfig& config) {
  const Index M = Y.rows();
  const Index cols = Y.cols();
  if (cols < 1) throw std::invalid_argument("working data needs at least one column");
  if (M != dict.sensors()) throw std::invalid_argument("data rows must equal the sensor count");
  if (config.sources < 1) throw std::invalid_argument("source count must be positive");
  double var_sum = 0.0;
  for (Index t = 0; t < cols; ++t) {
    const cd mean = Y.col(t).mean();
    var_sum += (Y.col(t).array() - mean).abs2().sum() / static_cast<double>(M - 1);
  }
  if (!(var_sum > 0.0)) throw NumericalError("zero-variance data: alpha0 initialization undefined");

  HyperState s;
  s.alpha0 = 100.0 * static_cast<double>(cols) / var_sum;
  const CMatrix AhY = dict.A.adjoint() * Y;
  s.alpha = AhY.cwiseAbs().rowwise().sum() / static_cast<double>(M * config.sources);
  s.beta = RVector::Zero(dict.points());
  return s;
}

Posterior posterior_update(const CMatrix& Y, const CMatrix& phi, const HyperState& state) {
  const Index N = phi.cols();
  const auto llt = factor_marginal(phi, state.alpha, state.alpha0);
  const auto L = llt.matrixL();

  CMatrix V = L.solve(phi);  // L^-1 Phi
  CMatrix W = V * state.alpha.asDiagonal();

  Posterior post;
  post.sigma.resize(N, N);
  kernels::conj_gram(W.data(), static_cast<std::size_t>(W.rows()), static_cast<std::size_t>(N), post.sigma.data());
  post.sigma = -post.sigma;
  post.sigma.diagonal() += state.alpha.cast<cd>();

  // U = diag(alpha) Phi^H C^-1 Y = W^H L^-1 Y.
  post.mu = W.adjoint() * L.solve(Y);

  RVector vnorm(N);
  kernels::column_norms2(V.data(), static_cast<std::size_t>(V.rows()), static_cast<std::size_t>(N), vnorm.data());
  post.gamma = (state.alpha.array() * vnorm.array()).min(1.0).max(0.0).matrix();
  return post;
}

RVector update_alpha(const Posterior& post, const InferenceConfig& config, Index working_cols) {
  const Index N = post.mu.rows();
  const double cols = static_cast<double>(working_cols);
  const double rho = config.rho / cols;
  RVector energy = RVector::Zero(N);
  for (Index t = 0; t < post.mu.cols(); ++t)
    kernels::accumulate_abs2(post.mu.col(t).data(), static_cast<std::size_t>(N), energy.data());
  RVector alpha(N);
  for (Index n = 0; n < N; ++n) {
    const double e = std::max(0.0, energy[n] / cols + post.sigma(n, n).real());
    // Same root as (sqrt(1 + 4 rho e) - 1) / (2 rho) without the cancellation.
    alpha[n] = 2.0 * e / (1.0 + std::sqrt(1.0 + 4.0 * rho * e));
  }
  return alpha;
}

double alpha0_from_residual(Index sensors, Index working_cols, double residual, const InferenceConfig& config) {
  const double cols = static_cast<double>(working_cols);
  const double num = static_cast<double>(sensors) + (config.c - 1.0) / cols;
  const double den = residual + config.d / cols;
  if (!(num > 0.0) || den < 0.0 || std::isnan(den)) throw NumericalError("alpha0 update has a non-positive ratio");
  return num / std::max(den, kDenominatorFloor);
}

double update_alpha0(const CMatrix& Y, const CMatrix& phi, const Posterior& post, double alpha0,
                     const InferenceConfig& config) {
  const double cols = static_cast<double>(Y.cols());
  const double fit = (Y - phi * post.mu).squaredNorm() / cols;
  const double residual = fit + post.gamma.sum() / alpha0;
  return alpha0_from_residual(Y.rows(), Y.cols(), residual, config);
}

std::vector<Index> top_k_support(const RVector& alpha, Index k) {
  if (k < 0 || k > alpha.size()) throw std::invalid_argument("support size out of range");
  std::vector<Index> idx(static_cast<std::size_t>(alpha.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return alpha[a] > alpha[b]; });
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

QuadraticForm beta_quadratic(const CMatrix& Y, const Dictionary& dict, const Posterior& post,
                             const std::vector<Index>& support) {
  const auto K = static_cast<Index>(support.size());
  const double cols = static_cast<double>(Y.cols());
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] < 0 || support[i] >= dict.points()) throw std::invalid_argument("support index out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (support[i] == support[j]) throw std::invalid_argument("support indices must be distinct");
  }

  CMatrix Bs(dict.sensors(), K);
  CMatrix Us(K, post.mu.cols());
  CMatrix Sss(K, K);
  CMatrix Sigma_cols(post.sigma.rows(), K);
  for (Index k = 0; k < K; ++k) {
    const Index n = support[static_cast<std::size_t>(k)];
    Bs.col(k) = dict.B.col(n);
    Us.row(k) = post.mu.row(n);
    Sigma_cols.col(k) = post.sigma.col(n);
    for (Index j = 0; j < K; ++j) Sss(k, j) = post.sigma(n, support[static_cast<std::size_t>(j)]);
  }

  const CMatrix BhB = Bs.adjoint() * Bs;
  const CMatrix H = Us * Us.adjoint() / cols + Sss;
  QuadraticForm qf;
  qf.support = support;
  qf.P = BhB.conjugate().cwiseProduct(H).real();
  qf.P = 0.5 * (qf.P + qf.P.transpose()).eval();

  const CMatrix BhR = Bs.adjoint() * (Y - dict.A * post.mu);
  const CMatrix ASigma = dict.A * Sigma_cols;
  qf.v.resize(K);
  for (Index k = 0; k < K; ++k) {
    const double data_term = (Us.row(k).conjugate().cwiseProduct(BhR.row(k))).sum().real() / cols;
    const double cov_term = Bs.col(k).dot(ASigma.col(k)).real();
    qf.v[k] = data_term - cov_term;
  }
  return qf;
}

RVector update_beta(const QuadraticForm& qf, double interval, const RVector& previous_beta) {
  const auto K = static_cast<Index>(qf.support.size());
  const double half = 0.5 * interval;
  RVector out = RVector::Zero(previous_beta.size());
  if (K == 0) return out;

  RVector beta(K);
  for (Index k = 0; k < K; ++k) beta[k] = std::clamp(previous_beta[qf.support[static_cast<std::size_t>(k)]], -half, half);

  bool solved = false;
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(qf.P, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (lmax > 0.0 && lmin > kInvertibleRatio * lmax) {
    const RVector cand = qf.P.ldlt().solve(qf.v);
    if ((cand.array().abs() <= half).all()) {
      beta = cand;
      solved = true;
    }
  }

  if (!solved) {
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      double moved = 0.0;
      for (Index k = 0; k < K; ++k) {
        const double pkk = qf.P(k, k);
        if (!(pkk > 0.0)) continue;
        const double off = qf.P.row(k).dot(beta) - pkk * beta[k];
        const double next = std::clamp((qf.v[k] - off) / pkk, -half, half);
        moved = std::max(moved, std::abs(next - beta[k]));
        beta[k] = next;
      }
      if (moved <= 1e-13 * interval) break;
    }
  }

  for (Index k = 0; k < K; ++k) out[qf.support[static_cast<std::size_t>(k)]] = beta[k];
  return out;
}

double log_evidence(const CMatrix& Y, const Dictionary& dict, const HyperState& state, const InferenceConfig& config) {
  const CMatrix phi = perturbed_manifold(dict, state.beta);
  const auto llt = factor_marginal(phi, state.alpha, state.alpha0);
  const CMatrix& LL = llt.matrixLLT();
  double logdet = 0.0;
  for (Index m = 0; m < LL.rows(); ++m) logdet += 2.0 * std::log(LL(m, m).real());
  const double quad = llt.matrixL().solve(Y).squaredNorm();
  const double M = static_cast<double>(Y.rows());
  const double cols = static_cast<double>(Y.cols());
  double ll = -cols * (M * std::log(kPi) + logdet) - quad;

  ll += static_cast<double>(state.alpha.size()) * std::log(config.rho) - config.rho * state.alpha.sum();
  if (config.c > 0.0 && config.d > 0.0) ll += config.c * std::log(config.d) - std::lgamma(config.c);
  ll += (config.c - 1.0) * std::log(state.alpha0) - config.d * state.alpha0;
  return ll;
}

InferenceResult run_ogsbi(const CMatrix& Y, const Dictionary& dict, const InferenceConfig& config) {
  if (Y.rows() != dict.sensors()) throw std::invalid_argument("data rows must equal the sensor count");
  if (config.sources < 1 || config.sources >= dict.points()) throw std::invalid_argument("source count out of range");
  if (config.max_iter < 1) throw std::invalid_argument("max_iter must be positive");
  if (Y.squaredNorm() == 0.0) throw std::invalid_argument("working data is all zero");

  InferenceResult res;
  HyperState& state = res.state;
  state = init_hyperstate(Y, dict, config);
  if (config.track_evidence) res.trace.initial_log_evidence = log_evidence(Y, dict, state, config);

  for (int it = 1; it <= config.max_iter; ++it) {
    const CMatrix phi = perturbed_manifold(dict, state.beta);
    const Posterior post = posterior_update(Y, phi, state);

    RVector alpha = update_alpha(post, config, Y.cols());
    const double alpha0 = update_alpha0(Y, phi, post, state.alpha0, config);
    RVector beta = truncated_beta_step(Y, dict, post, alpha, state.beta, config.sources);

    const double prev_norm = state.alpha.norm();
    const double change = prev_norm > 0.0 ? (alpha - state.alpha).norm() / prev_norm : std::numeric_limits<double>::infinity();
    state.alpha = std::move(alpha);
    state.alpha0 = alpha0;
    state.beta = std::move(beta);

    IterationRecord rec;
    rec.iteration = it;
    rec.alpha_change = change;
    rec.alpha0 = alpha0;
    rec.log_evidence = config.track_evidence ? log_evidence(Y, dict, state, config) : 0.0;
    res.trace.records.push_back(rec);
    if (change < config.tol) {
      res.trace.converged = true;
      break;
    }
  }
  res.posterior = posterior_update(Y, perturbed_manifold(dict, state.beta), state);
  return res;
}

}  // namespace ogsbi
