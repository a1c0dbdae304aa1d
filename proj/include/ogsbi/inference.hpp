// SPDX-License-Identifier: Apache-2.0
//
// Off-grid sparse Bayesian inference (OGSBI): an EM loop over the signal
// posterior and the hyperparameters (alpha, alpha0, beta) of the model
//
//   Y = (A + B diag(beta)) X + E,   x(t) ~ CN(0, diag(alpha)),
//   e(t) ~ CN(0, alpha0^-1 I),      alpha_n ~ Gamma(1, rho),
//   alpha0 ~ Gamma(c, d),           beta ~ U([-r/2, r/2]^N).
//
// The working data Y has T~ columns: the raw snapshots (T~ = T) or the
// SVD-reduced signal subspace (T~ = K). A single snapshot is T~ = 1.
#pragma once

#include <vector>

#include "ogsbi/array_model.hpp"

namespace ogsbi {

struct InferenceConfig {
  double rho = 0.01;
  double c = 1e-4;
  double d = 1e-4;
  double tol = 1e-3;
  int max_iter = 1000;
  Index sources = 1;
  /// Evaluate the log evidence after every iteration (one extra M x M factorization).
  bool track_evidence = true;
};

struct HyperState {
  RVector alpha;  // signal variances, N
  double alpha0 = 1.0;
  RVector beta;  // off-grid offsets, N
};

struct Posterior {
  CMatrix sigma;  // N x N
  CMatrix mu;     // N x T~
  RVector gamma;  // 1 - Sigma_nn / alpha_n, clamped to [0, 1]
};

struct QuadraticForm {
  RMatrix P;
  RVector v;
  std::vector<Index> support;

  /// beta^T P beta - 2 v^T beta for a beta restricted to the support.
  double objective(const RVector& beta_support) const { return beta_support.dot(P * beta_support) - 2.0 * v.dot(beta_support); }
};

struct IterationRecord {
  int iteration = 0;
  double alpha_change = 0.0;
  double log_evidence = 0.0;
  double alpha0 = 0.0;
};

struct InferenceTrace {
  double initial_log_evidence = 0.0;
  std::vector<IterationRecord> records;
  bool converged = false;

  int iterations() const { return static_cast<int>(records.size()); }
};

struct InferenceResult {
  HyperState state;
  Posterior posterior;  // evaluated at the final state
  InferenceTrace trace;
};

HyperState init_hyperstate(const CMatrix& Y, const Dictionary& dict, const InferenceConfig& config);

/// Signal posterior through the M x M Woodbury form
/// Sigma = L - L Phi^H C^-1 Phi L, C = alpha0^-1 I + Phi L Phi^H, L = diag(alpha).
Posterior posterior_update(const CMatrix& Y, const CMatrix& phi, const HyperState& state);

/// alpha_n = (sqrt(1 + 4 rho' E_n) - 1) / (2 rho'), rho' = rho / T~,
/// E_n = |mu^n|^2 / T~ + Sigma_nn.
RVector update_alpha(const Posterior& post, const InferenceConfig& config, Index working_cols);

/// alpha0 = (M + (c-1)/T~) / (residual + d/T~) with the denominator floored at 1e-300.
double alpha0_from_residual(Index sensors, Index working_cols, double residual, const InferenceConfig& config);

/// residual = |Y - Phi U|_F^2 / T~ + alpha0^-1 sum(gamma), alpha0 being the
/// precision the posterior was computed with.
double update_alpha0(const CMatrix& Y, const CMatrix& phi, const Posterior& post, double alpha0,
                     const InferenceConfig& config);

/// Indices of the k largest entries, ascending; ties go to the lower index.
std::vector<Index> top_k_support(const RVector& alpha, Index k);

/// Expected residual E{(1/T~) sum_t |y(t) - (A + B diag(beta)) x(t)|^2} as
/// beta^T P beta - 2 v^T beta + const, truncated to `support`.
QuadraticForm beta_quadratic(const CMatrix& Y, const Dictionary& dict, const Posterior& post,
                             const std::vector<Index>& support);

/// Minimizes the quadratic over [-r/2, r/2]^K. Uses P^-1 v when P is well
/// conditioned and the solution is feasible, otherwise clamped coordinate
/// descent warm-started from previous_beta. Returns a length-N vector that is
/// zero off the support.
RVector update_beta(const QuadraticForm& qf, double interval, const RVector& previous_beta);

/// log p(Y | alpha0, alpha, beta) + log p(alpha; rho) + log p(alpha0; c, d).
double log_evidence(const CMatrix& Y, const Dictionary& dict, const HyperState& state, const InferenceConfig& config);

InferenceResult run_ogsbi(const CMatrix& Y, const Dictionary& dict, const InferenceConfig& config);

}  // namespace ogsbi
