// SPDX-License-Identifier: Apache-2.0
#include "ogsbi/svd_reduce.hpp"

#include <algorithm>
#include <stdexcept>

namespace ogsbi {

ReducedData svd_reduce(const CMatrix& Y, Index rank) {
  if (rank < 1 || rank > std::min(Y.rows(), Y.cols())) throw std::invalid_argument("SVD rank must lie in [1, min(M, T)]");
  Eigen::BDCSVD<CMatrix> svd(Y, Eigen::ComputeThinV);
  ReducedData out;
  out.singular_values = svd.singularValues();
  out.V1 = svd.matrixV().leftCols(rank);
  out.Y_sv = Y * out.V1;
  return out;
}

SvdInferenceResult run_ogsbi_svd(const CMatrix& Y, const Dictionary& dict, const InferenceConfig& config) {
  ReducedData reduced = svd_reduce(Y, std::min(config.sources, Y.cols()));
  SvdInferenceResult out;
  out.inference = run_ogsbi(reduced.Y_sv, dict, config);
  out.V1 = std::move(reduced.V1);
  return out;
}

}  // namespace ogsbi
