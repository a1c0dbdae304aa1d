// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ogsbi/inference.hpp"

namespace ogsbi {

struct ReducedData {
  CMatrix Y_sv;             // M x K, Y V1
  CMatrix V1;               // T x K, leading right singular vectors
  RVector singular_values;  // min(M, T), nonincreasing
};

/// Keeps the K dominant right singular vectors; requires 1 <= K <= min(M, T).
/// Singular-vector phases are implementation defined.
ReducedData svd_reduce(const CMatrix& Y, Index rank);

struct SvdInferenceResult {
  InferenceResult inference;
  CMatrix V1;
};

/// OGSBI on Y V1 with min(K, T) retained columns.
SvdInferenceResult run_ogsbi_svd(const CMatrix& Y, const Dictionary& dict, const InferenceConfig& config);

}  // namespace ogsbi
