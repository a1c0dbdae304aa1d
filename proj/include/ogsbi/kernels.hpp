// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel inner loops used by the inference engine. Every kernel has a
// portable scalar reference and, on x86-64, an AVX2/FMA variant. The variant
// is chosen once at startup from CPU features (override with OGSBI_ISA=scalar
// or OGSBI_ISA=avx2) and can be switched at runtime for equivalence testing.
#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace ogsbi::kernels {

using cd = std::complex<double>;

enum class Isa { scalar, avx2 };

bool isa_supported(Isa isa);
std::string_view isa_name(Isa isa);

/// ISA currently used by the dispatching entry points below.
Isa active_isa();

/// Throws std::invalid_argument when the CPU lacks the requested ISA.
void set_isa(Isa isa);

/// Scoped ISA override, restores the previous selection on exit.
class IsaGuard {
 public:
  explicit IsaGuard(Isa isa) : previous_(active_isa()) { set_isa(isa); }
  ~IsaGuard() { set_isa(previous_); }
  IsaGuard(const IsaGuard&) = delete;
  IsaGuard& operator=(const IsaGuard&) = delete;

 private:
  Isa previous_;
};

// Matrices are column-major with leading dimension equal to the row count.

/// out = W^H W, the full Hermitian cols x cols Gram matrix of a rows x cols W.
void conj_gram(const cd* w, std::size_t rows, std::size_t cols, cd* out);

/// out[j] = sum_i |W(i, j)|^2.
void column_norms2(const cd* w, std::size_t rows, std::size_t cols, double* out);

/// acc[i] += |x[i]|^2 for i < n.
void accumulate_abs2(const cd* x, std::size_t n, double* acc);

namespace scalar {
void conj_gram(const cd* w, std::size_t rows, std::size_t cols, cd* out);
void column_norms2(const cd* w, std::size_t rows, std::size_t cols, double* out);
void accumulate_abs2(const cd* x, std::size_t n, double* acc);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define OGSBI_HAVE_AVX2_KERNELS 1
namespace avx2 {
void conj_gram(const cd* w, std::size_t rows, std::size_t cols, cd* out);
void column_norms2(const cd* w, std::size_t rows, std::size_t cols, double* out);
void accumulate_abs2(const cd* x, std::size_t n, double* acc);
}  // namespace avx2
#else
#define OGSBI_HAVE_AVX2_KERNELS 0
#endif

}  // namespace ogsbi::kernels
