// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ogsbi/kernels.hpp"

namespace ogsbi::kernels {
namespace {

bool cpu_has_avx2() {
#if OGSBI_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  const bool avx2 = cpu_has_avx2();
  if (const char* env = std::getenv("OGSBI_ISA")) {
    const std::string want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && avx2) return Isa::avx2;
  }
  return avx2 ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return cpu_has_avx2();
  }
  return false;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_supported(isa))
    throw std::invalid_argument("ISA not supported on this CPU: " + std::string(isa_name(isa)));
  current().store(isa, std::memory_order_relaxed);
}

void conj_gram(const cd* w, std::size_t rows, std::size_t cols, cd* out) {
#if OGSBI_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::conj_gram(w, rows, cols, out);
#endif
  scalar::conj_gram(w, rows, cols, out);
}

void column_norms2(const cd* w, std::size_t rows, std::size_t cols, double* out) {
#if OGSBI_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::column_norms2(w, rows, cols, out);
#endif
  scalar::column_norms2(w, rows, cols, out);
}

void accumulate_abs2(const cd* x, std::size_t n, double* acc) {
#if OGSBI_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::accumulate_abs2(x, n, acc);
#endif
  scalar::accumulate_abs2(x, n, acc);
}

}  // namespace ogsbi::kernels
