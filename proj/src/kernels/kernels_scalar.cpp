// SPDX-License-Identifier: Apache-2.0
#include "ogsbi/kernels.hpp"

namespace ogsbi::kernels::scalar {

void conj_gram(const cd* w, std::size_t rows, std::size_t cols, cd* out) {
  for (std::size_t i = 0; i < cols; ++i) {
    const cd* wi = w + i * rows;
    for (std::size_t j = i; j < cols; ++j) {
      const cd* wj = w + j * rows;
      double re = 0.0;
      double im = 0.0;
      for (std::size_t m = 0; m < rows; ++m) {
        re += wi[m].real() * wj[m].real() + wi[m].imag() * wj[m].imag();
        im += wi[m].real() * wj[m].imag() - wi[m].imag() * wj[m].real();
      }
      out[i + j * cols] = cd(re, im);
      out[j + i * cols] = cd(re, -im);
    }
    out[i + i * cols] = cd(out[i + i * cols].real(), 0.0);
  }
}

void column_norms2(const cd* w, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t j = 0; j < cols; ++j) {
    const cd* wj = w + j * rows;
    double s = 0.0;
    for (std::size_t m = 0; m < rows; ++m) s += std::norm(wj[m]);
    out[j] = s;
  }
}

void accumulate_abs2(const cd* x, std::size_t n, double* acc) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += std::norm(x[i]);
}

}  // namespace ogsbi::kernels::scalar
