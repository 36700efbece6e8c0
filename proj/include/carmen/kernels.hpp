#pragma once

#include <span>
#include <string_view>

namespace carmen::kernels {

// Dense inner loops used by the logistic-regression fitter. Every variant
// must agree with the scalar reference up to floating-point reassociation.
struct KernelTable {
  std::string_view name;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// sum_i w[i] * a[i] * b[i]
  double (*weighted_dot)(const double* w, const double* a, const double* b, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();

/// AVX2/FMA table, or nullptr when not compiled in or unsupported by this CPU.
const KernelTable* avx2_table();

/// Best table for the running CPU. Setting CARMEN_KERNELS=scalar in the
/// environment forces the reference kernels.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double weighted_dot(std::span<const double> w, std::span<const double> a,
                           std::span<const double> b) {
  return active().weighted_dot(w.data(), a.data(), b.data(), w.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace carmen::kernels
