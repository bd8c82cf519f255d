#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace nlaa::detail {

// Solves (T) x = rhs for a tridiagonal T with constant off-diagonal `off`,
// using Gaussian elimination with partial pivoting (the LAPACK gtsv scheme).
// Returns false if a pivot vanishes exactly.
inline bool solve_tridiagonal(const std::vector<double>& diag, double off, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  if (n == 0) return true;
  std::vector<double> d = diag;
  std::vector<double> du(n > 1 ? n - 1 : 0, off);
  std::vector<double> dl(n > 1 ? n - 1 : 0, off);
  std::vector<double> du2(n > 2 ? n - 2 : 0, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) return false;
      const double f = dl[i] / d[i];
      d[i + 1] -= f * du[i];
      rhs[i + 1] -= f * rhs[i];
      dl[i] = 0.0;
    } else {
      const double f = d[i] / dl[i];
      d[i] = dl[i];
      const double t = d[i + 1];
      d[i + 1] = du[i] - f * t;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -f * du2[i];
      }
      du[i] = t;
      std::swap(rhs[i], rhs[i + 1]);
      rhs[i + 1] -= f * rhs[i];
    }
  }
  if (d[n - 1] == 0.0) return false;
  rhs[n - 1] /= d[n - 1];
  if (n > 1) rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
  for (std::size_t k = n - 2; k-- > 0;)
    rhs[k] = (rhs[k] - du[k] * rhs[k + 1] - du2[k] * rhs[k + 2]) / d[k];
  return true;
}

}  // namespace nlaa::detail
