#pragma once

// Symmetric tridiagonal kernels: eigenvalues by implicit-shift QL and an
// LDL^T solver for positive definite systems.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "lagspec/errors.hpp"

namespace lagspec {

/// Symmetric tridiagonal matrix: `diag` has n entries, `off` has n - 1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }
};

/// Eigenvalues (ascending) of a symmetric tridiagonal matrix.
///
/// Implicit QL with Wilkinson-type shifts, no eigenvectors. Throws
/// numeric_error naming the eigenvalue index whose iteration stalls.
inline std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag, std::span<const double> off,
                                                   int max_sweeps = 60) {
  const std::size_t n = diag.size();
  if (n == 0) return {};
  if (off.size() + 1 != n) throw std::invalid_argument("tridiagonal_eigenvalues: off-diagonal size must be n - 1");

  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(n, 0.0);
  std::copy(off.begin(), off.end(), e.begin());
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++iter > max_sweeps) throw numeric_error("tridiagonal_eigenvalues: QL iteration did not converge", l);

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool deflated = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          // underflow: the matrix split at i
          d[i + 1] -= p;
          e[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (deflated) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

/// Solves A x = rhs for symmetric positive definite tridiagonal A by LDL^T.
/// A nonpositive pivot raises numeric_error with the pivot index.
inline std::vector<double> solve_spd_tridiagonal(const SymTridiagonal& A, std::span<const double> rhs) {
  const std::size_t n = A.size();
  if (rhs.size() != n || (n > 0 && A.off.size() + 1 != n)) {
    throw std::invalid_argument("solve_spd_tridiagonal: size mismatch");
  }
  std::vector<double> pivot(n), lower(n > 0 ? n - 1 : 0), x(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n; ++i) {
    double dii = A.diag[i];
    if (i > 0) {
      lower[i - 1] = A.off[i - 1] / pivot[i - 1];
      dii -= lower[i - 1] * A.off[i - 1];
      x[i] -= lower[i - 1] * x[i - 1];
    }
    if (!(dii > 0.0)) throw numeric_error("solve_spd_tridiagonal: matrix is not positive definite", i);
    pivot[i] = dii;
  }
  for (std::size_t i = n; i-- > 0;) {
    x[i] /= pivot[i];
    if (i + 1 < n) x[i] -= lower[i] * x[i + 1];
  }
  return x;
}

}  // namespace lagspec
