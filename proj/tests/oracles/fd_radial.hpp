#pragma once

// Independent oracle for the radial eigenproblem  -(t v')' = lambda t v  on [r, R]:
// vertex-centred finite volumes (symmetric tridiagonal stiffness, diagonal t-weighted mass),
// smallest eigenvalue by bisection on the Sturm count of the symmetrized pencil.
// Shares no code with the shooting solver.

#include <cmath>
#include <limits>
#include <vector>

namespace rfk::oracle {

struct FdBoundary {
  bool dirichlet = false;
  double h = 0.0;
};

class FdRadialOracle {
 public:
  FdRadialOracle(double r, double R, FdBoundary inner, FdBoundary outer, std::size_t cells) {
    const double h = (R - r) / static_cast<double>(cells);
    const std::size_t n = cells + 1;
    std::vector<double> a(n, 0.0), off(n - 1, 0.0), b(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double tm = r + (static_cast<double>(i) + 0.5) * h;
      const double k = tm / h;
      a[i] += k;
      a[i + 1] += k;
      off[i] = -k;
      // Dual-cell mass: exact integral of t over the half cells on each side.
      const double ti = r + static_cast<double>(i) * h;
      const double tj = ti + h;
      b[i] += 0.5 * h * (ti + 0.25 * h);
      b[i + 1] += 0.5 * h * (tj - 0.25 * h);
    }
    if (r > 0.0 && !inner.dirichlet) a[0] += r * inner.h;
    if (!outer.dirichlet) a[n - 1] += R * outer.h;

    std::size_t first = (r > 0.0 && inner.dirichlet) ? 1 : 0;
    std::size_t last = outer.dirichlet ? n - 2 : n - 1;
    for (std::size_t i = first; i <= last; ++i) {
      diag_.push_back(a[i] / b[i]);
      if (i < last) {
        const double e = off[i] / std::sqrt(b[i] * b[i + 1]);
        off2_.push_back(e * e);
      }
    }
  }

  /// Number of eigenvalues strictly below lambda.
  std::size_t count_below(double lambda) const {
    std::size_t count = 0;
    double d = diag_[0] - lambda;
    if (d < 0.0) ++count;
    for (std::size_t i = 1; i < diag_.size(); ++i) {
      if (d == 0.0) d = std::numeric_limits<double>::epsilon();
      d = diag_[i] - lambda - off2_[i - 1] / d;
      if (d < 0.0) ++count;
    }
    return count;
  }

  double smallest(double lo = -1e4, double hi = 1e4, double tol = 1e-13) const {
    while (hi - lo > tol * std::max(1.0, std::abs(lo) + std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      (count_below(mid) >= 1 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  std::vector<double> diag_;
  std::vector<double> off2_;
};

/// Richardson-extrapolated oracle value from cell counts n and 2n (second-order scheme).
inline double fd_radial_lambda1(double r, double R, FdBoundary inner, FdBoundary outer, std::size_t cells = 10000) {
  const double coarse = FdRadialOracle(r, R, inner, outer, cells).smallest();
  const double fine = FdRadialOracle(r, R, inner, outer, 2 * cells).smallest();
  return fine + (fine - coarse) / 3.0;
}

}  // namespace rfk::oracle
