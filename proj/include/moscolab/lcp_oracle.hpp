#ifndef MOSCOLAB_LCP_ORACLE_HPP
#define MOSCOLAB_LCP_ORACLE_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "moscolab/grid.hpp"

namespace moscolab {

namespace detail {

// Dense Gaussian elimination with partial pivoting; verifies the residual.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> A,
                                       std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  const std::vector<std::vector<double>> A0 = A;
  const std::vector<double> b0 = b;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int r = k + 1; r < n; ++r)
      if (std::abs(A[r][k]) > std::abs(A[piv][k])) piv = r;
    std::swap(A[k], A[piv]);
    std::swap(b[k], b[piv]);
    if (A[k][k] == 0.0) throw std::logic_error("lcp_oracle: singular reduced system");
    for (int r = k + 1; r < n; ++r) {
      const double fac = A[r][k] / A[k][k];
      if (fac == 0.0) continue;
      for (int c = k; c < n; ++c) A[r][c] -= fac * A[k][c];
      b[r] -= fac * b[k];
    }
  }
  std::vector<double> x(n);
  for (int k = n - 1; k >= 0; --k) {
    double s = b[k];
    for (int c = k + 1; c < n; ++c) s -= A[k][c] * x[c];
    x[k] = s / A[k][k];
  }
  double scale = 0.0, res = 0.0;
  for (int r = 0; r < n; ++r) {
    double Ax = 0.0;
    for (int c = 0; c < n; ++c) Ax += A0[r][c] * x[c];
    res = std::max(res, std::abs(Ax - b0[r]));
    scale = std::max(scale, std::abs(b0[r]));
  }
  if (res > 1e-13 * (1.0 + scale)) throw std::logic_error("lcp_oracle: elimination residual too large");
  return x;
}

}  // namespace detail

/// Exact solution of the linear complementarity problem
///   u >= psi,  M u + q >= 0,  (u - psi)^T (M u + q) = 0,
/// with M = kappa tridiag(-1,2,-1)/h + alpha0 h I and q_i = h f_i, found by
/// enumerating all 2^m active sets. Verification oracle for the p = 2,
/// gradient-free instances; m is capped at 12.
inline GridFunction lcp_oracle(double kappa, double alpha0, const GridFunction& f,
                               const GridFunction& psi, const Grid& grid) {
  if (grid.m > 12) throw std::invalid_argument("lcp_oracle: enumeration capped at m = 12");
  if (!(f.grid() == grid) || !(psi.grid() == grid))
    throw std::invalid_argument("lcp_oracle: grid mismatch");
  if (!(kappa > 0.0) || !(alpha0 > 0.0))
    throw std::invalid_argument("lcp_oracle: kappa and alpha0 must be positive");

  const int m = grid.m;
  const double h = grid.h;
  auto M = [&](int r, int c) -> double {
    if (r == c) return 2.0 * kappa / h + alpha0 * h;
    if (std::abs(r - c) == 1) return -kappa / h;
    return 0.0;
  };

  const double tol = 1e-12;
  std::optional<std::vector<double>> accepted;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> inactive;
    for (int i = 0; i < m; ++i)
      if (!(mask & (1u << i))) inactive.push_back(i);

    std::vector<double> u(m);
    for (int i = 0; i < m; ++i) u[i] = psi[i];
    if (!inactive.empty()) {
      const int n = static_cast<int>(inactive.size());
      std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
      std::vector<double> b(n, 0.0);
      for (int r = 0; r < n; ++r) {
        const int i = inactive[r];
        b[r] = -h * f[i];
        for (int c = 0; c < n; ++c) A[r][c] = M(i, inactive[c]);
        for (int jx = 0; jx < m; ++jx)
          if (mask & (1u << jx)) b[r] -= M(i, jx) * psi[jx];
      }
      const std::vector<double> x = detail::solve_dense(std::move(A), std::move(b));
      for (int r = 0; r < n; ++r) u[inactive[r]] = x[r];
    }

    bool ok = true;
    for (int i = 0; i < m && ok; ++i) {
      if (u[i] < psi[i] - tol) ok = false;  // feasibility on the inactive part
      if (mask & (1u << i)) {
        double w = h * f[i];
        for (int c = 0; c < m; ++c) w += M(i, c) * u[c];
        if (w < -tol) ok = false;  // nonnegative multiplier on the active part
      }
    }
    if (!ok) continue;
    if (!accepted) {
      accepted = u;
    } else {
      for (int i = 0; i < m; ++i)
        if (std::abs((*accepted)[i] - u[i]) > 1e-9)
          throw std::logic_error("lcp_oracle: distinct candidates passed the sign checks");
    }
  }
  if (!accepted)
    throw std::logic_error("lcp_oracle: no active set passed (M should be positive definite)");
  return GridFunction(grid, std::move(*accepted));
}

}  // namespace moscolab

#endif  // MOSCOLAB_LCP_ORACLE_HPP
