#ifndef MOSCOLAB_VI_SOLVER_HPP
#define MOSCOLAB_VI_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "moscolab/grid.hpp"
#include "moscolab/structural.hpp"

namespace moscolab {

inline std::vector<double> default_j_schedule() {
  std::vector<double> s;
  for (double j = 1.0; j <= 1024.0; j *= 2.0) s.push_back(j);
  s.push_back(kUntruncated);
  return s;
}

struct SolverOptions {
  double tol_res = 1e-10;          // complementarity residual tolerance
  double tol_act = 1e-12;          // active-set threshold on u_i - psi_i
  long max_sweeps = 200000;        // per continuation stage
  double damping = 0.7;            // relaxation factor, in (0,1]
  std::vector<double> j_schedule = default_j_schedule();
  double scalar_solver_tol = 1e-13;

  void validate() const {
    if (!(tol_res > 0.0) || !(tol_act > 0.0) || !(scalar_solver_tol > 0.0))
      throw std::invalid_argument("SolverOptions: tolerances must be positive");
    if (!(damping > 0.0) || !(damping <= 1.0))
      throw std::invalid_argument("SolverOptions: damping must lie in (0,1]");
    if (max_sweeps < 1) throw std::invalid_argument("SolverOptions: max_sweeps must be >= 1");
    if (j_schedule.empty()) throw std::invalid_argument("SolverOptions: empty j_schedule");
    for (std::size_t k = 0; k < j_schedule.size(); ++k) {
      if (!(j_schedule[k] >= 1.0))
        throw std::invalid_argument("SolverOptions: truncation indices must be >= 1");
      if (k > 0 && !(j_schedule[k] > j_schedule[k - 1]))
        throw std::invalid_argument("SolverOptions: j_schedule must be strictly increasing");
    }
  }
};

struct StageRecord {
  double j = kUntruncated;
  long sweeps = 0;
  double diff_w1p = 0.0;  // distance to the previous stage's solution
  bool converged = false;
};

struct VISolution {
  GridFunction u;
  std::vector<int> active_set;     // indices with u_i - psi_i <= tol_act
  std::vector<double> residuals;   // per-node F_i(u) of the solved problem
  long sweeps = 0;
  double j_final = kUntruncated;
  bool converged = false;
  std::vector<StageRecord> stages;  // filled by solve_vi

  double min_residual() const {
    double r = std::numeric_limits<double>::max();
    for (double v : residuals) r = std::min(r, v);
    return r;
  }
};

namespace detail {

// Precomputed per-element data shared by residual assembly and nodal solves.
class Assembly {
 public:
  Assembly(const StructuralData& d, const Grid& g) : d_(d), g_(g), h_(g.h) {
    const int ne = g.element_count();
    kap_.resize(ne);
    f_el_.resize(ne);
    for (int e = 0; e < ne; ++e) {
      kap_[e] = d.kappa()(g.element_mid(e));
      f_el_[e] = element_value(d.f(), e);
    }
    pm1_ = d.p() - 1.0;
    linear_ = (d.p() == 2.0);
  }

  double h() const { return h_; }
  bool linear() const { return linear_; }
  double kappa_el(int e) const { return kap_[e]; }

  double flux(int e, double grad) const { return kap_[e] * signed_pow(grad, pm1_); }

  // truncated lower-order term at element e; j may be kUntruncated
  double hj(int e, double sbar, double grad, double j) const {
    double v = f_el_[e] * eval_shape(d_.g_shape(), sbar);
    if (d_.mu() > 0.0) {
      const double sig = eval_shape(d_.sigma_shape(), sbar);
      if (sig != 0.0) v += sig * d_.b(std::abs(sbar)) * std::pow(std::abs(grad), d_.p());
    }
    return v / (1.0 + std::abs(v) / j);
  }

  // F_i(u): flux difference over the adjacent elements, lumped zero-order
  // term, and trapezoidal lower-order term.
  double residual_at(const std::vector<double>& u, int i, double j) const {
    const int m = g_.m;
    const double uL = (i > 0) ? u[i - 1] : 0.0;
    const double uC = u[i];
    const double uR = (i + 1 < m) ? u[i + 1] : 0.0;
    const double gL = (uC - uL) / h_;
    const double gR = (uR - uC) / h_;
    double F = flux(i, gL) - flux(i + 1, gR);
    F += h_ * d_.alpha0() * signed_pow(uC, pm1_);
    F += 0.5 * h_ * (hj(i, 0.5 * (uL + uC), gL, j) + hj(i + 1, 0.5 * (uC + uR), gR, j));
    return F;
  }

  void residual_all(const std::vector<double>& u, double j, std::vector<double>& out) const {
    out.resize(g_.m);
    for (int i = 0; i < g_.m; ++i) out[i] = residual_at(u, i, j);
  }

  // Root of the nodal equation in u_i with neighbors frozen at their current
  // values and the lower-order term frozen at the incoming center value t0
  // (lagged Picard coupling); the remaining part is strictly increasing in t.
  double solve_node(const std::vector<double>& u, int i, double j, double scalar_tol) const {
    const int m = g_.m;
    const double uL = (i > 0) ? u[i - 1] : 0.0;
    const double uR = (i + 1 < m) ? u[i + 1] : 0.0;
    const double t0 = u[i];
    const double hterm = 0.5 * h_ *
        (hj(i, 0.5 * (uL + t0), (t0 - uL) / h_, j) +
         hj(i + 1, 0.5 * (t0 + uR), (uR - t0) / h_, j));
    const double kL = kap_[i], kR = kap_[i + 1];
    const double a0h = h_ * d_.alpha0();

    if (linear_) {
      return (kL * uL / h_ + kR * uR / h_ - hterm) / ((kL + kR) / h_ + a0h);
    }

    auto G = [&](double t) {
      return kL * signed_pow((t - uL) / h_, pm1_) - kR * signed_pow((uR - t) / h_, pm1_) +
             a0h * signed_pow(t, pm1_) + hterm;
    };
    auto Gp = [&](double t) {
      const double gl = std::abs(t - uL) / h_;
      const double gr = std::abs(uR - t) / h_;
      return pm1_ * (kL * std::pow(gl, pm1_ - 1.0) + kR * std::pow(gr, pm1_ - 1.0)) / h_ +
             a0h * pm1_ * std::pow(std::abs(t), pm1_ - 1.0);
    };

    double t = t0, F = G(t);
    if (std::abs(F) <= scalar_tol) return t;

    // bracket the root: G is increasing with G(-inf) = -inf, G(+inf) = +inf
    double lo, hi;
    double step = std::max(1.0, std::abs(t0));
    if (F > 0.0) {
      hi = t;
      lo = t - step;
      while (G(lo) > 0.0) {
        hi = lo;
        step *= 2.0;
        lo = t - step;
        if (step > 1e18) throw std::logic_error("vi_solver: nodal bracketing failed");
      }
    } else {
      lo = t;
      hi = t + step;
      while (G(hi) < 0.0) {
        lo = hi;
        step *= 2.0;
        hi = t + step;
        if (step > 1e18) throw std::logic_error("vi_solver: nodal bracketing failed");
      }
    }

    // safeguarded Newton: fall back to bisection when the step leaves the
    // bracket or the derivative degenerates (p<2 at flat gradients)
    for (int it = 0; it < 200; ++it) {
      const double dG = Gp(t);
      double tn = (std::isfinite(dG) && dG > 0.0) ? t - F / dG : 0.5 * (lo + hi);
      if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
      t = tn;
      F = G(t);
      if (std::abs(F) <= scalar_tol) break;
      if (F > 0.0) hi = t; else lo = t;
      if (hi - lo <= 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi))) break;
    }
    return t;
  }

 private:
  const StructuralData& d_;
  Grid g_;
  double h_;
  double pm1_;
  bool linear_;
  std::vector<double> kap_;
  std::vector<double> f_el_;
};

inline bool complementarity_ok(const std::vector<double>& u, const std::vector<double>& psi,
                               const std::vector<double>& F, const SolverOptions& o) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (F[i] < -o.tol_res) return false;
    if (u[i] - psi[i] > o.tol_act && std::abs(F[i]) > o.tol_res) return false;
  }
  return true;
}

}  // namespace detail

/// Nodal residual F_i(u) of the discrete problem; j = kUntruncated gives the
/// untruncated lower-order term. For p = 2 and constant kappa the principal
/// contribution reduces to kappa (2u_i - u_{i-1} - u_{i+1}) / h.
inline std::vector<double> assemble_residual(const StructuralData& data, const Grid& grid,
                                             const GridFunction& u, double j = kUntruncated) {
  if (!(u.grid() == grid)) throw std::invalid_argument("assemble_residual: grid mismatch");
  detail::Assembly as(data, grid);
  std::vector<double> F;
  as.residual_all(std::vector<double>(u.values().begin(), u.values().end()), j, F);
  return F;
}

/// Solves the obstacle problem with the lower-order term truncated at index j
/// (kUntruncated for the original one) by projected damped nonlinear
/// Gauss-Seidel. Feasibility u >= psi holds exactly at every sweep; on
/// convergence the complementarity contract holds at tol_res / tol_act.
/// Non-convergence within max_sweeps is reported, never silently returned.
inline VISolution solve_truncated(const StructuralData& data, const GridFunction& psi,
                                  const Grid& grid, double j, const SolverOptions& opts,
                                  const GridFunction& u_init) {
  opts.validate();
  if (!(psi.grid() == grid) || !(u_init.grid() == grid))
    throw std::invalid_argument("solve_truncated: grid mismatch");
  if (!(j >= 1.0)) throw std::invalid_argument("solve_truncated: j must be >= 1");

  const int m = grid.m;
  detail::Assembly as(data, grid);
  std::vector<double> u(u_init.values().begin(), u_init.values().end());
  std::vector<double> lb(psi.values().begin(), psi.values().end());
  for (int i = 0; i < m; ++i) u[i] = std::max(u[i], lb[i]);

  std::vector<double> F(m);
  const int check_every = (m <= 32) ? 1 : 4;
  long sweeps = 0;
  bool converged = false;
  while (sweeps < opts.max_sweeps) {
    for (int i = 0; i < m; ++i) {
      const double root = as.solve_node(u, i, j, opts.scalar_solver_tol);
      const double relaxed = u[i] + opts.damping * (root - u[i]);
      u[i] = std::max(relaxed, lb[i]);
    }
    ++sweeps;
    if (sweeps % check_every == 0 || sweeps == opts.max_sweeps) {
      as.residual_all(u, j, F);
      if (detail::complementarity_ok(u, lb, F, opts)) {
        converged = true;
        break;
      }
    }
  }
  as.residual_all(u, j, F);

  VISolution sol;
  sol.u = GridFunction(grid, std::move(u));
  sol.residuals = std::move(F);
  for (int i = 0; i < m; ++i)
    if (sol.u[i] - lb[i] <= opts.tol_act) sol.active_set.push_back(i);
  sol.sweeps = sweeps;
  sol.j_final = j;
  sol.converged = converged;
  return sol;
}

inline VISolution solve_truncated(const StructuralData& data, const GridFunction& psi,
                                  const Grid& grid, double j, const SolverOptions& opts) {
  return solve_truncated(data, psi, grid, j, opts, nodal_max(psi, 0.0));
}

/// Continuation in the truncation index: solves for each j in the schedule,
/// warm-starting from the previous stage, ending with the untruncated term
/// (appended if the schedule does not already close with it). Records the
/// inter-stage distances in W^{1,p}. Non-convergence of any stage stops the
/// continuation and is propagated through the returned flags.
inline VISolution solve_vi(const StructuralData& data, const GridFunction& psi,
                           const Grid& grid, const SolverOptions& opts) {
  opts.validate();
  std::vector<double> schedule = opts.j_schedule;
  if (!std::isinf(schedule.back())) schedule.push_back(kUntruncated);

  GridFunction u_prev = nodal_max(psi, 0.0);
  VISolution sol;
  std::vector<StageRecord> stages;
  long total_sweeps = 0;
  for (double j : schedule) {
    sol = solve_truncated(data, psi, grid, j, opts, u_prev);
    total_sweeps += sol.sweeps;
    stages.push_back(StageRecord{j, sol.sweeps, norm_w1p(sol.u - u_prev, data.p()),
                                 sol.converged});
    u_prev = sol.u;
    if (!sol.converged) break;
  }
  sol.sweeps = total_sweeps;
  sol.stages = std::move(stages);
  sol.j_final = sol.stages.back().j;
  return sol;
}

}  // namespace moscolab

#endif  // MOSCOLAB_VI_SOLVER_HPP
