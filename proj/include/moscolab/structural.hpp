#ifndef MOSCOLAB_STRUCTURAL_HPP
#define MOSCOLAB_STRUCTURAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "moscolab/grid.hpp"

namespace moscolab {

inline constexpr double kUntruncated = std::numeric_limits<double>::infinity();

/// Bounded shape factors available for the lower-order term.
enum class ShapeFn { plus_one, minus_one, tanh_s, neg_tanh_s, zero };

inline double eval_shape(ShapeFn s, double t) {
  switch (s) {
    case ShapeFn::plus_one: return 1.0;
    case ShapeFn::minus_one: return -1.0;
    case ShapeFn::tanh_s: return std::tanh(t);
    case ShapeFn::neg_tanh_s: return -std::tanh(t);
    case ShapeFn::zero: return 0.0;
  }
  return 0.0;
}

/// Piecewise-constant weight on (0,1), one value per equal-width piece.
/// With m+1 pieces the breakpoints coincide with the grid elements.
class ElementWeight {
 public:
  explicit ElementWeight(std::vector<double> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw std::invalid_argument("ElementWeight: no pieces");
    for (double k : pieces_)
      if (!(k > 0.0) || !std::isfinite(k))
        throw std::invalid_argument("ElementWeight: pieces must be positive");
  }

  static ElementWeight constant(double c) { return ElementWeight(std::vector<double>{c}); }

  double operator()(double x) const {
    const int n = static_cast<int>(pieces_.size());
    const int k = std::clamp(static_cast<int>(x * n), 0, n - 1);
    return pieces_[k];
  }

  double min() const { return *std::min_element(pieces_.begin(), pieces_.end()); }
  double max() const { return *std::max_element(pieces_.begin(), pieces_.end()); }
  int piece_count() const { return static_cast<int>(pieces_.size()); }
  const std::vector<double>& pieces() const { return pieces_; }

 private:
  std::vector<double> pieces_;
};

/// The parameterized operator family and its structure constants:
///   a(x,s,xi)  = kappa(x) |xi|^{p-2} xi          (coercivity alpha = min kappa)
///   a0(x,s)    = alpha0 |s|^{p-2} s
///   H(x,s,xi)  = f(x) g(s) + sigma(s) b(|s|) |xi|^p,   b(t) = mu (1+t)^q
/// f and h_weight are nonnegative nodal data read through element averages,
/// so constants are represented exactly.
class StructuralData {
 public:
  StructuralData(double p, double alpha0, double beta, ElementWeight kappa,
                 double mu, double q_growth, ShapeFn g_shape, ShapeFn sigma_shape,
                 GridFunction f, GridFunction h_weight)
      : p_(p), alpha0_(alpha0), beta_(beta), kappa_(std::move(kappa)), mu_(mu),
        q_growth_(q_growth), g_shape_(g_shape), sigma_shape_(sigma_shape),
        f_(std::move(f)), h_weight_(std::move(h_weight)) {
    if (!(p_ > 1.0)) throw std::invalid_argument("StructuralData: p must exceed 1");
    if (!(alpha0_ > 0.0)) throw std::invalid_argument("StructuralData: alpha0 must be positive");
    if (!(beta_ > 0.0)) throw std::invalid_argument("StructuralData: beta must be positive");
    if (!(mu_ >= 0.0)) throw std::invalid_argument("StructuralData: mu must be >= 0");
    if (!(q_growth_ >= 0.0)) throw std::invalid_argument("StructuralData: q_growth must be >= 0");
    for (int i = 0; i < f_.size(); ++i)
      if (f_[i] < 0.0) throw std::invalid_argument("StructuralData: f must be nonnegative");
    for (int i = 0; i < h_weight_.size(); ++i)
      if (h_weight_[i] < 0.0)
        throw std::invalid_argument("StructuralData: h_weight must be nonnegative");
  }

  double p() const { return p_; }
  double p_conj() const { return p_ / (p_ - 1.0); }
  double alpha() const { return kappa_.min(); }
  double alpha0() const { return alpha0_; }
  double beta() const { return beta_; }
  const ElementWeight& kappa() const { return kappa_; }
  double mu() const { return mu_; }
  double q_growth() const { return q_growth_; }
  ShapeFn g_shape() const { return g_shape_; }
  ShapeFn sigma_shape() const { return sigma_shape_; }
  const GridFunction& f() const { return f_; }
  const GridFunction& h_weight() const { return h_weight_; }

  double b(double t) const {
    if (mu_ == 0.0) return 0.0;
    if (q_growth_ == 0.0) return mu_;
    return mu_ * std::pow(1.0 + t, q_growth_);
  }

  double f_linf() const { return norm_linf(f_); }

 private:
  double p_, alpha0_, beta_;
  ElementWeight kappa_;
  double mu_, q_growth_;
  ShapeFn g_shape_, sigma_shape_;
  GridFunction f_, h_weight_;
};

namespace detail {
// sign(t) |t|^{e}; exact and branch-cheap for e = 1.
inline double signed_pow(double t, double e) {
  if (t == 0.0) return 0.0;
  if (e == 1.0) return t;
  const double mag = std::pow(std::abs(t), e);
  return t > 0.0 ? mag : -mag;
}
}  // namespace detail

/// Principal flux kappa(x) |xi|^{p-2} xi, continuously extended by 0 at xi = 0.
inline double eval_a(const StructuralData& d, double x, double /*s*/, double xi) {
  return d.kappa()(x) * detail::signed_pow(xi, d.p() - 1.0);
}

/// Zero-order term alpha0 |s|^{p-2} s.
inline double eval_a0(const StructuralData& d, double /*x*/, double s) {
  return d.alpha0() * detail::signed_pow(s, d.p() - 1.0);
}

/// Lower-order term f(x) g(s) + sigma(s) b(|s|) |xi|^p.
inline double eval_H(const StructuralData& d, double x, double s, double xi) {
  double v = value_at(d.f(), x) * eval_shape(d.g_shape(), s);
  if (d.mu() > 0.0) {
    const double sig = eval_shape(d.sigma_shape(), s);
    if (sig != 0.0) v += sig * d.b(std::abs(s)) * std::pow(std::abs(xi), d.p());
  }
  return v;
}

/// Bounded truncation H / (1 + |H|/j). Accepts j = kUntruncated, which
/// reproduces H exactly; |result| <= min(|H|, j) and the sign is preserved.
inline double eval_Hj(const StructuralData& d, double j, double x, double s, double xi) {
  if (!(j >= 1.0)) throw std::invalid_argument("eval_Hj: truncation index must be >= 1");
  const double H = eval_H(d, x, s, xi);
  return H / (1.0 + std::abs(H) / j);
}

inline constexpr double kPhiOverflowGuard = 700.0;

/// phi_lambda(t) = t exp(lambda t^2). Guarded against exp overflow.
inline double phi_lambda(double t, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("phi_lambda: lambda must be positive");
  const double lt2 = lambda * t * t;
  if (lt2 > kPhiOverflowGuard) throw std::domain_error("phi_lambda: lambda*t^2 exceeds overflow guard");
  return t * std::exp(lt2);
}

/// phi_lambda'(t) = (1 + 2 lambda t^2) exp(lambda t^2); even, and >= 1.
inline double phi_lambda_prime(double t, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("phi_lambda_prime: lambda must be positive");
  const double lt2 = lambda * t * t;
  if (lt2 > kPhiOverflowGuard) throw std::domain_error("phi_lambda_prime: lambda*t^2 exceeds overflow guard");
  return (1.0 + 2.0 * lt2) * std::exp(lt2);
}

/// Minimum over the samples of d*phi'(t) - c*|phi(t)| with lambda = c^2/(4d^2).
/// Samples past the overflow guard contribute a saturated huge slack: there the
/// exact value exceeds exp(700)*d/2, far above any minimum, which is always
/// attained near |t| = d/c where lambda t^2 = 1/4.
inline double check_phi_inequality(double c, double d, std::span<const double> t_samples) {
  if (!(c > 0.0) || !(d > 0.0))
    throw std::invalid_argument("check_phi_inequality: c and d must be positive");
  const double lambda = c * c / (4.0 * d * d);
  double min_slack = std::numeric_limits<double>::max();
  for (double t : t_samples) {
    const double lt2 = lambda * t * t;
    if (lt2 > kPhiOverflowGuard) continue;
    const double slack = d * phi_lambda_prime(t, lambda) - c * std::abs(phi_lambda(t, lambda));
    min_slack = std::min(min_slack, slack);
  }
  return min_slack;
}

/// C_inf = max{ (|f|_inf / alpha0)^{1/(p-1)}, |psi|_inf }.
inline double c_infinity(double f_inf, double alpha0, double p, double psi_inf) {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("c_infinity: alpha0 must be positive");
  if (!(p > 1.0)) throw std::invalid_argument("c_infinity: p must exceed 1");
  if (!(f_inf >= 0.0) || !(psi_inf >= 0.0))
    throw std::invalid_argument("c_infinity: norms must be nonnegative");
  return std::max(std::pow(f_inf / alpha0, 1.0 / (p - 1.0)), psi_inf);
}

/// Right-hand side of the gradient estimate,
///   M [ (1+lambda Ct^2) e^{4 lambda Ct^2} ]^p
///     { f_inf + h_norm + |DPsi|_p^p + |DPsi|_p (h_norm + C_inf^{p-1}) + C_inf^{p-1} },
/// with lambda = b(C_inf)^2 / (4 alpha^2) floored at 1e-12 (b may vanish) and
/// Ct = C_inf + |Psi|_inf. M is a caller-supplied calibration constant.
inline double w1p_bound_rhs(const StructuralData& d, double f_inf, double h_norm_pconj,
                            double c_inf, const GridFunction& Psi, double M) {
  if (!(M > 0.0)) throw std::invalid_argument("w1p_bound_rhs: M must be positive");
  const double alpha = d.alpha();
  const double bC = d.b(c_inf);
  const double lambda = std::max(bC * bC / (4.0 * alpha * alpha), 1e-12);
  const double Ct = c_inf + norm_linf(Psi);
  const double expo = 4.0 * lambda * Ct * Ct;
  if (expo > kPhiOverflowGuard)
    throw std::domain_error("w1p_bound_rhs: exponential factor exceeds overflow guard");
  const double envelope = std::pow((1.0 + lambda * Ct * Ct) * std::exp(expo), d.p());
  const double dpsi = norm_w1p(Psi, d.p());
  const double cpow = std::pow(c_inf, d.p() - 1.0);
  return M * envelope *
         (f_inf + h_norm_pconj + std::pow(dpsi, d.p()) + dpsi * (h_norm_pconj + cpow) + cpow);
}

/// Sampling ranges for the assumption audit.
struct AuditRanges {
  double s_lo = -10.0, s_hi = 10.0;
  double xi_lo = -10.0, xi_hi = 10.0;
};

struct AuditCheck {
  std::string name;
  long violations = 0;
  double worst_margin = std::numeric_limits<double>::max();  // min over samples of lhs - rhs
};

struct AuditReport {
  long samples = 0;
  std::vector<AuditCheck> checks;

  bool clean() const {
    for (const auto& c : checks)
      if (c.violations > 0) return false;
    return true;
  }
  const AuditCheck& check(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw std::out_of_range("audit check not found: " + name);
  }
};

/// Randomized check of the growth/coercivity/monotonicity assumptions on the
/// built-in families. Violations are counted, not thrown; margins are lhs-rhs
/// per inequality with a small relative rounding allowance.
inline AuditReport audit_assumptions(const StructuralData& d, long n_samples,
                                     std::uint64_t seed, const AuditRanges& ranges = {}) {
  if (n_samples < 1) throw std::invalid_argument("audit_assumptions: need n_samples >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  std::uniform_real_distribution<double> us(ranges.s_lo, ranges.s_hi);
  std::uniform_real_distribution<double> uxi(ranges.xi_lo, ranges.xi_hi);

  AuditReport rep;
  rep.samples = n_samples;
  rep.checks = {AuditCheck{"coercivity_a"}, AuditCheck{"growth_a"},
                AuditCheck{"monotonicity_a"}, AuditCheck{"coercivity_a0"},
                AuditCheck{"growth_a0"}, AuditCheck{"growth_H"}};
  AuditCheck& co_a = rep.checks[0];
  AuditCheck& gr_a = rep.checks[1];
  AuditCheck& mono_a = rep.checks[2];
  AuditCheck& co_a0 = rep.checks[3];
  AuditCheck& gr_a0 = rep.checks[4];
  AuditCheck& gr_H = rep.checks[5];

  const double pm1 = d.p() - 1.0;
  auto tally = [](AuditCheck& c, double margin, double scale) {
    c.worst_margin = std::min(c.worst_margin, margin);
    if (margin < -1e-9 * (1.0 + scale)) ++c.violations;
  };

  for (long k = 0; k < n_samples; ++k) {
    const double x = ux(rng), s = us(rng), xi = uxi(rng), eta = uxi(rng);
    const double hx = value_at(d.h_weight(), x);
    const double a = eval_a(d, x, s, xi);
    const double a0 = eval_a0(d, x, s);
    const double H = eval_H(d, x, s, xi);
    const double abs_xi_p = std::pow(std::abs(xi), d.p());
    const double abs_s_pm1 = std::pow(std::abs(s), pm1);
    const double abs_xi_pm1 = std::pow(std::abs(xi), pm1);

    // a(x,s,xi) xi >= alpha |xi|^p
    tally(co_a, a * xi - d.alpha() * abs_xi_p, std::abs(a * xi) + d.alpha() * abs_xi_p);
    // |a| <= beta (h + |s|^{p-1} + |xi|^{p-1})
    {
      const double rhs = d.beta() * (hx + abs_s_pm1 + abs_xi_pm1);
      tally(gr_a, rhs - std::abs(a), rhs + std::abs(a));
    }
    // (a(x,s,xi) - a(x,s,eta))(xi - eta) > 0 for xi != eta
    if (std::abs(xi - eta) > 1e-12) {
      const double lhs = (a - eval_a(d, x, s, eta)) * (xi - eta);
      mono_a.worst_margin = std::min(mono_a.worst_margin, lhs);
      if (!(lhs > 0.0)) ++mono_a.violations;
    }
    // a0(x,s) s >= alpha0 |s|^p
    {
      const double rhs = d.alpha0() * std::pow(std::abs(s), d.p());
      tally(co_a0, a0 * s - rhs, std::abs(a0 * s) + rhs);
    }
    // |a0| <= beta (h + |s|^{p-1})
    {
      const double rhs = d.beta() * (hx + abs_s_pm1);
      tally(gr_a0, rhs - std::abs(a0), rhs + std::abs(a0));
    }
    // |H| <= f + b(|s|) |xi|^p
    {
      const double rhs = value_at(d.f(), x) + d.b(std::abs(s)) * abs_xi_p;
      tally(gr_H, rhs - std::abs(H), rhs + std::abs(H));
    }
  }
  return rep;
}

}  // namespace moscolab

#endif  // MOSCOLAB_STRUCTURAL_HPP
