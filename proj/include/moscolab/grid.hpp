#ifndef MOSCOLAB_GRID_HPP
#define MOSCOLAB_GRID_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace moscolab {

/// Uniform partition of (0,1) with m interior nodes and mesh width h = 1/(m+1).
///
/// Interior node i (0-based) sits at x = (i+1)*h. Element e, for e = 0..m,
/// spans (e*h, (e+1)*h) and connects node e-1 to node e; the endpoints x = 0
/// and x = 1 carry implicit zero values throughout.
struct Grid {
  int m = 0;
  double h = 0.0;

  int node_count() const { return m; }
  int element_count() const { return m + 1; }
  double node(int i) const { return (i + 1) * h; }
  double element_mid(int e) const { return (e + 0.5) * h; }

  /// Index of the element containing x, clamped to [0, m].
  int element_of(double x) const {
    const int e = static_cast<int>(x * (m + 1));
    return std::clamp(e, 0, m);
  }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Builds the uniform grid with m >= 1 interior nodes.
inline Grid make_grid(int m) {
  if (m < 1) throw std::domain_error("make_grid: need at least one interior node");
  return Grid{m, 1.0 / (m + 1)};
}

/// Nodal values at the interior nodes of a Grid; boundary values are 0.
/// Immutable after construction: all operations below return new functions.
class GridFunction {
 public:
  GridFunction() = default;

  GridFunction(Grid grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.m)
      throw std::invalid_argument("GridFunction: value count does not match grid");
    for (double v : values_)
      if (!std::isfinite(v))
        throw std::invalid_argument("GridFunction: non-finite nodal value");
  }

  static GridFunction zero(Grid grid) {
    return GridFunction(grid, std::vector<double>(grid.m, 0.0));
  }

  static GridFunction constant(Grid grid, double c) {
    return GridFunction(grid, std::vector<double>(grid.m, c));
  }

  /// Samples fn(x) at the interior nodes.
  template <class Fn>
  static GridFunction sample(Grid grid, Fn&& fn) {
    std::vector<double> v(grid.m);
    for (int i = 0; i < grid.m; ++i) v[i] = fn(grid.node(i));
    return GridFunction(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  int size() const { return grid_.m; }
  double operator[](int i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

namespace detail {
inline void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("grid functions live on different grids");
}
}  // namespace detail

inline GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  detail::require_same_grid(a, b);
  std::vector<double> v(a.size());
  for (int i = 0; i < a.size(); ++i) v[i] = a[i] + b[i];
  return GridFunction(a.grid(), std::move(v));
}

inline GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  detail::require_same_grid(a, b);
  std::vector<double> v(a.size());
  for (int i = 0; i < a.size(); ++i) v[i] = a[i] - b[i];
  return GridFunction(a.grid(), std::move(v));
}

inline GridFunction operator*(double c, const GridFunction& a) {
  std::vector<double> v(a.size());
  for (int i = 0; i < a.size(); ++i) v[i] = c * a[i];
  return GridFunction(a.grid(), std::move(v));
}

/// Nodewise maximum of two functions.
inline GridFunction nodal_max(const GridFunction& a, const GridFunction& b) {
  detail::require_same_grid(a, b);
  std::vector<double> v(a.size());
  for (int i = 0; i < a.size(); ++i) v[i] = std::max(a[i], b[i]);
  return GridFunction(a.grid(), std::move(v));
}

/// Nodewise maximum with a constant.
inline GridFunction nodal_max(const GridFunction& a, double c) {
  std::vector<double> v(a.size());
  for (int i = 0; i < a.size(); ++i) v[i] = std::max(a[i], c);
  return GridFunction(a.grid(), std::move(v));
}

inline bool nodal_geq(const GridFunction& a, const GridFunction& b, double slack = 0.0) {
  detail::require_same_grid(a, b);
  for (int i = 0; i < a.size(); ++i)
    if (a[i] < b[i] - slack) return false;
  return true;
}

/// Discrete sup norm: max_i |v_i|.
inline double norm_linf(const GridFunction& v) {
  double r = 0.0;
  for (int i = 0; i < v.size(); ++i) r = std::max(r, std::abs(v[i]));
  return r;
}

/// Constant slope on each element, (right - left)/h, with zero boundary values.
/// Returns m+1 values, one per element.
inline std::vector<double> element_gradients(const GridFunction& v) {
  const Grid& g = v.grid();
  std::vector<double> grad(g.element_count());
  for (int e = 0; e < g.element_count(); ++e) {
    const double left = (e == 0) ? 0.0 : v[e - 1];
    const double right = (e == g.m) ? 0.0 : v[e];
    grad[e] = (right - left) / g.h;
  }
  return grad;
}

/// Gradient seminorm ( sum_e h*|g_e|^p )^{1/p}; this is the W^{1,p}_0 norm of
/// the piecewise-linear interpolant with zero trace.
inline double norm_w1p(const GridFunction& v, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("norm_w1p: requires p > 1");
  const Grid& g = v.grid();
  double acc = 0.0;
  for (int e = 0; e < g.element_count(); ++e) {
    const double left = (e == 0) ? 0.0 : v[e - 1];
    const double right = (e == g.m) ? 0.0 : v[e];
    acc += g.h * std::pow(std::abs((right - left) / g.h), p);
  }
  return std::pow(acc, 1.0 / p);
}

/// Lumped nodal quadrature: ( sum_i h*|v_i|^p )^{1/p}.
inline double norm_lp(const GridFunction& v, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("norm_lp: requires p >= 1");
  double acc = 0.0;
  for (int i = 0; i < v.size(); ++i) acc += v.grid().h * std::pow(std::abs(v[i]), p);
  return std::pow(acc, 1.0 / p);
}

/// Lumped integral sum_i h*v_i.
inline double integral(const GridFunction& v) {
  double acc = 0.0;
  for (int i = 0; i < v.size(); ++i) acc += v[i];
  return v.grid().h * acc;
}

/// Nodewise clamp to [-lambda, lambda]; the output satisfies norm_linf <= lambda.
inline GridFunction truncate(const GridFunction& v, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("truncate: lambda must be >= 0");
  std::vector<double> out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = std::clamp(v[i], -lambda, lambda);
  return GridFunction(v.grid(), std::move(out));
}

/// Value of nodal data inside element e when the data stands for an L^inf
/// function that need not vanish at the boundary: the average of the adjacent
/// interior nodal values, one-sided on the two boundary elements. Constant
/// nodal data evaluates to that constant on every element.
inline double element_value(const GridFunction& v, int e) {
  const int m = v.grid().m;
  if (e == 0) return v[0];
  if (e == m) return v[m - 1];
  return 0.5 * (v[e - 1] + v[e]);
}

/// Same, located by coordinate.
inline double value_at(const GridFunction& v, double x) {
  return element_value(v, v.grid().element_of(x));
}

}  // namespace moscolab

#endif  // MOSCOLAB_GRID_HPP
