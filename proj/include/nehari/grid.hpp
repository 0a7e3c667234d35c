#pragma once

// Uniform tensor grids on boxes [0,L_1] x ... x [0,L_d] with homogeneous
// Dirichlet data, nodal fields on the interior nodes, and the staggered
// forward-difference gradient used by every energy family.
//
// Lattices (n_i interior nodes per axis, h_i = L_i / (n_i + 1)):
//   nodes  : n_i per axis, flat index with the last axis fastest
//   cells  : n_i + 1 per axis; cell c spans node layers c_i - 1 and c_i
//   edges  : per axis i, n_i + 1 along i and n_j across (j != i); edge k
//            joins interior nodes k - 1 and k, out-of-range nodes read 0
//
// Every cell and every edge carries the weight prod(h_i).

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "nehari/errors.hpp"

namespace nehari {

class Grid {
 public:
  static constexpr int kMaxDim = 3;

  Grid(int dim, std::span<const double> extents, std::span<const int> resolution) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) {
      throw ConfigurationError("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
    }
    if (static_cast<int>(extents.size()) != dim || static_cast<int>(resolution.size()) != dim) {
      throw ConfigurationError("grid needs exactly " + std::to_string(dim) +
                               " extents and resolutions");
    }
    for (int i = 0; i < dim; ++i) {
      if (!(extents[i] > 0.0) || !std::isfinite(extents[i])) {
        throw ConfigurationError("extent of axis " + std::to_string(i) + " must be positive");
      }
      if (resolution[i] < 2) {
        throw ConfigurationError("resolution of axis " + std::to_string(i) + " must be >= 2");
      }
      extents_[i] = extents[i];
      resolution_[i] = resolution[i];
      spacing_[i] = extents[i] / static_cast<double>(resolution[i] + 1);
    }
  }

  int dim() const noexcept { return dim_; }
  double extent(int axis) const { return extents_.at(axis); }
  int resolution(int axis) const { return resolution_.at(axis); }
  double spacing(int axis) const { return spacing_.at(axis); }

  /// Interior nodes along `axis`; 1 for axes beyond dim().
  int nodes(int axis) const noexcept { return axis < dim_ ? resolution_[axis] : 1; }
  /// Cells along `axis`; 1 for axes beyond dim().
  int cells(int axis) const noexcept { return axis < dim_ ? resolution_[axis] + 1 : 1; }

  std::size_t node_count() const noexcept {
    return static_cast<std::size_t>(nodes(0)) * nodes(1) * nodes(2);
  }
  std::size_t cell_count() const noexcept {
    return static_cast<std::size_t>(cells(0)) * cells(1) * cells(2);
  }
  std::size_t edge_count(int axis) const noexcept {
    std::size_t count = 1;
    for (int j = 0; j < kMaxDim; ++j) count *= (j == axis) ? cells(j) : nodes(j);
    return count;
  }
  double cell_volume() const noexcept {
    double v = 1.0;
    for (int i = 0; i < dim_; ++i) v *= spacing_[i];
    return v;
  }

  std::size_t node_index(int i0, int i1 = 0, int i2 = 0) const noexcept {
    return (static_cast<std::size_t>(i0) * nodes(1) + i1) * nodes(2) + i2;
  }

  std::array<int, 3> node_multi_index(std::size_t flat) const noexcept {
    std::array<int, 3> idx{};
    idx[2] = static_cast<int>(flat % nodes(2));
    flat /= nodes(2);
    idx[1] = static_cast<int>(flat % nodes(1));
    idx[0] = static_cast<int>(flat / nodes(1));
    return idx;
  }

  /// Physical coordinates of an interior node (unused axes read 0).
  std::array<double, 3> position(std::size_t flat) const noexcept {
    const auto idx = node_multi_index(flat);
    std::array<double, 3> x{};
    for (int i = 0; i < dim_; ++i) x[i] = (idx[i] + 1) * spacing_[i];
    return x;
  }

  bool operator==(const Grid& other) const noexcept {
    return dim_ == other.dim_ && extents_ == other.extents_ && resolution_ == other.resolution_;
  }

 private:
  int dim_;
  std::array<double, 3> extents_{};
  std::array<int, 3> resolution_{};
  std::array<double, 3> spacing_{};
};

inline Grid build_grid(int dim, const std::vector<double>& extents, const std::vector<int>& resolution) {
  return Grid(dim, extents, resolution);
}

/// Nodal values of a discrete function on the interior nodes of a grid.
class Field {
 public:
  explicit Field(Grid grid) : grid_(grid), values_(grid.node_count(), 0.0) {}

  Field(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count()) {
      throw ContractError("field has " + std::to_string(values_.size()) + " values, grid has " +
                          std::to_string(grid_.node_count()) + " interior nodes");
    }
    if (!all_finite()) throw ContractError("field values must be finite");
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  bool all_finite() const noexcept {
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  bool is_zero() const noexcept {
    for (double v : values_) {
      if (v != 0.0) return false;
    }
    return true;
  }

  Field& operator+=(const Field& other) {
    require_same_grid(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
  }
  Field& operator-=(const Field& other) {
    require_same_grid(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
  }
  Field& operator*=(double s) noexcept {
    for (double& v : values_) v *= s;
    return *this;
  }

  friend Field operator*(double s, Field f) { return f *= s; }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator-(Field a) { return a *= -1.0; }

  void require_same_grid(const Field& other) const {
    if (!(grid_ == other.grid_)) throw ContractError("fields live on different grids");
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Samples `fn(x)` at the interior nodes; `x` is a 3-array with unused axes 0.
template <typename Fn>
Field sample(const Grid& grid, Fn&& fn) {
  std::vector<double> values(grid.node_count());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = fn(grid.position(k));
  return Field(grid, std::move(values));
}

/// a + s * b
inline Field axpy(const Field& a, double s, const Field& b) {
  a.require_same_grid(b);
  Field out = a;
  auto ov = out.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] += s * bv[i];
  return out;
}

/// Discrete L2 inner product sum_j a_j b_j prod(h).
inline double inner(const Field& a, const Field& b) {
  a.require_same_grid(b);
  auto av = a.values();
  auto bv = b.values();
  double s = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
  return s * a.grid().cell_volume();
}

/// Per-axis forward differences on the staggered edge lattices.
struct GradientField {
  Grid grid;
  std::array<std::vector<double>, 3> axis;
};

namespace detail {

inline std::array<std::size_t, 3> edge_strides(const Grid& g, int axis) {
  std::array<int, 3> shape{};
  for (int j = 0; j < 3; ++j) shape[j] = (j == axis) ? g.cells(j) : g.nodes(j);
  return {static_cast<std::size_t>(shape[1]) * shape[2], static_cast<std::size_t>(shape[2]), 1};
}

inline std::array<std::size_t, 3> node_strides(const Grid& g) {
  return {static_cast<std::size_t>(g.nodes(1)) * g.nodes(2), static_cast<std::size_t>(g.nodes(2)), 1};
}

/// Calls visit(cell_flat, axis, edge_flat) for every edge bounding every cell,
/// skipping edges whose transverse position lies on the boundary (there the
/// difference of two boundary zeros vanishes).
template <typename Visit>
void for_each_cell_edge(const Grid& g, Visit&& visit) {
  const int d = g.dim();
  std::array<std::array<std::size_t, 3>, 3> es{};
  for (int i = 0; i < d; ++i) es[i] = edge_strides(g, i);
  const int c0 = g.cells(0), c1 = g.cells(1), c2 = g.cells(2);
  std::size_t cell = 0;
  for (int a = 0; a < c0; ++a) {
    for (int b = 0; b < c1; ++b) {
      for (int c = 0; c < c2; ++c, ++cell) {
        const std::array<int, 3> ci{a, b, c};
        for (int i = 0; i < d; ++i) {
          // transverse axes that are used by the grid contribute two layers
          std::array<int, 2> transverse{};
          int nt = 0;
          for (int j = 0; j < d; ++j) {
            if (j != i) transverse[nt++] = j;
          }
          const int combos = 1 << nt;
          for (int m = 0; m < combos; ++m) {
            std::array<int, 3> e{ci[0], ci[1], ci[2]};
            bool valid = true;
            for (int t = 0; t < nt; ++t) {
              const int j = transverse[t];
              const int layer = ci[j] - 1 + ((m >> t) & 1);
              if (layer < 0 || layer >= g.nodes(j)) {
                valid = false;
                break;
              }
              e[j] = layer;
            }
            if (!valid) continue;
            visit(cell, i, e[0] * es[i][0] + e[1] * es[i][1] + e[2] * es[i][2]);
          }
        }
      }
    }
  }
}

inline double transverse_weight(const Grid& g) { return 1.0 / static_cast<double>(1 << (g.dim() - 1)); }

}  // namespace detail

inline GradientField gradient(const Field& u) {
  const Grid& g = u.grid();
  GradientField grad{g, {}};
  const auto ns = detail::node_strides(g);
  const auto vals = u.values();
  for (int i = 0; i < g.dim(); ++i) {
    auto& out = grad.axis[i];
    out.assign(g.edge_count(i), 0.0);
    const double inv_h = 1.0 / g.spacing(i);
    std::array<int, 3> shape{};
    for (int j = 0; j < 3; ++j) shape[j] = (j == i) ? g.cells(j) : g.nodes(j);
    std::size_t e = 0;
    for (int a = 0; a < shape[0]; ++a) {
      for (int b = 0; b < shape[1]; ++b) {
        for (int c = 0; c < shape[2]; ++c, ++e) {
          const std::array<int, 3> idx{a, b, c};
          const int k = idx[i];
          const std::size_t base = a * ns[0] + b * ns[1] + c * ns[2];
          const double next = (k < g.nodes(i)) ? vals[base] : 0.0;
          const double prev = (k > 0) ? vals[base - ns[i]] : 0.0;
          out[e] = (next - prev) * inv_h;
        }
      }
    }
  }
  return grad;
}

/// |grad u|^2 per cell: for each axis, the mean of the squared differences
/// over the cell's 2^(d-1) parallel edges.
inline std::vector<double> cell_gradient_squared(const GradientField& grad) {
  const Grid& g = grad.grid;
  std::vector<double> sq(g.cell_count(), 0.0);
  const double w = detail::transverse_weight(g);
  detail::for_each_cell_edge(g, [&](std::size_t cell, int axis, std::size_t edge) {
    const double d = grad.axis[axis][edge];
    sq[cell] += w * d * d;
  });
  return sq;
}

/// grad u . grad v per cell, with the same edge averaging as above.
inline std::vector<double> cell_gradient_dot(const GradientField& gu, const GradientField& gv) {
  if (!(gu.grid == gv.grid)) throw ContractError("gradients live on different grids");
  const Grid& g = gu.grid;
  std::vector<double> dot(g.cell_count(), 0.0);
  const double w = detail::transverse_weight(g);
  detail::for_each_cell_edge(g, [&](std::size_t cell, int axis, std::size_t edge) {
    dot[cell] += w * gu.axis[axis][edge] * gv.axis[axis][edge];
  });
  return dot;
}

/// Adjoint of the edge-to-cell averaging: flux_e = D_e * 2^(1-d) * sum of
/// cell_weight over the cells containing edge e.
inline std::array<std::vector<double>, 3> edge_flux(const GradientField& grad,
                                                    std::span<const double> cell_weight) {
  const Grid& g = grad.grid;
  if (cell_weight.size() != g.cell_count()) throw ContractError("cell weight size mismatch");
  std::array<std::vector<double>, 3> flux;
  for (int i = 0; i < g.dim(); ++i) flux[i].assign(g.edge_count(i), 0.0);
  const double w = detail::transverse_weight(g);
  detail::for_each_cell_edge(g, [&](std::size_t cell, int axis, std::size_t edge) {
    flux[axis][edge] += w * cell_weight[cell];
  });
  for (int i = 0; i < g.dim(); ++i) {
    for (std::size_t e = 0; e < flux[i].size(); ++e) flux[i][e] *= grad.axis[i][e];
  }
  return flux;
}

/// Nodal negative divergence of an edge flux: r_n = sum_i (phi_{n} - phi_{n+1}) / h_i,
/// so that sum_n r_n v_n = sum_i sum_e phi_e D_e(v).
inline Field flux_divergence(const Grid& g, const std::array<std::vector<double>, 3>& flux) {
  Field r(g);
  auto rv = r.values();
  for (int i = 0; i < g.dim(); ++i) {
    if (flux[i].size() != g.edge_count(i)) throw ContractError("flux size mismatch");
    const auto es = detail::edge_strides(g, i);
    const double inv_h = 1.0 / g.spacing(i);
    std::size_t n = 0;
    for (int a = 0; a < g.nodes(0); ++a) {
      for (int b = 0; b < g.nodes(1); ++b) {
        for (int c = 0; c < g.nodes(2); ++c, ++n) {
          const std::size_t e = a * es[0] + b * es[1] + c * es[2];
          rv[n] += (flux[i][e] - flux[i][e + es[i]]) * inv_h;
        }
      }
    }
  }
  return r;
}

/// Midpoint rule over the cell lattice.
inline double integrate(const Grid& grid, std::span<const double> cell_values) {
  if (cell_values.size() != grid.cell_count()) {
    throw ContractError("integrate expects " + std::to_string(grid.cell_count()) + " cell values, got " +
                        std::to_string(cell_values.size()));
  }
  return std::accumulate(cell_values.begin(), cell_values.end(), 0.0) * grid.cell_volume();
}

/// Midpoint rule over the edge lattice of one axis.
inline double integrate_edges(const Grid& grid, int axis, std::span<const double> edge_values) {
  if (axis < 0 || axis >= grid.dim() || edge_values.size() != grid.edge_count(axis)) {
    throw ContractError("edge values do not match the lattice of axis " + std::to_string(axis));
  }
  return std::accumulate(edge_values.begin(), edge_values.end(), 0.0) * grid.cell_volume();
}

/// Cell averages of the 2^d corner values (boundary corners read 0).
inline std::vector<double> cell_average(const Field& u) {
  const Grid& g = u.grid();
  const int d = g.dim();
  std::vector<double> avg(g.cell_count(), 0.0);
  const double w = 1.0 / static_cast<double>(1 << d);
  const auto vals = u.values();
  std::size_t cell = 0;
  for (int a = 0; a < g.cells(0); ++a) {
    for (int b = 0; b < g.cells(1); ++b) {
      for (int c = 0; c < g.cells(2); ++c, ++cell) {
        const std::array<int, 3> ci{a, b, c};
        double s = 0.0;
        for (int m = 0; m < (1 << d); ++m) {
          std::array<int, 3> n{0, 0, 0};
          bool inside = true;
          for (int j = 0; j < d; ++j) {
            n[j] = ci[j] - 1 + ((m >> j) & 1);
            if (n[j] < 0 || n[j] >= g.nodes(j)) inside = false;
          }
          if (inside) s += vals[g.node_index(n[0], n[1], n[2])];
        }
        avg[cell] = w * s;
      }
    }
  }
  return avg;
}

/// Integral of nodal data through cell averaging; equals prod(h) * sum of nodes.
inline double integrate_nodal(const Grid& grid, std::span<const double> nodal) {
  if (nodal.size() != grid.node_count()) throw ContractError("nodal values size mismatch");
  return std::accumulate(nodal.begin(), nodal.end(), 0.0) * grid.cell_volume();
}

inline double seminorm(const Field& u, double p) {
  if (!(p > 1.0)) throw ParameterError("seminorm exponent must exceed 1");
  auto sq = cell_gradient_squared(gradient(u));
  for (double& v : sq) v = std::pow(v, 0.5 * p);
  return std::pow(integrate(u.grid(), sq), 1.0 / p);
}

inline double axis_norm(const Field& u, int axis, double p) {
  if (axis < 0 || axis >= u.grid().dim()) {
    throw ParameterError("axis " + std::to_string(axis) + " is not valid for a " +
                         std::to_string(u.grid().dim()) + "D grid");
  }
  if (!(p > 1.0)) throw ParameterError("axis norm exponent must exceed 1");
  const auto grad = gradient(u);
  std::vector<double> vals(grad.axis[axis].size());
  for (std::size_t e = 0; e < vals.size(); ++e) vals[e] = std::pow(std::abs(grad.axis[axis][e]), p);
  return std::pow(integrate_edges(u.grid(), axis, vals), 1.0 / p);
}

/// 1 on interior nodes strictly inside the ball, 0 elsewhere.
inline std::vector<std::uint8_t> ball_mask(const Grid& grid, std::array<double, 3> center, double radius) {
  std::vector<std::uint8_t> mask(grid.node_count(), 0);
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const auto x = grid.position(k);
    double r2 = 0.0;
    for (int i = 0; i < grid.dim(); ++i) r2 += (x[i] - center[i]) * (x[i] - center[i]);
    mask[k] = r2 < radius * radius ? 1 : 0;
  }
  return mask;
}

}  // namespace nehari
