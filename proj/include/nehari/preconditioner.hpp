#pragma once

// Exact inverse of the Dirichlet second-difference Laplacian on the interior
// nodes, diagonalized by the type-I discrete sine transform.

#include <cmath>
#include <algorithm>
#include <array>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <vector>

#include <fftw3.h>

#include "nehari/errors.hpp"
#include "nehari/grid.hpp"

namespace nehari {

namespace detail {
// FFTW's planner is not reentrant.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// z = (-Delta_h)^{-1} r with homogeneous Dirichlet data. Without a mask this
/// is one forward and one inverse sine transform. With a free-node mask the
/// clamped nodes join the Dirichlet boundary and the masked system is solved by
/// conjugate gradients preconditioned with the box inverse.
class LaplacianPreconditioner {
 public:
  explicit LaplacianPreconditioner(const Grid& grid, std::vector<std::uint8_t> free_mask = {})
      : grid_(grid), mask_(std::move(free_mask)) {
    if (!mask_.empty() && mask_.size() != grid_.node_count()) throw ContractError("preconditioner mask size mismatch");
    const std::size_t n = grid_.node_count();
    buffer_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    if (!buffer_) throw std::bad_alloc();
    int dims[3];
    fftw_r2r_kind kinds[3];
    for (int i = 0; i < grid_.dim(); ++i) {
      dims[i] = grid_.resolution(i);
      kinds[i] = FFTW_RODFT00;
    }
    {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      plan_ = fftw_plan_r2r(grid_.dim(), dims, buffer_, buffer_, kinds, FFTW_ESTIMATE);
    }
    if (!plan_) {
      fftw_free(buffer_);
      throw std::runtime_error("FFTW could not plan the sine transform");
    }
    inverse_eigenvalue_.resize(n);
    double normalization = 1.0;
    for (int i = 0; i < grid_.dim(); ++i) normalization *= 2.0 * (grid_.resolution(i) + 1);
    for (std::size_t k = 0; k < n; ++k) {
      const auto idx = grid_.node_multi_index(k);
      double lambda = 0.0;
      for (int i = 0; i < grid_.dim(); ++i) {
        const double h = grid_.spacing(i);
        const double s = std::sin(std::numbers::pi * (idx[i] + 1) / (2.0 * (grid_.resolution(i) + 1)));
        lambda += 4.0 / (h * h) * s * s;
      }
      inverse_eigenvalue_[k] = 1.0 / (lambda * normalization);
    }
  }

  LaplacianPreconditioner(const LaplacianPreconditioner&) = delete;
  LaplacianPreconditioner& operator=(const LaplacianPreconditioner&) = delete;

  ~LaplacianPreconditioner() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buffer_);
  }

  /// Not safe to call concurrently on one instance (shared work buffer).
  Field apply(const Field& r) const {
    if (!(r.grid() == grid_)) throw ContractError("preconditioner applied on a different grid");
    std::vector<double> rhs(r.values().begin(), r.values().end());
    restrict_to_free(rhs);
    if (mask_.empty()) return Field(grid_, box_inverse(rhs));
    return Field(grid_, masked_solve(rhs));
  }

  /// -Delta_h u with zero values outside the grid (and on clamped nodes when masked).
  std::vector<double> laplacian(std::vector<double> u) const {
    restrict_to_free(u);
    std::vector<double> out(u.size(), 0.0);
    const int n0 = grid_.nodes(0), n1 = grid_.nodes(1), n2 = grid_.nodes(2);
    const std::size_t s0 = static_cast<std::size_t>(n1) * n2, s1 = n2;
    double w[3] = {0.0, 0.0, 0.0};
    for (int i = 0; i < grid_.dim(); ++i) w[i] = 1.0 / (grid_.spacing(i) * grid_.spacing(i));
    std::size_t k = 0;
    for (int a = 0; a < n0; ++a) {
      for (int b = 0; b < n1; ++b) {
        for (int c = 0; c < n2; ++c, ++k) {
          const double v = u[k];
          double s = w[0] * (2.0 * v - (a > 0 ? u[k - s0] : 0.0) - (a + 1 < n0 ? u[k + s0] : 0.0));
          if (grid_.dim() > 1) s += w[1] * (2.0 * v - (b > 0 ? u[k - s1] : 0.0) - (b + 1 < n1 ? u[k + s1] : 0.0));
          if (grid_.dim() > 2) s += w[2] * (2.0 * v - (c > 0 ? u[k - 1] : 0.0) - (c + 1 < n2 ? u[k + 1] : 0.0));
          out[k] = s;
        }
      }
    }
    restrict_to_free(out);
    return out;
  }

 private:
  static constexpr double kInnerTolerance = 1e-9;
  static constexpr int kInnerIterations = 500;

  void restrict_to_free(std::vector<double>& v) const {
    if (mask_.empty()) return;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!mask_[k]) v[k] = 0.0;
    }
  }

  std::vector<double> box_inverse(const std::vector<double>& r) const {
    const std::size_t n = r.size();
    std::copy(r.begin(), r.end(), buffer_);
    fftw_execute(plan_);
    for (std::size_t k = 0; k < n; ++k) buffer_[k] *= inverse_eigenvalue_[k];
    fftw_execute(plan_);
    std::vector<double> z(buffer_, buffer_ + n);
    restrict_to_free(z);
    return z;
  }

  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
  }

  std::vector<double> masked_solve(const std::vector<double>& b) const {
    std::vector<double> x(b.size(), 0.0);
    std::vector<double> r = b;
    const double b_norm = std::sqrt(dot(b, b));
    if (b_norm == 0.0) return x;
    std::vector<double> z = box_inverse(r);
    std::vector<double> p = z;
    double rz = dot(r, z);
    for (int it = 0; it < kInnerIterations; ++it) {
      const auto Ap = laplacian(p);
      const double alpha = rz / dot(p, Ap);
      for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] += alpha * p[k];
        r[k] -= alpha * Ap[k];
      }
      if (std::sqrt(dot(r, r)) <= kInnerTolerance * b_norm) break;
      z = box_inverse(r);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t k = 0; k < p.size(); ++k) p[k] = z[k] + beta * p[k];
    }
    return x;
  }

  Grid grid_;
  std::vector<std::uint8_t> mask_;
  double* buffer_ = nullptr;
  fftw_plan plan_ = nullptr;
  std::vector<double> inverse_eigenvalue_;
};

}  // namespace nehari
