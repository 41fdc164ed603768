#pragma once

// Piecewise-linear paths on the uniform grid of [0, 1].
//
// A GridPath with mesh m stores m+1 vertex values and interpolates linearly
// between them.  Both the rescaled-walk paths and the Brownian grid paths
// live in this type, so path functionals only ever see one representation.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rwre {

class GridPath {
 public:
  explicit GridPath(std::vector<double> vertices)
      : verts_(std::move(vertices)) {
    if (verts_.size() < 2) {
      throw std::invalid_argument(
          "GridPath needs at least 2 vertices (mesh >= 1)");
    }
  }

  std::size_t mesh() const { return verts_.size() - 1; }
  std::span<const double> vertices() const { return verts_; }
  double front() const { return verts_.front(); }
  double back() const { return verts_.back(); }

  // Value at time t in [0, 1].  Evaluation at a grid point returns the
  // stored vertex exactly: the index u = t*m is snapped to the nearest
  // integer when within a few ulps, so t = k/m round-trips even when the
  // product rounds to just below k.
  double eval(double t) const {
    if (t <= 0.0) return verts_.front();
    if (t >= 1.0) return verts_.back();
    const std::size_t m = mesh();
    double u = t * static_cast<double>(m);
    const double nearest = std::round(u);
    if (std::abs(u - nearest) <= 8.0 * std::abs(u) * 0x1.0p-52) u = nearest;
    double ip;
    const double frac = std::modf(u, &ip);
    const std::size_t k = static_cast<std::size_t>(ip);
    if (k >= m) return verts_.back();
    return verts_[k] + frac * (verts_[k + 1] - verts_[k]);
  }

  // Sup norm of the path.  For piecewise-linear interpolation the extrema
  // sit at vertices, so the scan is exact.
  double sup_norm() const {
    double s = 0.0;
    for (double v : verts_) s = std::max(s, std::abs(v));
    return s;
  }

  double max_vertex() const {
    double s = verts_.front();
    for (double v : verts_) s = std::max(s, v);
    return s;
  }

 private:
  std::vector<double> verts_;
};

}  // namespace rwre
