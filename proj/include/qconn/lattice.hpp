#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qconn {

using Eigen::Matrix3d;
using Eigen::Vector3d;

/// Dimensions of a flat d-torus lattice, d in {1,2,3}. Axes beyond dim are
/// padded with one site of unit length so every loop can run over three
/// axes.
struct LatticeShape {
  int dim = 3;
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> length{1.0, 1.0, 1.0};

  bool operator==(const LatticeShape&) const = default;

  int site_count() const { return n[0] * n[1] * n[2]; }
  double spacing(int axis) const { return length[axis] / n[axis]; }

  void validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("lattice: dim must be 1, 2 or 3");
    for (int j = 0; j < 3; ++j) {
      if (j < dim) {
        if (n[j] < 2) throw std::invalid_argument("lattice: need at least 2 sites per axis");
        if (!(length[j] > 0.0)) throw std::invalid_argument("lattice: side lengths must be positive");
      } else if (n[j] != 1 || length[j] != 1.0) {
        throw std::invalid_argument("lattice: padded axes must have n=1, L=1");
      }
    }
  }
};

inline void require_same_shape(const LatticeShape& a, const LatticeShape& b,
                               const char* who) {
  if (!(a == b)) throw std::invalid_argument(std::string(who) + ": lattice shape mismatch");
}

/// Tangent vector at a lattice site, components in coordinate units.
struct TangentVector {
  int site = 0;
  Vector3d components = Vector3d::Zero();
};

/// The discretized base manifold: a flat d-torus carrying a site-wise
/// symmetric positive-definite metric q(x). Geodesics are straight segments
/// of the flat background; q enters only through volume weights and tetrads.
class LatticeManifold {
 public:
  LatticeManifold(LatticeShape shape, std::vector<Matrix3d> metric)
      : shape_(shape), metric_(std::move(metric)) {
    shape_.validate();
    if (static_cast<int>(metric_.size()) != shape_.site_count())
      throw std::invalid_argument("lattice: metric field size mismatch");
    weights_.resize(metric_.size());
    double cell = 1.0;
    for (int j = 0; j < 3; ++j) cell *= shape_.spacing(j);
    for (std::size_t s = 0; s < metric_.size(); ++s) {
      const Matrix3d& q = metric_[s];
      if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::domain_error("lattice: metric not symmetric at site " + std::to_string(s));
      Eigen::LLT<Matrix3d> llt(q);
      if (llt.info() != Eigen::Success)
        throw std::domain_error("lattice: metric not positive-definite at site " + std::to_string(s));
      Matrix3d l = llt.matrixL();
      double det_sqrt = l(0, 0) * l(1, 1) * l(2, 2);
      weights_[s] = det_sqrt * cell;
    }
  }

  static LatticeManifold flat(const LatticeShape& shape) {
    return LatticeManifold(shape, std::vector<Matrix3d>(shape.site_count(), Matrix3d::Identity()));
  }

  /// Constant diagonal metric; values beyond dim are ignored.
  static LatticeManifold diagonal(const LatticeShape& shape, const Vector3d& diag) {
    Matrix3d q = Matrix3d::Identity();
    for (int j = 0; j < shape.dim; ++j) q(j, j) = diag(j);
    return LatticeManifold(shape, std::vector<Matrix3d>(shape.site_count(), q));
  }

  const LatticeShape& shape() const { return shape_; }
  int dim() const { return shape_.dim; }
  int site_count() const { return shape_.site_count(); }
  double spacing(int axis) const { return shape_.spacing(axis); }

  int wrap(int axis, int a) const {
    int m = a % shape_.n[axis];
    return m < 0 ? m + shape_.n[axis] : m;
  }

  int site_index(const std::array<int, 3>& a) const {
    return (wrap(0, a[0]) * shape_.n[1] + wrap(1, a[1])) * shape_.n[2] + wrap(2, a[2]);
  }

  std::array<int, 3> site_coords(int s) const {
    std::array<int, 3> a;
    a[2] = s % shape_.n[2];
    s /= shape_.n[2];
    a[1] = s % shape_.n[1];
    a[0] = s / shape_.n[1];
    return a;
  }

  /// Coordinates of a site on the torus, in length units.
  Vector3d position(int s) const {
    auto a = site_coords(s);
    return {a[0] * spacing(0), a[1] * spacing(1), a[2] * spacing(2)};
  }

  int neighbor(int s, int axis, int step) const {
    auto a = site_coords(s);
    a[axis] += step;
    return site_index(a);
  }

  const Matrix3d& metric(int s) const { return metric_[s]; }

  /// sqrt(det q(x)) times the cell volume; the quadrature weight of the
  /// volume form induced by q.
  double volume_weight(int s) const { return weights_[s]; }

  double total_volume() const {
    double v = 0.0;
    for (double w : weights_) v += w;
    return v;
  }

  /// Componentwise representative of y - x in (-L_j/2, L_j/2]; exact ties at
  /// the half-period resolve to +L_j/2 so kernels are single-valued in the
  /// site pair.
  Vector3d minimal_displacement(int x, int y) const {
    auto ax = site_coords(x);
    auto ay = site_coords(y);
    Vector3d d = Vector3d::Zero();
    for (int j = 0; j < shape_.dim; ++j) {
      int delta = ay[j] - ax[j];
      int nj = shape_.n[j];
      delta %= nj;
      if (delta < 0) delta += nj;
      if (2 * delta > nj) delta -= nj;
      d(j) = delta * spacing(j);
    }
    return d;
  }

 private:
  LatticeShape shape_;
  std::vector<Matrix3d> metric_;
  std::vector<double> weights_;
};

}  // namespace qconn
