#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qconn/fields.hpp"
#include "qconn/group.hpp"
#include "qconn/lattice.hpp"
#include "qconn/operators.hpp"
#include "qconn/parallel.hpp"

namespace qconn {

/// Per-site oriented frame e(x) with e e^T = q; columns are the frame
/// vectors. Padded to 3 x 3 with identity on unused axes.
struct Tetrad {
  LatticeShape shape;
  std::vector<Matrix3d> e;

  static Tetrad identity(const LatticeShape& shape) {
    return {shape, std::vector<Matrix3d>(shape.site_count(), Matrix3d::Identity())};
  }

  static Tetrad constant(const LatticeShape& shape, const Matrix3d& frame) {
    return {shape, std::vector<Matrix3d>(shape.site_count(), frame)};
  }

  bool is_constant(double tol = 1e-12) const {
    for (const auto& m : e)
      if ((m - e.front()).cwiseAbs().maxCoeff() > tol) return false;
    return true;
  }
};

/// Site-wise Cholesky factor of the metric (lower triangular, positive
/// diagonal), hence det e > 0 automatically.
inline Tetrad tetrad_from_metric(const LatticeManifold& man) {
  Tetrad t{man.shape(), {}};
  t.e.reserve(man.site_count());
  for (int s = 0; s < man.site_count(); ++s) {
    Eigen::LLT<Matrix3d> llt(man.metric(s));
    if (llt.info() != Eigen::Success)
      throw std::domain_error("tetrad_from_metric: metric not positive-definite at site " +
                              std::to_string(s));
    t.e.push_back(llt.matrixL());
  }
  return t;
}

inline bool is_rotation(const Matrix3d& r, double tol = 1e-12) {
  if ((r * r.transpose() - Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return r.determinant() > 0.0;
}

/// Frame rotation e' = e T with T(x) in SO(d); preserves e e^T and the
/// orientation.
inline Tetrad rotate_tetrad(const Tetrad& e, const std::vector<Matrix3d>& rotations) {
  if (rotations.size() != e.e.size())
    throw std::invalid_argument("rotate_tetrad: rotation field size mismatch");
  Tetrad out = e;
  for (std::size_t s = 0; s < e.e.size(); ++s) {
    if (!is_rotation(rotations[s]))
      throw std::domain_error("rotate_tetrad: field is not a rotation at site " +
                              std::to_string(s));
    out.e[s] = e.e[s] * rotations[s];
  }
  return out;
}

/// Seeded bandlimited SO(3) field via the exponential of an axis-angle
/// field. Padded axes stay fixed for dim < 3.
inline std::vector<Matrix3d> random_rotation_field(const LatticeManifold& man,
                                                   std::uint64_t seed, int bandlimit,
                                                   double amplitude = 1.0) {
  std::array<FourierScalar, 3> omega = {
      FourierScalar::random(seed + 11, man.dim(), bandlimit, amplitude),
      FourierScalar::random(seed + 23, man.dim(), bandlimit, amplitude),
      FourierScalar::random(seed + 37, man.dim(), bandlimit, amplitude)};
  for (auto& f : omega) f.require_resolved(man.shape());
  std::vector<Matrix3d> out(man.site_count(), Matrix3d::Identity());
  for (int s = 0; s < man.site_count(); ++s) {
    Vector3d w(omega[0].value(man, s), omega[1].value(man, s), omega[2].value(man, s));
    double angle = w.norm();
    if (angle > 0.0) out[s] = Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
  }
  return out;
}

inline void require_dirac_domain(const LatticeManifold& man, int n, const char* who) {
  if (man.dim() != 3) throw std::invalid_argument(std::string(who) + ": requires d = 3");
  if (n != 2) throw std::invalid_argument(std::string(who) + ": requires N = 2");
}

/// The Dirac-type operator D = sum_i u_i <e_i, d>, central differences, u_i
/// multiplying the C^2 value after the derivative.
inline StateVector apply_dirac(const LatticeManifold& man, const Tetrad& e,
                               const StateVector& phi) {
  require_dirac_domain(man, phi.n, "apply_dirac");
  require_same_shape(man.shape(), e.shape, "apply_dirac");
  require_same_shape(man.shape(), phi.shape, "apply_dirac");
  auto u = su2_generators();
  StateVector out = StateVector::zero(man.shape(), 2);
  for (int s = 0; s < man.site_count(); ++s) {
    std::array<Eigen::Vector2cd, 3> diff;
    for (int j = 0; j < 3; ++j)
      diff[j] = (phi.at(man.neighbor(s, j, +1)) - phi.at(man.neighbor(s, j, -1))) /
                (2.0 * man.spacing(j));
    Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector2cd along = Eigen::Vector2cd::Zero();
      for (int j = 0; j < 3; ++j) along += e.e[s](j, i) * diff[j];
      acc += u[i].m * along;
    }
    out.at(s) = acc;
  }
  return out;
}

/// Dense matrix of apply_dirac in the site basis (no volume weights; it is a
/// stencil, not an integral kernel). Guarded like as_matrix.
inline MatrixXcd dirac_matrix(const LatticeManifold& man, const Tetrad& e) {
  require_dirac_domain(man, 2, "dirac_matrix");
  require_same_shape(man.shape(), e.shape, "dirac_matrix");
  if (!dense_matrix_fits(man.shape(), 2))
    throw std::length_error("dirac_matrix: dense matrix exceeds the 2^26 entry guard");
  auto u = su2_generators();
  int sites = man.site_count();
  MatrixXcd m = MatrixXcd::Zero(2 * sites, 2 * sites);
  for (int s = 0; s < sites; ++s) {
    for (int j = 0; j < 3; ++j) {
      MatrixXcd coef = MatrixXcd::Zero(2, 2);
      for (int i = 0; i < 3; ++i) coef += e.e[s](j, i) * u[i].m;
      coef /= 2.0 * man.spacing(j);
      m.block(2 * s, 2 * man.neighbor(s, j, +1), 2, 2) += coef;
      m.block(2 * s, 2 * man.neighbor(s, j, -1), 2, 2) -= coef;
    }
  }
  return m;
}

/// Integral kernel of [D, K]: central differences of K in each argument,
/// u_i to the left of the output-argument derivative and to the right of the
/// input-argument derivative. With flat weights and a constant tetrad the
/// discrete summation by parts is exact, so this matches the dense operator
/// commutator to roundoff.
inline KernelOperator commutator_kernel(const LatticeManifold& man, const Tetrad& e,
                                        const KernelOperator& k) {
  require_dirac_domain(man, k.n, "commutator_kernel");
  require_same_shape(man.shape(), e.shape, "commutator_kernel");
  require_same_shape(man.shape(), k.shape, "commutator_kernel");
  auto u = su2_generators();
  int sites = man.site_count();
  KernelOperator out = KernelOperator::zero(man.shape(), 2);
  parallel_for(static_cast<std::size_t>(sites) * sites, [&](std::size_t idx) {
    int x = static_cast<int>(idx / sites);
    int y = static_cast<int>(idx % sites);
    MatrixXcd acc = MatrixXcd::Zero(2, 2);
    for (int j = 0; j < 3; ++j) {
      MatrixXcd dx = (k.entry(man.neighbor(x, j, +1), y) - k.entry(man.neighbor(x, j, -1), y)) /
                     (2.0 * man.spacing(j));
      MatrixXcd dy = (k.entry(x, man.neighbor(y, j, +1)) - k.entry(x, man.neighbor(y, j, -1))) /
                     (2.0 * man.spacing(j));
      for (int i = 0; i < 3; ++i) {
        acc += e.e[x](j, i) * (u[i].m * dx);
        acc += e.e[y](j, i) * (dy * u[i].m);
      }
    }
    out.entry(x, y) = acc;
  });
  return out;
}

}  // namespace qconn
