#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "qconn/errors.hpp"

namespace qconn {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;

inline constexpr double kAntiHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-12;
inline constexpr double kReprojectTol = 1e-13;
inline constexpr double kBranchCutMargin = 1e-6;

enum class GroupKind { SU, U };

/// Which unitary matrix group the run works in. N = 2 (SU(2)) is the default
/// and the only case with closed-form exp/log; other N use dense
/// decompositions.
struct GroupSpec {
  GroupKind kind = GroupKind::SU;
  int dim = 2;
};

/// Element of the Lie algebra u(N)/su(N): an anti-Hermitian N x N complex
/// matrix, traceless when the group is SU(N).
struct AlgebraElement {
  MatrixXcd m;

  static AlgebraElement zero(int n) { return {MatrixXcd::Zero(n, n)}; }
  int dim() const { return static_cast<int>(m.rows()); }
};

/// Element of U(N)/SU(N): a unitary N x N complex matrix.
struct GroupElement {
  MatrixXcd m;

  static GroupElement identity(int n) { return {MatrixXcd::Identity(n, n)}; }
  int dim() const { return static_cast<int>(m.rows()); }
};

/// Max-abs entry of M + M^dagger.
inline double anti_hermiticity_defect(const MatrixXcd& m) {
  return (m + m.adjoint()).cwiseAbs().maxCoeff();
}

/// Max-abs entry of M M^dagger - I.
inline double unitarity_defect(const MatrixXcd& m) {
  MatrixXcd d = m * m.adjoint();
  d.diagonal().array() -= 1.0;
  return d.cwiseAbs().maxCoeff();
}

inline bool is_algebra_element(const MatrixXcd& m, const GroupSpec& spec,
                               double tol = kAntiHermitianTol) {
  if (m.rows() != m.cols() || m.rows() != spec.dim) return false;
  if (anti_hermiticity_defect(m) > tol) return false;
  if (spec.kind == GroupKind::SU && std::abs(m.trace()) > tol) return false;
  return true;
}

inline bool is_group_element(const MatrixXcd& m, const GroupSpec& spec,
                             double tol = kUnitaryTol) {
  if (m.rows() != m.cols() || m.rows() != spec.dim) return false;
  if (unitarity_defect(m) > tol) return false;
  if (spec.kind == GroupKind::SU && std::abs(m.determinant() - 1.0) > 100 * tol) return false;
  return true;
}

/// Nearest unitary in Frobenius norm (polar factor via SVD); idempotent on
/// unitaries. Singular input is a domain error.
inline GroupElement project_unitary(const MatrixXcd& m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument("project_unitary: matrix must be square");
  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv(0);
  if (smax <= 0.0 || sv(sv.size() - 1) < 1e-12 * smax)
    throw std::domain_error("project_unitary: matrix is singular");
  return {svd.matrixU() * svd.matrixV().adjoint()};
}

namespace detail {

inline double sinc(double t) {
  if (std::abs(t) < 1e-4) {
    double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

// theta / sin(theta), stable near zero.
inline double inv_sinc(double t) {
  if (std::abs(t) < 1e-4) {
    double t2 = t * t;
    return 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0;
  }
  return t / std::sin(t);
}

// Closed axis-angle form: A = i c0 I + Y with Y traceless anti-Hermitian,
// exp(A) = e^{i c0} (cos(theta) I + sinc(theta) Y), theta^2 = det-free norm
// of Y.
inline MatrixXcd exp_anti_hermitian_2(const MatrixXcd& a) {
  double c0 = a.trace().imag() / 2.0;
  MatrixXcd y = a;
  y(0, 0) -= cplx(0.0, c0);
  y(1, 1) -= cplx(0.0, c0);
  double c1 = 0.5 * (y(0, 1).imag() + y(1, 0).imag());
  double c2 = 0.5 * (y(0, 1).real() - y(1, 0).real());
  double c3 = y(0, 0).imag();
  double theta = std::sqrt(c1 * c1 + c2 * c2 + c3 * c3);
  MatrixXcd u = std::cos(theta) * MatrixXcd::Identity(2, 2) + sinc(theta) * y;
  return std::polar(1.0, c0) * u;
}

// Generic N: -iA is Hermitian, exponentiate its spectrum.
inline MatrixXcd exp_anti_hermitian_n(const MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(cplx(0.0, -1.0) * a);
  Eigen::VectorXcd phases(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    phases(i) = std::polar(1.0, es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Matrix exponential of an anti-Hermitian X, landing on the unitary group.
/// N = 2 uses the closed axis-angle form; other N an eigendecomposition of
/// the Hermitian -iX. Drift beyond 1e-13 triggers re-projection.
inline GroupElement exp_alg(const AlgebraElement& x) {
  const MatrixXcd& a = x.m;
  if (a.rows() != a.cols() || a.rows() < 1)
    throw std::invalid_argument("exp_alg: matrix must be square");
  if (anti_hermiticity_defect(a) > kAntiHermitianTol)
    throw std::domain_error("exp_alg: input is not anti-Hermitian");
  MatrixXcd u = (a.rows() == 2) ? detail::exp_anti_hermitian_2(a)
                                : detail::exp_anti_hermitian_n(a);
  if (unitarity_defect(u) > kReprojectTol) u = project_unitary(u).m;
  return {u};
}

/// Principal logarithm of a unitary U. For N = 2 the rotation angle
/// arccos(Re tr U' / 2) of the det-normalized part must stay below
/// pi - 1e-6; near the cut a branch_cut_error signals the caller to reduce
/// hbar. Other N take the principal log of the (normal) Schur form.
inline AlgebraElement log_group(const GroupElement& u) {
  const MatrixXcd& g = u.m;
  if (g.rows() != g.cols() || g.rows() < 1)
    throw std::invalid_argument("log_group: matrix must be square");
  if (unitarity_defect(g) > 1e-9)
    throw std::domain_error("log_group: input is not unitary");
  const double pi = std::numbers::pi;
  if (g.rows() == 2) {
    double alpha = 0.5 * std::arg(g.determinant());
    MatrixXcd v = std::polar(1.0, -alpha) * g;
    double c = std::clamp(0.5 * v.trace().real(), -1.0, 1.0);
    double theta = std::acos(c);
    if (theta > pi - kBranchCutMargin)
      throw branch_cut_error("log_group: rotation angle within 1e-6 of pi");
    MatrixXcd z = detail::inv_sinc(theta) * (v - c * MatrixXcd::Identity(2, 2));
    z(0, 0) += cplx(0.0, alpha);
    z(1, 1) += cplx(0.0, alpha);
    return {0.5 * (z - z.adjoint().eval())};
  }
  Eigen::ComplexSchur<MatrixXcd> schur(g);
  Eigen::VectorXcd logs(g.rows());
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    double phase = std::arg(schur.matrixT()(i, i));
    if (std::abs(phase) > pi - kBranchCutMargin)
      throw branch_cut_error("log_group: eigenvalue phase within 1e-6 of pi");
    logs(i) = cplx(0.0, phase);
  }
  MatrixXcd z = schur.matrixU() * logs.asDiagonal() * schur.matrixU().adjoint();
  return {0.5 * (z - z.adjoint().eval())};
}

/// The su(2) generators u1, u2, u3 = sqrt(-1/2) * (sigma_x, sigma_y, sigma_z);
/// they satisfy u_i u_j + u_j u_i = -delta_ij I.
inline std::array<AlgebraElement, 3> su2_generators() {
  const double a = 1.0 / std::sqrt(2.0);
  MatrixXcd u1(2, 2), u2(2, 2), u3(2, 2);
  u1 << cplx(0, 0), cplx(0, a), cplx(0, a), cplx(0, 0);
  u2 << cplx(0, 0), cplx(-a, 0), cplx(a, 0), cplx(0, 0);
  u3 << cplx(0, a), cplx(0, 0), cplx(0, 0), cplx(0, -a);
  return {AlgebraElement{u1}, AlgebraElement{u2}, AlgebraElement{u3}};
}

}  // namespace qconn
