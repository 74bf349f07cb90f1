#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qconn/fields.hpp"
#include "qconn/lattice.hpp"
#include "qconn/parallel.hpp"
#include "qconn/qconnection.hpp"

namespace qconn {

using Eigen::VectorXcd;

/// Square-integrable C^N-valued lattice function; the inner product carries
/// the metric volume weights.
struct StateVector {
  LatticeShape shape;
  int n = 2;
  VectorXcd data;

  static StateVector zero(const LatticeShape& shape, int n) {
    return {shape, n, VectorXcd::Zero(static_cast<Eigen::Index>(shape.site_count()) * n)};
  }

  static StateVector random(const LatticeShape& shape, int n, std::uint64_t seed) {
    StateVector out = zero(shape, n);
    SeededNormals rng(seed);
    for (Eigen::Index i = 0; i < out.data.size(); ++i)
      out.data(i) = cplx(rng.normal(), rng.normal());
    return out;
  }

  Eigen::VectorBlock<VectorXcd> at(int site) { return data.segment(site * n, n); }
  Eigen::VectorBlock<const VectorXcd> at(int site) const { return data.segment(site * n, n); }
};

inline cplx inner_product(const LatticeManifold& man, const StateVector& a,
                          const StateVector& b) {
  require_same_shape(man.shape(), a.shape, "inner_product");
  require_same_shape(man.shape(), b.shape, "inner_product");
  if (a.n != b.n) throw std::invalid_argument("inner_product: component count mismatch");
  cplx acc = 0.0;
  for (int s = 0; s < man.site_count(); ++s)
    acc += man.volume_weight(s) * a.at(s).dot(b.at(s));
  return acc;
}

inline double state_norm(const LatticeManifold& man, const StateVector& a) {
  return std::sqrt(std::max(0.0, inner_product(man, a, a).real()));
}

/// Matrix-valued integral kernel acting on states by convolution. Entries
/// need not be unitary. The first argument is the output point and the second
/// the integration point, so the kernel product below is exactly operator
/// composition.
struct KernelOperator {
  LatticeShape shape;
  int n = 2;
  std::vector<MatrixXcd> table;

  static KernelOperator zero(const LatticeShape& shape, int n) {
    return {shape, n,
            std::vector<MatrixXcd>(
                static_cast<std::size_t>(shape.site_count()) * shape.site_count(),
                MatrixXcd::Zero(n, n))};
  }

  /// Unit of the convolution algebra: the discrete delta 1/weight(x) on the
  /// diagonal.
  static KernelOperator delta(const LatticeManifold& man, int n) {
    KernelOperator out = zero(man.shape(), n);
    for (int s = 0; s < man.site_count(); ++s)
      out.entry(s, s) = MatrixXcd::Identity(n, n) / man.volume_weight(s);
    return out;
  }

  static KernelOperator constant(const LatticeShape& shape, const MatrixXcd& value) {
    KernelOperator out;
    out.shape = shape;
    out.n = static_cast<int>(value.rows());
    out.table.assign(static_cast<std::size_t>(shape.site_count()) * shape.site_count(), value);
    return out;
  }

  /// Smooth seeded kernel: a short sum of separable bandlimited terms
  /// f_t(x) g_t(y) M_t, so the kernel is bandlimited in each argument and
  /// refining the lattice samples the same function.
  static KernelOperator random_smooth(const LatticeManifold& man, int n, std::uint64_t seed,
                                      int bandlimit, int rank = 6, double amplitude = 1.0) {
    KernelOperator out = zero(man.shape(), n);
    int sites = man.site_count();
    SeededNormals rng(seed);
    for (int t = 0; t < rank; ++t) {
      FourierScalar f = FourierScalar::random(seed * 0x9e3779b9ull + 2 * t + 1, man.dim(),
                                              bandlimit, amplitude);
      FourierScalar g = FourierScalar::random(seed * 0x9e3779b9ull + 2 * t + 2, man.dim(),
                                              bandlimit, amplitude);
      f.require_resolved(man.shape());
      MatrixXcd m(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = cplx(rng.normal(), rng.normal());
      std::vector<double> fv(sites), gv(sites);
      for (int s = 0; s < sites; ++s) {
        fv[s] = f.value(man, s);
        gv[s] = g.value(man, s);
      }
      for (int x = 0; x < sites; ++x)
        for (int y = 0; y < sites; ++y) out.entry(x, y) += (fv[x] * gv[y]) * m;
    }
    return out;
  }

  /// A holonomy kernel viewed as a convolution operator.
  static KernelOperator from_kernel(const QConnectionKernel& k) {
    return {k.shape(), k.group_dim(), k.table()};
  }

  MatrixXcd& entry(int x, int y) {
    return table[static_cast<std::size_t>(x) * shape.site_count() + y];
  }
  const MatrixXcd& entry(int x, int y) const {
    return table[static_cast<std::size_t>(x) * shape.site_count() + y];
  }
};

inline void require_compatible(const LatticeManifold& man, const KernelOperator& k,
                               const char* who) {
  require_same_shape(man.shape(), k.shape, who);
}

/// (K * phi)(x) = sum_y weight(y) K(x, y) phi(y).
inline StateVector convolve_state(const LatticeManifold& man, const KernelOperator& k,
                                  const StateVector& phi) {
  require_compatible(man, k, "convolve_state");
  require_same_shape(man.shape(), phi.shape, "convolve_state");
  if (k.n != phi.n) throw std::invalid_argument("convolve_state: dimension mismatch");
  int sites = man.site_count();
  StateVector out = StateVector::zero(man.shape(), k.n);
  parallel_for(sites, [&](std::size_t x) {
    VectorXcd acc = VectorXcd::Zero(k.n);
    for (int y = 0; y < sites; ++y)
      acc.noalias() += man.volume_weight(y) * (k.entry(static_cast<int>(x), y) * phi.at(y));
    out.at(static_cast<int>(x)) = acc;
  });
  return out;
}

/// (K * K')(x, z) = sum_y weight(y) K(x, y) K'(y, z); composition of the
/// convolution actions, K' acting first.
inline KernelOperator convolve_kernels(const LatticeManifold& man, const KernelOperator& a,
                                       const KernelOperator& b) {
  require_compatible(man, a, "convolve_kernels");
  require_compatible(man, b, "convolve_kernels");
  if (a.n != b.n) throw std::invalid_argument("convolve_kernels: dimension mismatch");
  int sites = man.site_count();
  KernelOperator out = KernelOperator::zero(man.shape(), a.n);
  parallel_for(static_cast<std::size_t>(sites) * sites, [&](std::size_t idx) {
    int x = static_cast<int>(idx / sites);
    int z = static_cast<int>(idx % sites);
    MatrixXcd acc = MatrixXcd::Zero(a.n, a.n);
    for (int y = 0; y < sites; ++y)
      acc.noalias() += man.volume_weight(y) * (a.entry(x, y) * b.entry(y, z));
    out.entry(x, z) = acc;
  });
  return out;
}

/// Involution: adjoint(K)(x, y) = K(y, x)^dagger, the operator adjoint in the
/// weighted inner product.
inline KernelOperator adjoint(const KernelOperator& k) {
  KernelOperator out = KernelOperator::zero(k.shape, k.n);
  int sites = k.shape.site_count();
  for (int x = 0; x < sites; ++x)
    for (int y = 0; y < sites; ++y) out.entry(x, y) = k.entry(y, x).adjoint();
  return out;
}

/// Operator trace: integral of the pointwise matrix trace along the diagonal.
inline cplx trace(const LatticeManifold& man, const KernelOperator& k) {
  require_compatible(man, k, "trace");
  cplx acc = 0.0;
  for (int s = 0; s < man.site_count(); ++s)
    acc += man.volume_weight(s) * k.entry(s, s).trace();
  return acc;
}

/// Power-iteration estimate of the L^2(weights) operator norm, via the
/// Rayleigh quotient of K^dagger K; nondecreasing in the iteration count up
/// to roundoff.
inline double operator_norm(const LatticeManifold& man, const KernelOperator& k,
                            int iterations) {
  require_compatible(man, k, "operator_norm");
  if (iterations < 1) throw std::invalid_argument("operator_norm: iterations must be >= 1");
  KernelOperator kd = adjoint(k);
  StateVector v = StateVector::random(man.shape(), k.n, 0x5eedu);
  double nv = state_norm(man, v);
  if (nv == 0.0) return 0.0;
  v.data /= nv;
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    StateVector kv = convolve_state(man, k, v);
    double kv_norm = state_norm(man, kv);
    estimate = kv_norm;
    if (kv_norm == 0.0) return 0.0;
    StateVector bv = convolve_state(man, kd, kv);
    double bn = state_norm(man, bv);
    if (bn == 0.0) return estimate;
    bv.data /= bn;
    v = bv;
  }
  return estimate;
}

inline constexpr std::size_t kDenseEntryGuard = std::size_t{1} << 26;

inline bool dense_matrix_fits(const LatticeShape& shape, int n) {
  std::size_t rows = static_cast<std::size_t>(shape.site_count()) * n;
  return rows * rows <= kDenseEntryGuard;
}

/// Dense matrix of phi -> K * phi in the site basis, volume weights included:
/// block (x, y) is K(x, y) weight(y). Guarded at 2^26 entries.
inline MatrixXcd as_matrix(const LatticeManifold& man, const KernelOperator& k) {
  require_compatible(man, k, "as_matrix");
  if (!dense_matrix_fits(k.shape, k.n))
    throw std::length_error("as_matrix: dense matrix exceeds the 2^26 entry guard");
  int sites = man.site_count();
  MatrixXcd m(static_cast<Eigen::Index>(sites) * k.n, static_cast<Eigen::Index>(sites) * k.n);
  for (int x = 0; x < sites; ++x)
    for (int y = 0; y < sites; ++y)
      m.block(x * k.n, y * k.n, k.n, k.n) = k.entry(x, y) * man.volume_weight(y);
  return m;
}

}  // namespace qconn
