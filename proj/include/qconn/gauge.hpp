#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qconn/fields.hpp"
#include "qconn/group.hpp"
#include "qconn/lattice.hpp"
#include "qconn/operators.hpp"
#include "qconn/qconnection.hpp"

namespace qconn {

/// A gauge transformation: one group element per site.
struct GaugeTransform {
  LatticeShape shape;
  int group_dim = 2;
  std::vector<MatrixXcd> g;

  static GaugeTransform identity(const LatticeShape& shape, int n) {
    return {shape, n,
            std::vector<MatrixXcd>(shape.site_count(), MatrixXcd::Identity(n, n))};
  }

  static GaugeTransform constant(const LatticeShape& shape, const GroupElement& u) {
    return {shape, u.dim(), std::vector<MatrixXcd>(shape.site_count(), u.m)};
  }

  static GaugeTransform random(const LatticeManifold& man, const GroupSpec& spec,
                               std::uint64_t seed, int bandlimit, double amplitude = 1.0) {
    SmoothField f = random_smooth_field(man, spec, seed, bandlimit, FieldKind::Gauge, amplitude);
    return {man.shape(), spec.dim, std::move(f.matrix)};
  }

  /// Pointwise product (g h)(x) = g(x) h(x).
  GaugeTransform compose(const GaugeTransform& other) const {
    require_same_shape(shape, other.shape, "gauge compose");
    GaugeTransform out = *this;
    for (std::size_t s = 0; s < g.size(); ++s) out.g[s] = g[s] * other.g[s];
    return out;
  }
};

/// Gauge action on holonomy kernels: (g.K)(x, y) = g(x) K(x, y) g(y)^{-1}.
inline QConnectionKernel gauge_q(const GaugeTransform& g, const QConnectionKernel& k) {
  require_same_shape(g.shape, k.shape(), "gauge_q");
  if (g.group_dim != k.group_dim()) throw std::invalid_argument("gauge_q: dimension mismatch");
  QConnectionKernel out = k;
  int sites = k.shape().site_count();
  for (int x = 0; x < sites; ++x)
    for (int y = 0; y < sites; ++y)
      out.entry(x, y) = g.g[x] * k.entry(x, y) * g.g[y].adjoint();
  return out;
}

/// The same sandwich on general matrix-valued kernels.
inline KernelOperator gauge_q(const GaugeTransform& g, const KernelOperator& k) {
  require_same_shape(g.shape, k.shape, "gauge_q");
  if (g.group_dim != k.n) throw std::invalid_argument("gauge_q: dimension mismatch");
  KernelOperator out = k;
  int sites = k.shape.site_count();
  for (int x = 0; x < sites; ++x)
    for (int y = 0; y < sites; ++y)
      out.entry(x, y) = g.g[x] * k.entry(x, y) * g.g[y].adjoint();
  return out;
}

/// Gauge action on classical connections:
/// component_j -> g comp_j g^{-1} + g D_j(g^{-1}), D_j the periodic central
/// difference.
inline ClassicalConnection gauge_classical(const LatticeManifold& man,
                                           const GaugeTransform& g,
                                           const ClassicalConnection& a0) {
  require_same_shape(man.shape(), g.shape, "gauge_classical");
  require_same_shape(man.shape(), a0.shape(), "gauge_classical");
  if (g.group_dim != a0.group_dim())
    throw std::invalid_argument("gauge_classical: dimension mismatch");
  ClassicalConnection out(man.shape(), a0.group_dim());
  for (int s = 0; s < man.site_count(); ++s) {
    const MatrixXcd& gx = g.g[s];
    for (int j = 0; j < man.dim(); ++j) {
      const MatrixXcd& ginv_plus = g.g[man.neighbor(s, j, +1)];
      const MatrixXcd& ginv_minus = g.g[man.neighbor(s, j, -1)];
      MatrixXcd dginv =
          (ginv_plus.adjoint() - ginv_minus.adjoint()) / (2.0 * man.spacing(j));
      out.component(s, j) = gx * a0.component(s, j) * gx.adjoint() + gx * dginv;
    }
  }
  return out;
}

/// Max over sites and axes of || log((g.K)(x, x + hbar e_j)) / hbar -
/// (g.A0)(x, e_j) ||_F; the finite-hbar probe of the gauge-action
/// compatibility between the two ends of the q-connection space.
inline double compatibility_residual(const LatticeManifold& man, const GaugeTransform& g,
                                     const ClassicalConnection& a0, double hbar, int steps) {
  QConnectionKernel k = gauge_q(g, build_kernel(man, a0, hbar, steps));
  ClassicalConnection ga = gauge_classical(man, g, a0);
  RecoveryReport report = recover_classical(man, k, ga);
  return report.max_error;
}

/// Exact lattice isometry: axis permutation, per-axis sign flips and
/// translations of the flat background torus. sigma(a)_j =
/// sign_j a_{perm[j]} + trans_j (mod n_j).
struct LatticeIsometry {
  std::array<int, 3> perm{0, 1, 2};
  std::array<int, 3> sign{1, 1, 1};
  std::array<int, 3> trans{0, 0, 0};

  static LatticeIsometry identity() { return {}; }

  static LatticeIsometry translation(const std::array<int, 3>& t) {
    LatticeIsometry s;
    s.trans = t;
    return s;
  }

  void validate(const LatticeShape& shape) const {
    std::array<bool, 3> seen{false, false, false};
    for (int j = 0; j < 3; ++j) {
      if (perm[j] < 0 || perm[j] > 2 || seen[perm[j]])
        throw std::invalid_argument("isometry: perm is not a permutation");
      seen[perm[j]] = true;
      if (sign[j] != 1 && sign[j] != -1)
        throw std::invalid_argument("isometry: signs must be +-1");
      if (j >= shape.dim && (perm[j] != j || sign[j] != 1 || trans[j] != 0))
        throw std::invalid_argument("isometry: padded axes must stay fixed");
      if (shape.n[perm[j]] != shape.n[j] || shape.length[perm[j]] != shape.length[j])
        throw std::invalid_argument("isometry: axis permutation incompatible with lattice");
    }
  }

  std::array<int, 3> apply_coords(const LatticeShape& shape, const std::array<int, 3>& a) const {
    std::array<int, 3> out{0, 0, 0};
    for (int j = 0; j < 3; ++j) {
      int v = sign[j] * a[perm[j]] + trans[j];
      int m = v % shape.n[j];
      out[j] = m < 0 ? m + shape.n[j] : m;
    }
    return out;
  }

  int apply_site(const LatticeManifold& man, int s) const {
    return man.site_index(apply_coords(man.shape(), man.site_coords(s)));
  }

  std::array<int, 3> inverse_perm() const {
    std::array<int, 3> inv{0, 0, 0};
    for (int j = 0; j < 3; ++j) inv[perm[j]] = j;
    return inv;
  }

  /// Pointwise composite x -> after(this(x)). Under the induced action,
  /// act(s.then(t), X) == act(s, act(t, X)), exactly (pure relabeling).
  LatticeIsometry then(const LatticeIsometry& after) const {
    LatticeIsometry out;
    for (int j = 0; j < 3; ++j) {
      out.perm[j] = perm[after.perm[j]];
      out.sign[j] = after.sign[j] * sign[after.perm[j]];
      out.trans[j] = after.sign[j] * trans[after.perm[j]] + after.trans[j];
    }
    return out;
  }
};

/// (sigma.K)(x, y) = K(sigma x, sigma y): pure relabeling of the table.
inline QConnectionKernel isometry_act(const LatticeManifold& man, const LatticeIsometry& sigma,
                                      const QConnectionKernel& k) {
  require_same_shape(man.shape(), k.shape(), "isometry_act");
  sigma.validate(man.shape());
  QConnectionKernel out = k;
  int sites = man.site_count();
  for (int x = 0; x < sites; ++x) {
    int sx = sigma.apply_site(man, x);
    for (int y = 0; y < sites; ++y) out.entry(x, y) = k.entry(sx, sigma.apply_site(man, y));
  }
  return out;
}

/// (sigma.A0)(x, V) = A0(sigma x, d sigma V); components pick up the
/// permutation/sign action of the differential.
inline ClassicalConnection isometry_act(const LatticeManifold& man, const LatticeIsometry& sigma,
                                        const ClassicalConnection& a0) {
  require_same_shape(man.shape(), a0.shape(), "isometry_act");
  sigma.validate(man.shape());
  ClassicalConnection out(man.shape(), a0.group_dim());
  auto inv = sigma.inverse_perm();
  for (int s = 0; s < man.site_count(); ++s) {
    int ss = sigma.apply_site(man, s);
    for (int j = 0; j < man.dim(); ++j) {
      int m = inv[j];
      out.component(s, j) = static_cast<double>(sigma.sign[m]) * a0.component(ss, m);
    }
  }
  return out;
}

inline GaugeTransform isometry_act(const LatticeManifold& man, const LatticeIsometry& sigma,
                                   const GaugeTransform& g) {
  require_same_shape(man.shape(), g.shape, "isometry_act");
  sigma.validate(man.shape());
  GaugeTransform out = g;
  for (int s = 0; s < man.site_count(); ++s) out.g[s] = g.g[sigma.apply_site(man, s)];
  return out;
}

}  // namespace qconn
