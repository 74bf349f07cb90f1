#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qconn/fields.hpp"
#include "qconn/group.hpp"
#include "qconn/lattice.hpp"
#include "qconn/parallel.hpp"

namespace qconn {

/// A classical connection: per-site d-tuple of algebra elements, evaluated
/// linearly against tangent vectors (units 1/length).
class ClassicalConnection {
 public:
  ClassicalConnection(LatticeShape shape, int group_dim)
      : shape_(shape),
        group_dim_(group_dim),
        comps_(static_cast<std::size_t>(shape.site_count()) * 3,
               MatrixXcd::Zero(group_dim, group_dim)) {}

  static ClassicalConnection zero(const LatticeManifold& man, const GroupSpec& spec) {
    return ClassicalConnection(man.shape(), spec.dim);
  }

  /// Bandlimited random connection: one algebra field per axis.
  static ClassicalConnection random(const LatticeManifold& man, const GroupSpec& spec,
                                    std::uint64_t seed, int bandlimit,
                                    double amplitude = 1.0) {
    ClassicalConnection a(man.shape(), spec.dim);
    for (int j = 0; j < man.dim(); ++j) {
      auto field = random_algebra_field(man, spec, seed + 0x51ed2701ull * (j + 1),
                                        bandlimit, amplitude);
      for (int s = 0; s < man.site_count(); ++s) a.component(s, j) = field[s];
    }
    return a;
  }

  /// Constant connection along one axis.
  static ClassicalConnection constant(const LatticeManifold& man, const GroupSpec& spec,
                                      int axis, const MatrixXcd& value) {
    ClassicalConnection a(man.shape(), spec.dim);
    for (int s = 0; s < man.site_count(); ++s) a.component(s, axis) = value;
    return a;
  }

  const LatticeShape& shape() const { return shape_; }
  int group_dim() const { return group_dim_; }

  MatrixXcd& component(int site, int axis) { return comps_[site * 3ull + axis]; }
  const MatrixXcd& component(int site, int axis) const { return comps_[site * 3ull + axis]; }

  /// A0(x, V) = sum_j V_j * component_j(x); exactly linear in V.
  MatrixXcd evaluate(int site, const Vector3d& v) const {
    MatrixXcd out = MatrixXcd::Zero(group_dim_, group_dim_);
    for (int j = 0; j < shape_.dim; ++j)
      if (v(j) != 0.0) out += v(j) * component(site, j);
    return out;
  }

  /// A0 at an off-site point by multilinear interpolation of the components,
  /// contracted against v. pos is in coordinate units and may wrap.
  MatrixXcd evaluate_interpolated(const LatticeManifold& man, const Vector3d& pos,
                                  const Vector3d& v) const {
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int j = 0; j < shape_.dim; ++j) {
      double t = pos(j) / man.spacing(j);
      double fl = std::floor(t);
      base[j] = static_cast<int>(fl);
      frac[j] = t - fl;
    }
    MatrixXcd out = MatrixXcd::Zero(group_dim_, group_dim_);
    int corners = 1 << shape_.dim;
    for (int c = 0; c < corners; ++c) {
      double weight = 1.0;
      std::array<int, 3> a = base;
      for (int j = 0; j < shape_.dim; ++j) {
        if (c & (1 << j)) {
          a[j] += 1;
          weight *= frac[j];
        } else {
          weight *= 1.0 - frac[j];
        }
      }
      if (weight == 0.0) continue;
      int s = man.site_index(a);
      for (int j = 0; j < shape_.dim; ++j)
        if (v(j) != 0.0) out += (weight * v(j)) * component(s, j);
    }
    return out;
  }

  ClassicalConnection& operator+=(const ClassicalConnection& other) {
    require_same_shape(shape_, other.shape_, "connection sum");
    if (group_dim_ != other.group_dim_)
      throw std::invalid_argument("connection sum: group dimension mismatch");
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += other.comps_[i];
    return *this;
  }

  ClassicalConnection negated() const {
    ClassicalConnection out = *this;
    for (auto& m : out.comps_) m = -m;
    return out;
  }

 private:
  LatticeShape shape_;
  int group_dim_;
  std::vector<MatrixXcd> comps_;
};

/// Holonomy along the minimal flat geodesic from x to y: the ordered product
/// exp(dt A0(xi_m, V)) ... exp(dt A0(xi_1, V)) over m midpoint samples, the
/// factor nearest x rightmost ("acts first"). Midpoint sampling makes
/// transport(x,y) * transport(y,x) = I up to roundoff away from the
/// half-period tie.
inline GroupElement parallel_transport(const LatticeManifold& man,
                                       const ClassicalConnection& a0, int x, int y,
                                       int steps) {
  require_same_shape(man.shape(), a0.shape(), "parallel_transport");
  if (steps < 1) throw std::invalid_argument("parallel_transport: steps must be >= 1");
  Vector3d disp = man.minimal_displacement(x, y);
  double len = disp.norm();
  int n = a0.group_dim();
  if (len == 0.0) return GroupElement::identity(n);
  Vector3d dir = disp / len;
  double dt = len / steps;
  Vector3d pos_x = man.position(x);
  MatrixXcd t = MatrixXcd::Identity(n, n);
  for (int k = 1; k <= steps; ++k) {
    Vector3d xi = pos_x + ((k - 0.5) * dt) * disp / len;
    MatrixXcd a = a0.evaluate_interpolated(man, xi, dir);
    t = exp_alg(AlgebraElement{dt * a}).m * t;
  }
  if (unitarity_defect(t) > kReprojectTol) t = project_unitary(t).m;
  return {t};
}

/// Holonomy kernel: one group element per ordered site pair, built by
/// parallel transport; the diagonal is exactly the identity. hbar tags which
/// slice of the q-connection family the kernel represents.
class QConnectionKernel {
 public:
  QConnectionKernel(LatticeShape shape, int group_dim, double hbar, int steps)
      : shape_(shape),
        group_dim_(group_dim),
        hbar_(hbar),
        steps_(steps),
        table_(static_cast<std::size_t>(shape.site_count()) * shape.site_count(),
               MatrixXcd::Identity(group_dim, group_dim)) {}

  const LatticeShape& shape() const { return shape_; }
  int group_dim() const { return group_dim_; }
  double hbar() const { return hbar_; }
  int steps() const { return steps_; }

  MatrixXcd& entry(int x, int y) {
    return table_[static_cast<std::size_t>(x) * shape_.site_count() + y];
  }
  const MatrixXcd& entry(int x, int y) const {
    return table_[static_cast<std::size_t>(x) * shape_.site_count() + y];
  }

  std::vector<MatrixXcd>& table() { return table_; }
  const std::vector<MatrixXcd>& table() const { return table_; }

 private:
  LatticeShape shape_;
  int group_dim_;
  double hbar_;
  int steps_;
  std::vector<MatrixXcd> table_;
};

inline QConnectionKernel build_kernel(const LatticeManifold& man,
                                      const ClassicalConnection& a0, double hbar,
                                      int steps) {
  require_same_shape(man.shape(), a0.shape(), "build_kernel");
  if (!(hbar > 0.0 && hbar <= 1.0))
    throw std::invalid_argument("build_kernel: hbar must lie in (0, 1]");
  if (steps < 1) throw std::invalid_argument("build_kernel: steps must be >= 1");
  int sites = man.site_count();
  QConnectionKernel k(man.shape(), a0.group_dim(), hbar, steps);
  parallel_for(static_cast<std::size_t>(sites) * sites, [&](std::size_t idx) {
    int x = static_cast<int>(idx / sites);
    int y = static_cast<int>(idx % sites);
    if (x == y) return;  // diagonal stays exactly I
    k.entry(x, y) = parallel_transport(man, a0, x, y, steps).m;
  });
  return k;
}

/// Per-site, per-axis gluing residuals || log(K(x, x + hbar e_j)) / hbar -
/// A0(x, e_j) ||_F, with max/mean summaries. The step hbar e_j must land on a
/// site.
struct RecoveryReport {
  double max_error = 0.0;
  double mean_error = 0.0;
  std::vector<double> errors;  // site * 3 + axis, only axes < dim populated
};

inline RecoveryReport recover_classical(const LatticeManifold& man,
                                        const QConnectionKernel& k,
                                        const ClassicalConnection& a0_reference) {
  require_same_shape(man.shape(), k.shape(), "recover_classical");
  require_same_shape(man.shape(), a0_reference.shape(), "recover_classical");
  double hbar = k.hbar();
  std::array<int, 3> step{0, 0, 0};
  for (int j = 0; j < man.dim(); ++j) {
    double s = hbar * man.shape().n[j] / man.shape().length[j];
    step[j] = static_cast<int>(std::lround(s));
    if (std::abs(s - step[j]) > 1e-9 || step[j] < 1)
      throw std::invalid_argument("recover_classical: hbar e_j must land on a site");
    if (2 * step[j] > man.shape().n[j])
      throw std::invalid_argument("recover_classical: hbar must be <= L_j / 2");
  }
  RecoveryReport report;
  report.errors.assign(static_cast<std::size_t>(man.site_count()) * 3, 0.0);
  double sum = 0.0;
  int count = 0;
  for (int s = 0; s < man.site_count(); ++s) {
    for (int j = 0; j < man.dim(); ++j) {
      auto target = man.site_coords(s);
      target[j] += step[j];
      int t = man.site_index(target);
      MatrixXcd logk = log_group(GroupElement{k.entry(s, t)}).m;
      double err = (logk / hbar - a0_reference.component(s, j)).norm();
      report.errors[s * 3ull + j] = err;
      report.max_error = std::max(report.max_error, err);
      sum += err;
      ++count;
    }
  }
  report.mean_error = count > 0 ? sum / count : 0.0;
  return report;
}

/// Entrywise group product of two kernels at the same hbar; the pointwise
/// group structure the q-connection space inherits.
inline QConnectionKernel pointwise_product(const QConnectionKernel& a,
                                           const QConnectionKernel& b) {
  require_same_shape(a.shape(), b.shape(), "pointwise_product");
  if (a.group_dim() != b.group_dim())
    throw std::invalid_argument("pointwise_product: group dimension mismatch");
  if (a.hbar() != b.hbar())
    throw std::invalid_argument("pointwise_product: hbar mismatch");
  QConnectionKernel out(a.shape(), a.group_dim(), a.hbar(), std::max(a.steps(), b.steps()));
  for (std::size_t i = 0; i < out.table().size(); ++i)
    out.table()[i] = a.table()[i] * b.table()[i];
  return out;
}

/// Componentwise sum: the pointwise additive group of classical connections.
inline ClassicalConnection pointwise_product(const ClassicalConnection& a,
                                             const ClassicalConnection& b) {
  ClassicalConnection out = a;
  out += b;
  return out;
}

}  // namespace qconn
