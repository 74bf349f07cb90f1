#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qconn/group.hpp"
#include "qconn/lattice.hpp"

namespace qconn {

/// Deterministic stream of normal deviates. splitmix64 + Box-Muller, so the
/// same seed yields the same field on every platform.
class SeededNormals {
 public:
  explicit SeededNormals(std::uint64_t seed) : state_(seed) {}

  double uniform() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Stream for an independent sub-purpose of the same seed.
  SeededNormals fork(std::uint64_t tag) const {
    return SeededNormals(state_ ^ (0x9e3779b97f4a7c15ull * (tag + 0x632be59bd9b4e019ull)));
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Real trig polynomial sum a_k cos(2 pi k.theta) + b_k sin(2 pi k.theta)
/// over modes |k_j| <= bandlimit. Coefficients depend only on
/// (seed, bandlimit, dim), so refining the lattice samples the same smooth
/// function; values and derivatives are evaluated analytically from the
/// modes.
class FourierScalar {
 public:
  struct Mode {
    std::array<int, 3> k{0, 0, 0};
    double a = 0.0;
    double b = 0.0;
  };

  static FourierScalar random(std::uint64_t seed, int dim, int bandlimit, double amplitude) {
    if (bandlimit < 0) throw std::invalid_argument("field: bandlimit must be >= 0");
    FourierScalar f;
    f.bandlimit_ = bandlimit;
    SeededNormals rng(seed);
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int j = 0; j < dim; ++j) {
      lo[j] = -bandlimit;
      hi[j] = bandlimit;
    }
    for (int k0 = lo[0]; k0 <= hi[0]; ++k0)
      for (int k1 = lo[1]; k1 <= hi[1]; ++k1)
        for (int k2 = lo[2]; k2 <= hi[2]; ++k2) {
          std::array<int, 3> k{k0, k1, k2};
          // One representative per conjugate pair: first nonzero positive.
          int first = 0;
          for (int j = 0; j < 3; ++j)
            if (k[j] != 0) {
              first = k[j];
              break;
            }
          if (first < 0) continue;
          double k2n = static_cast<double>(k0 * k0 + k1 * k1 + k2 * k2);
          double sigma = amplitude / (1.0 + k2n);
          Mode m;
          m.k = k;
          m.a = sigma * rng.normal();
          m.b = (first == 0) ? 0.0 : sigma * rng.normal();
          f.modes_.push_back(m);
        }
    return f;
  }

  static FourierScalar constant(double value) {
    FourierScalar f;
    f.bandlimit_ = 0;
    f.modes_.push_back(Mode{{0, 0, 0}, value, 0.0});
    return f;
  }

  int bandlimit() const { return bandlimit_; }

  /// Checks the field is resolvable: bandlimit < min_j n_j / 2.
  void require_resolved(const LatticeShape& shape) const {
    for (int j = 0; j < shape.dim; ++j)
      if (2 * bandlimit_ >= shape.n[j])
        throw std::invalid_argument("field: bandlimit must be < n_j / 2");
  }

  /// Value at a position given in coordinate units.
  double value_at(const LatticeShape& shape, const Vector3d& pos) const {
    double v = 0.0;
    for (const Mode& m : modes_) {
      double phase = 0.0;
      for (int j = 0; j < 3; ++j)
        phase += m.k[j] * pos(j) / shape.length[j];
      phase *= 2.0 * std::numbers::pi;
      v += m.a * std::cos(phase) + m.b * std::sin(phase);
    }
    return v;
  }

  double value(const LatticeManifold& man, int site) const {
    return value_at(man.shape(), man.position(site));
  }

  /// Analytic partial derivative along a coordinate axis.
  double derivative(const LatticeManifold& man, int site, int axis) const {
    Vector3d pos = man.position(site);
    double v = 0.0;
    for (const Mode& m : modes_) {
      double phase = 0.0;
      for (int j = 0; j < 3; ++j)
        phase += m.k[j] * pos(j) / man.shape().length[j];
      phase *= 2.0 * std::numbers::pi;
      double rate = 2.0 * std::numbers::pi * m.k[axis] / man.shape().length[axis];
      v += rate * (-m.a * std::sin(phase) + m.b * std::cos(phase));
    }
    return v;
  }

  std::vector<double> sample(const LatticeManifold& man) const {
    require_resolved(man.shape());
    std::vector<double> out(man.site_count());
    for (int s = 0; s < man.site_count(); ++s) out[s] = value(man, s);
    return out;
  }

  /// Lattice-independent sup bound: sum over modes of sqrt(a^2 + b^2).
  double sup_bound() const {
    double b = 0.0;
    for (const Mode& m : modes_) b += std::sqrt(m.a * m.a + m.b * m.b);
    return b;
  }

 private:
  int bandlimit_ = 0;
  std::vector<Mode> modes_;
};

/// Anti-Hermitian basis of the configured algebra: the su(2) generators for
/// SU(2), an orthogonal-style anti-Hermitian basis otherwise (plus the iI
/// direction for U(N)).
inline std::vector<MatrixXcd> algebra_basis(const GroupSpec& spec) {
  std::vector<MatrixXcd> basis;
  int n = spec.dim;
  if (spec.kind == GroupKind::SU && n == 2) {
    for (const auto& u : su2_generators()) basis.push_back(u.m);
    return basis;
  }
  const double a = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      MatrixXcd re = MatrixXcd::Zero(n, n);
      re(i, j) = cplx(a, 0);
      re(j, i) = cplx(-a, 0);
      basis.push_back(re);
      MatrixXcd im = MatrixXcd::Zero(n, n);
      im(i, j) = cplx(0, a);
      im(j, i) = cplx(0, a);
      basis.push_back(im);
    }
  for (int i = 0; i + 1 < n; ++i) {
    MatrixXcd h = MatrixXcd::Zero(n, n);
    h(i, i) = cplx(0, a);
    h(i + 1, i + 1) = cplx(0, -a);
    basis.push_back(h);
  }
  if (spec.kind == GroupKind::U) {
    MatrixXcd tr = MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) tr(i, i) = cplx(0, a);
    basis.push_back(tr);
  }
  return basis;
}

enum class FieldKind { Real, Algebra, Group, Gauge };

/// Site-sampled smooth field: scalar values for Real, matrix values
/// otherwise. Group and Gauge fields are exp_alg of a synthesized algebra
/// field.
struct SmoothField {
  FieldKind kind = FieldKind::Real;
  int bandlimit = 0;
  std::vector<double> scalar;
  std::vector<MatrixXcd> matrix;
};

/// Bandlimited algebra-valued field as per-basis-direction scalar synthesis.
inline std::vector<MatrixXcd> random_algebra_field(const LatticeManifold& man,
                                                   const GroupSpec& spec,
                                                   std::uint64_t seed, int bandlimit,
                                                   double amplitude) {
  auto basis = algebra_basis(spec);
  std::vector<FourierScalar> coeffs;
  coeffs.reserve(basis.size());
  for (std::size_t b = 0; b < basis.size(); ++b) {
    // Independent scalar stream per basis direction, still seed-determined.
    std::uint64_t sub = seed * 0x100000001b3ull + 0x9e3779b9ull * (b + 1);
    coeffs.push_back(FourierScalar::random(sub, man.dim(), bandlimit, amplitude));
    coeffs.back().require_resolved(man.shape());
  }
  std::vector<MatrixXcd> field(man.site_count(), MatrixXcd::Zero(spec.dim, spec.dim));
  for (int s = 0; s < man.site_count(); ++s)
    for (std::size_t b = 0; b < basis.size(); ++b)
      field[s] += coeffs[b].value(man, s) * basis[b];
  return field;
}

inline SmoothField random_smooth_field(const LatticeManifold& man, const GroupSpec& spec,
                                       std::uint64_t seed, int bandlimit, FieldKind kind,
                                       double amplitude = 1.0) {
  SmoothField out;
  out.kind = kind;
  out.bandlimit = bandlimit;
  if (kind == FieldKind::Real) {
    FourierScalar f = FourierScalar::random(seed, man.dim(), bandlimit, amplitude);
    f.require_resolved(man.shape());
    out.scalar = f.sample(man);
    return out;
  }
  out.matrix = random_algebra_field(man, spec, seed, bandlimit, amplitude);
  if (kind == FieldKind::Group || kind == FieldKind::Gauge) {
    for (auto& m : out.matrix) m = exp_alg(AlgebraElement{m}).m;
  }
  return out;
}

/// Bandlimited SPD metric q = I + S with a symmetric bandlimited
/// perturbation S rescaled so its spectral radius equals `amplitude` (< 1),
/// hence q is positive-definite by construction and its entries stay trig
/// polynomials.
inline LatticeManifold random_spd_manifold(const LatticeShape& shape, std::uint64_t seed,
                                           int bandlimit, double amplitude) {
  shape.validate();
  if (!(amplitude > 0.0 && amplitude < 1.0))
    throw std::invalid_argument("metric: amplitude must lie in (0, 1)");
  LatticeManifold flat = LatticeManifold::flat(shape);
  int d = shape.dim;
  std::vector<FourierScalar> entries;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      std::uint64_t sub = seed * 0x100000001b3ull + 17ull * (i * 3 + j + 1);
      entries.push_back(FourierScalar::random(sub, d, bandlimit, 1.0));
      entries.back().require_resolved(shape);
    }
  // Spectral radius bound via the Frobenius norm of entrywise sup bounds;
  // independent of the lattice so every resolution samples the same metric.
  double bound_sq = 0.0;
  {
    int idx = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        double b = entries[idx++].sup_bound();
        bound_sq += (i == j ? 1.0 : 2.0) * b * b;
      }
  }
  double bound = std::sqrt(bound_sq);
  double scale = bound > 0.0 ? amplitude / bound : 0.0;
  std::vector<Matrix3d> metric(shape.site_count(), Matrix3d::Identity());
  for (int s = 0; s < shape.site_count(); ++s) {
    Matrix3d q = Matrix3d::Identity();
    int idx = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        double v = scale * entries[idx++].value(flat, s);
        if (i == j)
          q(i, i) += v;
        else
          q(i, j) = q(j, i) = v;
      }
    metric[s] = q;
  }
  return LatticeManifold(shape, std::move(metric));
}

}  // namespace qconn
