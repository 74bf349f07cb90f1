#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "qconn/gauge.hpp"

using namespace qconn;

namespace {
const GroupSpec kSU2{};
}

TEST_CASE("the identity gauge leaves kernels untouched") {
  LatticeManifold man = LatticeManifold::flat({1, {12, 1, 1}, {1.0, 1.0, 1.0}});
  ClassicalConnection a0 = ClassicalConnection::random(man, kSU2, 3, 2, 1.0);
  QConnectionKernel k = build_kernel(man, a0, 0.25, 8);
  QConnectionKernel gk = gauge_q(GaugeTransform::identity(man.shape(), 2), k);
  for (std::size_t i = 0; i < k.table().size(); ++i)
    REQUIRE((gk.table()[i] - k.table()[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gauged kernels keep an identity diagonal") {
  LatticeManifold man = LatticeManifold::flat({2, {6, 6, 1}, {1.0, 1.0, 1.0}});
  ClassicalConnection a0 = ClassicalConnection::random(man, kSU2, 5, 2, 1.0);
  QConnectionKernel k = build_kernel(man, a0, 0.25, 8);
  GaugeTransform g = GaugeTransform::random(man, kSU2, 7, 2);
  QConnectionKernel gk = gauge_q(g, k);
  for (int x = 0; x < man.site_count(); ++x)
    REQUIRE((gk.entry(x, x) - MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("gauging twice equals gauging by the pointwise product") {
  LatticeManifold man = LatticeManifold::flat({1, {16, 1, 1}, {1.0, 1.0, 1.0}});
  ClassicalConnection a0 = ClassicalConnection::random(man, kSU2, 11, 2, 1.0);
  QConnectionKernel k = build_kernel(man, a0, 0.25, 8);
  GaugeTransform g = GaugeTransform::random(man, kSU2, 13, 2);
  GaugeTransform h = GaugeTransform::random(man, kSU2, 17, 2);
  QConnectionKernel two_step = gauge_q(g, gauge_q(h, k));
  QConnectionKernel one_step = gauge_q(g.compose(h), k);
  for (std::size_t i = 0; i < k.table().size(); ++i)
    REQUIRE((two_step.table()[i] - one_step.table()[i]).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gauge action preserves unitarity and the inverse property") {
  LatticeManifold man = LatticeManifold::flat({1, {10, 1, 1}, {1.0, 1.0, 1.0}});
  ClassicalConnection a0 = ClassicalConnection::random(man, kSU2, 19, 2, 1.2);
  QConnectionKernel gk = gauge_q(GaugeTransform::random(man, kSU2, 23, 2),
                                 build_kernel(man, a0, 0.25, 8));
  for (int x = 0; x < 10; ++x)
    for (int y = 0; y < 10; ++y) {
      REQUIRE(unitarity_defect(gk.entry(x, y)) <= 1e-12);
      if ((y - x + 10) % 10 == 5) continue;
      MatrixXcd prod = gk.entry(x, y) * gk.entry(y, x);
      REQUIRE((prod - MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("constant gauges act on connections by pure conjugation") {
  LatticeManifold man = LatticeManifold::flat({2, {8, 8, 1}, {1.0, 1.0, 1.0}});
  ClassicalConnection a0 = ClassicalConnection::random(man, kSU2, 29, 2, 1.0);
  GroupElement u = exp_alg(AlgebraElement{oracles::random_anti_hermitian(2, 31, 0.8)});
  GaugeTransform g = GaugeTransform::constant(man.shape(), u);
  ClassicalConnection ga = gauge_classical(man, g, a0);
  for (int s = 0; s < man.site_count(); ++s)
    for (int j = 0; j < 2; ++j) {
      MatrixXcd want = u.m * a0.component(s, j) * u.m.adjoint();
      REQUIRE((ga.component(s, j) - want).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("the identity gauge leaves connections untouched") {
  LatticeManifold man = LatticeManifold::flat({1, {12, 1, 1}, {1.0, 1.0, 1.0}});
  ClassicalConnection a0 = ClassicalConnection::random(man, kSU2, 37, 2, 1.0);
  ClassicalConnection ga = gauge_classical(man, GaugeTransform::identity(man.shape(), 2), a0);
  for (int s = 0; s < man.site_count(); ++s)
    REQUIRE((ga.component(s, 0) - a0.component(s, 0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("abelian-direction gauges reproduce the analytic derivative term") {
  // g = exp(phi(x) X) with a fixed direction X: the gauged zero connection is
  // -d_j(phi) X up to the O(h^2) central-difference error.
  auto study = [](int n) {
    LatticeManifold man = LatticeManifold::flat({1, {n, 1, 1}, {1.0, 1.0, 1.0}});
    auto u = su2_generators();
    FourierScalar phi = FourierScalar::random(41, 1, 2, 0.7);
    GaugeTransform g = GaugeTransform::identity(man.shape(), 2);
    for (int s = 0; s < n; ++s)
      g.g[s] = exp_alg(AlgebraElement{phi.value(man, s) * u[0].m}).m;
    ClassicalConnection ga =
        gauge_classical(man, g, ClassicalConnection::zero(man, GroupSpec{}));
    double err = 0.0;
    for (int s = 0; s < n; ++s) {
      MatrixXcd want = -phi.derivative(man, s, 0) * u[0].m;
      err = std::max(err, (ga.component(s, 0) - want).cwiseAbs().maxCoeff());
    }
    return err;
  };
  double e32 = study(32);
  double e64 = study(64);
  REQUIRE(e32 <= 0.3);
  REQUIRE(e64 <= e32 / 3.0);
}

TEST_CASE("gauge_classical is an affine action up to discretization error") {
  auto study = [](int n) {
    LatticeManifold man = LatticeManifold::flat({1, {n, 1, 1}, {1.0, 1.0, 1.0}});
    ClassicalConnection a0 = ClassicalConnection::random(man, kSU2, 43, 2, 1.0);
    GaugeTransform g = GaugeTransform::random(man, kSU2, 47, 2, 0.6);
    GaugeTransform h = GaugeTransform::random(man, kSU2, 53, 2, 0.6);
    ClassicalConnection two_step = gauge_classical(man, g, gauge_classical(man, h, a0));
    ClassicalConnection one_step = gauge_classical(man, g.compose(h), a0);
    double err = 0.0;
    for (int s = 0; s < n; ++s)
      err = std::max(err, (two_step.component(s, 0) - one_step.component(s, 0))
                              .cwiseAbs()
                              .maxCoeff());
    return err;
  };
  double e16 = study(16);
  double e32 = study(32);
  REQUIRE(e32 <= e16 / 2.5);
}

TEST_CASE("compatibility residual with the identity gauge equals the bare gluing residual") {
  LatticeManifold man = LatticeManifold::flat({1, {32, 1, 1}, {1.0, 1.0, 1.0}});
  ClassicalConnection a0 = ClassicalConnection::random(man, kSU2, 59, 2, 1.0);
  double with_identity =
      compatibility_residual(man, GaugeTransform::identity(man.shape(), 2), a0, 0.25, 8);
  double bare = recover_classical(man, build_kernel(man, a0, 0.25, 8), a0).max_error;
  REQUIRE(with_identity == Catch::Approx(bare).margin(1e-14));
}

TEST_CASE("constant gauges conjugate the residual without changing its size") {
  LatticeManifold man = LatticeManifold::flat({1, {32, 1, 1}, {1.0, 1.0, 1.0}});
  ClassicalConnection a0 = ClassicalConnection::random(man, kSU2, 61, 2, 1.0);
  GroupElement u = exp_alg(AlgebraElement{oracles::random_anti_hermitian(2, 67, 0.5)});
  double constant =
      compatibility_residual(man, GaugeTransform::constant(man.shape(), u), a0, 0.25, 8);
  double bare = recover_classical(man, build_kernel(man, a0, 0.25, 8), a0).max_error;
  REQUIRE(constant == Catch::Approx(bare).margin(1e-12));
}

TEST_CASE("compatibility residual drops at first order in hbar") {
  LatticeManifold man = LatticeManifold::flat({1, {64, 1, 1}, {1.0, 1.0, 1.0}});
  ClassicalConnection a0 = ClassicalConnection::random(man, kSU2, 71, 2, 1.0);
  GaugeTransform g = GaugeTransform::random(man, kSU2, 73, 2, 0.8);
  double r4 = compatibility_residual(man, g, a0, 0.25, 16);
  double r8 = compatibility_residual(man, g, a0, 0.125, 16);
  REQUIRE(r4 / r8 >= 1.5);
  REQUIRE(r4 / r8 <= 2.5);
}

TEST_CASE("identity isometry acts trivially") {
  LatticeManifold man = LatticeManifold::flat({2, {6, 6, 1}, {1.0, 1.0, 1.0}});
  ClassicalConnection a0 = ClassicalConnection::random(man, kSU2, 79, 2, 1.0);
  QConnectionKernel k = build_kernel(man, a0, 0.25, 8);
  QConnectionKernel sk = isometry_act(man, LatticeIsometry::identity(), k);
  for (std::size_t i = 0; i < k.table().size(); ++i)
    REQUIRE((sk.table()[i] - k.table()[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("translations leave the flat kernel trace invariant") {
  LatticeManifold man = LatticeManifold::flat({2, {6, 6, 1}, {1.0, 1.0, 1.0}});
  KernelOperator k = KernelOperator::random_smooth(man, 2, 83, 2);
  LatticeIsometry sigma = LatticeIsometry::translation({2, 5, 0});
  KernelOperator sk = k;
  for (int x = 0; x < man.site_count(); ++x)
    for (int y = 0; y < man.site_count(); ++y)
      sk.entry(x, y) = k.entry(sigma.apply_site(man, x), sigma.apply_site(man, y));
  REQUIRE(std::abs(trace(man, sk) - trace(man, k)) <= 1e-13 * std::abs(trace(man, k)));
}

TEST_CASE("isometries compose as exact table relabelings") {
  LatticeManifold man = LatticeManifold::flat({2, {6, 6, 1}, {1.0, 1.0, 1.0}});
  ClassicalConnection a0 = ClassicalConnection::random(man, kSU2, 89, 2, 1.0);
  QConnectionKernel k = build_kernel(man, a0, 0.25, 4);
  LatticeIsometry sigma{{1, 0, 2}, {-1, 1, 1}, {3, 1, 0}};
  LatticeIsometry tau{{0, 1, 2}, {1, -1, 1}, {0, 4, 0}};
  QConnectionKernel lhs = isometry_act(man, sigma.then(tau), k);
  QConnectionKernel rhs = isometry_act(man, sigma, isometry_act(man, tau, k));
  for (std::size_t i = 0; i < k.table().size(); ++i)
    REQUIRE((lhs.table()[i] - rhs.table()[i]).cwiseAbs().maxCoeff() == 0.0);

  ClassicalConnection la = isometry_act(man, sigma.then(tau), a0);
  ClassicalConnection ra = isometry_act(man, sigma, isometry_act(man, tau, a0));
  for (int s = 0; s < man.site_count(); ++s)
    for (int j = 0; j < 2; ++j)
      REQUIRE((la.component(s, j) - ra.component(s, j)).cwiseAbs().maxCoeff() == 0.0);

  GaugeTransform g = GaugeTransform::random(man, kSU2, 97, 2);
  GaugeTransform lg = isometry_act(man, sigma.then(tau), g);
  GaugeTransform rg = isometry_act(man, sigma, isometry_act(man, tau, g));
  for (int s = 0; s < man.site_count(); ++s)
    REQUIRE((lg.g[s] - rg.g[s]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("axis swaps on unequal lattices are rejected") {
  LatticeManifold man = LatticeManifold::flat({2, {6, 4, 1}, {1.0, 1.0, 1.0}});
  LatticeIsometry swap{{1, 0, 2}, {1, 1, 1}, {0, 0, 0}};
  ClassicalConnection a0 = ClassicalConnection::zero(man, kSU2);
  REQUIRE_THROWS_AS(isometry_act(man, swap, a0), std::invalid_argument);
}

TEST_CASE("isometries transform classical components by the differential") {
  // A pure axis swap must exchange the component fields.
  LatticeManifold man = LatticeManifold::flat({2, {6, 6, 1}, {1.0, 1.0, 1.0}});
  ClassicalConnection a0 = ClassicalConnection::random(man, kSU2, 101, 2, 1.0);
  LatticeIsometry swap{{1, 0, 2}, {1, 1, 1}, {0, 0, 0}};
  ClassicalConnection sa = isometry_act(man, swap, a0);
  for (int s = 0; s < man.site_count(); ++s) {
    int ss = swap.apply_site(man, s);
    REQUIRE((sa.component(s, 0) - a0.component(ss, 1)).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((sa.component(s, 1) - a0.component(ss, 0)).cwiseAbs().maxCoeff() == 0.0);
  }
}
