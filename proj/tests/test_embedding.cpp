#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "zollforge/embedding.hpp"
#include "zollforge/error.hpp"

using namespace zf;

namespace {

std::mt19937_64 rng(99);

SphereFunction small_psi(int L, double s) {
  SphereFunction f = oracle::random_function(L, rng, s, 0.4);
  f.coeff(0, 0) = 0.0;
  return f;
}

Vec3 fd_tangent(const std::function<Vec3(const Vec3&)>& F, const Vec3& x, const Vec3& e, double h) {
  auto g = [&](double s) { return F(oracle::geodesic(x, e, s)); };
  return (8.0 * (g(h) - g(-h)) - (g(2 * h) - g(-2 * h))) / (12.0 * h);
}

// Gaussian curvature of g_psi in the chart u -> normalize(p + u1 e1 + u2 e2), Brioschi formula
double brioschi(const SphereFunction& psi, const TangentFrame& fr, double h) {
  auto metric = [&](double u1, double u2, double& E, double& F, double& G) {
    const Vec3 w = fr.x + u1 * fr.e1 + u2 * fr.e2;
    const Vec3 x = w.normalized();
    const double r = w.norm();
    const Vec3 x1 = (fr.e1 - x * x.dot(fr.e1)) / r, x2 = (fr.e2 - x * x.dot(fr.e2)) / r;
    double v;
    Vec3 g;
    psi.jet(x, v, &g);
    const double s = std::exp(2 * v);
    E = s * (x1.dot(x1) + std::pow(g.dot(x1), 2));
    F = s * (x1.dot(x2) + g.dot(x1) * g.dot(x2));
    G = s * (x2.dot(x2) + std::pow(g.dot(x2), 2));
  };
  double E[3][3], F[3][3], G[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) metric((i - 1) * h, (j - 1) * h, E[i][j], F[i][j], G[i][j]);
  auto du = [&](double a[3][3]) { return (a[2][1] - a[0][1]) / (2 * h); };
  auto dv = [&](double a[3][3]) { return (a[1][2] - a[1][0]) / (2 * h); };
  auto duu = [&](double a[3][3]) { return (a[2][1] - 2 * a[1][1] + a[0][1]) / (h * h); };
  auto dvv = [&](double a[3][3]) { return (a[1][2] - 2 * a[1][1] + a[1][0]) / (h * h); };
  auto duv = [&](double a[3][3]) { return (a[2][2] - a[2][0] - a[0][2] + a[0][0]) / (4 * h * h); };
  const double e = E[1][1], f = F[1][1], g = G[1][1];
  Mat3 M1, M2;
  M1 << -0.5 * dvv(E) + duv(F) - 0.5 * duu(G), 0.5 * du(E), du(F) - 0.5 * dv(E), dv(F) - 0.5 * du(G), e, f,
      0.5 * dv(G), f, g;
  M2 << 0, 0.5 * dv(E), 0.5 * du(G), 0.5 * dv(E), e, f, 0.5 * du(G), f, g;
  return (M1.determinant() - M2.determinant()) / std::pow(e * g - f * f, 2);
}

}  // namespace

TEST_CASE("round and dilated spheres") {
  const Vec3 x = oracle::random_unit(rng);
  const StarShapedSurface round(SphereFunction(4));
  CHECK((round.embed(x) - x).norm() < 1e-15);
  CHECK((round.unit_normal(x) - x).norm() < 1e-15);
  CHECK((round.shape_operator(x) - Mat2::Identity()).norm() < 1e-14);
  CHECK(std::abs(round.mean_curvature(x) - 2.0) < 1e-14);

  const double c = std::log(2.0);
  const StarShapedSurface big(SphereFunction::constant(4, c));
  CHECK((big.embed(x) - 2.0 * x).norm() < 1e-14);
  CHECK((big.shape_operator(x) - 0.5 * Mat2::Identity()).norm() < 1e-14);
  CHECK(std::abs(big.mean_curvature(x) - 2.0 * std::exp(-c)) < 1e-14);
  CHECK(std::abs(big.gauss_curvature(x) - 0.25) < 1e-14);
}

TEST_CASE("grid cache") {
  const StarShapedSurface s(small_psi(6, 0.05));
  CHECK(s.cache_error() < 1e-12);
  const auto h = s.mean_curvature_on_grid();
  for (std::size_t i = 0; i < h.size(); i += 17) CHECK(std::abs(h[i] - s.mean_curvature(s.grid().nodes()[i])) < 1e-12);
}

TEST_CASE("induced metric and normal against finite differences") {
  for (int trial = 0; trial < 10; ++trial) {
    const StarShapedSurface s(small_psi(6, 0.08));
    const Vec3 x = oracle::random_unit(rng);
    const TangentFrame fr = TangentFrame::at(x);
    auto iota = [&](const Vec3& y) { return s.embed(y); };
    const Vec3 d1 = fd_tangent(iota, x, fr.e1, 1e-3), d2 = fd_tangent(iota, x, fr.e2, 1e-3);
    Mat2 G;
    G << d1.dot(d1), d1.dot(d2), d2.dot(d1), d2.dot(d2);
    CHECK((G - s.induced_metric(fr)).norm() < 1e-6 * G.norm());
    const Vec3 N = s.unit_normal(x);
    CHECK(std::abs(N.norm() - 1.0) < 1e-13);
    CHECK(std::abs(N.dot(d1)) < 1e-8 * d1.norm());
    CHECK(std::abs(N.dot(d2)) < 1e-8 * d2.norm());
    CHECK(N.dot(x) > 0);
  }
}

TEST_CASE("Weingarten map against finite differences of the normal") {
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const StarShapedSurface s(small_psi(8, 0.1));
    const Vec3 x = oracle::random_unit(rng);
    const TangentFrame fr = TangentFrame::at(x);
    auto iota = [&](const Vec3& y) { return s.embed(y); };
    auto nrm = [&](const Vec3& y) { return s.unit_normal(y); };
    Eigen::Matrix<double, 3, 2> D;
    D.col(0) = fd_tangent(iota, x, fr.e1, 1e-3);
    D.col(1) = fd_tangent(iota, x, fr.e2, 1e-3);
    Mat2 A;
    for (int b = 0; b < 2; ++b) {
      const Vec3 dN = fd_tangent(nrm, x, b == 0 ? fr.e1 : fr.e2, 1e-3);
      A.col(b) = D.colPivHouseholderQr().solve(dN);
    }
    const Mat2 S = s.shape_operator(fr);
    worst = std::max(worst, (A - S).norm() / S.norm());
    CHECK(std::abs(S.trace() - s.mean_curvature(x)) < 1e-9 * std::abs(s.mean_curvature(x)));
    // g-self-adjoint
    const Mat2 GA = s.induced_metric(fr) * S;
    CHECK(std::abs(GA(0, 1) - GA(1, 0)) < 1e-9 * GA.norm());
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("Gauss equation against the intrinsic curvature") {
  for (int trial = 0; trial < 8; ++trial) {
    const SphereFunction psi = small_psi(6, 0.05);
    const StarShapedSurface s(psi);
    const Vec3 x = oracle::random_unit(rng);
    const double K = brioschi(psi, TangentFrame::at(x), 1e-3);
    CHECK(std::abs(K - s.gauss_curvature(x)) < 1e-4);
  }
}

TEST_CASE("first variation of H and A") {
  SUBCASE("closed forms") {
    const SphereFunction c = SphereFunction::constant(5, 0.7);
    const SphereFunction dc = first_variation_H(c);
    const Vec3 x = oracle::random_unit(rng);
    CHECK(std::abs(dc.evaluate(x) + 2 * 0.7) < 1e-13);
    for (int m = -1; m <= 1; ++m) {
      const SphereFunction d1 = first_variation_H(SphereFunction::basis(5, 1, m));
      for (double v : d1.coeffs()) CHECK(std::abs(v) < 1e-14);
    }
  }
  SUBCASE("Richardson finite differences") {
    double worst = 0.0, worst_a = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const SphereFunction f = small_psi(6, 1.0);
      const Vec3 x = oracle::random_unit(rng);
      const TangentFrame fr = TangentFrame::at(x);
      auto H = [&](double t) { return StarShapedSurface(t * f).mean_curvature(x); };
      auto A = [&](double t) { return StarShapedSurface(t * f).shape_operator(fr); };
      const double t = 1e-3;
      auto D = [&](double h) { return (H(h) - H(-h)) / (2 * h); };
      const double rich = (4 * D(t / 2) - D(t)) / 3;
      const double exact = first_variation_H(f).evaluate(x);
      worst = std::max(worst, oracle::rel_err(rich, exact, 1e-3));
      auto DA = [&](double h) -> Mat2 { return (A(h) - A(-h)) / (2 * h); };
      const Mat2 ra = (4 * DA(t / 2) - DA(t)) / 3;
      const Mat2 ea = first_variation_A(f, fr);
      worst_a = std::max(worst_a, (ra - ea).norm() / std::max(ea.norm(), 1e-3));
      CHECK(std::abs(ea.trace() - exact) < 1e-10 * std::max(1.0, std::abs(exact)));
    }
    CHECK(worst < 1e-5);
    CHECK(worst_a < 1e-5);
  }
}

TEST_CASE("mean curvature equivariance") {
  for (int trial = 0; trial < 5; ++trial) {
    const SphereFunction psi = small_psi(6, 0.1);
    const OrthogonalTransform A(oracle::random_rotation(rng));
    const StarShapedSurface s(psi), r(rotate(psi, A));
    for (int k = 0; k < 10; ++k) {
      const Vec3 x = oracle::random_unit(rng);
      CHECK(std::abs(r.mean_curvature(x) - s.mean_curvature(A(x))) < 1e-9);
    }
  }
}

TEST_CASE("Hessian multiplicity") {
  const SphereGrid g = SphereGrid::for_lmax(4);
  std::vector<double> z2(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) z2[i] = std::pow(g.nodes()[i][2], 2);
  const SphereFunction f = project(g, z2, 4);
  const HessianProfile pole = hessian_multiplicity(f, Vec3(0, 0, 1));
  CHECK(pole.max_multiplicity == 2);
  CHECK(std::abs(pole.eigenvalues[0] + 2) < 1e-10);

  for (int trial = 0; trial < 10; ++trial) {
    const SphereFunction r = oracle::random_function(6, rng);
    const Vec3 p = oracle::random_unit(rng);
    const HessianProfile h = hessian_multiplicity(r, p);
    int total = 0;
    for (int m : h.multiplicities) total += m;
    CHECK(total == 2);
    CHECK(h.has_near_umbilic_eigenvalue);
    // FD Hessian in the frame at p via second differences along geodesics
    const TangentFrame fr = TangentFrame::at(p);
    const double s = 3e-3;
    auto along = [&](double a, double b) {
      return (a == 0 && b == 0) ? r.evaluate(p)
                                : r.evaluate(oracle::geodesic(p, a * fr.e1 + b * fr.e2, std::hypot(a, b)));
    };
    // fourth-order second difference in the direction (a, b)
    auto d2 = [&](double a, double b) {
      return (-along(2 * a, 2 * b) + 16 * along(a, b) - 30 * along(0, 0) + 16 * along(-a, -b) -
              along(-2 * a, -2 * b)) /
             (12 * s * s);
    };
    Mat2 H;
    H(0, 0) = d2(s, 0);
    H(1, 1) = d2(0, s);
    H(0, 1) = H(1, 0) = 0.5 * (d2(s, s) - H(0, 0) - H(1, 1));
    Eigen::SelfAdjointEigenSolver<Mat2> es(H);
    for (int i = 0; i < 2; ++i) CHECK(oracle::rel_err(es.eigenvalues()[i], h.eigenvalues[i], 1.0) < 1e-5);
  }
  CHECK_THROWS_AS(hessian_multiplicity(f, Vec3(0, 0, 2)), Error);
}
