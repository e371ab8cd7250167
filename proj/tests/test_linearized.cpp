#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "zollforge/error.hpp"
#include "zollforge/linearized.hpp"

using namespace zf;
using oracle::analytic_field;

namespace {

std::mt19937_64 rng(99);

SphereFunction linear(const Vec3& w, int L) {
  SphereFunction f(L);
  const double k = std::sqrt(4 * M_PI / 3);
  f.coeff(1, 1) = k * w[0];
  f.coeff(1, -1) = k * w[1];
  f.coeff(1, 0) = k * w[2];
  return f;
}

CircleFunction random_zero_center(int K, double s) {
  CircleFunction c(K);
  for (auto& x : c.data()) x = s * std::uniform_real_distribution<double>(-1, 1)(rng);
  for (int k = 1; k <= K; ++k) {
    c.a(k) /= k * k;
    c.b(k) /= k * k;
  }
  return project_zero_center(c);
}

}  // namespace

TEST_CASE("closed-form D_psi H at the round state") {
  const int K = 8;
  const EquatorFrame fr = EquatorFrame::make(oracle::random_unit(rng));
  CHECK(dH_in_psi_at_zero(SphereFunction::constant(5, 1.0), fr, K).max_abs_coeff() < 1e-14);
  const Vec3 w = oracle::random_unit(rng);
  const CircleFunction lin = dH_in_psi_at_zero(linear(w, 3), fr, K);
  CHECK(std::abs(lin.a(0) - w.dot(fr.v)) < 1e-14);
  CHECK((lin - CircleFunction(0, {w.dot(fr.v)}).resized(K)).max_abs_coeff() < 1e-14);
  const SphereFunction f = oracle::random_function(7, rng);
  const CircleFunction dh = dH_in_psi_at_zero(f, fr, K);
  const CircleFunction zero(K);
  const int M = 128;
  const CircleFunction fd = (1.0 / 12e-4) * (8.0 * (euler_lagrange(1e-4 * f, fr, zero, K, M) -
                                                    euler_lagrange(-1e-4 * f, fr, zero, K, M)) -
                                             (euler_lagrange(2e-4 * f, fr, zero, K, M) -
                                              euler_lagrange(-2e-4 * f, fr, zero, K, M)));
  CHECK((fd - dh).max_abs_coeff() < 1e-5 * dh.max_abs_coeff());
  // odd f gives only even Fourier modes
  const CircleFunction odd = dH_in_psi_at_zero(odd_part(f), fr, K);
  for (int k = 1; k <= K; k += 2) CHECK(std::max(std::abs(odd.a(k)), std::abs(odd.b(k))) < 1e-14);
}

TEST_CASE("Jacobi solve") {
  CHECK(jacobi_solve(CircleFunction(4)).max_abs_coeff() == 0.0);
  CHECK(jacobi_solve(CircleFunction(0, {0.7})).a(0) == doctest::Approx(0.7));
  CircleFunction c2(3);
  c2.a(2) = 1.0;
  const CircleFunction s = jacobi_solve(c2);
  CHECK(std::abs(s.a(2) + 1.0 / 3.0) < 1e-15);
  const CircleFunction back = s.derivative_series(2) + s;
  CHECK((back - c2).max_abs_coeff() < 1e-15);
  CircleFunction bad(3);
  bad.b(1) = 1e-6;
  try {
    jacobi_solve(bad);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Solvability);
  }
}

TEST_CASE("phi_of_f") {
  auto grid = DirectionGrid::for_lmax(6);
  const Vec3 w = oracle::random_unit(rng);
  const TangentField tr = phi_of_f(linear(w, 3), grid, 6);
  for (std::size_t j = 0; j < grid->size(); ++j) {
    CHECK(std::abs(tr.at(j).a(0) - w.dot(grid->dir(j))) < 1e-14);
    for (std::size_t k = 1; k < tr.at(j).data().size(); ++k) CHECK(std::abs(tr.at(j).data()[k]) < 1e-14);
  }
  CHECK(phi_of_f(SphereFunction(5), grid, 6).max_abs() == 0.0);
  // equivariance under O(3)
  const SphereFunction f = odd_part(oracle::random_function(7, rng));
  for (int t = 0; t < 5; ++t) {
    Mat3 R = oracle::random_rotation(rng);
    if (t % 2) R = -R;
    const OrthogonalTransform A(R);
    const Vec3 v = oracle::random_unit(rng);
    const EquatorFrame fv = EquatorFrame::make(v), fav = EquatorFrame::make(A(v));
    const CircleFunction l = phi_of_f(rotate(f, A), fv, 10);
    const CircleFunction r = phi_of_f(f, fav, 10);
    for (int i = 0; i < 7; ++i) {
      const double th = 0.9 * i;
      CHECK(std::abs(l.value(th) - r.value(fav.angle_of(A(fv.point(th))))) < 1e-8);
    }
  }
}

TEST_CASE("kernel direction annihilates the linearized Euler-Lagrange map") {
  const int K = 10;
  for (int t = 0; t < 3; ++t) {
    const SphereFunction f = odd_part(oracle::random_function(5, rng));
    const EquatorFrame fr = EquatorFrame::make(oracle::random_unit(rng));
    const CircleFunction ph = phi_of_f(f, fr, K);
    const double e = 1e-4;
    const int M = 128;
    const CircleFunction d =
        (1.0 / (2 * e)) * (euler_lagrange(e * f, fr, e * ph, K, M) - euler_lagrange(-e * f, fr, -e * ph, K, M));
    CHECK(d.max_abs_coeff() < 1e-5);
    CHECK(std::abs(area(e * f, fr, e * ph, M) - area(-e * f, fr, -e * ph, M)) / (2 * e) < 1e-8);
  }
}

TEST_CASE("P and S at the round state") {
  auto grid = DirectionGrid::for_lmax(4);
  const int K = 6;
  LinearizedState st{SphereFunction(4), TangentField(grid, K)};
  OperatorP P(st);
  TangentField c2(grid, K);
  for (std::size_t j = 0; j < c2.size(); ++j) c2.at(j).a(2) = 1.0;
  const TangentField p = P.apply(c2);
  for (std::size_t j = 0; j < p.size(); ++j) CHECK((p.at(j) - 3.0 * c2.at(j)).max_abs_coeff() < 1e-15);
  const TangentField s = P.solve(c2);
  for (std::size_t j = 0; j < s.size(); ++j) CHECK(std::abs(s.at(j).a(2) - 1.0 / 3.0) < 1e-15);
  CHECK(P.solve(TangentField(grid, K)).max_abs() == 0.0);
  TangentField c1(grid, K);
  c1.at(0).a(1) = 1.0;
  CHECK_THROWS_AS(P.apply(c1), Error);
  TangentField r(grid, K);
  for (std::size_t j = 0; j < r.size(); ++j) r.at(j) = random_zero_center(K, 1.0);
  const TangentField rt = P.apply(P.solve(r));
  for (std::size_t j = 0; j < r.size(); ++j) CHECK((rt.at(j) - r.at(j)).max_abs_coeff() < 1e-6);
  // the finite-difference symbol reproduces -q'' - q
  const LocalSymbol ls = local_symbol(SphereFunction(4), grid->frame(3), CircleFunction(K), 1e-4, 64);
  for (int i = 0; i < 64; ++i) {
    CHECK(std::abs(ls.a[i] + 1.0) < 1e-7);
    CHECK(std::abs(ls.b[i]) < 1e-7);
    CHECK(std::abs(ls.c[i] + 1.0) < 1e-7);
  }
}

TEST_CASE("P and S at a perturbed state") {
  auto grid = DirectionGrid::for_lmax(6);
  const int K = 8;
  const Vec3 a = oracle::random_unit(rng), b = oracle::random_unit(rng), c = oracle::random_unit(rng);
  TangentField phi(grid, K);
  for (std::size_t j = 0; j < grid->size(); ++j)
    phi.at(j) = project_zero_center(analytic_field(grid->frame(j), 0.05, a, b, 0.05, c)).resized(K);
  LinearizedState st{oracle::random_function(6, rng, 0.03, 0.3), phi};
  OperatorP P(st);
  CHECK(P.condition_number() < 1e8);
  const int M = default_curve_samples(6, K);
  for (std::size_t j = 0; j < grid->size(); j += 17) {
    const CircleFunction dphi = random_zero_center(K, 1.0);
    TangentField df(grid, K);
    df.at(j) = dphi;
    const CircleFunction pj = P.apply(df).at(j);
    const double h = 1e-4;
    const auto& fr = grid->frame(j);
    const CircleFunction fd = (1.0 / (2 * h)) * (euler_lagrange(st.psi, fr, phi.at(j) + h * dphi, K, M) -
                                                 euler_lagrange(st.psi, fr, phi.at(j) - h * dphi, K, M));
    CHECK((project_zero_center(fd) - pj).max_abs_coeff() < 1e-5 * pj.max_abs_coeff());
  }
  TangentField r(grid, K);
  for (std::size_t j = 0; j < r.size(); ++j) r.at(j) = random_zero_center(K, 1.0);
  const TangentField rt = P.apply(P.solve(r));
  double worst = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) worst = std::max(worst, (rt.at(j) - r.at(j)).max_abs_coeff());
  CHECK(worst < 1e-5);
  CHECK(operator_S(st, TangentField(grid, K)).max_abs() == 0.0);
}
