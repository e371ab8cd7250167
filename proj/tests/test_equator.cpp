#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "zollforge/equator.hpp"
#include "zollforge/error.hpp"

using namespace zf;

using oracle::analytic_field;

TEST_CASE("frames are orthonormal in both charts") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    Vec3 v = oracle::random_unit(rng);
    if (t == 0) v = Vec3(0, 0, 1);
    if (t == 1) v = Vec3(0, std::sqrt(1 - 0.81), 0.9);
    EquatorFrame f = EquatorFrame::make(v);
    CHECK(std::abs(f.e1.dot(f.e2)) < 1e-13);
    CHECK(std::abs(f.e1.dot(f.v)) < 1e-13);
    CHECK(std::abs(f.e2.dot(f.v)) < 1e-13);
    CHECK(std::abs(f.e1.norm() - 1) < 1e-13);
    EquatorFrame g = EquatorFrame::make(-v);
    CHECK((g.e1 + f.e1).norm() < 1e-13);
    CHECK((g.e2 - f.e2).norm() < 1e-13);
  }
}

TEST_CASE("direction grid") {
  DirectionGrid g(8, 16);
  CHECK(g.size() == 64);
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) s += g.weight(j);
  CHECK(std::abs(s - 2 * M_PI) < 1e-10);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      CHECK((g.dir(i) - g.dir(j)).norm() > 1e-6);
      CHECK((g.dir(i) + g.dir(j)).norm() > 1e-6);
    }
  CHECK_THROWS_AS(DirectionGrid(7, 16), Error);
  auto d = DirectionGrid::for_lmax(12);
  CHECK(d->max_lmax() >= 12);
  CHECK(d->n_phi() % 12 == 0);
}

TEST_CASE("circle functions and sampler") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 1);
  CircleFunction f(6);
  for (auto& c : f.data()) c = n(rng);
  const CircleSampler& cs = circle_sampler(6, 28);
  std::vector<double> s0(28), s1(28), s2(28), d(28);
  cs.synth(f, 0, s0.data());
  cs.synth(f, 1, s1.data());
  cs.synth(f, 2, s2.data());
  cs.diff(s0.data(), d.data());
  for (int j = 0; j < 28; ++j) {
    const double t = cs.angle(j);
    CHECK(std::abs(s0[j] - f.value(t)) < 1e-12);
    CHECK(std::abs(s1[j] - f.derivative(t)) < 1e-11);
    CHECK(std::abs(s2[j] - f.derivative(t, 2)) < 1e-10);
    CHECK(std::abs(d[j] - s1[j]) < 1e-10);
    CHECK(std::abs(f.value(t + 2 * M_PI) - f.value(t)) < 1e-12);
  }
  CircleFunction g = cs.analyze(s0.data());
  for (std::size_t i = 0; i < g.data().size(); ++i) CHECK(std::abs(g.data()[i] - f.data()[i]) < 1e-12);
  CHECK_THROWS_AS(CircleSampler(6, 12), Error);
}

TEST_CASE("graph point and variational vector") {
  std::mt19937_64 rng(3);
  EquatorFrame fr = EquatorFrame::make(oracle::random_unit(rng));
  CHECK((graph_point(fr, 0.3, 0.0) - fr.point(0.3)).norm() < 1e-15);
  CHECK(std::abs(graph_point(fr, 1.1, 0.2).dot(fr.v) - std::sin(0.2)) < 1e-15);
  CHECK((variational_vector(fr, 0.4, 0.0) - fr.v).norm() < 1e-15);
  CHECK((variational_vector(fr, 0.4, M_PI / 4) - (fr.v - fr.point(0.4)) / std::sqrt(2.0)).norm() < 1e-15);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int t = 0; t < 100; ++t) {
    const double th = 3 * u(rng), q = u(rng);
    Vec3 F = graph_point(fr, th, q);
    CHECK(std::abs(F.dot(F) - 1.0) < 1e-13);
    CHECK(std::abs(variational_vector(fr, th, q).dot(F)) < 1e-13);
  }
  CHECK_THROWS_AS(graph_point(fr, 0.0, 1.6), Error);
  auto grid = std::make_shared<DirectionGrid>(4, 8);
  TangentField phi(grid, 3);
  phi.at(2).a(0) = 0.1;
  CHECK(std::abs(graph_point(phi, 2, 0.5).dot(grid->dir(2)) - std::sin(0.1)) < 1e-15);
}

TEST_CASE("restriction") {
  EquatorFrame fr = EquatorFrame::make(Vec3(0.3, -0.2, 0.9).normalized());
  CircleFunction zero(4);
  CircleFunction one = restrict_to(SphereFunction::constant(3, 1.0), fr, zero, 4, 32);
  CHECK(std::abs(one.a(0) - 1.0) < 1e-14);
  for (int k = 1; k <= 4; ++k) CHECK(std::abs(one.a(k)) + std::abs(one.b(k)) < 1e-14);
  // linear function with u orthogonal to v is a pure first harmonic
  const Vec3 uu = fr.e1 * 0.6 + fr.e2 * 0.8;
  SphereFunction lin(1);
  const double c = std::sqrt(4 * M_PI / 3);
  lin.coeff(1, 1) = c * uu[0];
  lin.coeff(1, -1) = c * uu[1];
  lin.coeff(1, 0) = c * uu[2];
  CircleFunction r = restrict_to(lin, fr, zero, 4, 32);
  CHECK(std::abs(r.a(1) - 0.6) < 1e-13);
  CHECK(std::abs(r.b(1) - 0.8) < 1e-13);
  CHECK(std::abs(r.a(0)) + std::abs(r.a(2)) + std::abs(r.b(2)) < 1e-13);
  std::mt19937_64 rng(4);
  SphereFunction f = oracle::random_function(6, rng);
  CircleFunction rf = restrict_to(f, fr, zero, 6, 40);
  for (int t = 0; t < 10; ++t) {
    const double th = 0.37 * t;
    CHECK(std::abs(rf.value(th) - f.evaluate(fr.point(th))) < 1e-10);
  }
}

TEST_CASE("center map and zero-center projection") {
  auto grid = std::make_shared<DirectionGrid>(4, 8);
  TangentField phi(grid, 4);
  for (std::size_t j = 0; j < phi.size(); ++j) phi.at(j).a(2) = 0.1 * j;
  for (const auto& c : center_map(phi)) CHECK(c.norm() == 0.0);
  TangentField cosf(grid, 4);
  for (std::size_t j = 0; j < cosf.size(); ++j) cosf.at(j).a(1) = 1.0;
  for (const auto& c : center_map(cosf)) {
    CHECK(std::abs(c[0] - M_PI) < 1e-15);
    CHECK(c[1] == 0.0);
  }
  // quadrature of Phi_v <u, x> agrees with pi (a1, b1)
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 1);
  TangentField rnd(grid, 4);
  for (std::size_t j = 0; j < rnd.size(); ++j)
    for (auto& c : rnd.at(j).data()) c = n(rng);
  auto cm = center_map(rnd);
  for (std::size_t j = 0; j < rnd.size(); ++j) {
    const auto& fr = grid->frame(j);
    double i1 = 0, i2 = 0;
    for (int k = 0; k < 64; ++k) {
      const double t = 2 * M_PI * k / 64;
      const Vec3 x = fr.point(t);
      i1 += rnd.at(j).value(t) * x.dot(fr.e1) * 2 * M_PI / 64;
      i2 += rnd.at(j).value(t) * x.dot(fr.e2) * 2 * M_PI / 64;
    }
    CHECK(std::abs(i1 - cm[j][0]) < 1e-12);
    CHECK(std::abs(i2 - cm[j][1]) < 1e-12);
  }
  auto sum = center_map(rnd + cosf);
  for (std::size_t j = 0; j < rnd.size(); ++j) CHECK((sum[j] - cm[j] - center_map(cosf)[j]).norm() < 1e-12);
  TangentField z = project_zero_center(rnd);
  for (const auto& c : center_map(z)) CHECK(c.norm() < 1e-12);
  TangentField zz = project_zero_center(z);
  for (std::size_t j = 0; j < z.size(); ++j)
    for (std::size_t i = 0; i < z.at(j).data().size(); ++i)
      CHECK(std::abs(zz.at(j).data()[i] - z.at(j).data()[i]) < 1e-13);
  TangentField pc = project_zero_center(cosf);
  CHECK(pc.max_abs() == 0.0);
  TangentField keep = project_zero_center(phi);
  CHECK((keep - phi).max_abs() == 0.0);
}

TEST_CASE("oddness in the direction variable") {
  auto grid = std::make_shared<DirectionGrid>(6, 12);
  std::mt19937_64 rng(6);
  const Vec3 a = oracle::random_unit(rng), b = oracle::random_unit(rng), c = oracle::random_unit(rng);
  TangentField phi(grid, 4);
  for (std::size_t j = 0; j < phi.size(); ++j) phi.at(j) = analytic_field(grid->frame(j), 0.1, a, b, 0.05, c);
  for (std::size_t j = 0; j < phi.size(); ++j)
    for (int t = 0; t < 5; ++t) {
      const Vec3 x = grid->frame(j).point(1.3 * t);
      CHECK(phi.value(j, -1, x) == -phi.value(j, +1, x));
      // compare with the field sampled in the frame of -v
      const EquatorFrame fm = EquatorFrame::make(-grid->dir(j));
      const CircleFunction neg = analytic_field(fm, 0.1, a, b, 0.05, c);
      CHECK(std::abs(neg.value(fm.angle_of(x)) - phi.value(j, -1, x)) < 1e-12);
    }
}

TEST_CASE("frame covariance of equator integrals") {
  std::mt19937_64 rng(7);
  SphereFunction f = oracle::random_function(6, rng);
  const Vec3 a = oracle::random_unit(rng), b = oracle::random_unit(rng), c = oracle::random_unit(rng);
  for (int t = 0; t < 10; ++t) {
    EquatorFrame f1 = EquatorFrame::make(oracle::random_unit(rng));
    EquatorFrame f2 = f1.rotated(0.917 * (t + 1));
    CircleFunction p1 = analytic_field(f1, 0.1, a, b, 0.05, c);
    CircleFunction p2 = analytic_field(f2, 0.1, a, b, 0.05, c);
    CircleFunction r1 = restrict_to(f, f1, p1, 16, 64), r2 = restrict_to(f, f2, p2, 16, 64);
    auto integral = [](const CircleFunction& r, const CircleFunction& p) {
      double s = 0;
      for (int k = 0; k < 128; ++k) {
        const double th = 2 * M_PI * k / 128;
        s += r.value(th) * r.value(th) * (1 + p.value(th)) * 2 * M_PI / 128;
      }
      return s;
    };
    CHECK(std::abs(integral(r1, p1) - integral(r2, p2)) < 1e-10);
    CHECK(std::abs(r1.a(0) - r2.a(0)) < 1e-10);
  }
}

TEST_CASE("dual hypersurface") {
  const Vec3 p(0, 0, 1);
  FieldAt zero = [](const EquatorFrame&) { return CircleFunction(2); };
  auto dirs = dual_hypersurface(p, zero, 48);
  CHECK(dirs.size() == 48);
  for (const auto& v : dirs) CHECK(std::abs(v.dot(p)) < 1e-8);
  std::mt19937_64 rng(8);
  const Vec3 a = oracle::random_unit(rng), b = oracle::random_unit(rng), c = oracle::random_unit(rng);
  FieldAt small = [&](const EquatorFrame& fr) { return analytic_field(fr, 0.08, a, b, 0.04, c); };
  const Vec3 q = oracle::random_unit(rng);
  for (const auto& v : dual_hypersurface(q, small, 32)) {
    const EquatorFrame fr = EquatorFrame::make(v);
    const CircleFunction pv = small(fr);
    // residual: minimize |F_v(theta) - q| over theta by dense scan then golden refinement
    double best = 1e9, bt = 0;
    for (int k = 0; k < 2000; ++k) {
      const double th = 2 * M_PI * k / 2000;
      const double d = (graph_point(fr, th, pv.value(th)) - q).norm();
      if (d < best) best = d, bt = th;
    }
    double lo = bt - 0.01, hi = bt + 0.01;
    for (int it = 0; it < 100; ++it) {
      const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      if ((graph_point(fr, m1, pv.value(m1)) - q).norm() < (graph_point(fr, m2, pv.value(m2)) - q).norm())
        hi = m2;
      else
        lo = m1;
    }
    const double th = 0.5 * (lo + hi);
    CHECK((graph_point(fr, th, pv.value(th)) - q).norm() < 1e-7);
  }
}

TEST_CASE("tangent field serialization") {
  auto grid = std::make_shared<DirectionGrid>(2, 4);
  TangentField phi(grid, 2);
  phi.at(0).a(2) = 0.5;
  const std::string js = to_json(phi);
  CHECK(js.find("\"k_max\":2") != std::string::npos);
  CHECK(js.find("\"directions\"") != std::string::npos);
  CHECK(js.find("\"fourier\"") != std::string::npos);
}

TEST_CASE("antipodal series matches the field seen from -v") {
  std::mt19937_64 rng(31);
  const Vec3 a = oracle::random_unit(rng), b = oracle::random_unit(rng), c = oracle::random_unit(rng);
  for (int t = 0; t < 10; ++t) {
    const Vec3 v = oracle::random_unit(rng);
    const EquatorFrame f = EquatorFrame::make(v), g = EquatorFrame::make(-v);
    const CircleFunction pv = analytic_field(f, 0.2, a, b, 0.1, c);
    const CircleFunction pm = analytic_field(g, 0.2, a, b, 0.1, c);
    CHECK((antipodal(pv) - pm).max_abs_coeff() < 1e-13);
  }
}
