#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "zollforge/error.hpp"
#include "zollforge/solver.hpp"

using namespace zf;

namespace {

std::mt19937_64 rng(2024);

SolverConfig small_config() {
  SolverConfig c;
  c.l_max = 6;
  c.t_values = {0.01};
  return c;
}

const SolutionState& solved_small() {
  static const SolutionState s = solve(SphereFunction::basis(6, 3, 0), 0.01, small_config());
  return s;
}

SphereFunction random_even(int L, double s) {
  SphereFunction b(L);
  for (int l = 2; l <= L; l += 2)
    for (int m = -l; m <= l; ++m) b.coeff(l, m) = s * std::normal_distribution<double>()(rng);
  return b;
}

TangentField random_xi(const TangentField& like, double s) {
  TangentField xi(like.grid_ptr(), like.k_max());
  for (std::size_t j = 0; j < xi.size(); ++j) {
    for (int k = 0; k <= xi.k_max(); ++k) {
      if (k == 1) continue;
      xi.at(j).a(k) = s * std::normal_distribution<double>()(rng) / (1 + k * k);
      if (k > 0) xi.at(j).b(k) = s * std::normal_distribution<double>()(rng) / (1 + k * k);
    }
  }
  return xi;
}

double l2(const TangentField& t) {
  double s = 0;
  for (std::size_t j = 0; j < t.size(); ++j)
    for (double c : t.at(j).data()) s += c * c;
  return std::sqrt(s);
}

// geodesic curvature of theta -> exp(psi(F)) F on the radial graph, all derivatives by finite differences
double geodesic_curvature_fd(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& q,
                             double th) {
  auto X = [&](double s) {
    const Vec3 F = graph_point(fr, s, q.value(s));
    return Vec3(std::exp(psi.evaluate(F)) * F);
  };
  const double h = 1e-3;
  const Vec3 x0 = X(th), xp = X(th + h), xm = X(th - h), xpp = X(th + 2 * h), xmm = X(th - 2 * h);
  const Vec3 d1 = (8.0 * (xp - xm) - (xpp - xmm)) / (12 * h);
  const Vec3 d2 = (16.0 * (xp + xm) - (xpp + xmm) - 30.0 * x0) / (12 * h * h);
  auto G = [&](const Vec3& y) { return y.norm() - std::exp(psi.evaluate(y.normalized())); };
  const double e = 1e-6;
  Vec3 N;
  for (int i = 0; i < 3; ++i) {
    Vec3 dy = Vec3::Zero();
    dy[i] = e;
    N[i] = (G(x0 + dy) - G(x0 - dy)) / (2 * e);
  }
  N.normalize();
  return N.dot(d1.cross(d2)) / std::pow(d1.norm(), 3);
}

}  // namespace

TEST_CASE("config defaults, JSON round trip and validation") {
  SolverConfig d;
  CHECK(d.l_max == 16);
  CHECK(d.k() == 32);
  CHECK(d.cutoff(3.0) == 4);
  std::vector<int> cuts;
  double tau = d.tau0;
  for (int i = 0; i < 6; ++i, tau = std::pow(tau, 1.5)) cuts.push_back(d.cutoff(tau));
  CHECK(cuts == std::vector<int>{4, 6, 9, 13, 20, 30});

  const SolverConfig c = SolverConfig::from_json(
      R"({"l_max": 8, "k_max": 12, "t_values": [0.01, 0.02], "tol_h": 1e-7, "scheme": "gauss-newton",
          "smoothing": {"tau0": 4.0, "c": 2.5}})");
  CHECK(c.l_max == 8);
  CHECK(c.k() == 12);
  CHECK(c.t_values.size() == 2);
  CHECK(c.scheme == "gauss-newton");
  CHECK(c.tau0 == 4.0);
  CHECK(c.c() == 2.5);
  const SolverConfig back = SolverConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(SolverConfig::from_json("{}").l_max == 16);

  auto kind = [](const std::string& text) {
    try {
      SolverConfig::from_json(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  CHECK(kind(R"({"lmax": 8})") == ErrorKind::Config);
  CHECK(kind(R"({"scheme": "euler"})") == ErrorKind::Config);
  CHECK(kind(R"({"t_values": []})") == ErrorKind::Config);
  CHECK(kind(R"({"l_max": "twelve"})") == ErrorKind::Config);
  CHECK(kind("[1, 2")== ErrorKind::Config);
  CHECK(kind(R"({"smoothing": {"tau0": 0.5}})") == ErrorKind::Config);
}

TEST_CASE("Lambda vanishes at the round state and under dilation") {
  const auto grid = DirectionGrid::for_lmax(6);
  const TangentField zero(grid, 12);
  const LambdaValue a = lambda_map(SphereFunction(6), zero);
  CHECK(a.residuals.max() < 1e-13);
  for (std::size_t j = 0; j < a.areas.size(); ++j) CHECK(a.areas[j] == doctest::Approx(2 * M_PI).epsilon(1e-12));
  const double c = 0.3;
  const LambdaValue b = lambda_map(SphereFunction::constant(6, c), zero);
  CHECK(b.residuals.max() < 1e-12);
  CHECK(b.areas[0] == doctest::Approx(2 * M_PI * std::exp(c)).epsilon(1e-10));
  for (double h : b.h_full) CHECK(h < 1e-12);
}

TEST_CASE("D_psi H by finite differences matches the closed form at zero") {
  const auto grid = DirectionGrid::for_lmax(6);
  const SphereFunction f = oracle::random_function(6, rng, 0.2);
  const TangentField fd = dH_in_psi(SphereFunction(6), TangentField(grid, 12), f);
  const TangentField ex = project_zero_center(dH_in_psi_at_zero(f, grid, 12));
  CHECK(l2(fd - ex) < 1e-8 * l2(ex));
}

TEST_CASE("V is a right inverse of DLambda up to second order") {
  for (int pass = 0; pass < 2; ++pass) {
    const SolutionState& s = solved_small();
    const SphereFunction psi = pass == 0 ? SphereFunction(6) : s.psi;
    const TangentField phi = pass == 0 ? TangentField(s.phi.grid_ptr(), s.phi.k_max()) : s.phi;
    const RightInverseV V(psi, phi);
    const SphereFunction b = random_even(6, 1e-3);
    const TangentField xi = random_xi(phi, 1e-3);
    const Update u = V.apply(b, xi);
    const auto [g, x] = dLambda_fd(psi, phi, u);
    const double eb = (g.even_harmonics(6) - b).l2_norm(), ex = l2(x - xi);
    const double n = std::hypot(b.l2_norm(), l2(xi));
    CHECK(std::hypot(eb, ex) < 1e-6 * n);
  }
}

TEST_CASE("t = 0 returns the round state without iterating") {
  for (const char* scheme : {"hamilton", "gauss-newton"}) {
    SolverConfig c = small_config();
    c.scheme = scheme;
    const SolutionState s = solve(SphereFunction::basis(6, 3, 0), 0.0, c);
    CHECK(s.iterations == 0);
    CHECK(s.psi.l2_norm() == 0.0);
    CHECK(s.phi.max_abs() == 0.0);
  }
}

TEST_CASE("smoothed iteration converges and the state is Zoll") {
  const SolutionState& s = solved_small();
  CHECK(s.residuals.max() < 1e-6);
  CHECK(s.iterations >= 1);
  CHECK(s.iterations <= 10);
  for (std::size_t i = 1; i + 1 < s.trace.size(); ++i) CHECK(s.trace[i] < s.trace[i - 1]);
  const ZollReport r = verify_zoll(s);
  CHECK(r.passed(1e-6, 1e-6));
  CHECK(r.incidence.size() == 2);
  for (const auto& c : r.incidence) CHECK(c.matches == 1);

  // curves are geodesics of the radial graph
  double worst = 0.0, start = 0.0;
  const SolutionState s0 = initial_state(SphereFunction::basis(6, 3, 0), 0.01, small_config());
  for (std::size_t j = 0; j < s.phi.size(); j += 9)
    for (int k = 0; k < 8; ++k) {
      const double th = 0.3 + 2 * M_PI * k / 8;
      worst = std::max(worst, std::abs(geodesic_curvature_fd(s.psi, s.phi.grid().frame(j), s.phi.at(j), th)));
      start = std::max(start, std::abs(geodesic_curvature_fd(s0.psi, s0.phi.grid().frame(j), s0.phi.at(j), th)));
    }
  CHECK(worst < 1e-6);
  CHECK(start > 100 * worst);
}

TEST_CASE("Gauss-Newton and the smoothed iteration agree") {
  SolverConfig c = small_config();
  c.scheme = "gauss-newton";
  const SolutionState g = solve(SphereFunction::basis(6, 3, 0), 0.01, c);
  CHECK(g.scheme == "gauss-newton");
  CHECK(g.residuals.max() < 1e-6);
  CHECK(verify_zoll(g, 0).passed(1e-6, 1e-6));
  // solutions form a family; both stay within O(t^2) of t f
  CHECK((g.psi - solved_small().psi).l2_norm() < 1e-3);
}

TEST_CASE("perturbed states are flagged by the report") {
  SolutionState s = solved_small();
  s.psi.coeff(4, 2) += 1e-4;
  const ZollReport r = verify_zoll(s, 0);
  CHECK_FALSE(r.passed(1e-6, 1e-6));
  CHECK(r.area_spread > 1e-6);
  SolutionState q = solved_small();
  q.phi.at(3).a(2) += 1e-4;
  CHECK(verify_zoll(q, 0).max_h_all > 1e-5);
}

TEST_CASE("continuation is warm started and keeps states before a failure") {
  SolverConfig c = small_config();
  c.t_values = {0.005, 0.01};
  const auto st = continuation(SphereFunction::basis(6, 3, 0), c);
  REQUIRE(st.size() == 2);
  for (const auto& s : st) CHECK(verify_zoll(s, 0).passed(1e-6, 1e-6));
  CHECK((st[1].psi - solved_small().psi).l2_norm() < 1e-3);

  c.t_values = {0.01, 0.02, 0.03};
  c.max_iters = 1;
  c.tol_h = c.tol_area = 1e-12;
  std::string failure;
  const auto part = continuation(SphereFunction::basis(6, 3, 0), c, &failure);
  CHECK(part.size() < 3);
  CHECK(failure.find("t = ") != std::string::npos);
  CHECK_THROWS_AS(continuation(SphereFunction::basis(6, 3, 0), c), Error);
}

TEST_CASE("order of the correction in t") {
  const SphereFunction f = SphereFunction::basis(6, 3, 0), g = SphereFunction::basis(6, 4, 1);
  std::vector<SolutionState> syn(3);
  for (int i = 0; i < 3; ++i) {
    syn[i].t = 0.01 * (i + 1);
    syn[i].psi = syn[i].t * f + syn[i].t * syn[i].t * g;
  }
  CHECK(fit_order(syn, f) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_order({syn[0]}, f), Error);
}

TEST_CASE("single-direction solve reproduces the grid field") {
  const SolutionState& s = solved_small();
  for (std::size_t j : {0ul, 17ul, 40ul}) {
    const CircleFunction q = solve_direction(s.psi, s.phi.grid().frame(j), s.phi.k_max());
    CHECK((q - s.phi.at(j)).max_abs_coeff() < 1e-9);
    const EquatorFrame back = EquatorFrame::make(-s.phi.grid().dir(j));
    const CircleFunction qa = solve_direction(s.psi, back, s.phi.k_max());
    CHECK((qa - antipodal(s.phi.at(j))).max_abs_coeff() < 1e-9);
  }
}

TEST_CASE("axial symmetry of a zonal solution") {
  const SolutionState& s = solved_small();
  const EquivarianceReport ax = equivariance_check(s, OrthogonalTransform::rotation(Vec3(0, 0, 1), 0.7));
  CHECK(ax.psi < 1e-12);
  CHECK(ax.phi < 1e-8);
  CHECK(ax.hausdorff < 1e-8);
  const EquivarianceReport sym = equivariance_check(s, OrthogonalTransform(Vec3(1, -1, 1).asDiagonal()));
  CHECK(sym.max() < 1e-8);
  const EquivarianceReport off = equivariance_check(s, OrthogonalTransform::rotation(Vec3(1, 0, 0), 0.3));
  CHECK(off.max() > 1e-3);
}

TEST_CASE("exports and JSON") {
  const SolutionState& s = solved_small();
  std::ostringstream obj;
  export_embedding_obj(obj, s.psi, 6, 8);
  int nv = 0, nf = 0;
  std::istringstream in(obj.str());
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("v ", 0) == 0) ++nv;
    if (line.rfind("f ", 0) == 0) ++nf;
  }
  CHECK(nv == 2 + 5 * 8);
  CHECK(nf == 2 * 8 * 5);

  std::ostringstream csv;
  export_curves_csv(csv, s, 16);
  const std::string text = csv.str();
  CHECK(text.rfind("v_index,theta,x,y,z\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 16 * static_cast<long>(s.phi.size()));

  const std::string js = to_json(s);
  CHECK(js == to_json(s));
  const auto j = nlohmann::json::parse(js);
  CHECK(j["psi"]["l_max"] == 6);
  CHECK(j["phi"]["fourier"].size() == s.phi.size());
  CHECK(js.find("\"iterations\"") < js.find("\"phi\""));
  const auto rj = nlohmann::json::parse(verify_zoll(s, 1).to_json());
  CHECK(rj["incidence_ok"] == true);
  CHECK(rj["areas"].size() == s.phi.size());
}
