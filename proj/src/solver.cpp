#include "zollforge/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "zollforge/error.hpp"
#include "zollforge/io.hpp"
#include "zollforge/parallel.hpp"

namespace zf {

// ---- config ----

double SolverConfig::c() const { return smoothing_c > 0 ? smoothing_c : 4.0 / std::log(3.0); }

int SolverConfig::cutoff(double tau) const {
  return static_cast<int>(std::floor(c() * std::log(tau) + 1e-9));
}

std::shared_ptr<const DirectionGrid> SolverConfig::grid() const {
  if (dir_theta > 0 && dir_phi > 0) return std::make_shared<DirectionGrid>(dir_theta, dir_phi);
  return DirectionGrid::for_lmax(l_max);
}

void SolverConfig::validate() const {
  auto bad = [](const std::string& m) { fail(ErrorKind::Config, m); };
  if (l_max < 2 || l_max > 48) bad("l_max must lie in [2, 48]");
  if (k_max < 0 || (k_max > 0 && k_max < 3)) bad("k_max must be 0 or at least 3");
  if ((dir_theta > 0) != (dir_phi > 0)) bad("dir_theta and dir_phi must be given together");
  if (dir_theta > 0 && (dir_theta % 2 != 0 || dir_theta < 2 || dir_phi < 4)) bad("direction grid is invalid");
  if (t_values.empty()) bad("t_values is empty");
  for (double t : t_values)
    if (!std::isfinite(t)) bad("t_values must be finite");
  if (!(tol_h > 0) || !(tol_area > 0)) bad("tolerances must be positive");
  if (scheme != "hamilton" && scheme != "gauss-newton") bad("unknown scheme '" + scheme + "'");
  if (!(tau0 > 1)) bad("smoothing.tau0 must exceed 1");
  if (smoothing_c < 0) bad("smoothing.c must be positive");
  if (max_iters < 1) bad("max_iters must be positive");
  if (!(min_damping > 0 && min_damping <= 1)) bad("min_damping must lie in (0, 1]");
  if (!(h_fd > 0)) bad("h_fd must be positive");
}

SolverConfig SolverConfig::from_json(const std::string& text) {
  io::Json j;
  try {
    j = io::Json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::Config, "config must be a JSON object");
  SolverConfig c;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const auto& v = it.value();
      if (k == "l_max") c.l_max = v.get<int>();
      else if (k == "k_max") c.k_max = v.get<int>();
      else if (k == "dir_theta") c.dir_theta = v.get<int>();
      else if (k == "dir_phi") c.dir_phi = v.get<int>();
      else if (k == "t_values") c.t_values = v.get<std::vector<double>>();
      else if (k == "tol_h") c.tol_h = v.get<double>();
      else if (k == "tol_area") c.tol_area = v.get<double>();
      else if (k == "scheme") c.scheme = v.get<std::string>();
      else if (k == "max_iters") c.max_iters = v.get<int>();
      else if (k == "min_damping") c.min_damping = v.get<double>();
      else if (k == "h_fd") c.h_fd = v.get<double>();
      else if (k == "smoothing") {
        if (!v.is_object()) fail(ErrorKind::Config, "smoothing must be an object");
        for (auto s = v.begin(); s != v.end(); ++s) {
          if (s.key() == "tau0") c.tau0 = s.value().get<double>();
          else if (s.key() == "c") c.smoothing_c = s.value().get<double>();
          else fail(ErrorKind::Config, "unknown key smoothing." + s.key());
        }
      } else {
        fail(ErrorKind::Config, "unknown config key '" + k + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("config value has the wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

std::string SolverConfig::to_json() const {
  io::Json j;
  j["l_max"] = l_max;
  j["k_max"] = k();
  j["dir_theta"] = dir_theta;
  j["dir_phi"] = dir_phi;
  j["t_values"] = t_values;
  j["tol_h"] = tol_h;
  j["tol_area"] = tol_area;
  j["scheme"] = scheme;
  j["max_iters"] = max_iters;
  j["min_damping"] = min_damping;
  j["h_fd"] = h_fd;
  j["smoothing"] = {{"tau0", tau0}, {"c", c()}};
  return io::canonical_dump(j);
}

// ---- Lambda ----

namespace {

struct DirectionEval {
  double area = 0.0, h_full = 0.0;
  CircleFunction H;
};

DirectionEval eval_direction(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v,
                             int K, int M) {
  const CurveDensities d = curve_densities(sample_curve(psi, fr, phi_v, M));
  DirectionEval e;
  for (int i = 0; i < M; ++i) {
    e.area += d.J[i];
    e.h_full = std::max(e.h_full, std::abs(d.H[i]));
  }
  e.area *= 2.0 * M_PI / M;
  e.H = circle_sampler(K, M).analyze(d.H.data());
  return e;
}

TangentField H_field(const SphereFunction& psi, const TangentField& phi) {
  const int K = phi.k_max(), M = default_curve_samples(psi.l_max(), K);
  TangentField out(phi.grid_ptr(), K);
  parallel_for(phi.size(), [&](std::size_t j) {
    out.at(j) = project_zero_center(eval_direction(psi, phi.grid().frame(j), phi.at(j), K, M).H);
  });
  return out;
}

double l2(const SphereFunction& f) { return f.l2_norm(); }

double l2(const TangentField& t) {
  double s = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j)
    for (double c : t.at(j).data()) s += c * c;
  return std::sqrt(s);
}

double sup_samples(const CircleFunction& f, int M) {
  double m = 0.0;
  for (double v : f.samples(M)) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

LambdaValue lambda_map(const SphereFunction& psi, const TangentField& phi) {
  const auto grid = phi.grid_ptr();
  const int K = phi.k_max(), M = default_curve_samples(psi.l_max(), K);
  LambdaValue out;
  out.areas = ProjectiveFunction(grid);
  out.lambda2 = TangentField(grid, K);
  out.h_full.assign(phi.size(), 0.0);
  std::vector<double> sup2(phi.size(), 0.0);
  parallel_for(phi.size(), [&](std::size_t j) {
    DirectionEval e = eval_direction(psi, grid->frame(j), phi.at(j), K, M);
    out.areas[j] = e.area;
    out.h_full[j] = e.h_full;
    out.lambda2.at(j) = project_zero_center(e.H);
    sup2[j] = sup_samples(out.lambda2.at(j), M);
  });
  out.lambda1 = out.areas.zero_mean();
  out.residuals.lambda1 = out.lambda1.max_abs();
  for (double s : sup2) out.residuals.lambda2 = std::max(out.residuals.lambda2, s);
  return out;
}

TangentField dH_in_psi(const SphereFunction& psi, const TangentField& phi, const SphereFunction& dpsi, double h) {
  const double n = l2(dpsi);
  if (n == 0.0) return TangentField(phi.grid_ptr(), phi.k_max());
  const SphereFunction base = dpsi.l_max() > psi.l_max() ? psi.resized(dpsi.l_max()) : psi;
  const SphereFunction d = dpsi.resized(base.l_max());
  auto diff = [&](double s) {
    TangentField r = H_field(base + s * d, phi) - H_field(base - s * d, phi);
    r *= 1.0 / (2 * s);
    return r;
  };
  const double s = h / n;
  TangentField d1 = diff(s), d2 = diff(s / 2);
  TangentField r = (4.0 / 3.0) * d2 - (1.0 / 3.0) * d1;
  return project_zero_center(r);
}

std::pair<ProjectiveFunction, TangentField> dLambda_fd(const SphereFunction& psi, const TangentField& phi,
                                                       const Update& d, double h) {
  const double n = std::sqrt(l2(d.dpsi) * l2(d.dpsi) + l2(d.dphi) * l2(d.dphi));
  if (n == 0.0) return {ProjectiveFunction(phi.grid_ptr()), TangentField(phi.grid_ptr(), phi.k_max())};
  const int L = std::max(psi.l_max(), d.dpsi.l_max());
  const SphereFunction p0 = psi.resized(L), dp = d.dpsi.resized(L);
  const TangentField dq = d.dphi.resized(phi.k_max());
  auto diff = [&](double s) {
    const LambdaValue a = lambda_map(p0 + s * dp, phi + s * dq);
    const LambdaValue b = lambda_map(p0 - s * dp, phi - s * dq);
    ProjectiveFunction g(phi.grid_ptr());
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = (a.lambda1[j] - b.lambda1[j]) / (2 * s);
    TangentField x = a.lambda2 - b.lambda2;
    x *= 1.0 / (2 * s);
    return std::make_pair(g, x);
  };
  const double s = h / n;
  auto [g1, x1] = diff(s);
  auto [g2, x2] = diff(s / 2);
  ProjectiveFunction g(phi.grid_ptr());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = (4 * g2[j] - g1[j]) / 3;
  return {g, (4.0 / 3.0) * x2 - (1.0 / 3.0) * x1};
}

// ---- V ----

RightInverseV::RightInverseV(const SphereFunction& psi, const TangentField& phi, double h_fd)
    : psi_(psi), phi_(phi), h_(h_fd), funk_(psi, phi, psi.l_max()), P_(LinearizedState{psi, phi, h_fd}) {}

Update RightInverseV::apply(const SphereFunction& b, const TangentField& xi) const {
  Update u;
  u.dpsi = funk_.right_inverse(b);
  TangentField rhs = project_zero_center(xi.resized(phi_.k_max()));
  rhs -= dH_in_psi(psi_, phi_, u.dpsi, h_);
  u.dphi = P_.solve(rhs);
  return u;
}

Update RightInverseV::apply(const ProjectiveFunction& b, const TangentField& xi) const {
  return apply(b.even_harmonics(funk_.l_max()), xi);
}

Update approx_right_inverse_V(const SphereFunction& psi, const TangentField& phi, const ProjectiveFunction& b,
                              const TangentField& xi) {
  return RightInverseV(psi, phi).apply(b, xi);
}

// ---- iteration ----

SolutionState initial_state(const SphereFunction& f, double t, const SolverConfig& cfg) {
  cfg.validate();
  const int L = cfg.l_max;
  for (int l = L + 1; l <= f.l_max(); ++l)
    for (int m = -l; m <= l; ++m)
      if (f.coeff(l, m) != 0.0) fail(ErrorKind::Config, "f has harmonic content above l_max");
  SolutionState s;
  s.t = t;
  s.psi = t * f.resized(L);
  s.phi = phi_of_f(f.resized(L), cfg.grid(), cfg.k());
  s.phi *= t;
  return s;
}

namespace {

SolutionState trivial_state(double t, const SolverConfig& cfg) {
  SolutionState s;
  s.t = t;
  s.psi = SphereFunction(cfg.l_max);
  s.phi = TangentField(cfg.grid(), cfg.k());
  s.scheme = cfg.scheme;
  return s;
}

std::string trace_text(const std::vector<double>& tr) {
  std::string s;
  for (double r : tr) {
    char b[32];
    std::snprintf(b, sizeof b, "%s%.3e", s.empty() ? "" : " ", r);
    s += b;
  }
  return s;
}

[[noreturn]] void diverged(const SolutionState& s, const std::string& why) {
  fail(ErrorKind::NonConvergence, why + " at t = " + io::format_real(s.t) + "; residual trace: " +
                                      trace_text(s.trace));
}

Update newton_step(const SolutionState& s, const LambdaValue& lam, const SolverConfig& cfg) {
  RightInverseV V(s.psi, s.phi, cfg.h_fd);
  SphereFunction b = lam.lambda1.even_harmonics(cfg.l_max);
  b *= -1.0;
  TangentField xi = lam.lambda2;
  xi *= -1.0;
  return V.apply(b, xi);
}

bool within(const Residuals& r, const SolverConfig& cfg) {
  return r.lambda1 <= cfg.tol_area && r.lambda2 <= cfg.tol_h;
}

double floor_target(const SolverConfig& cfg) { return 1e-3 * std::min(cfg.tol_h, cfg.tol_area); }

SolutionState iterate_hamilton(SolutionState s, const SphereFunction& f, const SolverConfig& cfg) {
  (void)f;
  s.scheme = "hamilton";
  double tau = cfg.tau0, prev = std::numeric_limits<double>::infinity();
  int growth = 0, stall = 0;
  LambdaValue lam = lambda_map(s.psi, s.phi);
  for (;;) {
    const double r = lam.residuals.max();
    s.residuals = lam.residuals;
    s.trace.push_back(r);
    if (!std::isfinite(r)) diverged(s, "residual is not finite");
    if (r <= floor_target(cfg)) break;
    if (within(lam.residuals, cfg) && r > 0.3 * prev) break;  // stagnated below tolerance
    growth = r > prev ? growth + 1 : 0;
    if (growth >= 3) diverged(s, "residual grew over three consecutive iterations");
    stall = r > 0.99 * prev ? stall + 1 : 0;
    if (stall >= 4) diverged(s, "residual stalled above tolerance");
    if (s.iterations >= cfg.max_iters) break;
    prev = r;
    Update d = newton_step(s, lam, cfg);
    const int N = cfg.cutoff(tau);
    s.psi += truncate_degree(d.dpsi, std::min(N, cfg.l_max)).resized(cfg.l_max);
    s.phi += d.dphi.resized(std::min(N, cfg.k())).resized(cfg.k());
    tau = std::pow(tau, 1.5);
    ++s.iterations;
    lam = lambda_map(s.psi, s.phi);
  }
  if (!within(s.residuals, cfg)) diverged(s, "tolerance not reached");
  return s;
}

SolutionState iterate_gauss_newton(SolutionState s, const SolverConfig& cfg) {
  s.scheme = "gauss-newton";
  LambdaValue lam = lambda_map(s.psi, s.phi);
  for (;;) {
    const double r = lam.residuals.max();
    s.residuals = lam.residuals;
    s.trace.push_back(r);
    if (!std::isfinite(r)) diverged(s, "residual is not finite");
    if (r <= floor_target(cfg) || s.iterations >= cfg.max_iters) break;
    Update d = newton_step(s, lam, cfg);
    bool accepted = false;
    for (double alpha = 1.0; alpha >= cfg.min_damping; alpha /= 2) {
      SphereFunction p = s.psi + alpha * d.dpsi.resized(cfg.l_max);
      TangentField q = s.phi + alpha * d.dphi;
      LambdaValue trial;
      try {
        trial = lambda_map(p, q);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::GraphValidity) throw;
        continue;
      }
      if (trial.residuals.max() < r) {
        s.psi = std::move(p);
        s.phi = std::move(q);
        lam = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    ++s.iterations;
  }
  if (!within(s.residuals, cfg)) diverged(s, "tolerance not reached");
  return s;
}

SolutionState start_from(const SphereFunction& f, double t, const SolverConfig& cfg, const SolutionState* warm) {
  if (warm && warm->t != 0.0 && warm->psi.l_max() == cfg.l_max && warm->phi.k_max() == cfg.k()) {
    SolutionState s;
    s.t = t;
    s.psi = (t / warm->t) * warm->psi;
    s.phi = (t / warm->t) * warm->phi;
    return s;
  }
  return initial_state(f, t, cfg);
}

}  // namespace

SolutionState hamilton_iterate(const SphereFunction& f, double t, const SolverConfig& cfg) {
  cfg.validate();
  if (t == 0.0) return trivial_state(t, cfg);
  return iterate_hamilton(initial_state(f, t, cfg), f, cfg);
}

SolutionState gauss_newton(const SphereFunction& f, double t, const SolverConfig& cfg, const SolutionState* warm) {
  cfg.validate();
  if (t == 0.0) {
    SolutionState s = trivial_state(t, cfg);
    s.scheme = "gauss-newton";
    return s;
  }
  return iterate_gauss_newton(start_from(f, t, cfg, warm), cfg);
}

SolutionState solve(const SphereFunction& f, double t, const SolverConfig& cfg, const SolutionState* warm) {
  cfg.validate();
  if (cfg.scheme == "gauss-newton") return gauss_newton(f, t, cfg, warm);
  if (t == 0.0) return trivial_state(t, cfg);
  return iterate_hamilton(start_from(f, t, cfg, warm), f, cfg);
}

std::vector<SolutionState> continuation(const SphereFunction& f, const SolverConfig& cfg, std::string* failure) {
  cfg.validate();
  std::vector<SolutionState> out;
  for (double t : cfg.t_values) {
    const SolutionState* warm = out.empty() ? nullptr : &out.back();
    try {
      out.push_back(solve(f, t, cfg, warm));
    } catch (const Error& e) {
      const std::string msg = "solve failed at t = " + io::format_real(t) + ": " + e.what();
      if (!failure) throw Error(e.kind(), msg);
      *failure = msg;
      break;
    }
  }
  return out;
}

// ---- single direction ----

namespace {

class DirectionSolver {
 public:
  DirectionSolver(const SphereFunction& psi, int K) : psi_(psi), K_(K), M_(default_curve_samples(psi.l_max(), K)) {}

  CircleFunction solve(const EquatorFrame& fr, CircleFunction q) {
    q = project_zero_center(q.resized(K_));
    const std::vector<int> modes = zero_center_modes(K_);
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
      const CircleFunction h = project_zero_center(eval_direction(psi_, fr, q, K_, M_).H);
      const double r = h.max_abs_coeff();
      if (r < 1e-13) return q;
      if (!have_ || (it > 0 && r > 0.5 * prev)) {
        if (have_ && it > 0 && r > 0.9 * prev && fresh_) fail(ErrorKind::NonConvergence, "single-direction solve stalled");
        lu_.compute(p_block(local_symbol(psi_, fr, q, 1e-4, M_), K_));
        have_ = true;
        fresh_ = true;
      } else {
        fresh_ = false;
      }
      Eigen::VectorXd y(modes.size());
      for (std::size_t i = 0; i < modes.size(); ++i) y[i] = h.data()[modes[i]];
      const Eigen::VectorXd x = lu_.solve(y);
      for (std::size_t i = 0; i < modes.size(); ++i) q.data()[modes[i]] -= x[i];
      prev = r;
    }
    fail(ErrorKind::NonConvergence, "single-direction solve did not converge");
  }

 private:
  SphereFunction psi_;
  int K_, M_;
  bool have_ = false, fresh_ = false;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace

CircleFunction solve_direction(const SphereFunction& psi, const EquatorFrame& fr, int k_max,
                               const CircleFunction* guess) {
  DirectionSolver ds(psi, k_max);
  return ds.solve(fr, guess ? *guess : CircleFunction(k_max));
}

// ---- verification ----

bool ZollReport::passed(double tol_h, double tol_area) const {
  return max_h_all < tol_h && area_spread < tol_area && incidence_ok;
}

std::string ZollReport::to_json() const {
  io::Json j;
  j["max_h_all"] = max_h_all;
  j["area_spread"] = area_spread;
  j["residuals"] = {{"lambda1", residuals.lambda1}, {"lambda2", residuals.lambda2}};
  j["incidence_ok"] = incidence_ok;
  io::Json inc = io::Json::array();
  for (const auto& c : incidence)
    inc.push_back({{"p", {c.p[0], c.p[1], c.p[2]}}, {"line", {c.line[0], c.line[1], c.line[2]}},
                   {"matches", c.matches}});
  j["incidence"] = inc;
  j["slope"] = slope;
  j["max_h"] = max_h;
  j["areas"] = areas;
  return io::canonical_dump(j);
}

namespace {

// tangent angle at p of Sigma_sigma, measured from a in the basis (a, b) of T_p
double tangent_angle(const EquatorFrame& fr, const CircleFunction& q, const Vec3& p, const Vec3& a,
                     const Vec3& b) {
  const Vec3 xp = (p - p.dot(fr.v) * fr.v).normalized();
  const double th = fr.angle_of(xp);
  const double qq = q.value(th), w = q.derivative(th);
  const Vec3 dF = std::cos(qq) * fr.tangent(th) + w * variational_vector(fr, th, qq);
  return std::atan2(dF.dot(b), dF.dot(a));
}

double wrap_half(double a) {
  while (a > M_PI / 2) a -= M_PI;
  while (a <= -M_PI / 2) a += M_PI;
  return a;
}

}  // namespace

ZollReport verify_zoll(const SolutionState& s, int incidence_checks, unsigned seed) {
  ZollReport rep;
  const LambdaValue lam = lambda_map(s.psi, s.phi);
  rep.residuals = lam.residuals;
  rep.max_h = lam.h_full;
  rep.areas = lam.areas.values();
  for (double h : rep.max_h) rep.max_h_all = std::max(rep.max_h_all, h);
  const auto [mn, mx] = std::minmax_element(rep.areas.begin(), rep.areas.end());
  rep.area_spread = *mx - *mn;

  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  const int K = s.phi.k_max();
  for (int c = 0; c < incidence_checks; ++c) {
    IncidenceCheck chk;
    chk.p = Vec3(nd(rng), nd(rng), nd(rng)).normalized();
    const EquatorFrame pf = EquatorFrame::make(chk.p);
    const double gamma = std::uniform_real_distribution<double>(0.0, M_PI)(rng);
    chk.line = std::cos(gamma) * pf.e1 + std::sin(gamma) * pf.e2;
    DirectionSolver ds(s.psi, K);
    CircleFunction last(K);
    FieldAt field = [&](const EquatorFrame& fr) {
      last = ds.solve(fr, last);
      return last;
    };
    const std::vector<Vec3> sig = dual_hypersurface(chk.p, field, 24);
    std::vector<double> d(sig.size());
    for (std::size_t i = 0; i < sig.size(); ++i) {
      const EquatorFrame fr = EquatorFrame::make(sig[i]);
      const CircleFunction q = ds.solve(fr, last);
      d[i] = wrap_half(tangent_angle(fr, q, chk.p, pf.e1, pf.e2) - gamma);
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double a = d[i], b = d[(i + 1) % d.size()];
      if ((a < 0) != (b < 0) && std::abs(a - b) < M_PI / 2) ++chk.matches;
    }
    rep.incidence_ok = rep.incidence_ok && chk.matches == 1;
    rep.incidence.push_back(chk);
  }
  return rep;
}

double fit_order(const std::vector<SolutionState>& states, const SphereFunction& f) {
  std::vector<double> x, y;
  for (const auto& s : states) {
    if (s.t == 0.0) continue;
    const SphereFunction d = s.psi - s.t * f.resized(s.psi.l_max());
    const double n = d.l2_norm();
    if (n <= 0.0) continue;
    x.push_back(std::log(std::abs(s.t)));
    y.push_back(std::log(n));
  }
  if (x.size() < 2) fail(ErrorKind::Domain, "order fit needs two nonzero t values");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= x.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) fail(ErrorKind::Domain, "order fit needs distinct t values");
  return sxy / sxx;
}

// ---- equivariance ----

namespace {

// Phi at direction w in EquatorFrame::make(w)
CircleFunction field_at(const SolutionState& s, const Vec3& w) {
  const long k = s.phi.grid().find(w);
  if (k >= 0) {
    const std::size_t kk = static_cast<std::size_t>(k);
    if (s.phi.grid().dir(kk).dot(w) > 0) return s.phi.at(kk);
    return antipodal(s.phi.at(kk));
  }
  return solve_direction(s.psi, EquatorFrame::make(w), s.phi.k_max());
}

double meridian_offset(const EquatorFrame& fr, const CircleFunction& q, const Vec3& y) {
  const Vec3 xp = (y - y.dot(fr.v) * fr.v).normalized();
  return std::abs(std::asin(std::clamp(y.dot(fr.v), -1.0, 1.0)) - q.value(fr.angle_of(xp)));
}

}  // namespace

EquivarianceReport equivariance_check(const SolutionState& s, const OrthogonalTransform& A, int every) {
  EquivarianceReport rep;
  const SphereGrid sg = SphereGrid::for_lmax(s.psi.l_max());
  const SphereFunction ra = rotate(s.psi, A);
  for (const Vec3& x : sg.nodes()) rep.psi = std::max(rep.psi, std::abs(ra.evaluate(x) - s.psi.evaluate(x)));

  const DirectionGrid& g = s.phi.grid();
  const int n_theta = 64;
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < g.size(); j += static_cast<std::size_t>(std::max(1, every))) idx.push_back(j);
  std::vector<double> dphi(idx.size(), 0.0), haus(idx.size(), 0.0);
  parallel_for(idx.size(), [&](std::size_t i) {
    const std::size_t j = idx[i];
    const EquatorFrame& fv = g.frame(j);
    const Vec3 w = A(fv.v);
    const EquatorFrame fw = EquatorFrame::make(w);
    const CircleFunction qv = s.phi.at(j);
    const CircleFunction qw = field_at(s, w);
    const OrthogonalTransform Ai = A.inverse();
    for (int k = 0; k < n_theta; ++k) {
      const double th = 2.0 * M_PI * k / n_theta;
      const Vec3 x = fv.point(th);
      dphi[i] = std::max(dphi[i], std::abs(qw.value(fw.angle_of(A(x))) - qv.value(th)));
      haus[i] = std::max(haus[i], meridian_offset(fw, qw, A(graph_point(fv, th, qv.value(th)))));
      haus[i] = std::max(haus[i], meridian_offset(fv, qv, Ai(graph_point(fw, th, qw.value(th)))));
    }
  });
  for (std::size_t i = 0; i < idx.size(); ++i) {
    rep.phi = std::max(rep.phi, dphi[i]);
    rep.hausdorff = std::max(rep.hausdorff, haus[i]);
  }
  return rep;
}

// ---- exports ----

void export_embedding_obj(std::ostream& os, const SphereFunction& psi, int n_lat, int n_lon) {
  if (n_lat < 2 || n_lon < 3) fail(ErrorKind::Domain, "mesh resolution too small");
  char buf[96];
  auto vertex = [&](const Vec3& x) {
    const Vec3 y = std::exp(psi.evaluate(x)) * x;
    std::snprintf(buf, sizeof buf, "v %.12e %.12e %.12e\n", y[0], y[1], y[2]);
    os << buf;
  };
  os << "# radial graph r = exp(psi), l_max " << psi.l_max() << "\n";
  vertex(Vec3(0, 0, 1));
  for (int i = 1; i < n_lat; ++i) {
    const double th = M_PI * i / n_lat;
    for (int j = 0; j < n_lon; ++j) {
      const double ph = 2.0 * M_PI * j / n_lon;
      vertex(Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)));
    }
  }
  vertex(Vec3(0, 0, -1));
  auto id = [&](int ring, int j) { return 2 + (ring - 1) * n_lon + (j % n_lon); };
  const int south = 2 + (n_lat - 1) * n_lon;
  for (int j = 0; j < n_lon; ++j) os << "f 1 " << id(1, j) << " " << id(1, j + 1) << "\n";
  for (int i = 1; i + 1 < n_lat; ++i)
    for (int j = 0; j < n_lon; ++j) {
      os << "f " << id(i, j) << " " << id(i + 1, j) << " " << id(i + 1, j + 1) << "\n";
      os << "f " << id(i, j) << " " << id(i + 1, j + 1) << " " << id(i, j + 1) << "\n";
    }
  for (int j = 0; j < n_lon; ++j) os << "f " << id(n_lat - 1, j) << " " << south << " " << id(n_lat - 1, j + 1) << "\n";
}

void export_curves_csv(std::ostream& os, const SolutionState& s, int samples) {
  os << "v_index,theta,x,y,z\n";
  char buf[128];
  for (std::size_t j = 0; j < s.phi.size(); ++j)
    for (int k = 0; k < samples; ++k) {
      const double th = 2.0 * M_PI * k / samples;
      const Vec3 p = graph_point(s.phi, j, th);
      std::snprintf(buf, sizeof buf, "%zu,%.12e,%.12e,%.12e,%.12e\n", j, th, p[0], p[1], p[2]);
      os << buf;
    }
}

std::string to_json(const SolutionState& s) {
  io::Json j;
  j["t"] = s.t;
  j["scheme"] = s.scheme;
  j["iterations"] = s.iterations;
  j["residuals"] = {{"lambda1", s.residuals.lambda1}, {"lambda2", s.residuals.lambda2}};
  j["trace"] = s.trace;
  j["psi"] = {{"l_max", s.psi.l_max()}, {"coeffs", s.psi.coeffs()}};
  io::Json dirs = io::Json::array(), four = io::Json::array();
  for (std::size_t i = 0; i < s.phi.size(); ++i) {
    const Vec3& v = s.phi.grid().dir(i);
    dirs.push_back({v[0], v[1], v[2]});
    four.push_back(s.phi.at(i).data());
  }
  j["phi"] = {{"k_max", s.phi.k_max()}, {"directions", dirs}, {"fourier", four}};
  return io::canonical_dump(j);
}

}  // namespace zf
