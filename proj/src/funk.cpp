#include "zollforge/funk.hpp"

#include <cmath>
#include <ostream>

#include "zollforge/error.hpp"
#include "zollforge/kernels.hpp"
#include "zollforge/parallel.hpp"

namespace zf {

ProjectiveFunction::ProjectiveFunction(std::shared_ptr<const DirectionGrid> grid)
    : grid_(std::move(grid)), v_(grid_->size(), 0.0) {}

ProjectiveFunction::ProjectiveFunction(std::shared_ptr<const DirectionGrid> grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
  if (v_.size() != grid_->size()) fail(ErrorKind::Config, "projective function size mismatch");
}

ProjectiveFunction ProjectiveFunction::from_function(std::shared_ptr<const DirectionGrid> grid,
                                                     const SphereFunction& f) {
  ProjectiveFunction g(grid);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = f.evaluate(g.grid().dir(j));
  return g;
}

double ProjectiveFunction::mean() const {
  double s = 0.0, w = 0.0;
  for (std::size_t j = 0; j < v_.size(); ++j) {
    s += grid_->weight(j) * v_[j];
    w += grid_->weight(j);
  }
  return s / w;
}

ProjectiveFunction ProjectiveFunction::zero_mean() const {
  ProjectiveFunction g = *this;
  const double m = mean();
  for (double& x : g.v_) x -= m;
  return g;
}

double ProjectiveFunction::dot(const ProjectiveFunction& o) const {
  double s = 0.0;
  for (std::size_t j = 0; j < v_.size(); ++j) s += grid_->weight(j) * v_[j] * o.v_[j];
  return s;
}

double ProjectiveFunction::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

SphereFunction ProjectiveFunction::even_harmonics(int L) const {
  SphereFunction f(L);
  std::vector<double> y(sh_count(L));
  for (std::size_t j = 0; j < v_.size(); ++j) {
    sh_eval(L, grid_->dir(j), y.data());
    const double s = 2.0 * grid_->weight(j) * v_[j];
    for (int l = 0; l <= L; l += 2)
      for (int m = -l; m <= l; ++m) f.coeffs()[sh_index(l, m)] += s * y[sh_index(l, m)];
  }
  return f;
}

double funk_at(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v,
               const SphereFunction& f, int M) {
  if (M <= 0) M = default_curve_samples(std::max(psi.l_max(), f.l_max()), phi_v.k_max());
  const CurveSamples c = sample_curve(psi, fr, phi_v, M);
  const CurveDensities d = curve_densities(c);
  double s = 0.0;
  for (int i = 0; i < M; ++i) s += f.evaluate(c.F[i]) * d.QJ[i];
  return s * 2.0 * M_PI / M;
}

FunkSystem::FunkSystem(const SphereFunction& psi, const TangentField& phi, int L, int M)
    : grid_(phi.grid_ptr()), L_(L) {
  const std::size_t nd = grid_->size();
  const int nh = sh_count(L);
  if (M <= 0) M = default_curve_samples(std::max(psi.l_max(), L), phi.k_max());
  F_.resize(nd, nh);
  std::vector<std::vector<double>> rows(nd);
  parallel_for(nd, [&](std::size_t j) {
    const CurveSamples c = sample_curve(psi, grid_->frame(j), phi.at(j), M);
    const CurveDensities d = curve_densities(c);
    std::vector<double> row(nh, 0.0), y(nh);
    for (int i = 0; i < M; ++i) {
      sh_eval(L, c.F[i], y.data());
      kern::axpy(d.QJ[i] * 2.0 * M_PI / M, y.data(), row.data(), nh);
    }
    rows[j] = std::move(row);
  });
  for (std::size_t j = 0; j < nd; ++j)
    for (int k = 0; k < nh; ++k) F_(j, k) = rows[j][k];
  for (int l = 0; l <= L; l += 2)
    for (int m = -l; m <= l; ++m) even_.push_back(sh_index(l, m));
  Ydir_.resize(nd, even_.size());
  std::vector<double> y(nh);
  for (std::size_t j = 0; j < nd; ++j) {
    sh_eval(L, grid_->dir(j), y.data());
    for (std::size_t e = 0; e < even_.size(); ++e) Ydir_(j, e) = y[even_[e]];
  }
}

ProjectiveFunction FunkSystem::apply(const SphereFunction& f) const {
  const SphereFunction g = f.l_max() == L_ ? f : f.resized(L_);
  Eigen::Map<const Eigen::VectorXd> c(g.coeffs().data(), g.coeffs().size());
  Eigen::VectorXd out = F_ * c;
  return ProjectiveFunction(grid_, std::vector<double>(out.data(), out.data() + out.size()));
}

SphereFunction FunkSystem::adjoint(const ProjectiveFunction& g) const {
  Eigen::VectorXd wg(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) wg[j] = grid_->weight(j) * g[j];
  Eigen::VectorXd c = F_.transpose() * wg;
  return SphereFunction(L_, std::vector<double>(c.data(), c.data() + c.size()));
}

void FunkSystem::assemble_L() const {
  if (have_L_) return;
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(grid_->weights().data(), grid_->size());
  const Eigen::MatrixXd B = F_.transpose() * w.asDiagonal() * Ydir_;  // F* of each even basis function
  Lc_ = 2.0 * B.transpose() * B;
  Lc_ = 0.5 * (Lc_ + Lc_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Lc_, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double lo = ev.cwiseAbs().minCoeff(), hi = ev.cwiseAbs().maxCoeff();
  cond_ = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  ldlt_.compute(Lc_);
  have_L_ = true;
}

const Eigen::MatrixXd& FunkSystem::operator_L() const {
  assemble_L();
  return Lc_;
}

double FunkSystem::condition_number() const {
  assemble_L();
  return cond_;
}

SphereFunction FunkSystem::right_inverse(const SphereFunction& b) const {
  assemble_L();
  if (!(cond_ < 1e8)) fail(ErrorKind::Invertibility, "F F* is ill-conditioned (cond >= 1e8)");
  Eigen::VectorXd be(even_.size());
  for (std::size_t e = 0; e < even_.size(); ++e)
    be[e] = even_[e] < static_cast<int>(b.coeffs().size()) ? b.coeffs()[even_[e]] : 0.0;
  const Eigen::VectorXd x = ldlt_.solve(be);
  const Eigen::VectorXd g = Ydir_ * x;
  return adjoint(ProjectiveFunction(grid_, std::vector<double>(g.data(), g.data() + g.size())));
}

SphereFunction FunkSystem::right_inverse(const ProjectiveFunction& g) const {
  return right_inverse(g.even_harmonics(L_));
}

ProjectiveFunction funk(const SphereFunction& psi, const TangentField& phi, const SphereFunction& f) {
  return FunkSystem(psi, phi, f.l_max()).apply(f);
}

SphereFunction dual_funk(const SphereFunction& psi, const TangentField& phi, const ProjectiveFunction& g, int L) {
  return FunkSystem(psi, phi, L).adjoint(g);
}

SphereFunction right_inverse_R(const SphereFunction& psi, const TangentField& phi, const ProjectiveFunction& g,
                               int L) {
  return FunkSystem(psi, phi, L).right_inverse(g);
}

namespace {

struct Curve {
  EquatorFrame fr;
  CircleFunction phi, qt;
};

Curve make_curve(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi) {
  const int M = default_curve_samples(psi.l_max(), phi.k_max());
  const CurveSamples c = sample_curve(psi, fr, phi, M);
  const CurveDensities d = curve_densities(c);
  std::vector<double> qt(M);
  for (int i = 0; i < M; ++i) qt[i] = d.Q[i] * d.T[i];
  return {fr, phi, circle_sampler((M - 1) / 2, M).analyze(qt.data())};
}

// q the graph height of the curve at y when y lies on it
double height_mismatch(const Curve& c, const Vec3& y) {
  return std::asin(std::clamp(y.dot(c.fr.v), -1.0, 1.0)) - c.phi.value(c.fr.angle_of(y));
}

Vec3 unit_normal(const Curve& c, double theta) {
  const double q = c.phi.value(theta), w = c.phi.derivative(theta);
  const Vec3 y = graph_point(c.fr, theta, q);
  const Vec3 dF = std::cos(q) * c.fr.tangent(theta) + w * variational_vector(c.fr, theta, q);
  return y.cross(dF).normalized();
}

KernelValue kernel(const Curve& a, const Curve& b) {
  Vec3 axis = a.fr.v.cross(b.fr.v);
  if (axis.norm() < 1e-12) fail(ErrorKind::Domain, "kernel_K is undefined on the diagonal");
  axis.normalize();
  KernelValue kv;
  for (int s : {1, -1}) {
    double th = a.fr.angle_of(s * axis);
    auto g = [&](double t) { return height_mismatch(b, graph_point(a.fr, t, a.phi.value(t))); };
    for (int it = 0; it < 60; ++it) {
      const double h = 1e-6;
      const double gv = g(th), dg = (g(th + h) - g(th - h)) / (2 * h);
      if (dg == 0.0) break;
      const double step = gv / dg;
      th -= step;
      if (std::abs(step) < 1e-14) break;
    }
    const Vec3 y = graph_point(a.fr, th, a.phi.value(th));
    const double tb = b.fr.angle_of(y);
    const double c = unit_normal(a, th).dot(unit_normal(b, tb));
    const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
    kv.min_sin = std::min(kv.min_sin, sn);
    kv.value += a.qt.value(th) * b.qt.value(tb) / sn;
  }
  kv.near_tangent = kv.min_sin < 1e-3;
  return kv;
}

}  // namespace

KernelValue kernel_K(const SphereFunction& psi, const EquatorFrame& fu, const CircleFunction& phi_u,
                     const EquatorFrame& fv, const CircleFunction& phi_v) {
  return kernel(make_curve(psi, fu, phi_u), make_curve(psi, fv, phi_v));
}

KernelValue kernel_K(const SphereFunction& psi, const TangentField& phi, std::size_t u, std::size_t v) {
  return kernel_K(psi, phi.grid().frame(u), phi.at(u), phi.grid().frame(v), phi.at(v));
}

std::vector<std::pair<int, double>> spectrum_L(const FunkSystem& sys) {
  const Eigen::MatrixXd& Lc = sys.operator_L();
  std::vector<std::pair<int, double>> out;
  std::size_t e = 0;
  for (int l = 0; l <= sys.l_max(); l += 2) {
    double s = 0.0;
    for (int m = -l; m <= l; ++m, ++e) s += Lc(e, e);
    out.emplace_back(l, s / (2 * l + 1));
  }
  return out;
}

void write_spectrum_csv(std::ostream& os, const std::vector<std::pair<int, double>>& spec) {
  os << "l,eigenvalue\n";
  char buf[64];
  for (const auto& [l, ev] : spec) {
    std::snprintf(buf, sizeof buf, "%d,%.12e\n", l, ev);
    os << buf;
  }
}

void write_kernel_csv(std::ostream& os, const SphereFunction& psi, const TangentField& phi) {
  const std::size_t n = phi.size();
  std::vector<Curve> curves(n);
  parallel_for(n, [&](std::size_t j) { curves[j] = make_curve(psi, phi.grid().frame(j), phi.at(j)); });
  std::vector<std::vector<double>> K(n, std::vector<double>(n, 0.0));
  parallel_for(n, [&](std::size_t u) {
    for (std::size_t v = 0; v < n; ++v)
      if (u != v) K[u][v] = kernel(curves[u], curves[v]).value;
  });
  os << "u_index,v_index,K\n";
  char buf[96];
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.12e\n", u, v, K[u][v]);
      os << buf;
    }
}

}  // namespace zf
