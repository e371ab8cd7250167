#include "zollforge/equator.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "json.hpp"
#include "zollforge/error.hpp"
#include "zollforge/kernels.hpp"

namespace zf {

EquatorFrame EquatorFrame::make(const Vec3& v_in) {
  EquatorFrame f;
  f.v = v_in.normalized();
  const Vec3 axis = std::abs(f.v[2]) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
  f.e1 = axis.cross(f.v).normalized();
  f.e2 = f.v.cross(f.e1);
  return f;
}

EquatorFrame EquatorFrame::rotated(double alpha) const {
  EquatorFrame f = *this;
  f.e1 = std::cos(alpha) * e1 + std::sin(alpha) * e2;
  f.e2 = v.cross(f.e1);
  return f;
}

DirectionGrid::DirectionGrid(int n_theta_full, int n_phi) : n_theta_full_(n_theta_full), n_phi_(n_phi) {
  if (n_theta_full < 2 || n_theta_full % 2 != 0 || n_phi < 2 || n_phi % 2 != 0)
    fail(ErrorKind::Config, "direction grid needs even ring and longitude counts");
  SphereGrid full(n_theta_full, n_phi);
  for (int i = 0; i < n_theta_full / 2; ++i)
    for (int j = 0; j < n_phi; ++j) {
      const std::size_t k = full.at(i, j);
      dirs_.push_back(full.nodes()[k]);
      w_.push_back(full.weights()[k]);
      frames_.push_back(EquatorFrame::make(full.nodes()[k]));
    }
}

std::shared_ptr<const DirectionGrid> DirectionGrid::for_lmax(int L) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const DirectionGrid>> cache;
  std::lock_guard<std::mutex> g(mu);
  auto& slot = cache[L];
  if (!slot) {
    int nt = L + 2;
    if (nt % 2) ++nt;
    int np = 12;
    while (np < 2 * L + 2) np += 12;
    slot = std::make_shared<DirectionGrid>(nt, np);
  }
  return slot;
}

long DirectionGrid::find(const Vec3& u, double tol) const {
  for (std::size_t j = 0; j < dirs_.size(); ++j)
    if ((dirs_[j] - u).norm() < tol || (dirs_[j] + u).norm() < tol) return static_cast<long>(j);
  return -1;
}

CircleFunction::CircleFunction(int k_max, std::vector<double> c) : k_(k_max), c_(std::move(c)) {
  if (static_cast<int>(c_.size()) != 2 * k_max + 1)
    fail(ErrorKind::Config, "Fourier coefficient count does not match k_max");
}

double CircleFunction::value(double t) const {
  double s = c_[0];
  for (int k = 1; k <= k_; ++k) s += c_[2 * k - 1] * std::cos(k * t) + c_[2 * k] * std::sin(k * t);
  return s;
}

double CircleFunction::derivative(double t, int order) const {
  return derivative_series(order).value(t);
}

CircleFunction CircleFunction::derivative_series(int order) const {
  CircleFunction d(k_);
  for (int k = 1; k <= k_; ++k) {
    double a = c_[2 * k - 1], b = c_[2 * k];
    for (int o = 0; o < order; ++o) {
      const double na = k * b, nb = -k * a;
      a = na;
      b = nb;
    }
    d.c_[2 * k - 1] = a;
    d.c_[2 * k] = b;
  }
  if (order == 0) d.c_[0] = c_[0];
  return d;
}

std::vector<double> CircleFunction::samples(int M) const {
  std::vector<double> s(M);
  for (int j = 0; j < M; ++j) s[j] = value(2.0 * M_PI * j / M);
  return s;
}

CircleFunction CircleFunction::from_samples(const std::vector<double>& s, int k_max) {
  const int M = static_cast<int>(s.size());
  if (M < 2 * k_max + 1) fail(ErrorKind::Config, "too few circle samples for k_max");
  return circle_sampler(k_max, M).analyze(s.data());
}

CircleFunction CircleFunction::resized(int k_max) const {
  CircleFunction r(k_max);
  const int n = 2 * std::min(k_max, k_) + 1;
  for (int i = 0; i < n; ++i) r.c_[i] = c_[i];
  return r;
}

double CircleFunction::max_abs_coeff() const {
  double m = 0.0;
  for (double c : c_) m = std::max(m, std::abs(c));
  return m;
}

CircleFunction& CircleFunction::operator+=(const CircleFunction& o) {
  if (o.k_ > k_) *this = resized(o.k_);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

CircleFunction& CircleFunction::operator-=(const CircleFunction& o) {
  if (o.k_ > k_) *this = resized(o.k_);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

CircleFunction& CircleFunction::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

CircleFunction operator+(CircleFunction a, const CircleFunction& b) { return a += b; }
CircleFunction operator-(CircleFunction a, const CircleFunction& b) { return a -= b; }
CircleFunction operator*(double s, CircleFunction a) { return a *= s; }

CircleSampler::CircleSampler(int K, int M) : k_(K), M_(M) {
  if (M < 2 * K + 1) fail(ErrorKind::Config, "too few circle samples for k_max");
  const int nc = 2 * K + 1;
  for (auto& S : S_) S.assign(static_cast<std::size_t>(M) * nc, 0.0);
  A_.assign(static_cast<std::size_t>(nc) * M, 0.0);
  for (int j = 0; j < M; ++j) {
    const double t = angle(j);
    S_[0][j * nc] = 1.0;
    A_[j] = 1.0 / M;
    for (int k = 1; k <= K; ++k) {
      const double c = std::cos(k * t), s = std::sin(k * t);
      S_[0][j * nc + 2 * k - 1] = c;
      S_[0][j * nc + 2 * k] = s;
      S_[1][j * nc + 2 * k - 1] = -k * s;
      S_[1][j * nc + 2 * k] = k * c;
      S_[2][j * nc + 2 * k - 1] = -double(k) * k * c;
      S_[2][j * nc + 2 * k] = -double(k) * k * s;
      // the Nyquist cosine (2k == M) is sampled with weight 1/M
      const double wa = (2 * k == M) ? 1.0 / M : 2.0 / M;
      A_[(2 * k - 1) * M + j] = wa * c;
      A_[(2 * k) * M + j] = 2.0 / M * s;
    }
  }
  D_.assign(static_cast<std::size_t>(M) * M, 0.0);
  const double h = 2.0 * M_PI / M;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      if (i == j) continue;
      const double x = (i - j) * h / 2.0;
      const double sgn = ((i - j) % 2 == 0) ? 1.0 : -1.0;
      D_[i * M + j] = (M % 2 == 0) ? 0.5 * sgn / std::tan(x) : 0.5 * sgn / std::sin(x);
    }
}

void CircleSampler::synth(const CircleFunction& f, int order, double* out) const {
  const CircleFunction g = f.k_max() == k_ ? f : f.resized(k_);
  kern::gemv(S_[order].data(), M_, 2 * k_ + 1, g.data().data(), out);
}

CircleFunction CircleSampler::analyze(const double* s) const {
  CircleFunction f(k_);
  kern::gemv(A_.data(), 2 * k_ + 1, M_, s, f.data().data());
  return f;
}

void CircleSampler::diff(const double* s, double* out) const { kern::gemv(D_.data(), M_, M_, s, out); }

const CircleSampler& circle_sampler(int K, int M) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<CircleSampler>> cache;
  std::lock_guard<std::mutex> g(mu);
  auto& slot = cache[{K, M}];
  if (!slot) slot = std::make_unique<CircleSampler>(K, M);
  return *slot;
}

TangentField::TangentField(std::shared_ptr<const DirectionGrid> grid, int k_max)
    : grid_(std::move(grid)), k_(k_max), per_(grid_->size(), CircleFunction(k_max)) {}

double TangentField::value(std::size_t j, int sign, const Vec3& x) const {
  const EquatorFrame& fr = grid_->frame(j);
  const double th = fr.angle_of(x);
  return sign > 0 ? per_[j].value(th) : -per_[j].value(th);
}

double TangentField::max_abs() const {
  double m = 0.0;
  const int M = 4 * k_ + 4;
  for (const auto& c : per_)
    for (double s : c.samples(M)) m = std::max(m, std::abs(s));
  return m;
}

TangentField TangentField::resized(int k_max) const {
  TangentField r(grid_, k_max);
  for (std::size_t j = 0; j < per_.size(); ++j) r.per_[j] = per_[j].resized(k_max);
  return r;
}

TangentField& TangentField::operator+=(const TangentField& o) {
  for (std::size_t j = 0; j < per_.size(); ++j) per_[j] += o.per_[j];
  k_ = std::max(k_, o.k_);
  return *this;
}

TangentField& TangentField::operator-=(const TangentField& o) {
  for (std::size_t j = 0; j < per_.size(); ++j) per_[j] -= o.per_[j];
  k_ = std::max(k_, o.k_);
  return *this;
}

TangentField& TangentField::operator*=(double s) {
  for (auto& c : per_) c *= s;
  return *this;
}

TangentField operator+(TangentField a, const TangentField& b) { return a += b; }
TangentField operator-(TangentField a, const TangentField& b) { return a -= b; }
TangentField operator*(double s, TangentField a) { return a *= s; }

Vec3 graph_point(const EquatorFrame& fr, double theta, double q) {
  if (!(std::abs(q) < M_PI / 2)) fail(ErrorKind::GraphValidity, "|Phi| must stay below pi/2");
  return std::cos(q) * fr.point(theta) + std::sin(q) * fr.v;
}

Vec3 graph_point(const TangentField& phi, std::size_t j, double theta) {
  return graph_point(phi.grid().frame(j), theta, phi.at(j).value(theta));
}

Vec3 variational_vector(const EquatorFrame& fr, double theta, double q) {
  return -std::sin(q) * fr.point(theta) + std::cos(q) * fr.v;
}

Vec3 variational_vector(const TangentField& phi, std::size_t j, double theta) {
  return variational_vector(phi.grid().frame(j), theta, phi.at(j).value(theta));
}

CircleFunction restrict_to(const SphereFunction& f, const EquatorFrame& fr, const CircleFunction& phi_v,
                           int k_max, int M) {
  const CircleSampler& cs = circle_sampler(phi_v.k_max(), M);
  std::vector<double> q(M), s(M);
  cs.synth(phi_v, 0, q.data());
  for (int j = 0; j < M; ++j) sh_jet(f.l_max(), f.coeffs().data(), graph_point(fr, cs.angle(j), q[j]), &s[j]);
  return circle_sampler(k_max, M).analyze(s.data());
}

CircleFunction restrict_to(const SphereFunction& f, const TangentField& phi, std::size_t j, int k_max,
                           int M) {
  if (M == 0) M = 4 * std::max(k_max, phi.k_max()) + 4;
  return restrict_to(f, phi.grid().frame(j), phi.at(j), k_max, M);
}

std::vector<Eigen::Vector2d> center_map(const TangentField& phi) {
  std::vector<Eigen::Vector2d> out(phi.size());
  for (std::size_t j = 0; j < phi.size(); ++j) {
    const auto& c = phi.at(j);
    out[j] = c.k_max() >= 1 ? Eigen::Vector2d(M_PI * c.a(1), M_PI * c.b(1)) : Eigen::Vector2d::Zero();
  }
  return out;
}

CircleFunction project_zero_center(const CircleFunction& f) {
  CircleFunction g = f;
  if (g.k_max() >= 1) {
    g.a(1) = 0.0;
    g.b(1) = 0.0;
  }
  return g;
}

CircleFunction antipodal(const CircleFunction& f) {
  // x_{-v}(t) = x_v(pi - t)
  CircleFunction g = f;
  g.a(0) = -f.a(0);
  for (int k = 1; k <= f.k_max(); ++k) {
    const double s = (k % 2) ? -1.0 : 1.0;
    g.a(k) = -s * f.a(k);
    g.b(k) = s * f.b(k);
  }
  return g;
}

TangentField project_zero_center(const TangentField& phi) {
  TangentField r = phi;
  for (std::size_t j = 0; j < r.size(); ++j) r.at(j) = project_zero_center(r.at(j));
  return r;
}

std::vector<Vec3> dual_hypersurface(const Vec3& p_in, const FieldAt& phi, int n_beta) {
  const Vec3 p = p_in.normalized();
  const EquatorFrame pf = EquatorFrame::make(p);
  std::vector<Vec3> out;
  out.reserve(n_beta);
  for (int i = 0; i < n_beta; ++i) {
    const double beta = M_PI * i / n_beta;
    const Vec3 u = std::cos(beta) * pf.e1 + std::sin(beta) * pf.e2;
    auto residual = [&](double s) {
      const Vec3 v = std::cos(s) * u + std::sin(s) * p;
      const EquatorFrame fr = EquatorFrame::make(v);
      const Vec3 xp = (p - p.dot(fr.v) * fr.v).normalized();
      return std::asin(std::clamp(p.dot(fr.v), -1.0, 1.0)) - phi(fr).value(fr.angle_of(xp));
    };
    double lo = -1.0, hi = 1.0;
    double rlo = residual(lo), rhi = residual(hi);
    if (!(rlo < 0.0 && rhi > 0.0))
      fail(ErrorKind::Numerical, "dual set: incidence residual does not bracket a root at beta sample " +
                                     std::to_string(i));
    int it = 0;
    for (; it < 80 && hi - lo > 1e-10; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double r = residual(mid);
      if (r == 0.0) {
        lo = hi = mid;
        break;
      }
      if (r < 0.0) lo = mid;
      else hi = mid;
    }
    if (hi - lo > 1e-10)
      fail(ErrorKind::Numerical, "dual set: bisection did not reach tolerance, width " + std::to_string(hi - lo));
    const double s = 0.5 * (lo + hi);
    out.push_back(std::cos(s) * u + std::sin(s) * p);
  }
  return out;
}

std::string to_json(const TangentField& phi) {
  nlohmann::ordered_json j;
  j["k_max"] = phi.k_max();
  auto dirs = nlohmann::ordered_json::array();
  auto four = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const Vec3& v = phi.grid().dir(i);
    dirs.push_back({v[0], v[1], v[2]});
    four.push_back(phi.at(i).data());
  }
  j["directions"] = dirs;
  j["fourier"] = four;
  return j.dump();
}

}  // namespace zf
