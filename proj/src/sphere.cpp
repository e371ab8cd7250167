#include "zollforge/sphere.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>

#include "json.hpp"
#include "zollforge/error.hpp"
#include "zollforge/kernels.hpp"

namespace zf {

void sh_eval(int L, const Vec3& x, double* val, Vec3* grad, Mat3* hess) {
  const double X = x[0], Y = x[1], Z = x[2];
  const int order = hess ? 2 : (grad ? 1 : 0);
  std::vector<double> C(L + 1), S(L + 1);
  C[0] = 1.0;
  S[0] = 0.0;
  for (int m = 1; m <= L; ++m) {
    C[m] = X * C[m - 1] - Y * S[m - 1];
    S[m] = X * S[m - 1] + Y * C[m - 1];
  }
  std::vector<double> q(L + 1), dq(L + 1), d2q(L + 1);
  const Mat3 P = Mat3::Identity() - x * x.transpose();
  double qmm = 1.0 / std::sqrt(4.0 * M_PI);
  for (int m = 0; m <= L; ++m) {
    if (m > 0) qmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    q[m] = qmm;
    dq[m] = 0.0;
    d2q[m] = 0.0;
    if (m + 1 <= L) {
      const double c = std::sqrt(2.0 * m + 3.0);
      q[m + 1] = Z * c * qmm;
      dq[m + 1] = c * qmm;
      d2q[m + 1] = 0.0;
    }
    for (int l = m + 2; l <= L; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) /
                                 (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      q[l] = a * (Z * q[l - 1] - b * q[l - 2]);
      dq[l] = a * (q[l - 1] + Z * dq[l - 1] - b * dq[l - 2]);
      d2q[l] = a * (2.0 * dq[l - 1] + Z * d2q[l - 1] - b * d2q[l - 2]);
    }
    const double s = m == 0 ? 1.0 : M_SQRT2;
    // ambient partials of C_m and S_m
    const double Cx = m >= 1 ? m * C[m - 1] : 0.0, Cy = m >= 1 ? -m * S[m - 1] : 0.0;
    const double Sx = m >= 1 ? m * S[m - 1] : 0.0, Sy = m >= 1 ? m * C[m - 1] : 0.0;
    const double mm1 = double(m) * (m - 1);
    const double Cxx = m >= 2 ? mm1 * C[m - 2] : 0.0, Cxy = m >= 2 ? -mm1 * S[m - 2] : 0.0;
    const double Sxx = m >= 2 ? mm1 * S[m - 2] : 0.0, Sxy = m >= 2 ? mm1 * C[m - 2] : 0.0;
    for (int l = m; l <= L; ++l) {
      for (int part = 0; part < (m == 0 ? 1 : 2); ++part) {
        const bool cosine = part == 0;
        const int mi = cosine ? m : -m;
        const int k = sh_index(l, mi);
        const double F = cosine ? C[m] : S[m];
        val[k] = s * q[l] * F;
        if (order >= 1) {
          Vec3 g(s * q[l] * (cosine ? Cx : Sx), s * q[l] * (cosine ? Cy : Sy), s * dq[l] * F);
          grad[k] = P * g;
          if (order >= 2) {
            Mat3 D;
            const double fxx = cosine ? Cxx : Sxx, fxy = cosine ? Cxy : Sxy;
            const double fx = cosine ? Cx : Sx, fy = cosine ? Cy : Sy;
            D(0, 0) = s * q[l] * fxx;
            D(1, 1) = -s * q[l] * fxx;
            D(0, 1) = D(1, 0) = s * q[l] * fxy;
            D(0, 2) = D(2, 0) = s * dq[l] * fx;
            D(1, 2) = D(2, 1) = s * dq[l] * fy;
            D(2, 2) = s * d2q[l] * F;
            const double radial = g.dot(x);
            hess[k] = P * (D - radial * Mat3::Identity()) * P;
          }
        }
      }
    }
  }
}

void sh_jet(int L, const double* coef, const Vec3& x, double* val, Vec3* grad, Mat3* hess) {
  const double X = x[0], Y = x[1], Z = x[2];
  const int order = hess ? 2 : (grad ? 1 : 0);
  double C[64], S[64], q[64], dq[64], d2q[64];
  std::vector<double> big;
  double* Cp = C;
  double* Sp = S;
  double* qp = q;
  double* dqp = dq;
  double* d2qp = d2q;
  if (L + 1 > 64) {
    big.resize(5 * (L + 1));
    Cp = big.data();
    Sp = Cp + L + 1;
    qp = Sp + L + 1;
    dqp = qp + L + 1;
    d2qp = dqp + L + 1;
  }
  Cp[0] = 1.0;
  Sp[0] = 0.0;
  for (int m = 1; m <= L; ++m) {
    Cp[m] = X * Cp[m - 1] - Y * Sp[m - 1];
    Sp[m] = X * Sp[m - 1] + Y * Cp[m - 1];
  }
  double v = 0.0;
  Vec3 g = Vec3::Zero();
  Mat3 D = Mat3::Zero();
  double qmm = 1.0 / std::sqrt(4.0 * M_PI);
  for (int m = 0; m <= L; ++m) {
    if (m > 0) qmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    qp[m] = qmm;
    dqp[m] = 0.0;
    d2qp[m] = 0.0;
    if (m + 1 <= L) {
      const double c = std::sqrt(2.0 * m + 3.0);
      qp[m + 1] = Z * c * qmm;
      dqp[m + 1] = c * qmm;
      d2qp[m + 1] = 0.0;
    }
    for (int l = m + 2; l <= L; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) /
                                 (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      qp[l] = a * (Z * qp[l - 1] - b * qp[l - 2]);
      if (order >= 1) dqp[l] = a * (qp[l - 1] + Z * dqp[l - 1] - b * dqp[l - 2]);
      if (order >= 2) d2qp[l] = a * (2.0 * dqp[l - 1] + Z * d2qp[l - 1] - b * d2qp[l - 2]);
    }
    // fold the l-sum first: sums of coefficient times q, q', q''
    const double s = m == 0 ? 1.0 : M_SQRT2;
    double sc0 = 0, sc1 = 0, sc2 = 0, ss0 = 0, ss1 = 0, ss2 = 0;
    for (int l = m; l <= L; ++l) {
      const double cc = coef[sh_index(l, m)] * s;
      sc0 += cc * qp[l];
      sc1 += cc * dqp[l];
      sc2 += cc * d2qp[l];
      if (m > 0) {
        const double cs = coef[sh_index(l, -m)] * s;
        ss0 += cs * qp[l];
        ss1 += cs * dqp[l];
        ss2 += cs * d2qp[l];
      }
    }
    v += sc0 * Cp[m] + ss0 * Sp[m];
    if (order >= 1) {
      const double Cx = m >= 1 ? m * Cp[m - 1] : 0.0, Cy = m >= 1 ? -m * Sp[m - 1] : 0.0;
      const double Sx = m >= 1 ? m * Sp[m - 1] : 0.0, Sy = m >= 1 ? m * Cp[m - 1] : 0.0;
      g[0] += sc0 * Cx + ss0 * Sx;
      g[1] += sc0 * Cy + ss0 * Sy;
      g[2] += sc1 * Cp[m] + ss1 * Sp[m];
      if (order >= 2) {
        const double mm1 = double(m) * (m - 1);
        const double Cxx = m >= 2 ? mm1 * Cp[m - 2] : 0.0, Cxy = m >= 2 ? -mm1 * Sp[m - 2] : 0.0;
        const double Sxx = m >= 2 ? mm1 * Sp[m - 2] : 0.0, Sxy = m >= 2 ? mm1 * Cp[m - 2] : 0.0;
        const double fxx = sc0 * Cxx + ss0 * Sxx, fxy = sc0 * Cxy + ss0 * Sxy;
        D(0, 0) += fxx;
        D(1, 1) -= fxx;
        D(0, 1) += fxy;
        D(0, 2) += sc1 * Cx + ss1 * Sx;
        D(1, 2) += sc1 * Cy + ss1 * Sy;
        D(2, 2) += sc2 * Cp[m] + ss2 * Sp[m];
      }
    }
  }
  *val = v;
  if (order >= 1) {
    const Vec3 gt = g - g.dot(x) * x;
    if (grad) *grad = gt;
    if (order >= 2) {
      D(1, 0) = D(0, 1);
      D(2, 0) = D(0, 2);
      D(2, 1) = D(1, 2);
      const Mat3 P = Mat3::Identity() - x * x.transpose();
      *hess = P * (D - g.dot(x) * Mat3::Identity()) * P;
    }
  }
}

void gauss_legendre(int n, std::vector<double>& z, std::vector<double>& w) {
  z.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = t;
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
    }
    z[i] = t;
    z[n - 1 - i] = -t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  if (n % 2 == 1) z[n / 2] = 0.0;
}

SphereGrid::SphereGrid(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi) {
  if (n_theta < 1 || n_phi < 1) fail(ErrorKind::Config, "sphere grid needs positive resolution");
  gauss_legendre(n_theta, gl_z_, gl_w_);
  theta_.resize(n_theta);
  nodes_.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  weights_.reserve(nodes_.capacity());
  for (int i = 0; i < n_theta; ++i) {
    theta_[i] = std::acos(gl_z_[i]);
    const double st = std::sqrt(std::max(0.0, 1.0 - gl_z_[i] * gl_z_[i]));
    for (int j = 0; j < n_phi; ++j) {
      const double ph = phi(j);
      nodes_.emplace_back(st * std::cos(ph), st * std::sin(ph), gl_z_[i]);
      weights_.push_back(gl_w_[i] * 2.0 * M_PI / n_phi);
    }
  }
}

SphereGrid SphereGrid::for_lmax(int L) { return SphereGrid(2 * L + 2, 4 * L + 4); }

double SphereGrid::phi(int j) const { return 2.0 * M_PI * j / n_phi_; }

int SphereGrid::max_lmax() const { return std::min(n_theta_ - 1, (n_phi_ - 1) / 2); }

SphereFunction::SphereFunction(int L, std::vector<double> c) : l_max_(L), c_(std::move(c)) {
  if (static_cast<int>(c_.size()) != sh_count(L))
    fail(ErrorKind::Config, "coefficient count does not match l_max");
}

SphereFunction SphereFunction::basis(int L, int l, int m, double scale) {
  if (l < 0 || l > L || std::abs(m) > l) fail(ErrorKind::Config, "harmonic index out of range");
  SphereFunction f(L);
  f.coeff(l, m) = scale;
  return f;
}

SphereFunction SphereFunction::constant(int L, double c) {
  SphereFunction f(L);
  f.coeff(0, 0) = c * std::sqrt(4.0 * M_PI);
  return f;
}

namespace {
void check_unit(const Vec3& x) {
  if (!std::isfinite(x.squaredNorm()) || std::abs(x.norm() - 1.0) > 1e-10)
    fail(ErrorKind::Domain, "point is not on the unit sphere");
}
}  // namespace

double SphereFunction::evaluate(const Vec3& x) const {
  check_unit(x);
  std::vector<double> v(c_.size());
  sh_eval(l_max_, x, v.data());
  return kern::dot(v.data(), c_.data(), c_.size());
}

void SphereFunction::jet(const Vec3& x, double& value, Vec3* grad, Mat3* hess) const {
  check_unit(x);
  sh_jet(l_max_, c_.data(), x, &value, grad, hess);
}

Vec3 SphereFunction::gradient(const Vec3& x) const {
  double v;
  Vec3 g;
  jet(x, v, &g);
  return g;
}

Mat3 SphereFunction::hessian(const Vec3& x) const {
  double v;
  Vec3 g;
  Mat3 h;
  jet(x, v, &g, &h);
  return h;
}

SphereFunction SphereFunction::resized(int L) const {
  SphereFunction f(L);
  const int lm = std::min(L, l_max_);
  for (int l = 0; l <= lm; ++l)
    for (int m = -l; m <= l; ++m) f.coeff(l, m) = coeff(l, m);
  return f;
}

double SphereFunction::l2_norm() const {
  double s = 0.0;
  for (double c : c_) s += c * c;
  return std::sqrt(s);
}

SphereFunction& SphereFunction::operator+=(const SphereFunction& o) {
  if (o.l_max_ > l_max_) *this = resized(o.l_max_);
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

SphereFunction& SphereFunction::operator-=(const SphereFunction& o) {
  if (o.l_max_ > l_max_) *this = resized(o.l_max_);
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

SphereFunction& SphereFunction::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

SphereFunction operator+(SphereFunction a, const SphereFunction& b) { return a += b; }
SphereFunction operator-(SphereFunction a, const SphereFunction& b) { return a -= b; }
SphereFunction operator*(double s, SphereFunction a) { return a *= s; }

OrthogonalTransform::OrthogonalTransform(const Mat3& m) : m_(m) {
  if ((m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12)
    fail(ErrorKind::Domain, "matrix is not orthogonal");
  det_ = m.determinant() > 0 ? 1 : -1;
}

OrthogonalTransform OrthogonalTransform::rotation(const Vec3& axis, double angle) {
  return OrthogonalTransform(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix());
}

SphereTransform::SphereTransform(const SphereGrid& grid, int L) : grid_(grid), l_max_(L) {
  if (grid.max_lmax() < L)
    fail(ErrorKind::Config, "grid resolution insufficient for l_max " + std::to_string(L));
  const std::size_t nc = sh_count(L);
  basis_.resize(grid.size() * nc);
  for (std::size_t i = 0; i < grid.size(); ++i) sh_eval(L, grid.nodes()[i], &basis_[i * nc]);
}

std::vector<double> SphereTransform::synthesize(const SphereFunction& f) const {
  const SphereFunction g = f.l_max() == l_max_ ? f : f.resized(l_max_);
  std::vector<double> out(grid_.size());
  kern::gemv(basis_.data(), grid_.size(), sh_count(l_max_), g.coeffs().data(), out.data());
  return out;
}

SphereFunction SphereTransform::analyze(const std::vector<double>& samples) const {
  if (samples.size() != grid_.size()) fail(ErrorKind::Config, "sample count does not match grid");
  std::vector<double> ws(samples.size());
  for (std::size_t i = 0; i < ws.size(); ++i) ws[i] = samples[i] * grid_.weights()[i];
  std::vector<double> c(sh_count(l_max_));
  kern::gemv_t(basis_.data(), grid_.size(), c.size(), ws.data(), c.data());
  return SphereFunction(l_max_, std::move(c));
}

const SphereTransform& default_transform(int L) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<SphereTransform>> cache;
  std::lock_guard<std::mutex> g(mu);
  auto& slot = cache[L];
  if (!slot) slot = std::make_unique<SphereTransform>(SphereGrid::for_lmax(L), L);
  return *slot;
}

SphereFunction project(const SphereGrid& grid, const std::vector<double>& samples, int L) {
  if (grid.max_lmax() < L)
    fail(ErrorKind::Config, "grid resolution insufficient for l_max " + std::to_string(L));
  if (samples.size() != grid.size()) fail(ErrorKind::Config, "sample count does not match grid");
  SphereFunction f(L);
  std::vector<double> v(sh_count(L));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sh_eval(L, grid.nodes()[i], v.data());
    kern::axpy(samples[i] * grid.weights()[i], v.data(), f.coeffs().data(), v.size());
  }
  return f;
}

std::vector<double> sample(const SphereGrid& grid, const SphereFunction& f) {
  std::vector<double> out(grid.size());
  std::vector<double> v(f.coeffs().size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sh_eval(f.l_max(), grid.nodes()[i], v.data());
    out[i] = kern::dot(v.data(), f.coeffs().data(), v.size());
  }
  return out;
}

SphereFunction laplacian(const SphereFunction& f) {
  SphereFunction g(f.l_max());
  for (int l = 0; l <= f.l_max(); ++l)
    for (int m = -l; m <= l; ++m) g.coeff(l, m) = -double(l) * (l + 1) * f.coeff(l, m);
  return g;
}

namespace {
SphereFunction keep_parity(const SphereFunction& f, int parity) {
  SphereFunction g(f.l_max());
  for (int l = parity; l <= f.l_max(); l += 2)
    for (int m = -l; m <= l; ++m) g.coeff(l, m) = f.coeff(l, m);
  return g;
}
}  // namespace

SphereFunction odd_part(const SphereFunction& f) { return keep_parity(f, 1); }
SphereFunction even_part(const SphereFunction& f) { return keep_parity(f, 0); }

SphereFunction remove_linear(const SphereFunction& f) {
  SphereFunction g = f;
  if (f.l_max() >= 1)
    for (int m = -1; m <= 1; ++m) g.coeff(1, m) = 0.0;
  return g;
}

SphereFunction truncate_degree(const SphereFunction& f, int degree) {
  SphereFunction g(f.l_max());
  for (int l = 0; l <= std::min(degree, f.l_max()); ++l)
    for (int m = -l; m <= l; ++m) g.coeff(l, m) = f.coeff(l, m);
  return g;
}

SphereFunction rotate(const SphereFunction& f, const OrthogonalTransform& A) {
  const SphereTransform& T = default_transform(f.l_max());
  std::vector<double> s(T.grid().size());
  std::vector<double> v(f.coeffs().size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    sh_eval(f.l_max(), A(T.grid().nodes()[i]), v.data());
    s[i] = kern::dot(v.data(), f.coeffs().data(), v.size());
  }
  return T.analyze(s);
}

double quadrature(const SphereGrid& grid, const std::vector<double>& samples) {
  return kern::dot(grid.weights().data(), samples.data(), samples.size());
}

std::string to_json(const SphereFunction& f) {
  nlohmann::ordered_json j;
  j["l_max"] = f.l_max();
  auto arr = nlohmann::ordered_json::array();
  for (int l = 0; l <= f.l_max(); ++l)
    for (int m = -l; m <= l; ++m) arr.push_back({l, m, f.coeff(l, m)});
  j["coeffs"] = arr;
  return j.dump();
}

SphereFunction sphere_function_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::Config, std::string("invalid sphere function JSON: ") + e.what());
  }
  const int L = j.at("l_max").get<int>();
  SphereFunction f(L);
  for (const auto& e : j.at("coeffs")) {
    const int l = e.at(0).get<int>(), m = e.at(1).get<int>();
    if (l < 0 || l > L || std::abs(m) > l) fail(ErrorKind::Config, "coefficient index out of range");
    f.coeff(l, m) = e.at(2).get<double>();
  }
  return f;
}

void write_grid_csv(std::ostream& os, const SphereGrid& grid, const std::vector<double>& values) {
  os << "theta,phi,weight,value\n";
  os << std::setprecision(17);
  for (int i = 0; i < grid.n_theta(); ++i)
    for (int j = 0; j < grid.n_phi(); ++j) {
      const std::size_t k = grid.at(i, j);
      os << grid.theta(i) << ',' << grid.phi(j) << ',' << grid.weights()[k] << ',' << values[k]
         << '\n';
    }
}

}  // namespace zf
