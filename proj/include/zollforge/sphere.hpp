#pragma once
// Spherical-harmonic engine on S^2.
//
// Basis convention (used everywhere in the library): real orthonormal
// harmonics without Condon-Shortley phase, written in Cartesian form
//   Y_l^0   = q_l^0(z)
//   Y_l^m   = sqrt(2) q_l^m(z) Re (x + i y)^m     (m > 0)
//   Y_l^-m  = sqrt(2) q_l^m(z) Im (x + i y)^m     (m > 0)
// where q_l^m is the normalized associated Legendre function divided by
// sin^m(theta). The expressions are polynomials in (x, y, z), so values and
// derivatives are regular at the poles. Coefficient (l, m) lives at index
// l*l + l + m.

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace zf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

constexpr int sh_index(int l, int m) { return l * l + l + m; }
constexpr int sh_count(int l_max) { return (l_max + 1) * (l_max + 1); }

// Basis values at a unit vector. grad receives intrinsic gradients (tangent
// 3-vectors); hess receives intrinsic Hessians as ambient 3x3 matrices P H P
// with P the tangent projector. Pointers may be null past the needed order.
void sh_eval(int l_max, const Vec3& x, double* val, Vec3* grad = nullptr, Mat3* hess = nullptr);

// Value, intrinsic gradient and intrinsic Hessian of sum_k c[k] Y_k at x,
// accumulated without materializing the basis. grad/hess may be null.
void sh_jet(int l_max, const double* c, const Vec3& x, double* val, Vec3* grad = nullptr,
            Mat3* hess = nullptr);

class SphereGrid {
 public:
  SphereGrid(int n_theta, int n_phi);
  static SphereGrid for_lmax(int l_max);  // (2L+2, 4L+4)

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Vec3>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  double theta(int i) const { return theta_[i]; }
  double phi(int j) const;
  double ring_weight(int i) const { return gl_w_[i]; }
  double z(int i) const { return gl_z_[i]; }
  // node index of ring i, longitude j
  std::size_t at(int i, int j) const { return static_cast<std::size_t>(i) * n_phi_ + j; }
  // highest degree L for which projecting degree-L data is exact
  int max_lmax() const;

 private:
  int n_theta_, n_phi_;
  std::vector<double> gl_z_, gl_w_, theta_;
  std::vector<Vec3> nodes_;
  std::vector<double> weights_;
};

// Gauss-Legendre nodes (descending) and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& z, std::vector<double>& w);

class SphereFunction {
 public:
  SphereFunction() : l_max_(0), c_(1, 0.0) {}
  explicit SphereFunction(int l_max) : l_max_(l_max), c_(sh_count(l_max), 0.0) {}
  SphereFunction(int l_max, std::vector<double> coeffs);
  static SphereFunction basis(int l_max, int l, int m, double scale = 1.0);
  static SphereFunction constant(int l_max, double c);

  int l_max() const { return l_max_; }
  const std::vector<double>& coeffs() const { return c_; }
  std::vector<double>& coeffs() { return c_; }
  double coeff(int l, int m) const { return c_[sh_index(l, m)]; }
  double& coeff(int l, int m) { return c_[sh_index(l, m)]; }

  double evaluate(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  Mat3 hessian(const Vec3& x) const;
  void jet(const Vec3& x, double& value, Vec3* grad, Mat3* hess = nullptr) const;

  SphereFunction resized(int l_max) const;
  double l2_norm() const;

  SphereFunction& operator+=(const SphereFunction& o);
  SphereFunction& operator-=(const SphereFunction& o);
  SphereFunction& operator*=(double s);

 private:
  int l_max_;
  std::vector<double> c_;
};

SphereFunction operator+(SphereFunction a, const SphereFunction& b);
SphereFunction operator-(SphereFunction a, const SphereFunction& b);
SphereFunction operator*(double s, SphereFunction a);

class OrthogonalTransform {
 public:
  OrthogonalTransform() : m_(Mat3::Identity()), det_(1) {}
  explicit OrthogonalTransform(const Mat3& m);  // throws Domain if not orthogonal
  static OrthogonalTransform rotation(const Vec3& axis, double angle);
  const Mat3& matrix() const { return m_; }
  int det_sign() const { return det_; }
  Vec3 operator()(const Vec3& x) const { return m_ * x; }
  OrthogonalTransform inverse() const { return OrthogonalTransform(m_.transpose()); }
  OrthogonalTransform operator*(const OrthogonalTransform& o) const {
    return OrthogonalTransform(m_ * o.m_);
  }

 private:
  Mat3 m_;
  int det_;
};

// Quadrature transform with cached basis table; shared read-only.
class SphereTransform {
 public:
  SphereTransform(const SphereGrid& grid, int l_max);
  const SphereGrid& grid() const { return grid_; }
  int l_max() const { return l_max_; }
  std::vector<double> synthesize(const SphereFunction& f) const;
  SphereFunction analyze(const std::vector<double>& samples) const;

 private:
  SphereGrid grid_;
  int l_max_;
  std::vector<double> basis_;  // size() x sh_count rows
};

// Process-wide transform on the default grid for l_max.
const SphereTransform& default_transform(int l_max);

SphereFunction project(const SphereGrid& grid, const std::vector<double>& samples, int l_max);
std::vector<double> sample(const SphereGrid& grid, const SphereFunction& f);

SphereFunction laplacian(const SphereFunction& f);
SphereFunction odd_part(const SphereFunction& f);
SphereFunction even_part(const SphereFunction& f);
SphereFunction remove_linear(const SphereFunction& f);
SphereFunction truncate_degree(const SphereFunction& f, int degree);
SphereFunction rotate(const SphereFunction& f, const OrthogonalTransform& A);

double quadrature(const SphereGrid& grid, const std::vector<double>& samples);

std::string to_json(const SphereFunction& f);
SphereFunction sphere_function_from_json(const std::string& text);
void write_grid_csv(std::ostream& os, const SphereGrid& grid, const std::vector<double>& values);

}  // namespace zf
