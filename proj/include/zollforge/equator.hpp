#pragma once
// Directions, equators and graphed equators on S^2, and the odd tangent-bundle
// fields Phi = {Phi_v} stored per direction as truncated Fourier series in
// the angle of the direction's frame.

#include <functional>
#include <memory>
#include <vector>

#include "zollforge/sphere.hpp"

namespace zf {

struct EquatorFrame {
  Vec3 v, e1, e2;

  // Two-chart rule: e1 = normalize(e3 x v) when |v_z| < 0.9, otherwise the x axis
  // replaces e3; e2 = v x e1. Under v -> -v this gives (-e1, e2).
  static EquatorFrame make(const Vec3& v);
  EquatorFrame rotated(double alpha) const;  // same v, frame turned by alpha

  Vec3 point(double theta) const { return std::cos(theta) * e1 + std::sin(theta) * e2; }
  Vec3 tangent(double theta) const { return -std::sin(theta) * e1 + std::cos(theta) * e2; }
  double angle_of(const Vec3& x) const { return std::atan2(x.dot(e2), x.dot(e1)); }
};

// One representative per antipodal pair: the upper half of a Gauss-Legendre
// product grid with an even number of rings, so no ring lies on the equator.
class DirectionGrid {
 public:
  DirectionGrid(int n_theta_full, int n_phi);
  // resolution used by the solver for harmonic degree L
  static std::shared_ptr<const DirectionGrid> for_lmax(int L);

  std::size_t size() const { return dirs_.size(); }
  const Vec3& dir(std::size_t j) const { return dirs_[j]; }
  double weight(std::size_t j) const { return w_[j]; }
  const std::vector<double>& weights() const { return w_; }
  const EquatorFrame& frame(std::size_t j) const { return frames_[j]; }
  int n_theta_full() const { return n_theta_full_; }
  int n_phi() const { return n_phi_; }
  int rings() const { return n_theta_full_ / 2; }
  // largest even degree whose products stay exact under the hemisphere rule
  int max_lmax() const { return std::min(n_theta_full_ - 1, (n_phi_ - 1) / 2); }
  // index of the grid direction equal to +-u, or -1
  long find(const Vec3& u, double tol = 1e-10) const;

 private:
  int n_theta_full_, n_phi_;
  std::vector<Vec3> dirs_;
  std::vector<double> w_;
  std::vector<EquatorFrame> frames_;
};

// Truncated Fourier series a0 + sum_k a_k cos k t + b_k sin k t.
// Storage: [a0, a1, b1, a2, b2, ...].
class CircleFunction {
 public:
  explicit CircleFunction(int k_max = 0) : k_(k_max), c_(2 * k_max + 1, 0.0) {}
  CircleFunction(int k_max, std::vector<double> c);

  int k_max() const { return k_; }
  const std::vector<double>& data() const { return c_; }
  std::vector<double>& data() { return c_; }
  double a(int k) const { return k == 0 ? c_[0] : c_[2 * k - 1]; }
  double b(int k) const { return k == 0 ? 0.0 : c_[2 * k]; }
  double& a(int k) { return k == 0 ? c_[0] : c_[2 * k - 1]; }
  double& b(int k) { return c_[2 * k]; }

  double value(double theta) const;
  double derivative(double theta, int order = 1) const;
  CircleFunction derivative_series(int order = 1) const;
  std::vector<double> samples(int M) const;
  static CircleFunction from_samples(const std::vector<double>& s, int k_max);
  CircleFunction resized(int k_max) const;
  double max_abs_coeff() const;

  CircleFunction& operator+=(const CircleFunction& o);
  CircleFunction& operator-=(const CircleFunction& o);
  CircleFunction& operator*=(double s);

 private:
  int k_;
  std::vector<double> c_;
};

CircleFunction operator+(CircleFunction a, const CircleFunction& b);
CircleFunction operator-(CircleFunction a, const CircleFunction& b);
CircleFunction operator*(double s, CircleFunction a);

// Dense sampling operators for M equispaced angles t_j = 2 pi j / M.
class CircleSampler {
 public:
  CircleSampler(int k_max, int M);
  int k_max() const { return k_; }
  int samples() const { return M_; }
  double angle(int j) const { return 2.0 * M_PI * j / M_; }
  // synthesize derivative of given order (0, 1, 2) at the sample angles
  void synth(const CircleFunction& f, int order, double* out) const;
  CircleFunction analyze(const double* s) const;
  // spectral derivative of arbitrary periodic samples (trigonometric interpolant)
  void diff(const double* s, double* out) const;
  const std::vector<double>& synth_matrix(int order) const { return S_[order]; }
  const std::vector<double>& analysis_matrix() const { return A_; }

 private:
  int k_, M_;
  std::vector<double> S_[3];  // M x (2K+1)
  std::vector<double> A_;     // (2K+1) x M
  std::vector<double> D_;     // M x M
};

const CircleSampler& circle_sampler(int k_max, int M);

class TangentField {
 public:
  TangentField() = default;
  TangentField(std::shared_ptr<const DirectionGrid> grid, int k_max);

  const DirectionGrid& grid() const { return *grid_; }
  std::shared_ptr<const DirectionGrid> grid_ptr() const { return grid_; }
  int k_max() const { return k_; }
  std::size_t size() const { return per_.size(); }
  const CircleFunction& at(std::size_t j) const { return per_[j]; }
  CircleFunction& at(std::size_t j) { return per_[j]; }
  bool odd() const { return true; }

  // Phi(x, s v_j) for s = +1 or -1; oddness in v is built in.
  double value(std::size_t j, int sign, const Vec3& x) const;
  double max_abs() const;  // sup over directions of sampled |Phi_v|
  TangentField resized(int k_max) const;

  TangentField& operator+=(const TangentField& o);
  TangentField& operator-=(const TangentField& o);
  TangentField& operator*=(double s);

 private:
  std::shared_ptr<const DirectionGrid> grid_;
  int k_ = 0;
  std::vector<CircleFunction> per_;
};

TangentField operator+(TangentField a, const TangentField& b);
TangentField operator-(TangentField a, const TangentField& b);
TangentField operator*(double s, TangentField a);

// F(x, v) = cos(q) x + sin(q) v with q = Phi_v(x), x = point(theta)
Vec3 graph_point(const EquatorFrame& fr, double theta, double q);
Vec3 graph_point(const TangentField& phi, std::size_t j, double theta);
// n_v = -sin(q) x + cos(q) v
Vec3 variational_vector(const EquatorFrame& fr, double theta, double q);
Vec3 variational_vector(const TangentField& phi, std::size_t j, double theta);

// theta -> f(F_v(theta)), analyzed to k_max harmonics from M samples
CircleFunction restrict_to(const SphereFunction& f, const EquatorFrame& fr, const CircleFunction& phi_v,
                           int k_max, int M);
CircleFunction restrict_to(const SphereFunction& f, const TangentField& phi, std::size_t j, int k_max,
                           int M = 0);

// (C Phi)_v on the frame vectors: pi * (a1, b1)
std::vector<Eigen::Vector2d> center_map(const TangentField& phi);
TangentField project_zero_center(const TangentField& phi);
CircleFunction project_zero_center(const CircleFunction& f);

// Phi_{-v} in the frame of -v, given Phi_v in the frame of v (oddness in v)
CircleFunction antipodal(const CircleFunction& phi_v);

// Phi at an arbitrary direction, expressed in EquatorFrame::make(v)
using FieldAt = std::function<CircleFunction(const EquatorFrame&)>;

// Directions sigma with p in Sigma_sigma(Phi): for each of n_beta samples on
// the great circle orthogonal to p, bisection along the meridian through p.
std::vector<Vec3> dual_hypersurface(const Vec3& p, const FieldAt& phi, int n_beta = 64);

std::string to_json(const TangentField& phi);

}  // namespace zf
