#pragma once
// Star-shaped embeddings x -> e^psi(x) x of S^2 into R^3: induced metric,
// outward normal, shape operator (d iota o A = dN) and mean curvature.

#include <vector>

#include "zollforge/sphere.hpp"

namespace zf {

using Mat2 = Eigen::Matrix2d;

struct TangentFrame {
  Vec3 x, e1, e2;
  static TangentFrame at(const Vec3& x);
};

struct PointJet {
  double psi = 0.0;
  Vec3 grad = Vec3::Zero();
  Mat3 hess = Mat3::Zero();  // intrinsic, ambient 3x3 form
};

class StarShapedSurface {
 public:
  explicit StarShapedSurface(SphereFunction psi, int grid_lmax = -1);

  const SphereFunction& psi() const { return psi_; }
  const SphereGrid& grid() const { return grid_; }
  PointJet jet(const Vec3& x) const;
  const PointJet& cached(std::size_t node) const { return cache_[node]; }
  // largest deviation between cached and freshly evaluated jets
  double cache_error() const;

  Vec3 embed(const Vec3& x) const;
  Vec3 unit_normal(const Vec3& x) const;
  // g_psi on the frame (e1, e2)
  Mat2 induced_metric(const TangentFrame& f) const;
  // A in the canonical frame (e1, e2): column b holds the components of A e_b
  Mat2 shape_operator(const TangentFrame& f) const;
  Mat2 shape_operator(const Vec3& x) const { return shape_operator(TangentFrame::at(x)); }
  double mean_curvature(const Vec3& x) const;        // closed formula
  double mean_curvature_trace(const Vec3& x) const;  // trace of the shape operator
  double gauss_curvature(const Vec3& x) const;       // det A
  std::vector<double> mean_curvature_on_grid() const;

 private:
  SphereFunction psi_;
  SphereGrid grid_;
  std::vector<PointJet> cache_;
};

// d/dt of H at t = 0 along psi = t f: -Delta f - 2 f
SphereFunction first_variation_H(const SphereFunction& f);
// d/dt of A at t = 0 in the frame at x: -Hess f - f Id
Mat2 first_variation_A(const SphereFunction& f, const TangentFrame& fr);

struct HessianProfile {
  std::vector<double> eigenvalues;  // ascending
  std::vector<int> multiplicities;  // one per cluster
  int max_multiplicity = 0;
  // an eigenvalue of multiplicity >= n - 1; always true on S^2
  bool has_near_umbilic_eigenvalue = false;
};

HessianProfile hessian_multiplicity(const SphereFunction& f, const Vec3& p, double tol = 1e-8);

}  // namespace zf
