#pragma once
// Generalized Funk transform F(psi, Phi), its discrete adjoint, the kernel K
// and the composed operator L = F F* with its canonical right inverse.
//
// Functions on RP^2 are sampled on a DirectionGrid and integrated with its
// hemisphere weights (total 2 pi). Functions on S^2 are harmonic coefficient
// vectors with the L^2(S^2) inner product.

#include <iosfwd>
#include <memory>
#include <vector>

#include "zollforge/area.hpp"

namespace zf {

class ProjectiveFunction {
 public:
  ProjectiveFunction() = default;
  explicit ProjectiveFunction(std::shared_ptr<const DirectionGrid> grid);
  ProjectiveFunction(std::shared_ptr<const DirectionGrid> grid, std::vector<double> values);
  // even function sampled at the grid directions
  static ProjectiveFunction from_function(std::shared_ptr<const DirectionGrid> grid, const SphereFunction& f);

  const DirectionGrid& grid() const { return *grid_; }
  std::shared_ptr<const DirectionGrid> grid_ptr() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }
  double operator[](std::size_t j) const { return v_[j]; }
  double& operator[](std::size_t j) { return v_[j]; }

  double mean() const;  // weighted average over RP^2
  ProjectiveFunction zero_mean() const;
  double dot(const ProjectiveFunction& o) const;  // weighted inner product
  double max_abs() const;
  // coefficients of the even harmonics up to degree L (odd slots zero)
  SphereFunction even_harmonics(int L) const;

 private:
  std::shared_ptr<const DirectionGrid> grid_;
  std::vector<double> v_;
};

// F(psi, Phi) f at a single equator: sum over the curve of f Q dA_{g_psi}.
double funk_at(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v,
               const SphereFunction& f, int M = 0);

// Dense discretization of F(psi, Phi) on harmonics of degree <= L, together
// with the derived operators. Build once per state and reuse.
class FunkSystem {
 public:
  FunkSystem(const SphereFunction& psi, const TangentField& phi, int L, int M = 0);

  int l_max() const { return L_; }
  const DirectionGrid& grid() const { return *grid_; }
  std::shared_ptr<const DirectionGrid> grid_ptr() const { return grid_; }
  const Eigen::MatrixXd& matrix() const { return F_; }  // ndir x sh_count(L)

  ProjectiveFunction apply(const SphereFunction& f) const;
  // exact adjoint of apply() for the weighted direction and coefficient inner products
  SphereFunction adjoint(const ProjectiveFunction& g) const;

  // L restricted to even harmonics: even coefficients b -> even coefficients of
  // F F* (Y b). Lazily assembled.
  const Eigen::MatrixXd& operator_L() const;
  double condition_number() const;
  // canonical right inverse F* (F F*)^{-1}, input given by even coefficients or
  // by direction samples; throws Invertibility when cond(L) >= 1e8
  SphereFunction right_inverse(const SphereFunction& b) const;
  SphereFunction right_inverse(const ProjectiveFunction& g) const;

  // even harmonic index list used by operator_L
  const std::vector<int>& even_index() const { return even_; }

 private:
  void assemble_L() const;

  std::shared_ptr<const DirectionGrid> grid_;
  int L_;
  Eigen::MatrixXd F_;
  Eigen::MatrixXd Ydir_;  // ndir x n_even, even basis at the directions
  std::vector<int> even_;
  mutable bool have_L_ = false;
  mutable Eigen::MatrixXd Lc_;
  mutable Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  mutable double cond_ = 0.0;
};

ProjectiveFunction funk(const SphereFunction& psi, const TangentField& phi, const SphereFunction& f);
SphereFunction dual_funk(const SphereFunction& psi, const TangentField& phi, const ProjectiveFunction& g, int L);
SphereFunction right_inverse_R(const SphereFunction& psi, const TangentField& phi, const ProjectiveFunction& g,
                               int L);

// Kernel of L: two-point sum over Sigma_u(Phi) cap Sigma_v(Phi).
struct KernelValue {
  double value = 0.0;
  double min_sin = 1.0;  // smallest |sin| of the crossing angle
  bool near_tangent = false;
};
KernelValue kernel_K(const SphereFunction& psi, const EquatorFrame& fu, const CircleFunction& phi_u,
                     const EquatorFrame& fv, const CircleFunction& phi_v);
KernelValue kernel_K(const SphereFunction& psi, const TangentField& phi, std::size_t u, std::size_t v);

// (l, eigenvalue) of L on zonal even harmonics via Rayleigh quotients over m
std::vector<std::pair<int, double>> spectrum_L(const FunkSystem& sys);
void write_spectrum_csv(std::ostream& os, const std::vector<std::pair<int, double>>& spec);
void write_kernel_csv(std::ostream& os, const SphereFunction& psi, const TangentField& phi);

}  // namespace zf
