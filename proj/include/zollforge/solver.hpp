#pragma once
// Zoll family solver: the map Lambda = (Lambda1, Lambda2), the approximate
// right inverse V built from R and S, the smoothed iteration with spectral
// truncation, a damped Gauss-Newton fallback, continuation in t and the
// verification reports.

#include <iosfwd>
#include <string>
#include <vector>

#include "zollforge/funk.hpp"
#include "zollforge/linearized.hpp"

namespace zf {

struct SolverConfig {
  int l_max = 16;
  int k_max = 0;        // 0: 2 * l_max
  int dir_theta = 0;    // 0: DirectionGrid::for_lmax
  int dir_phi = 0;
  std::vector<double> t_values{0.05};
  double tol_h = 1e-6;
  double tol_area = 1e-6;
  std::string scheme = "hamilton";  // or "gauss-newton"
  double tau0 = 3.0;
  double smoothing_c = 0.0;  // 0: 4 / ln 3, so the first cutoff keeps degree 4
  int max_iters = 40;
  double min_damping = 1.0 / 64;
  double h_fd = 1e-4;

  int k() const { return k_max > 0 ? k_max : 2 * l_max; }
  double c() const;
  int cutoff(double tau) const;
  std::shared_ptr<const DirectionGrid> grid() const;
  void validate() const;  // throws Config

  static SolverConfig from_json(const std::string& text);
  std::string to_json() const;
};

struct Residuals {
  double lambda1 = 0.0;  // sup over directions of |A - mean|
  double lambda2 = 0.0;  // sup over samples of the zero-center part of H
  double max() const { return std::max(lambda1, lambda2); }
};

struct LambdaValue {
  ProjectiveFunction areas;
  ProjectiveFunction lambda1;
  TangentField lambda2;
  std::vector<double> h_full;  // per-direction sup of the sampled full H
  Residuals residuals;
};

LambdaValue lambda_map(const SphereFunction& psi, const TangentField& phi);

struct Update {
  SphereFunction dpsi;
  TangentField dphi;
};

// V(psi, Phi): (b, xi) -> (R b, S(xi - P0 D_psi H R b)), b given as even
// harmonic coefficients (or direction samples).
class RightInverseV {
 public:
  RightInverseV(const SphereFunction& psi, const TangentField& phi, double h_fd = 1e-4);
  Update apply(const SphereFunction& b, const TangentField& xi) const;
  Update apply(const ProjectiveFunction& b, const TangentField& xi) const;
  const FunkSystem& funk() const { return funk_; }
  const OperatorP& P() const { return P_; }

 private:
  SphereFunction psi_;
  TangentField phi_;
  double h_;
  FunkSystem funk_;
  OperatorP P_;
};

Update approx_right_inverse_V(const SphereFunction& psi, const TangentField& phi, const ProjectiveFunction& b,
                              const TangentField& xi);

// zero-center part of d/ds H(psi + s dpsi, Phi) at s = 0, Richardson FD
TangentField dH_in_psi(const SphereFunction& psi, const TangentField& phi, const SphereFunction& dpsi,
                       double h = 1e-4);

// DLambda (dpsi, dphi) by Richardson central differences of lambda_map
std::pair<ProjectiveFunction, TangentField> dLambda_fd(const SphereFunction& psi, const TangentField& phi,
                                                       const Update& d, double h = 1e-4);

struct SolutionState {
  double t = 0.0;
  SphereFunction psi;
  TangentField phi;
  Residuals residuals;
  int iterations = 0;
  std::vector<double> trace;  // residual before each step
  std::string scheme;
};

SolutionState initial_state(const SphereFunction& f, double t, const SolverConfig& cfg);
SolutionState hamilton_iterate(const SphereFunction& f, double t, const SolverConfig& cfg);
SolutionState gauss_newton(const SphereFunction& f, double t, const SolverConfig& cfg,
                           const SolutionState* warm = nullptr);
SolutionState solve(const SphereFunction& f, double t, const SolverConfig& cfg,
                    const SolutionState* warm = nullptr);

// Warm-started sequence over cfg.t_values. Solves stop at the first failure;
// the error message names that t and earlier states are kept in out.
std::vector<SolutionState> continuation(const SphereFunction& f, const SolverConfig& cfg,
                                        std::string* failure = nullptr);

// Zero-center Phi_v at an arbitrary direction with P0 H_v(psi, Phi_v) = 0.
CircleFunction solve_direction(const SphereFunction& psi, const EquatorFrame& fr, int k_max,
                               const CircleFunction* guess = nullptr);

struct IncidenceCheck {
  Vec3 p, line;
  int matches = 0;
};

struct ZollReport {
  std::vector<double> max_h;  // per direction, full H
  std::vector<double> areas;
  double max_h_all = 0.0;
  double area_spread = 0.0;
  Residuals residuals;
  std::vector<IncidenceCheck> incidence;
  bool incidence_ok = true;
  double slope = 0.0;  // order of ||psi_t - t f|| in t when fitted over a ladder
  bool passed(double tol_h, double tol_area) const;
  std::string to_json() const;
};

ZollReport verify_zoll(const SolutionState& s, int incidence_checks = 2, unsigned seed = 7);

// least-squares slope of log ||psi_t - t f|| against log t
double fit_order(const std::vector<SolutionState>& states, const SphereFunction& f);

struct EquivarianceReport {
  double psi = 0.0;        // sup |psi o A - psi|
  double phi = 0.0;        // sup |Phi o (A x A) - Phi|
  double hausdorff = 0.0;  // sup over sampled directions
  double max() const { return std::max({psi, phi, hausdorff}); }
};

EquivarianceReport equivariance_check(const SolutionState& s, const OrthogonalTransform& A, int every = 7);

void export_embedding_obj(std::ostream& os, const SphereFunction& psi, int n_lat = 48, int n_lon = 96);
void export_curves_csv(std::ostream& os, const SolutionState& s, int samples = 128);
std::string to_json(const SolutionState& s);

}  // namespace zf
