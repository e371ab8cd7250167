#pragma once
// Linearization of the Euler-Lagrange map at a state (psi, Phi): the closed
// form D_psi H(0,0), the Jacobi solve on each equator, the kernel map
// f -> phi(f), and the operators P (zero-center part of D_Phi H) and S = P^{-1}.

#include <memory>
#include <vector>

#include "zollforge/area.hpp"

namespace zf {

struct LinearizedState {
  SphereFunction psi;
  TangentField phi;
  double h_fd = 1e-4;
  int k_max() const { return phi.k_max(); }
};

// (n-1) <grad f(x), v> on each equator, n = 2
CircleFunction dH_in_psi_at_zero(const SphereFunction& f, const EquatorFrame& fr, int k_max);
TangentField dH_in_psi_at_zero(const SphereFunction& f, std::shared_ptr<const DirectionGrid> grid, int k_max);

// phi'' + phi = rhs with zero first harmonics; throws Solvability when the rhs
// has a first harmonic above 1e-9
CircleFunction jacobi_solve(const CircleFunction& rhs);

CircleFunction phi_of_f(const SphereFunction& f, const EquatorFrame& fr, int k_max);
TangentField phi_of_f(const SphereFunction& f, std::shared_ptr<const DirectionGrid> grid, int k_max);

// Local form of the linearization on one equator: at every sample angle
// delta H = a dq + b dq' + c dq''.
struct LocalSymbol {
  std::vector<double> a, b, c;
};
LocalSymbol local_symbol(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v,
                         double h, int M);

// Zero-center Fourier block of P on one equator, indexed by the modes
// [a0, a2, b2, ..., aK, bK].
Eigen::MatrixXd p_block(const LocalSymbol& s, int k_max);
std::vector<int> zero_center_modes(int k_max);

class OperatorP {
 public:
  explicit OperatorP(const LinearizedState& state);
  TangentField apply(const TangentField& phi) const;
  TangentField solve(const TangentField& xi) const;  // S
  double condition_number() const { return cond_; }

 private:
  std::shared_ptr<const DirectionGrid> grid_;
  int K_;
  std::vector<Eigen::MatrixXd> P_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
  double cond_ = 1.0;
};

TangentField operator_P(const LinearizedState& state, const TangentField& phi);
TangentField operator_S(const LinearizedState& state, const TangentField& xi);

}  // namespace zf
