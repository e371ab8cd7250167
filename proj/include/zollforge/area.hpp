#pragma once
// Area of graphed equators in g_psi = e^{2 psi}(g_can + d psi (x) d psi), the
// metric of the radial graph r = e^psi,
// its Euler-Lagrange density H_v and the first-variation densities Q_v, T_v.
//
// Jets carry tangent vectors as ambient 3-vectors. On S^2 they are scalar
// multiples of the circle tangent and the wedge term vanishes, but J and its
// partials are written for general n.

#include <iosfwd>
#include <vector>

#include "zollforge/equator.hpp"

namespace zf {

struct Jet {
  double p = 0.0;
  double q = 0.0;
  Vec3 u = Vec3::Zero();
  Vec3 w = Vec3::Zero();
  int n = 2;
};

struct JetPartials {
  double d1 = 0.0, d2 = 0.0;
  Vec3 d3 = Vec3::Zero(), d4 = Vec3::Zero();
};

double J(const Jet& jet);
JetPartials dJ(const Jet& jet);
double T_density(const Jet& jet);

// psi and Phi_v sampled along the graphed equator at M equispaced angles.
struct CurveSamples {
  std::vector<double> theta;
  std::vector<double> p;   // psi(F)
  std::vector<double> q;   // Phi_v
  std::vector<double> w;   // Phi_v'
  std::vector<double> w2;  // Phi_v''
  std::vector<double> u;   // d/dtheta psi(F)
  std::vector<double> dn;  // <grad psi(F), n_v>
  std::vector<Vec3> x, F, dF, nv;
  int size() const { return static_cast<int>(theta.size()); }
};

int default_curve_samples(int psi_lmax, int phi_kmax);
CurveSamples sample_curve(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v,
                          int M = 0);

struct CurveDensities {
  std::vector<double> J, H, Q, QJ, T;
};
CurveDensities curve_densities(const CurveSamples& c);

double area(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v, int M = 0);
// grid direction j, sign selects v or -v
double area(const SphereFunction& psi, const TangentField& phi, std::size_t j, int sign = 1, int M = 0);

// Densities on Sigma_v as Fourier series up to k_max (defaults to the sample
// Nyquist limit).
CircleFunction euler_lagrange(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v,
                              int k_max = -1, int M = 0);
CircleFunction normal_derivative(const SphereFunction& psi, const EquatorFrame& fr,
                                 const CircleFunction& phi_v, int k_max = -1, int M = 0);
CircleFunction density_Q(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v,
                         int k_max = -1, int M = 0);
CircleFunction density_T(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v,
                         int k_max = -1, int M = 0);

CircleFunction euler_lagrange(const SphereFunction& psi, const TangentField& phi, std::size_t j, int sign = 1);
CircleFunction normal_derivative(const SphereFunction& psi, const TangentField& phi, std::size_t j,
                                 int sign = 1);
CircleFunction density_Q(const SphereFunction& psi, const TangentField& phi, std::size_t j, int sign = 1);
CircleFunction density_T(const SphereFunction& psi, const TangentField& phi, std::size_t j, int sign = 1);

// v_index,theta,H,Q,T,J for every grid direction
void write_density_csv(std::ostream& os, const SphereFunction& psi, const TangentField& phi);

}  // namespace zf
