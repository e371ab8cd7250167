#include "zollforge/area.hpp"

#include <cmath>
#include <ostream>

#include "zollforge/error.hpp"

namespace zf {

namespace {

double cos_checked(const Jet& j) {
  const double c = std::cos(j.q);
  if (j.n < 3 && std::abs(c) < 1e-12) fail(ErrorKind::Singularity, "J: cos(q) vanishes with n < 3");
  return c;
}

double wedge2(const Vec3& u, const Vec3& w) {
  const double uw = u.dot(w);
  return std::max(0.0, u.squaredNorm() * w.squaredNorm() - uw * uw);
}

double S_of(const Jet& j, double c) {
  return wedge2(j.u, j.w) + c * c * (c * c + j.u.squaredNorm() + j.w.squaredNorm());
}

}  // namespace

double J(const Jet& j) {
  const double c = cos_checked(j);
  return std::exp((j.n - 1) * j.p) * std::pow(c, j.n - 3) * std::sqrt(S_of(j, c));
}

JetPartials dJ(const Jet& j) {
  const double c = cos_checked(j);
  const double S = S_of(j, c);
  const double Jv = std::exp((j.n - 1) * j.p) * std::pow(c, j.n - 3) * std::sqrt(S);
  const double uu = j.u.squaredNorm(), ww = j.w.squaredNorm(), uw = j.u.dot(j.w);
  JetPartials d;
  d.d1 = (j.n - 1) * Jv;
  d.d2 = -std::tan(j.q) * Jv * ((j.n - 3) + c * c * (2 * c * c + uu + ww) / S);
  d.d3 = Jv / S * (ww * j.u - uw * j.w + c * c * j.u);
  d.d4 = Jv / S * (uu * j.w - uw * j.u + c * c * j.w);
  return d;
}

double T_density(const Jet& j) {
  const double c = cos_checked(j);
  const double S = S_of(j, c);
  return std::exp((j.n - 1) * j.p) / c * std::sqrt(S / (j.w.squaredNorm() + c * c));
}

int default_curve_samples(int psi_lmax, int phi_kmax) {
  return std::max(64, 8 * std::max(psi_lmax, phi_kmax) + 16);
}

CurveSamples sample_curve(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v,
                          int M) {
  if (M <= 0) M = default_curve_samples(psi.l_max(), phi_v.k_max());
  const CircleSampler& cs = circle_sampler(phi_v.k_max(), M);
  CurveSamples c;
  c.theta.resize(M);
  c.p.resize(M);
  c.q.resize(M);
  c.w.resize(M);
  c.w2.resize(M);
  c.u.resize(M);
  c.dn.resize(M);
  c.x.resize(M);
  c.F.resize(M);
  c.dF.resize(M);
  c.nv.resize(M);
  cs.synth(phi_v, 0, c.q.data());
  cs.synth(phi_v, 1, c.w.data());
  cs.synth(phi_v, 2, c.w2.data());
  for (int i = 0; i < M; ++i) {
    const double t = cs.angle(i);
    const double q = c.q[i];
    if (std::abs(q) >= M_PI / 2) fail(ErrorKind::GraphValidity, "|Phi_v| reaches pi/2");
    c.theta[i] = t;
    c.x[i] = fr.point(t);
    c.F[i] = std::cos(q) * c.x[i] + std::sin(q) * fr.v;
    c.nv[i] = -std::sin(q) * c.x[i] + std::cos(q) * fr.v;
    c.dF[i] = std::cos(q) * fr.tangent(t) + c.w[i] * c.nv[i];
    Vec3 g;
    sh_jet(psi.l_max(), psi.coeffs().data(), c.F[i], &c.p[i], &g);
    c.u[i] = g.dot(c.dF[i]);
    c.dn[i] = g.dot(c.nv[i]);
  }
  return c;
}

CurveDensities curve_densities(const CurveSamples& c) {
  const int M = c.size();
  const CircleSampler& cs = circle_sampler(0, M);
  CurveDensities d;
  d.J.resize(M);
  d.H.resize(M);
  d.Q.resize(M);
  d.QJ.resize(M);
  d.T.resize(M);
  std::vector<double> D1(M), D2(M), D3(M), D4(M), X(M), dD3(M), dD4(M), du(M), dX(M);
  for (int i = 0; i < M; ++i) {
    Jet j;
    j.p = c.p[i];
    j.q = c.q[i];
    j.u = Vec3(c.u[i], 0, 0);
    j.w = Vec3(c.w[i], 0, 0);
    const JetPartials pd = dJ(j);
    const double cq = std::cos(c.q[i]);
    d.J[i] = std::exp(c.p[i]) * std::sqrt(cq * cq + c.u[i] * c.u[i] + c.w[i] * c.w[i]);
    d.T[i] = T_density(j);
    D1[i] = pd.d1;
    D2[i] = pd.d2;
    D3[i] = pd.d3[0];
    D4[i] = pd.d4[0];
    X[i] = D3[i] / d.J[i];
  }
  cs.diff(D3.data(), dD3.data());
  cs.diff(D4.data(), dD4.data());
  cs.diff(c.u.data(), du.data());
  cs.diff(X.data(), dX.data());
  for (int i = 0; i < M; ++i) {
    d.H[i] = D1[i] * c.dn[i] + D2[i] - dD3[i] * c.dn[i] - dD4[i];
    d.QJ[i] = D1[i] - dD3[i];
    // dJ(X) = B J with log J = p + log cos q + xi
    const double cq = std::cos(c.q[i]), sq = std::sin(c.q[i]);
    const double u = c.u[i], w = c.w[i];
    const double sig = cq * cq + u * u + w * w;
    const double dxi = -std::tan(c.q[i]) * w + (-cq * sq * w + u * du[i] + w * c.w2[i]) / sig;
    const double B = X[i] * (u + std::tan(c.q[i]) * w + dxi);
    d.Q[i] = 1.0 - B - dX[i];
  }
  return d;
}

double area(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v, int M) {
  const CurveSamples c = sample_curve(psi, fr, phi_v, M);
  double s = 0.0;
  for (int i = 0; i < c.size(); ++i) {
    const double cq = std::cos(c.q[i]);
    s += std::exp(c.p[i]) * std::sqrt(cq * cq + c.u[i] * c.u[i] + c.w[i] * c.w[i]);
  }
  return s * 2.0 * M_PI / c.size();
}

namespace {

EquatorFrame frame_for(const TangentField& phi, std::size_t j, int sign) {
  return sign > 0 ? phi.grid().frame(j) : EquatorFrame::make(-phi.grid().dir(j));
}

CircleFunction field_for(const TangentField& phi, std::size_t j, int sign) {
  return sign > 0 ? phi.at(j) : antipodal(phi.at(j));
}

enum class Which { H, Dn, Q, T };

CircleFunction density(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v,
                       int k_max, int M, Which which) {
  const CurveSamples c = sample_curve(psi, fr, phi_v, M);
  const int n = c.size();
  if (k_max < 0) k_max = (n - 1) / 2;
  const CircleSampler& cs = circle_sampler(k_max, n);
  if (which == Which::Dn) return cs.analyze(c.dn.data());
  const CurveDensities d = curve_densities(c);
  switch (which) {
    case Which::H: return cs.analyze(d.H.data());
    case Which::Q: return cs.analyze(d.Q.data());
    default: return cs.analyze(d.T.data());
  }
}

}  // namespace

double area(const SphereFunction& psi, const TangentField& phi, std::size_t j, int sign, int M) {
  return area(psi, frame_for(phi, j, sign), field_for(phi, j, sign), M);
}

CircleFunction euler_lagrange(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v,
                              int k_max, int M) {
  return density(psi, fr, phi_v, k_max, M, Which::H);
}
CircleFunction normal_derivative(const SphereFunction& psi, const EquatorFrame& fr,
                                 const CircleFunction& phi_v, int k_max, int M) {
  return density(psi, fr, phi_v, k_max, M, Which::Dn);
}
CircleFunction density_Q(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v,
                         int k_max, int M) {
  return density(psi, fr, phi_v, k_max, M, Which::Q);
}
CircleFunction density_T(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v,
                         int k_max, int M) {
  return density(psi, fr, phi_v, k_max, M, Which::T);
}

CircleFunction euler_lagrange(const SphereFunction& psi, const TangentField& phi, std::size_t j, int sign) {
  return euler_lagrange(psi, frame_for(phi, j, sign), field_for(phi, j, sign));
}
CircleFunction normal_derivative(const SphereFunction& psi, const TangentField& phi, std::size_t j,
                                 int sign) {
  return normal_derivative(psi, frame_for(phi, j, sign), field_for(phi, j, sign));
}
CircleFunction density_Q(const SphereFunction& psi, const TangentField& phi, std::size_t j, int sign) {
  return density_Q(psi, frame_for(phi, j, sign), field_for(phi, j, sign));
}
CircleFunction density_T(const SphereFunction& psi, const TangentField& phi, std::size_t j, int sign) {
  return density_T(psi, frame_for(phi, j, sign), field_for(phi, j, sign));
}

void write_density_csv(std::ostream& os, const SphereFunction& psi, const TangentField& phi) {
  os << "v_index,theta,H,Q,T,J\n";
  char buf[160];
  for (std::size_t j = 0; j < phi.size(); ++j) {
    const CurveSamples c = sample_curve(psi, phi.grid().frame(j), phi.at(j));
    const CurveDensities d = curve_densities(c);
    for (int i = 0; i < c.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%.12e,%.12e,%.12e,%.12e,%.12e\n", j, c.theta[i], d.H[i], d.Q[i],
                    d.T[i], d.J[i]);
      os << buf;
    }
  }
}

}  // namespace zf
