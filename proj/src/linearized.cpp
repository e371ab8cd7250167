#include "zollforge/linearized.hpp"

#include <cmath>

#include "zollforge/error.hpp"
#include "zollforge/parallel.hpp"

namespace zf {

CircleFunction dH_in_psi_at_zero(const SphereFunction& f, const EquatorFrame& fr, int K) {
  const int M = std::max(4 * K + 4, 2 * f.l_max() + 4);
  std::vector<double> s(M);
  for (int i = 0; i < M; ++i) {
    double val;
    Vec3 g;
    sh_jet(f.l_max(), f.coeffs().data(), fr.point(2.0 * M_PI * i / M), &val, &g);
    s[i] = g.dot(fr.v);
  }
  return circle_sampler(K, M).analyze(s.data());
}

TangentField dH_in_psi_at_zero(const SphereFunction& f, std::shared_ptr<const DirectionGrid> grid, int K) {
  TangentField out(grid, K);
  for (std::size_t j = 0; j < out.size(); ++j) out.at(j) = dH_in_psi_at_zero(f, grid->frame(j), K);
  return out;
}

CircleFunction jacobi_solve(const CircleFunction& rhs) {
  if (rhs.k_max() >= 1 && std::max(std::abs(rhs.a(1)), std::abs(rhs.b(1))) > 1e-9)
    fail(ErrorKind::Solvability, "Jacobi equation rhs has a first harmonic");
  CircleFunction out(rhs.k_max());
  out.a(0) = rhs.a(0);
  for (int k = 2; k <= rhs.k_max(); ++k) {
    const double d = 1.0 - double(k) * k;
    out.a(k) = rhs.a(k) / d;
    out.b(k) = rhs.b(k) / d;
  }
  return out;
}

CircleFunction phi_of_f(const SphereFunction& f, const EquatorFrame& fr, int K) {
  return jacobi_solve(dH_in_psi_at_zero(f, fr, K));
}

TangentField phi_of_f(const SphereFunction& f, std::shared_ptr<const DirectionGrid> grid, int K) {
  TangentField out(grid, K);
  for (std::size_t j = 0; j < out.size(); ++j) out.at(j) = phi_of_f(f, grid->frame(j), K);
  return out;
}

namespace {

std::vector<double> H_samples(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi,
                              int M) {
  return curve_densities(sample_curve(psi, fr, phi, M)).H;
}

}  // namespace

LocalSymbol local_symbol(const SphereFunction& psi, const EquatorFrame& fr, const CircleFunction& phi_v,
                         double h, int M) {
  const int K = std::max(1, phi_v.k_max());
  const CircleFunction base = phi_v.resized(K);
  std::vector<std::vector<double>> r(3);
  for (int d = 0; d < 3; ++d) {
    CircleFunction e(K);
    if (d == 0) e.a(0) = 1.0;
    if (d == 1) e.a(1) = 1.0;
    if (d == 2) e.b(1) = 1.0;
    auto diff = [&](double s) {
      const auto p = H_samples(psi, fr, base + s * e, M);
      const auto m = H_samples(psi, fr, base - s * e, M);
      std::vector<double> out(M);
      for (int i = 0; i < M; ++i) out[i] = (p[i] - m[i]) / (2 * s);
      return out;
    };
    const auto d1 = diff(h), d2 = diff(h / 2);
    r[d].resize(M);
    double worst = 0.0, scale = 1.0;
    for (int i = 0; i < M; ++i) {
      r[d][i] = (4 * d2[i] - d1[i]) / 3;
      worst = std::max(worst, std::abs(d1[i] - d2[i]));
      scale = std::max(scale, std::abs(r[d][i]));
    }
    if (worst > 1e-3 * scale) fail(ErrorKind::StepSize, "finite-difference steps disagree in local_symbol");
  }
  LocalSymbol s;
  s.a.resize(M);
  s.b.resize(M);
  s.c.resize(M);
  for (int i = 0; i < M; ++i) {
    const double t = 2.0 * M_PI * i / M, ct = std::cos(t), st = std::sin(t);
    s.a[i] = r[0][i];
    s.b[i] = r[2][i] * ct - r[1][i] * st;
    s.c[i] = s.a[i] - (r[1][i] * ct + r[2][i] * st);
  }
  return s;
}

std::vector<int> zero_center_modes(int K) {
  std::vector<int> m{0};
  for (int i = 3; i <= 2 * K; ++i) m.push_back(i);
  return m;
}

Eigen::MatrixXd p_block(const LocalSymbol& s, int K) {
  const int M = static_cast<int>(s.a.size());
  const CircleSampler& cs = circle_sampler(K, M);
  const int nc = 2 * K + 1;
  const std::vector<int> modes = zero_center_modes(K);
  const int n = static_cast<int>(modes.size());
  const auto& S0 = cs.synth_matrix(0);
  const auto& S1 = cs.synth_matrix(1);
  const auto& S2 = cs.synth_matrix(2);
  const auto& A = cs.analysis_matrix();
  Eigen::MatrixXd P(n, n);
  std::vector<double> dh(M);
  for (int c = 0; c < n; ++c) {
    const int m = modes[c];
    for (int i = 0; i < M; ++i)
      dh[i] = s.a[i] * S0[i * nc + m] + s.b[i] * S1[i * nc + m] + s.c[i] * S2[i * nc + m];
    for (int r = 0; r < n; ++r) {
      double acc = 0.0;
      const double* row = &A[static_cast<std::size_t>(modes[r]) * M];
      for (int i = 0; i < M; ++i) acc += row[i] * dh[i];
      P(r, c) = acc;
    }
  }
  return P;
}

namespace {

bool is_zero(const SphereFunction& f) {
  for (double c : f.coeffs())
    if (c != 0.0) return false;
  return true;
}

bool is_zero(const TangentField& phi) {
  for (std::size_t j = 0; j < phi.size(); ++j)
    for (double c : phi.at(j).data())
      if (c != 0.0) return false;
  return true;
}

void check_zero_center(const TangentField& f) {
  for (std::size_t j = 0; j < f.size(); ++j)
    if (f.k_max() >= 1 && std::max(std::abs(f.at(j).a(1)), std::abs(f.at(j).b(1))) > 1e-12)
      fail(ErrorKind::Domain, "field is not zero-center");
}

}  // namespace

OperatorP::OperatorP(const LinearizedState& st) : grid_(st.phi.grid_ptr()), K_(st.k_max()) {
  const std::size_t nd = grid_->size();
  const std::vector<int> modes = zero_center_modes(K_);
  const int n = static_cast<int>(modes.size());
  P_.assign(nd, Eigen::MatrixXd());
  lu_.resize(nd);
  std::vector<double> conds(nd, 1.0);
  if (is_zero(st.psi) && is_zero(st.phi)) {
    // -phi'' - phi, diagonal in Fourier modes
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int r = 0; r < n; ++r) {
      const int k = modes[r] == 0 ? 0 : (modes[r] + 1) / 2;
      D(r, r) = double(k) * k - 1.0;
    }
    for (std::size_t j = 0; j < nd; ++j) P_[j] = D;
  } else {
    const int M = default_curve_samples(st.psi.l_max(), K_);
    parallel_for(nd, [&](std::size_t j) {
      P_[j] = p_block(local_symbol(st.psi, grid_->frame(j), st.phi.at(j), st.h_fd, M), K_);
    });
  }
  parallel_for(nd, [&](std::size_t j) {
    lu_[j].compute(P_[j]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(P_[j]);
    const auto& sv = svd.singularValues();
    conds[j] = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
  });
  for (double c : conds) cond_ = std::max(cond_, c);
}

TangentField OperatorP::apply(const TangentField& phi) const {
  check_zero_center(phi);
  const std::vector<int> modes = zero_center_modes(K_);
  TangentField out(grid_, K_);
  const TangentField in = phi.k_max() == K_ ? phi : phi.resized(K_);
  for (std::size_t j = 0; j < out.size(); ++j) {
    Eigen::VectorXd x(modes.size());
    for (std::size_t r = 0; r < modes.size(); ++r) x[r] = in.at(j).data()[modes[r]];
    const Eigen::VectorXd y = P_[j] * x;
    for (std::size_t r = 0; r < modes.size(); ++r) out.at(j).data()[modes[r]] = y[r];
  }
  return out;
}

TangentField OperatorP::solve(const TangentField& xi) const {
  if (!(cond_ < 1e8)) fail(ErrorKind::Invertibility, "P is ill-conditioned (cond >= 1e8)");
  check_zero_center(xi);
  const std::vector<int> modes = zero_center_modes(K_);
  TangentField out(grid_, K_);
  const TangentField in = xi.k_max() == K_ ? xi : xi.resized(K_);
  for (std::size_t j = 0; j < out.size(); ++j) {
    Eigen::VectorXd y(modes.size());
    for (std::size_t r = 0; r < modes.size(); ++r) y[r] = in.at(j).data()[modes[r]];
    const Eigen::VectorXd x = lu_[j].solve(y);
    for (std::size_t r = 0; r < modes.size(); ++r) out.at(j).data()[modes[r]] = x[r];
  }
  return out;
}

TangentField operator_P(const LinearizedState& state, const TangentField& phi) {
  return OperatorP(state).apply(phi);
}

TangentField operator_S(const LinearizedState& state, const TangentField& xi) {
  return OperatorP(state).solve(xi);
}

}  // namespace zf
