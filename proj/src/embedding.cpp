#include "zollforge/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "zollforge/equator.hpp"
#include "zollforge/error.hpp"

namespace zf {

namespace {

constexpr int kDim = 2;

Mat2 in_frame(const Mat3& m, const TangentFrame& f) {
  Mat2 r;
  r << f.e1.dot(m * f.e1), f.e1.dot(m * f.e2), f.e2.dot(m * f.e1), f.e2.dot(m * f.e2);
  return r;
}

}  // namespace

TangentFrame TangentFrame::at(const Vec3& x) {
  const EquatorFrame e = EquatorFrame::make(x);
  return {x, e.e1, e.e2};
}

StarShapedSurface::StarShapedSurface(SphereFunction psi, int grid_lmax)
    : psi_(std::move(psi)), grid_(SphereGrid::for_lmax(grid_lmax < 0 ? std::max(psi_.l_max(), 2) : grid_lmax)) {
  cache_.reserve(grid_.size());
  for (const auto& x : grid_.nodes()) {
    cache_.push_back(jet(x));
    if (!std::isfinite(std::exp(cache_.back().psi))) fail(ErrorKind::Domain, "e^psi is not finite on the grid");
  }
}

PointJet StarShapedSurface::jet(const Vec3& x) const {
  PointJet j;
  psi_.jet(x, j.psi, &j.grad, &j.hess);
  return j;
}

double StarShapedSurface::cache_error() const {
  double e = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const PointJet j = jet(grid_.nodes()[i]);
    const PointJet& c = cache_[i];
    e = std::max({e, std::abs(j.psi - c.psi), (j.grad - c.grad).cwiseAbs().maxCoeff(),
                  (j.hess - c.hess).cwiseAbs().maxCoeff()});
  }
  return e;
}

Vec3 StarShapedSurface::embed(const Vec3& x) const { return std::exp(psi_.evaluate(x)) * x; }

Vec3 StarShapedSurface::unit_normal(const Vec3& x) const {
  const Vec3 g = psi_.gradient(x);
  return (x - g) / std::sqrt(1.0 + g.squaredNorm());
}

Mat2 StarShapedSurface::induced_metric(const TangentFrame& f) const {
  const Vec3 g = psi_.gradient(f.x);
  const Eigen::Vector2d a(g.dot(f.e1), g.dot(f.e2));
  return std::exp(2.0 * psi_.evaluate(f.x)) * (Mat2::Identity() + a * a.transpose());
}

Mat2 StarShapedSurface::shape_operator(const TangentFrame& f) const {
  const PointJet j = jet(f.x);
  const double q = 1.0 + j.grad.squaredNorm();
  const Mat2 H = in_frame(j.hess, f);
  const Eigen::Vector2d a(j.grad.dot(f.e1), j.grad.dot(f.e2));
  // A v = c (-Hv + v + <grad, Hv> grad / q)
  const Mat2 M = -H + Mat2::Identity() + a * (a.transpose() * H) / q;
  return std::exp(-j.psi) / std::sqrt(q) * M;
}

double StarShapedSurface::mean_curvature(const Vec3& x) const {
  const PointJet j = jet(x);
  const double q = 1.0 + j.grad.squaredNorm();
  const double lap = j.hess.trace();
  return std::exp(-j.psi) / std::sqrt(q) * (-lap + kDim + j.grad.dot(j.hess * j.grad) / q);
}

double StarShapedSurface::mean_curvature_trace(const Vec3& x) const { return shape_operator(x).trace(); }

double StarShapedSurface::gauss_curvature(const Vec3& x) const { return shape_operator(x).determinant(); }

std::vector<double> StarShapedSurface::mean_curvature_on_grid() const {
  std::vector<double> h(grid_.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const PointJet& j = cache_[i];
    const double q = 1.0 + j.grad.squaredNorm();
    h[i] = std::exp(-j.psi) / std::sqrt(q) * (-j.hess.trace() + kDim + j.grad.dot(j.hess * j.grad) / q);
  }
  return h;
}

SphereFunction first_variation_H(const SphereFunction& f) {
  SphereFunction r = laplacian(f);
  r *= -1.0;
  for (std::size_t k = 0; k < r.coeffs().size(); ++k) r.coeffs()[k] -= kDim * f.coeffs()[k];
  return r;
}

Mat2 first_variation_A(const SphereFunction& f, const TangentFrame& fr) {
  double v;
  Vec3 g;
  Mat3 h;
  f.jet(fr.x, v, &g, &h);
  return -in_frame(h, fr) - v * Mat2::Identity();
}

HessianProfile hessian_multiplicity(const SphereFunction& f, const Vec3& p, double tol) {
  if (std::abs(p.norm() - 1.0) > 1e-12) fail(ErrorKind::Domain, "point is not on the unit sphere");
  const TangentFrame fr = TangentFrame::at(p);
  double v;
  Vec3 g;
  Mat3 h;
  f.jet(p, v, &g, &h);
  Eigen::SelfAdjointEigenSolver<Mat2> es(in_frame(h, fr));
  HessianProfile r;
  for (int i = 0; i < kDim; ++i) r.eigenvalues.push_back(es.eigenvalues()[i]);
  const double scale = std::max(1.0, std::abs(r.eigenvalues.back()) + std::abs(r.eigenvalues.front()));
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    if (i > 0 && r.eigenvalues[i] - r.eigenvalues[i - 1] <= tol * scale)
      ++r.multiplicities.back();
    else
      r.multiplicities.push_back(1);
  }
  r.max_multiplicity = *std::max_element(r.multiplicities.begin(), r.multiplicities.end());
  r.has_near_umbilic_eigenvalue = r.max_multiplicity >= kDim - 1;
  return r;
}

}  // namespace zf
