#include "zollforge/exact.hpp"

#include <cmath>

#include "zollforge/error.hpp"

namespace zf {

double QSqrt5::to_double() const { return a_.get_d() + b_.get_d() * std::sqrt(5.0); }

std::string QSqrt5::str() const {
  if (b_ == 0) return a_.get_str();
  return a_.get_str() + (b_ < 0 ? " - " : " + ") + Rational(abs(b_)).get_str() + "*sqrt5";
}

QSqrt5 QSqrt5::inverse() const {
  const Rational d = a_ * a_ - 5 * b_ * b_;
  if (d == 0) fail(ErrorKind::Domain, "division by zero in Q(sqrt5)");
  return QSqrt5(a_ / d, -b_ / d);
}

QSqrt5& QSqrt5::operator+=(const QSqrt5& o) {
  a_ += o.a_;
  b_ += o.b_;
  return *this;
}

QSqrt5& QSqrt5::operator-=(const QSqrt5& o) {
  a_ -= o.a_;
  b_ -= o.b_;
  return *this;
}

QSqrt5& QSqrt5::operator*=(const QSqrt5& o) {
  const Rational a = a_ * o.a_ + 5 * b_ * o.b_;
  const Rational b = a_ * o.b_ + b_ * o.a_;
  a_ = a;
  b_ = b;
  return *this;
}

ExactMatrix ExactMatrix::identity(int n) {
  ExactMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

ExactMatrix ExactMatrix::operator*(const ExactMatrix& o) const {
  ExactMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k) {
      if ((*this)(i, k).is_zero()) continue;
      for (int j = 0; j < n_; ++j) r(i, j) += (*this)(i, k) * o(k, j);
    }
  return r;
}

ExactMatrix ExactMatrix::operator-() const {
  ExactMatrix r(n_);
  for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = -e_[i];
  return r;
}

ExactMatrix ExactMatrix::transpose() const {
  ExactMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

bool ExactMatrix::is_orthogonal() const { return transpose() * (*this) == identity(n_); }

std::vector<double> ExactMatrix::to_double() const {
  std::vector<double> d(e_.size());
  for (std::size_t i = 0; i < e_.size(); ++i) d[i] = e_[i].to_double();
  return d;
}

}  // namespace zf
