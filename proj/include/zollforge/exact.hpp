#pragma once
// Exact arithmetic in Q(sqrt 5): a + b sqrt(5) with GMP rationals. Enough for
// the icosahedral coefficients and every rational construction.

#include <gmpxx.h>

#include <string>
#include <vector>

namespace zf {

using Rational = mpq_class;

class QSqrt5 {
 public:
  QSqrt5() = default;
  QSqrt5(long a) : a_(a), b_(0) {}  // NOLINT
  QSqrt5(Rational a, Rational b = 0) : a_(std::move(a)), b_(std::move(b)) {}  // NOLINT
  static QSqrt5 sqrt5() { return QSqrt5(0, 1); }
  static QSqrt5 golden() { return QSqrt5(Rational(1, 2), Rational(1, 2)); }

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }
  bool is_rational() const { return b_ == 0; }
  double to_double() const;
  std::string str() const;

  QSqrt5 inverse() const;  // throws Domain on zero

  QSqrt5& operator+=(const QSqrt5& o);
  QSqrt5& operator-=(const QSqrt5& o);
  QSqrt5& operator*=(const QSqrt5& o);
  QSqrt5 operator-() const { return QSqrt5(-a_, -b_); }
  bool operator==(const QSqrt5& o) const { return a_ == o.a_ && b_ == o.b_; }
  bool operator!=(const QSqrt5& o) const { return !(*this == o); }

 private:
  Rational a_ = 0, b_ = 0;
};

inline QSqrt5 operator+(QSqrt5 x, const QSqrt5& y) { return x += y; }
inline QSqrt5 operator-(QSqrt5 x, const QSqrt5& y) { return x -= y; }
inline QSqrt5 operator*(QSqrt5 x, const QSqrt5& y) { return x *= y; }
inline QSqrt5 operator/(const QSqrt5& x, const QSqrt5& y) { return x * y.inverse(); }

// square matrix over Q(sqrt 5), row major
class ExactMatrix {
 public:
  ExactMatrix() = default;
  explicit ExactMatrix(int n) : n_(n), e_(static_cast<std::size_t>(n) * n) {}
  static ExactMatrix identity(int n);
  int size() const { return n_; }
  QSqrt5& operator()(int i, int j) { return e_[static_cast<std::size_t>(i) * n_ + j]; }
  const QSqrt5& operator()(int i, int j) const { return e_[static_cast<std::size_t>(i) * n_ + j]; }
  ExactMatrix operator*(const ExactMatrix& o) const;
  ExactMatrix operator-() const;
  ExactMatrix transpose() const;
  bool operator==(const ExactMatrix& o) const { return n_ == o.n_ && e_ == o.e_; }
  bool is_orthogonal() const;
  std::vector<double> to_double() const;

 private:
  int n_ = 0;
  std::vector<QSqrt5> e_;
};

}  // namespace zf
