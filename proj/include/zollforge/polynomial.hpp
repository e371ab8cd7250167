#pragma once
// Sparse multivariate polynomials, exact over Q(sqrt 5) or in double.

#include <map>
#include <string>
#include <vector>

#include "zollforge/exact.hpp"

namespace zf {

using Exponents = std::vector<int>;

template <class C>
class Polynomial {
 public:
  explicit Polynomial(int nvars = 3) : n_(nvars) {}
  static Polynomial variable(int nvars, int i);
  static Polynomial constant(int nvars, const C& c);
  // sum_i w[i] x_i
  static Polynomial linear(const std::vector<C>& w);

  int nvars() const { return n_; }
  const std::map<Exponents, C>& terms() const { return t_; }
  void add_term(const Exponents& e, const C& c);
  C coeff(const Exponents& e) const;
  bool is_zero() const { return t_.empty(); }
  int degree() const;      // -1 for zero
  int min_degree() const;  // -1 for zero
  bool is_homogeneous() const { return degree() == min_degree(); }
  std::size_t size() const { return t_.size(); }
  bool operator==(const Polynomial& o) const { return n_ == o.n_ && t_ == o.t_; }

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(const C& s) const;
  Polynomial pow(int k) const;

  Polynomial derivative(int i) const;
  Polynomial laplacian() const;
  double evaluate(const double* x) const;
  // x_i -> subs[i]
  Polynomial compose(const std::vector<Polynomial>& subs) const;
  // P(A x), A row major nvars x nvars (or nvars rows of m entries for a map from R^m)
  Polynomial compose_linear(const std::vector<C>& A, int m = -1) const;

 private:
  int n_;
  std::map<Exponents, C> t_;
};

template <class C>
Polynomial<C> operator+(Polynomial<C> a, const Polynomial<C>& b) {
  return a += b;
}
template <class C>
Polynomial<C> operator-(Polynomial<C> a, const Polynomial<C>& b) {
  return a -= b;
}

using ExactPolynomial = Polynomial<QSqrt5>;
using FloatPolynomial = Polynomial<double>;

FloatPolynomial to_float(const ExactPolynomial& p);
// max |coefficient|
double max_abs_coeff(const FloatPolynomial& p);
double max_abs_coeff(const ExactPolynomial& p);

// Laplacian of P restricted to the hyperplane N^perp, N = (1, ..., 1):
// Delta P - Hess P(nu, nu) with nu = N / |N|
ExactPolynomial hyperplane_laplacian(const ExactPolynomial& p);
// substitute x_last = -(x_1 + ... + x_{last-1}); zero iff P vanishes on N^perp
ExactPolynomial restrict_to_sum_zero(const ExactPolynomial& p);

// {"poly": [[i, j, k, coeff], ...]} style rows, coefficients as doubles
std::vector<std::vector<double>> term_rows(const ExactPolynomial& p);
std::string to_string(const ExactPolynomial& p);

}  // namespace zf
