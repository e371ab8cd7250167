#include "zollforge/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "zollforge/error.hpp"

namespace zf {

namespace {

bool is_zero_coeff(const QSqrt5& c) { return c.is_zero(); }
bool is_zero_coeff(double c) { return c == 0.0; }

}  // namespace

template <class C>
Polynomial<C> Polynomial<C>::variable(int nvars, int i) {
  Polynomial p(nvars);
  Exponents e(nvars, 0);
  e[i] = 1;
  p.t_[e] = C(1);
  return p;
}

template <class C>
Polynomial<C> Polynomial<C>::constant(int nvars, const C& c) {
  Polynomial p(nvars);
  p.add_term(Exponents(nvars, 0), c);
  return p;
}

template <class C>
Polynomial<C> Polynomial<C>::linear(const std::vector<C>& w) {
  const int n = static_cast<int>(w.size());
  Polynomial p(n);
  for (int i = 0; i < n; ++i) {
    Exponents e(n, 0);
    e[i] = 1;
    p.add_term(e, w[i]);
  }
  return p;
}

template <class C>
void Polynomial<C>::add_term(const Exponents& e, const C& c) {
  if (static_cast<int>(e.size()) != n_) fail(ErrorKind::Domain, "exponent length does not match variable count");
  if (is_zero_coeff(c)) return;
  auto it = t_.find(e);
  if (it == t_.end()) {
    t_.emplace(e, c);
    return;
  }
  it->second += c;
  if (is_zero_coeff(it->second)) t_.erase(it);
}

template <class C>
C Polynomial<C>::coeff(const Exponents& e) const {
  auto it = t_.find(e);
  return it == t_.end() ? C(0) : it->second;
}

template <class C>
int Polynomial<C>::degree() const {
  int d = -1;
  for (const auto& [e, c] : t_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

template <class C>
int Polynomial<C>::min_degree() const {
  int d = -1;
  for (const auto& [e, c] : t_) {
    const int s = std::accumulate(e.begin(), e.end(), 0);
    d = d < 0 ? s : std::min(d, s);
  }
  return d;
}

template <class C>
Polynomial<C>& Polynomial<C>::operator+=(const Polynomial& o) {
  if (o.n_ != n_) fail(ErrorKind::Domain, "polynomial variable counts differ");
  for (const auto& [e, c] : o.t_) add_term(e, c);
  return *this;
}

template <class C>
Polynomial<C>& Polynomial<C>::operator-=(const Polynomial& o) {
  if (o.n_ != n_) fail(ErrorKind::Domain, "polynomial variable counts differ");
  for (const auto& [e, c] : o.t_) add_term(e, C(0) - c);
  return *this;
}

template <class C>
Polynomial<C> Polynomial<C>::operator*(const Polynomial& o) const {
  if (o.n_ != n_) fail(ErrorKind::Domain, "polynomial variable counts differ");
  Polynomial r(n_);
  Exponents e(n_);
  for (const auto& [ea, ca] : t_)
    for (const auto& [eb, cb] : o.t_) {
      for (int i = 0; i < n_; ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  return r;
}

template <class C>
Polynomial<C> Polynomial<C>::scaled(const C& s) const {
  Polynomial r(n_);
  for (const auto& [e, c] : t_) r.add_term(e, c * s);
  return r;
}

template <class C>
Polynomial<C> Polynomial<C>::pow(int k) const {
  Polynomial r = constant(n_, C(1)), b = *this;
  while (k > 0) {
    if (k & 1) r = r * b;
    k >>= 1;
    if (k) b = b * b;
  }
  return r;
}

template <class C>
Polynomial<C> Polynomial<C>::derivative(int i) const {
  Polynomial r(n_);
  for (const auto& [e, c] : t_) {
    if (e[i] == 0) continue;
    Exponents f = e;
    --f[i];
    r.add_term(f, c * C(e[i]));
  }
  return r;
}

template <class C>
Polynomial<C> Polynomial<C>::laplacian() const {
  Polynomial r(n_);
  for (const auto& [e, c] : t_)
    for (int i = 0; i < n_; ++i) {
      if (e[i] < 2) continue;
      Exponents f = e;
      f[i] -= 2;
      r.add_term(f, c * C(static_cast<long>(e[i]) * (e[i] - 1)));
    }
  return r;
}

namespace {
double as_double(const QSqrt5& c) { return c.to_double(); }
double as_double(double c) { return c; }
}  // namespace

template <class C>
double Polynomial<C>::evaluate(const double* x) const {
  double s = 0.0;
  for (const auto& [e, c] : t_) {
    double m = as_double(c);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < e[i]; ++k) m *= x[i];
    s += m;
  }
  return s;
}

template <class C>
Polynomial<C> Polynomial<C>::compose(const std::vector<Polynomial>& subs) const {
  if (static_cast<int>(subs.size()) != n_) fail(ErrorKind::Domain, "substitution count does not match");
  const int m = subs.empty() ? n_ : subs[0].nvars();
  std::vector<std::vector<Polynomial>> powers(n_);
  for (int i = 0; i < n_; ++i) powers[i].push_back(constant(m, C(1)));
  Polynomial r(m);
  for (const auto& [e, c] : t_) {
    Polynomial term = constant(m, c);
    for (int i = 0; i < n_; ++i) {
      while (static_cast<int>(powers[i].size()) <= e[i]) powers[i].push_back(powers[i].back() * subs[i]);
      if (e[i] > 0) term = term * powers[i][e[i]];
    }
    r += term;
  }
  return r;
}

template <class C>
Polynomial<C> Polynomial<C>::compose_linear(const std::vector<C>& A, int m) const {
  if (m < 0) m = n_;
  if (static_cast<int>(A.size()) != n_ * m) fail(ErrorKind::Domain, "matrix size does not match");
  std::vector<Polynomial> subs;
  for (int i = 0; i < n_; ++i) subs.push_back(linear(std::vector<C>(A.begin() + i * m, A.begin() + (i + 1) * m)));
  return compose(subs);
}

template class Polynomial<QSqrt5>;
template class Polynomial<double>;

FloatPolynomial to_float(const ExactPolynomial& p) {
  FloatPolynomial r(p.nvars());
  for (const auto& [e, c] : p.terms()) r.add_term(e, c.to_double());
  return r;
}

double max_abs_coeff(const FloatPolynomial& p) {
  double m = 0.0;
  for (const auto& [e, c] : p.terms()) m = std::max(m, std::abs(c));
  return m;
}

double max_abs_coeff(const ExactPolynomial& p) { return max_abs_coeff(to_float(p)); }

ExactPolynomial hyperplane_laplacian(const ExactPolynomial& p) {
  const int n = p.nvars();
  ExactPolynomial d(n);
  for (int i = 0; i < n; ++i) d += p.derivative(i);  // DP . N
  ExactPolynomial hnn(n);
  for (int i = 0; i < n; ++i) hnn += d.derivative(i);  // Hess P (N, N)
  return p.laplacian() - hnn.scaled(QSqrt5(Rational(1, n)));
}

ExactPolynomial restrict_to_sum_zero(const ExactPolynomial& p) {
  const int n = p.nvars();
  std::vector<ExactPolynomial> subs;
  for (int i = 0; i + 1 < n; ++i) subs.push_back(ExactPolynomial::variable(n, i));
  std::vector<QSqrt5> w(n, QSqrt5(-1));
  w[n - 1] = 0;
  subs.push_back(ExactPolynomial::linear(w));
  return p.compose(subs);
}

std::vector<std::vector<double>> term_rows(const ExactPolynomial& p) {
  std::vector<std::vector<double>> rows;
  for (const auto& [e, c] : p.terms()) {
    std::vector<double> r(e.begin(), e.end());
    r.push_back(c.to_double());
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string to_string(const ExactPolynomial& p) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.str() << ")";
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i]) os << "*x" << i << (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
  }
  return first ? "0" : os.str();
}

}  // namespace zf
