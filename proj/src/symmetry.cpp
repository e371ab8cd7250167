#include "zollforge/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>

#include "json.hpp"
#include "zollforge/error.hpp"
#include "zollforge/io.hpp"

namespace zf {

using io::Json;

namespace {

constexpr double kInvariantTol = 1e-9;
constexpr double kWitnessTol = 1e-6;

Eigen::MatrixXd rows3(std::initializer_list<double> v) {
  Eigen::MatrixXd m(3, 3);
  auto it = v.begin();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = *it++;
  return m;
}

ExactMatrix exact3(std::initializer_list<QSqrt5> v) {
  ExactMatrix m(3);
  auto it = v.begin();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = *it++;
  return m;
}

GroupElement from_exact(const ExactMatrix& e) {
  const int n = e.size();
  const auto d = e.to_double();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = d[static_cast<std::size_t>(i) * n + j];
  return {m, e};
}

GroupElement flip() { return from_exact(exact3({1, 0, 0, 0, -1, 0, 0, 0, -1})); }
GroupElement cyclic3() { return from_exact(exact3({0, 0, 1, 1, 0, 0, 0, 1, 0})); }
GroupElement identity3() { return from_exact(ExactMatrix::identity(3)); }

GroupElement icosa_generator() {
  const QSqrt5 h(Rational(1, 2));
  const QSqrt5 p = QSqrt5::golden() * h, q = (QSqrt5::golden() - QSqrt5(1)) * h;
  return from_exact(exact3({h, -p, q, p, q, -h, q, h, p}));
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
  return s;
}

const std::vector<std::string>& fixed_names() {
  static const std::vector<std::string> v{"Id", "T", "O", "I", "Id[Z2", "T[O"};
  return v;
}
const std::vector<std::string>& family_names() {
  static const std::vector<std::string> v{"Zn", "Dn", "Zn[Z2n", "Zn[Dn", "Dn[D2n"};
  return v;
}

// Re and Im of (x + i y)^n
std::pair<ExactPolynomial, ExactPolynomial> zpow(int n) {
  ExactPolynomial re(3), im(3);
  mpz_class binom = 1;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) binom = binom * (n - k + 1) / k;
    const long sign = ((k / 2) % 2 == 0) ? 1 : -1;
    const QSqrt5 c(Rational(binom * sign));
    if (k % 2 == 0)
      re.add_term({n - k, k, 0}, c);
    else
      im.add_term({n - k, k, 0}, c);
  }
  return {re, im};
}

ExactPolynomial var(int i) { return ExactPolynomial::variable(3, i); }

std::vector<QSqrt5> flat(const ExactMatrix& m) {
  std::vector<QSqrt5> v;
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) v.push_back(m(i, j));
  return v;
}

// Dense homogeneous polynomial in 3 variables, coefficient of x^i y^j t^(d-i-j) at i*(d+1)+j.
template <class C>
struct Homog {
  int d = 0;
  std::vector<C> c;
  explicit Homog(int deg) : d(deg), c(static_cast<std::size_t>(deg + 1) * (deg + 1), C(0)) {}
  C& at(int i, int j) { return c[static_cast<std::size_t>(i) * (d + 1) + j]; }
  const C& at(int i, int j) const { return c[static_cast<std::size_t>(i) * (d + 1) + j]; }
};

bool nonzero(const QSqrt5& v) { return !v.is_zero(); }
bool nonzero(double v) { return v != 0.0; }

template <class C>
Homog<C> mul(const Homog<C>& a, const Homog<C>& b) {
  Homog<C> r(a.d + b.d);
  for (int i1 = 0; i1 <= a.d; ++i1)
    for (int j1 = 0; i1 + j1 <= a.d; ++j1) {
      const C& ca = a.at(i1, j1);
      if (!nonzero(ca)) continue;
      for (int i2 = 0; i2 <= b.d; ++i2)
        for (int j2 = 0; i2 + j2 <= b.d; ++j2) {
          const C& cb = b.at(i2, j2);
          if (!nonzero(cb)) continue;
          r.at(i1 + i2, j1 + j2) += ca * cb;
        }
    }
  return r;
}

// P(A x) through dense homogeneous products
template <class C>
Polynomial<C> compose_dense(const Polynomial<C>& p, const std::vector<C>& A) {
  std::vector<std::vector<Homog<C>>> pw(3);
  for (int r = 0; r < 3; ++r) {
    Homog<C> one(0);
    one.at(0, 0) = C(1);
    Homog<C> l(1);
    l.at(1, 0) = A[3 * r];
    l.at(0, 1) = A[3 * r + 1];
    l.at(0, 0) = A[3 * r + 2];
    pw[r].push_back(one);
    pw[r].push_back(l);
  }
  auto power = [&](int r, int k) -> const Homog<C>& {
    while (static_cast<int>(pw[r].size()) <= k) pw[r].push_back(mul(pw[r].back(), pw[r][1]));
    return pw[r][k];
  };
  std::map<std::pair<int, int>, Homog<C>> ab;
  std::map<int, Homog<C>> out;
  for (const auto& [e, c] : p.terms()) {
    auto key = std::make_pair(e[0], e[1]);
    auto it = ab.find(key);
    if (it == ab.end()) it = ab.emplace(key, mul(power(0, e[0]), power(1, e[1]))).first;
    Homog<C> term = mul(it->second, power(2, e[2]));
    const int d = term.d;
    auto ot = out.find(d);
    if (ot == out.end()) ot = out.emplace(d, Homog<C>(d)).first;
    for (std::size_t k = 0; k < term.c.size(); ++k)
      if (nonzero(term.c[k])) ot->second.c[k] += c * term.c[k];
  }
  Polynomial<C> r(3);
  for (const auto& [d, h] : out)
    for (int i = 0; i <= d; ++i)
      for (int j = 0; i + j <= d; ++j) r.add_term({i, j, d - i - j}, h.at(i, j));
  return r;
}

// x_r -> s_r y_{pi(r)} when A is a signed permutation
bool signed_permutation(const ExactMatrix& A, std::vector<int>& pi, std::vector<int>& sg) {
  const int n = A.size();
  pi.assign(n, -1);
  sg.assign(n, 0);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s) {
      const QSqrt5& v = A(r, s);
      if (v.is_zero()) continue;
      if (pi[r] >= 0) return false;
      if (v == QSqrt5(1))
        sg[r] = 1;
      else if (v == QSqrt5(-1))
        sg[r] = -1;
      else
        return false;
      pi[r] = s;
    }
  return std::all_of(pi.begin(), pi.end(), [](int v) { return v >= 0; });
}

ExactPolynomial compose_exact(const ExactPolynomial& p, const ExactMatrix& A) {
  std::vector<int> pi, sg;
  if (signed_permutation(A, pi, sg)) {
    ExactPolynomial r(p.nvars());
    for (const auto& [e, c] : p.terms()) {
      Exponents f(e.size(), 0);
      int s = 1;
      for (std::size_t i = 0; i < e.size(); ++i) {
        f[pi[i]] += e[i];
        if (sg[i] < 0 && e[i] % 2) s = -s;
      }
      r.add_term(f, s > 0 ? c : -c);
    }
    return r;
  }
  if (p.nvars() != 3) return p.compose_linear(flat(A));
  return compose_dense(p, flat(A));
}

FloatPolynomial compose_float(const FloatPolynomial& p, const Eigen::MatrixXd& A) {
  std::vector<double> a(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[3 * i + j] = A(i, j);
  return compose_dense(p, a);
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(std::abs(m(i, j)) < 1e-15 ? 0.0 : m(i, j));
    rows.push_back(r);
  }
  return rows;
}

Eigen::MatrixXd rot_about_t(double a) {
  return rows3({std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1});
}

}  // namespace

GroupElement element(const Eigen::MatrixXd& m, std::optional<ExactMatrix> exact) { return {m, std::move(exact)}; }
GroupElement exact_element(const ExactMatrix& e) { return from_exact(e); }

GroupElement minus(const GroupElement& g) {
  GroupElement r{-g.m, std::nullopt};
  if (g.exact) r.exact = -*g.exact;
  return r;
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
  GroupElement r{a.m * b.m, std::nullopt};
  if (a.exact && b.exact) r.exact = *a.exact * *b.exact;
  return r;
}

GroupElement axial_rotation(int k, int n) {
  k = ((k % n) + n) % n;
  if ((4 * k) % n == 0) {
    const int q = 4 * k / n;
    static const int cs[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const long c = cs[q][0], s = cs[q][1];
    return from_exact(exact3({c, -s, 0, s, c, 0, 0, 0, 1}));
  }
  return {rot_about_t(2.0 * M_PI * k / n), std::nullopt};
}

long FiniteGroup::index_of(const Eigen::MatrixXd& m, double tol) const {
  for (std::size_t i = 0; i < elements.size(); ++i)
    if ((elements[i].m - m).cwiseAbs().maxCoeff() <= tol) return static_cast<long>(i);
  return -1;
}

bool FiniteGroup::has_minus_identity() const {
  const int n = dim();
  return contains(-Eigen::MatrixXd::Identity(n, n));
}

void FiniteGroup::check_axioms() const {
  const int N = order(), n = dim();
  if (N == 0) fail(ErrorKind::Integrity, label() + ": empty group");
  for (const auto& g : elements)
    if ((g.m.transpose() * g.m - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
      fail(ErrorKind::Integrity, label() + ": element is not orthogonal");
  const long e = index_of(Eigen::MatrixXd::Identity(n, n));
  if (e < 0) fail(ErrorKind::Integrity, label() + ": identity missing");
  std::vector<long> table(static_cast<std::size_t>(N) * N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      const long c = index_of(elements[a].m * elements[b].m);
      if (c < 0) fail(ErrorKind::Integrity, label() + ": not closed under multiplication");
      table[static_cast<std::size_t>(a) * N + b] = c;
    }
  for (int a = 0; a < N; ++a) {
    bool inv = false;
    for (int b = 0; b < N && !inv; ++b) inv = table[static_cast<std::size_t>(a) * N + b] == e;
    if (!inv) fail(ErrorKind::Integrity, label() + ": element without inverse");
  }
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      const long ab = table[static_cast<std::size_t>(a) * N + b];
      for (int c = 0; c < N; ++c) {
        const long bc = table[static_cast<std::size_t>(b) * N + c];
        if (table[ab * N + c] != table[static_cast<std::size_t>(a) * N + bc])
          fail(ErrorKind::Integrity, label() + ": multiplication is not associative");
      }
    }
}

std::string FiniteGroup::label() const {
  if (n <= 0) return name;
  std::string s = replace_all(name, "2n", std::to_string(2 * n));
  return replace_all(s, "n", std::to_string(n));
}

FiniteGroup generate_group(const std::string& name, int n, const std::vector<GroupElement>& gens, int max_order) {
  FiniteGroup g;
  g.name = name;
  g.n = n;
  const int d = gens.empty() ? 3 : static_cast<int>(gens[0].m.rows());
  bool all_exact = std::all_of(gens.begin(), gens.end(), [](const GroupElement& e) { return e.exact.has_value(); });
  g.elements.push_back(all_exact ? from_exact(ExactMatrix::identity(d))
                                 : GroupElement{Eigen::MatrixXd::Identity(d, d), std::nullopt});
  for (std::size_t q = 0; q < g.elements.size(); ++q) {
    for (const auto& s : gens) {
      GroupElement p = compose(s, g.elements[q]);
      if (g.contains(p.m)) continue;
      if (g.order() >= max_order) fail(ErrorKind::Integrity, g.label() + ": generated group exceeds the size limit");
      g.elements.push_back(std::move(p));
    }
  }
  for (const auto& s : gens) g.generators.push_back(g.index_of(s.m));
  return g;
}

FiniteGroup type_three(const std::string& name, int n, const FiniteGroup& g1, const FiniteGroup& g2) {
  for (const auto& e : g1.elements)
    if (!g2.contains(e.m)) fail(ErrorKind::Integrity, name + ": first group is not a subgroup of the second");
  if (g2.order() != 2 * g1.order()) fail(ErrorKind::Integrity, name + ": subgroup index is not 2");
  FiniteGroup g;
  g.name = name;
  g.n = n;
  g.elements = g1.elements;
  g.generators = g1.generators;
  for (const auto& e : g2.elements) {
    if (g1.contains(e.m)) continue;
    if (g.order() == g1.order()) g.generators.push_back(g.order());
    g.elements.push_back(minus(e));
  }
  return g;
}

bool is_family(const std::string& name) {
  const auto& f = family_names();
  return std::find(f.begin(), f.end(), name) != f.end();
}

int expected_order(const std::string& name, int n) {
  static const std::map<std::string, int> fixed{{"Id", 1}, {"Id[Z2", 2}, {"T", 12}, {"T[O", 24}, {"O", 24}, {"I", 60}};
  if (auto it = fixed.find(name); it != fixed.end()) return it->second;
  if (name == "Zn") return n;
  if (name == "Dn" || name == "Zn[Z2n" || name == "Zn[Dn") return 2 * n;
  if (name == "Dn[D2n") return 4 * n;
  fail(ErrorKind::Config, "unknown group '" + name + "'");
}

std::pair<std::string, int> parse_group_name(const std::string& text, int n) {
  std::string s = text.rfind("catalog:", 0) == 0 ? text.substr(8) : text;
  const auto& fx = fixed_names();
  if (std::find(fx.begin(), fx.end(), s) != fx.end()) return {s, 0};
  if (is_family(s)) {
    if (n < 2) fail(ErrorKind::Config, "group '" + s + "' needs n >= 2");
    return {s, n};
  }
  std::smatch m;
  auto num = [&](int i) { return std::stoi(m[i].str()); };
  if (std::regex_match(s, m, std::regex(R"(Z(\d+))"))) return {"Zn", num(1)};
  if (std::regex_match(s, m, std::regex(R"(D(\d+))"))) return {"Dn", num(1)};
  if (std::regex_match(s, m, std::regex(R"(Z(\d+)\[Z(\d+))")) && num(2) == 2 * num(1)) return {"Zn[Z2n", num(1)};
  if (std::regex_match(s, m, std::regex(R"(Z(\d+)\[D(\d+))")) && num(2) == num(1)) return {"Zn[Dn", num(1)};
  if (std::regex_match(s, m, std::regex(R"(D(\d+)\[D(\d+))")) && num(2) == 2 * num(1)) return {"Dn[D2n", num(1)};
  fail(ErrorKind::Config, "unknown group '" + text + "'");
}

FiniteGroup build_group(const std::string& name, int n) {
  if (is_family(name) && n < 2) fail(ErrorKind::Config, "group '" + name + "' needs n >= 2");
  FiniteGroup g;
  if (name == "Id") {
    g = generate_group("Id", 0, {identity3()});
  } else if (name == "Zn") {
    g = generate_group("Zn", n, {axial_rotation(1, n)});
  } else if (name == "Dn") {
    g = generate_group("Dn", n, {axial_rotation(1, n), flip()});
  } else if (name == "T") {
    g = generate_group("T", 0, {flip(), cyclic3()});
  } else if (name == "O") {
    g = generate_group("O", 0, {flip(), cyclic3(), axial_rotation(1, 4)});
  } else if (name == "I") {
    g = generate_group("I", 0, {flip(), cyclic3(), icosa_generator()});
  } else if (name == "Id[Z2") {
    g = type_three("Id[Z2", 0, build_group("Id"), build_group("Zn", 2));
  } else if (name == "T[O") {
    g = type_three("T[O", 0, build_group("T"), build_group("O"));
  } else if (name == "Zn[Z2n") {
    g = type_three("Zn[Z2n", n, build_group("Zn", n), build_group("Zn", 2 * n));
  } else if (name == "Zn[Dn") {
    g = type_three("Zn[Dn", n, build_group("Zn", n), build_group("Dn", n));
  } else if (name == "Dn[D2n") {
    g = type_three("Dn[D2n", n, build_group("Dn", n), build_group("Dn", 2 * n));
  } else {
    fail(ErrorKind::Config, "unknown group '" + name + "'");
  }
  if (!is_family(name)) g.n = 0;
  if (g.order() != expected_order(name, n))
    fail(ErrorKind::Integrity, g.label() + ": order " + std::to_string(g.order()) + " does not match " +
                                   std::to_string(expected_order(name, n)));
  return g;
}

FiniteGroup symmetric_group(int k) {
  std::vector<GroupElement> gens;
  if (k >= 2) {
    ExactMatrix s(k), c(k);
    for (int i = 0; i < k; ++i) {
      s(i, i) = 1;
      c(i, (i + 1) % k) = 1;
    }
    s(0, 0) = 0;
    s(1, 1) = 0;
    s(0, 1) = 1;
    s(1, 0) = 1;
    gens = {from_exact(s), from_exact(c)};
  } else {
    gens = {from_exact(ExactMatrix::identity(std::max(k, 1)))};
  }
  return generate_group("S" + std::to_string(k), 0, gens);
}

FiniteGroup alternating_group(int k) {
  FiniteGroup s = symmetric_group(k);
  FiniteGroup a;
  a.name = "A" + std::to_string(k);
  for (const auto& e : s.elements)
    if (e.m.determinant() > 0) a.elements.push_back(e);
  for (std::size_t i = 0; i < a.elements.size(); ++i) a.generators.push_back(static_cast<int>(i));
  return a;
}

ExactPolynomial poly_F(int n) {
  auto [re, im] = zpow(n);
  if (n % 2) return re.scaled(QSqrt5(2));
  return (im * var(2)).scaled(QSqrt5(-2));
}

ExactPolynomial poly_H(int n) {
  auto [re, im] = zpow(n);
  if (n % 2) return im.scaled(QSqrt5(-2));
  return (re * var(2)).scaled(QSqrt5(-2));
}

ExactPolynomial octahedral_polynomial() {
  const ExactPolynomial x = var(0), y = var(1), z = var(2);
  return x * y * z * (x * x - y * y) * (y * y - z * z) * (z * z - x * x);
}

ExactPolynomial icosahedral_polynomial() {
  const QSqrt5 p = QSqrt5::golden(), q = QSqrt5::golden() - QSqrt5(1);
  const QSqrt5 one(1);
  const std::vector<std::vector<QSqrt5>> f{
      {p, q, one},   {-p, q, one},   {p, -q, one},   {p, q, -one},  {one, p, q},   {-one, p, q},
      {one, -p, q},  {one, p, -q},   {q, one, p},    {-q, one, p},  {q, -one, p},  {q, one, -p}};
  ExactPolynomial r = var(0) * var(1) * var(2);
  for (const auto& w : f) r = r * ExactPolynomial::linear(w);
  return r;
}

ExactPolynomial power_sum(int k, int m) {
  ExactPolynomial r(k);
  for (int i = 0; i < k; ++i) {
    Exponents e(k, 0);
    e[i] = m;
    r.add_term(e, QSqrt5(1));
  }
  return r;
}

ExactPolynomial vandermonde(int k) {
  ExactPolynomial r = ExactPolynomial::constant(k, QSqrt5(1));
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      std::vector<QSqrt5> w(k, QSqrt5(0));
      w[i] = 1;
      w[j] = -1;
      r = r * ExactPolynomial::linear(w);
    }
  return r;
}

ExactPolynomial vandermonde_tilde(int n) {
  if (n < 1 || n > 4) fail(ErrorKind::Domain, "vandermonde_tilde supports 1 <= n <= 4");
  const int k = n + 2;
  if (n % 4 == 0 || n % 4 == 1) return vandermonde(k);
  return power_sum(k, 3) * vandermonde(k);
}

std::vector<QSqrt5> tetra_frame() {
  const QSqrt5 h(Rational(1, 2));
  return {h, h, h, h, -h, -h, -h, h, -h, -h, -h, h};
}

GroupElement tetra_permutation(const std::vector<int>& sigma) {
  if (sigma.size() != 4) fail(ErrorKind::Domain, "tetrahedral permutation needs 4 entries");
  const auto B = tetra_frame();
  ExactMatrix m(3);
  // (sigma x)_i = x_{sigma(i)}; result B^T sigma B
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      QSqrt5 s(0);
      for (int i = 0; i < 4; ++i) s += B[3 * i + a] * B[3 * sigma[i] + b];
      m(a, b) = s;
    }
  return from_exact(m);
}

ExactPolynomial invariant_polynomial(const std::string& name, int n, int m) {
  if (is_family(name) && n < 2) fail(ErrorKind::Config, "group '" + name + "' needs n >= 2");
  const ExactMatrix Ti = exact3({1, 0, 0, 0, 0, 1, 0, -1, 0});  // transpose of (x, y, t) -> (x, -t, y)
  if (name == "Id") return compose_exact(poly_H(4) + poly_F(12), Ti) + poly_H(2) + poly_F(6);
  if (name == "Id[Z2") return compose_exact(poly_H(6) + poly_H(12), Ti) + poly_H(3) + poly_F(9);
  if (name == "O") return octahedral_polynomial();
  if (name == "I") return icosahedral_polynomial();
  if (name == "T" || name == "T[O") {
    if (m < 3 || m % 2 == 0) fail(ErrorKind::Domain, "power-sum exponent must be odd and > 1");
    ExactPolynomial q = power_sum(4, m);
    if (name == "T") {
      if (m == 9) fail(ErrorKind::Domain, "power-sum exponent must differ from the Vandermonde degree");
      q += vandermonde_tilde(2);
    }
    return q.compose_linear(tetra_frame(), 3);
  }
  if (name == "Zn") return poly_F(n) + poly_H(2 * n) + poly_F(4 * n);
  if (name == "Dn") return poly_F(n) + poly_F(2 * n);
  if (name == "Zn[Z2n") return poly_H(n) + poly_F(3 * n);
  if (name == "Zn[Dn") return poly_H(n) + poly_H(2 * n);
  if (name == "Dn[D2n") return poly_F(n);
  fail(ErrorKind::Config, "unknown group '" + name + "'");
}

Invariance is_invariant(const ExactPolynomial& p, const GroupElement& A, InvarianceMode mode) {
  Invariance r;
  const double scale = max_abs_coeff(p);
  const bool exact = mode == InvarianceMode::Exact || (mode == InvarianceMode::Auto && A.exact.has_value());
  if (exact) {
    if (!A.exact) fail(ErrorKind::Domain, "exact invariance needs an exact matrix");
    const ExactPolynomial d = compose_exact(p, *A.exact) - p;
    r.exact = true;
    r.invariant = d.is_zero();
    r.margin = scale > 0 ? max_abs_coeff(d) / scale : 0.0;
    return r;
  }
  const FloatPolynomial fp = to_float(p);
  FloatPolynomial d = compose_float(fp, A.m);
  d -= fp;
  r.margin = scale > 0 ? max_abs_coeff(d) / scale : 0.0;
  r.invariant = r.margin < kInvariantTol;
  return r;
}

std::string StabilizerReport::to_json() const {
  Json j;
  j["group"] = group;
  j["order"] = order;
  j["expected_order"] = expected_order;
  j["degree"] = degree;
  j["axioms"] = axioms;
  j["no_minus_identity"] = no_minus_id;
  j["members_invariant"] = members;
  j["witnesses_break"] = witnesses;
  j["harmonic"] = harmonic;
  j["odd"] = odd;
  j["member_margin"] = member_margin;
  j["witness_margin"] = witness_margin;
  j["failures"] = failures;
  j["passed"] = passed();
  return io::canonical_dump(j);
}

StabilizerReport stabilizer_verify(const ExactPolynomial& p, const FiniteGroup& g,
                                   const std::vector<GroupElement>& witnesses) {
  StabilizerReport r;
  r.group = g.label();
  r.order = g.order();
  r.expected_order = expected_order(g.name, g.n);
  r.degree = p.degree();
  if (r.order != r.expected_order) r.failures.push_back("order mismatch");
  try {
    g.check_axioms();
    r.axioms = true;
  } catch (const Error& e) {
    r.failures.push_back(e.what());
  }
  r.no_minus_id = !g.has_minus_identity();
  if (!r.no_minus_id) r.failures.push_back("contains -Id");
  r.harmonic = p.laplacian().is_zero();
  if (!r.harmonic) r.failures.push_back("not harmonic");
  r.odd = !p.is_zero() && p.min_degree() >= 3;
  for (const auto& [e, c] : p.terms())
    if ((e[0] + e[1] + e[2]) % 2 == 0) r.odd = false;
  if (!r.odd) r.failures.push_back("not odd of degree >= 3");

  r.members = true;
  for (std::size_t i = 0; i < g.elements.size(); ++i) {
    const Invariance v = is_invariant(p, g.elements[i], InvarianceMode::Float);
    r.member_margin = std::max(r.member_margin, v.margin);
    if (!v.invariant) r.members = false;
  }
  for (int k : g.generators) {
    const auto& e = g.elements[k];
    if (e.exact && !is_invariant(p, e, InvarianceMode::Exact).invariant) r.members = false;
  }
  if (!r.members) r.failures.push_back("not invariant under the group");

  r.witnesses = !witnesses.empty();
  r.witness_margin = witnesses.empty() ? 0.0 : INFINITY;
  for (const auto& w : witnesses) {
    const Invariance v = is_invariant(p, w, InvarianceMode::Float);
    r.witness_margin = std::min(r.witness_margin, v.margin);
    if (v.margin <= kWitnessTol) r.witnesses = false;
  }
  if (!r.witnesses) r.failures.push_back("a witness leaves the polynomial invariant");
  return r;
}

std::string CatalogEntry::to_json() const {
  Json j;
  j["group"] = group.label();
  j["order"] = group.order();
  j["degree"] = poly.degree();
  Json rows = Json::array();
  for (const auto& row : term_rows(poly)) {
    Json r = Json::array();
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k < 3)
        r.push_back(static_cast<int>(row[k]));
      else
        r.push_back(row[k]);
    }
    rows.push_back(r);
  }
  j["poly"] = rows;
  Json w = Json::array();
  for (const auto& e : witnesses) w.push_back(matrix_json(e.m));
  j["witnesses"] = w;
  return io::canonical_dump(j);
}

CatalogEntry catalog_entry(const std::string& name, int n) {
  CatalogEntry c;
  c.group = build_group(name, n);
  c.poly = invariant_polynomial(name, n);
  auto& w = c.witnesses;
  const GroupElement minus_id = from_exact(-ExactMatrix::identity(3));
  if (is_family(name)) {
    w.push_back({rot_about_t(2.0 * M_PI / (3 * n)), std::nullopt});
    const GroupElement half_turn_flip = minus(GroupElement{rot_about_t(M_PI / n), std::nullopt});  // (-zeta_2n z, -t)
    if (name == "Dn" || name == "Zn[Dn" || name == "Zn") w.push_back(half_turn_flip);
    if (name == "Zn[Z2n") w.push_back({rot_about_t(-M_PI / n) * flip().m, std::nullopt});  // (xi^-2 conj z, -t)
    if (name == "Zn") w.push_back(flip());
  } else if (name == "Id") {
    for (const auto& e : build_group("Zn[Z2n", 2).elements)
      if (!e.m.isIdentity(1e-12)) w.push_back(e);
  } else if (name == "Id[Z2") {
    const FiniteGroup id2 = c.group;
    for (const auto& e : build_group("Zn[Z2n", 3).elements)
      if (!id2.contains(e.m)) w.push_back(e);
  } else if (name == "T") {
    w.push_back(tetra_permutation({1, 0, 2, 3}));
    w.push_back(minus_id);
    w.push_back(axial_rotation(1, 4));
    w.push_back(icosa_generator());
  } else if (name == "T[O") {
    w.push_back(minus_id);
    w.push_back(axial_rotation(1, 4));
    w.push_back(icosa_generator());
  } else if (name == "O") {
    w.push_back(minus_id);
    w.push_back({rot_about_t(M_PI / 4), std::nullopt});
    w.push_back(icosa_generator());
  } else if (name == "I") {
    w.push_back(minus_id);
    w.push_back(axial_rotation(1, 4));
  }
  return c;
}

std::vector<std::pair<std::string, int>> catalog_keys(int n_max) {
  std::vector<std::pair<std::string, int>> k;
  for (const auto& f : fixed_names()) k.emplace_back(f, 0);
  for (int n = 2; n <= n_max; ++n)
    for (const auto& f : family_names()) k.emplace_back(f, n);
  return k;
}

std::vector<CatalogEntry> build_catalog(int n_max) {
  std::vector<CatalogEntry> out;
  for (const auto& [name, n] : catalog_keys(n_max)) {
    CatalogEntry e = catalog_entry(name, n);
    const StabilizerReport r = stabilizer_verify(e.poly, e.group, e.witnesses);
    if (!r.passed()) fail(ErrorKind::Integrity, e.group.label() + ": " + r.failures.front());
    out.push_back(std::move(e));
  }
  return out;
}

SphereFunction restrict_to_sphere(const ExactPolynomial& p, int l_max) {
  if (p.nvars() != 3) fail(ErrorKind::Domain, "restriction needs a polynomial on R^3");
  const int L = std::max(l_max, p.degree());
  const SphereGrid grid = SphereGrid::for_lmax(L);
  const FloatPolynomial f = to_float(p);
  std::vector<double> s(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s[i] = f.evaluate(grid.nodes()[i].data());
  return project(grid, s, L).resized(l_max);
}

SimplexFrame SimplexFrame::make(int n) {
  if (n < 1) fail(ErrorKind::Domain, "simplex dimension must be >= 1");
  SimplexFrame f;
  f.n = n;
  const int k = n + 2;
  const Eigen::VectorXd N = Eigen::VectorXd::Ones(k);
  const double s = std::sqrt(double(n + 1) * (n + 2));
  for (int i = 0; i < k; ++i) f.vertices.push_back((double(k) * Eigen::VectorXd::Unit(k, i) - N) / s);
  // Helmert basis of N^perp
  for (int j = 1; j < k; ++j) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
    b.head(j).setOnes();
    b[j] = -j;
    f.basis.push_back(b / std::sqrt(double(j) * (j + 1)));
  }
  return f;
}

std::vector<CriticalPoint> critical_points_powersum(int n, int m) {
  if (m < 3 || m % 2 == 0) fail(ErrorKind::Domain, "power-sum exponent must be odd and > 1");
  if (n < 1) fail(ErrorKind::Domain, "simplex dimension must be >= 1");
  const int K = n + 2;
  const Eigen::VectorXd nu = Eigen::VectorXd::Ones(K) / std::sqrt(double(K));
  std::vector<CriticalPoint> out;
  for (int k = 1; 2 * k <= K; ++k) {
    CriticalPoint c;
    c.k = k;
    c.a = std::sqrt(double(K - k) / (double(K) * k));
    c.b = -std::sqrt(double(k) / (double(K) * (K - k)));
    c.x.resize(K);
    for (int i = 0; i < K; ++i) c.x[i] = i < k ? c.a : c.b;
    c.value = k * std::pow(c.a, m) + (K - k) * std::pow(c.b, m);
    Eigen::VectorXd g(K);
    for (int i = 0; i < K; ++i) g[i] = m * std::pow(c.x[i], m - 1);
    g -= g.dot(nu) * nu;
    const Eigen::VectorXd u = c.x.normalized();
    g -= g.dot(u) * u;
    c.gradient_norm = g.norm();
    out.push_back(std::move(c));
  }
  return out;
}

int two_root_check(int m, double c, double d) {
  if (m < 3 || m % 2 == 0) fail(ErrorKind::Domain, "exponent must be odd and > 1");
  const int p = m - 1;  // even
  auto Q = [&](double y) { return std::pow(y, p) - c * y - d; };
  auto dQ = [&](double y) { return p * std::pow(y, p - 1) - c; };
  // Q is convex with a single minimum
  const double ys = c == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(c / p), 1.0 / (p - 1)), c);
  const double qmin = Q(ys);
  const double scale = 1.0 + std::abs(d) + std::abs(c * ys) + std::pow(std::abs(ys), p);
  if (std::abs(qmin) <= 1e-12 * scale) return 1;
  if (qmin > 0) return 0;
  std::vector<double> roots;
  for (int side : {-1, 1}) {
    double lo = ys, hi = ys + side * (1.0 + std::abs(ys));
    while (Q(hi) < 0) hi = ys + 2.0 * (hi - ys);
    for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-15 * (1 + std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (Q(mid) < 0 ? lo : hi) = mid;
    }
    double y = hi;
    for (int it = 0; it < 3; ++it) {
      const double dq = dQ(y);
      if (dq != 0.0) y -= Q(y) / dq;
    }
    if (roots.empty() || std::abs(roots.back() - y) > 1e-12 * (1 + std::abs(y))) roots.push_back(y);
  }
  const int count = static_cast<int>(roots.size());
  if (count > 2) fail(ErrorKind::Integrity, "more than two real roots");
  return count;
}

}  // namespace zf
