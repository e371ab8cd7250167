#pragma once
// Finite subgroups of O(3) without -Id (Types I and III), odd harmonic
// polynomials with exactly those stabilizers, and the simplex power-sum
// machinery behind the tetrahedral cases.
//
// Coordinates on R^3 are (x, y, t) with z = x + i y.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zollforge/polynomial.hpp"
#include "zollforge/sphere.hpp"

namespace zf {

struct GroupElement {
  Eigen::MatrixXd m;
  std::optional<ExactMatrix> exact;
};

GroupElement element(const Eigen::MatrixXd& m, std::optional<ExactMatrix> exact = std::nullopt);
GroupElement exact_element(const ExactMatrix& e);

struct FiniteGroup {
  std::string name;  // e.g. "Dn[D2n"
  int n = 0;         // family parameter, 0 for fixed groups
  std::vector<GroupElement> elements;
  std::vector<int> generators;  // indices into elements

  int order() const { return static_cast<int>(elements.size()); }
  int dim() const { return elements.empty() ? 0 : static_cast<int>(elements[0].m.rows()); }
  long index_of(const Eigen::MatrixXd& m, double tol = 1e-10) const;
  bool contains(const Eigen::MatrixXd& m, double tol = 1e-10) const { return index_of(m, tol) >= 0; }
  bool has_minus_identity() const;
  // closure, identity, inverses and associativity through the Cayley table;
  // throws Integrity on failure
  void check_axioms() const;
  std::string label() const;  // "D3[D6", "T", ...
};

// closure of the generators under multiplication; throws Integrity past max_order
FiniteGroup generate_group(const std::string& name, int n, const std::vector<GroupElement>& gens,
                           int max_order = 2000);
// G1[G2 = G1 u { -g : g in G2 \ G1 }
FiniteGroup type_three(const std::string& name, int n, const FiniteGroup& g1, const FiniteGroup& g2);

// names: Id, Zn, Dn, T, O, I, Id[Z2, T[O, Zn[Z2n, Zn[Dn, Dn[D2n; n > 1 for families
FiniteGroup build_group(const std::string& name, int n = 0);
int expected_order(const std::string& name, int n);
// "D3" -> (Dn, 3), "Z4[Z8" -> (Zn[Z2n, 4), "Dn[D2n" + n -> as is; throws Config
std::pair<std::string, int> parse_group_name(const std::string& text, int n = 0);
bool is_family(const std::string& name);

FiniteGroup symmetric_group(int k);    // permutation matrices on R^k
FiniteGroup alternating_group(int k);

// rotation by 2 pi k / n about the t axis
GroupElement axial_rotation(int k, int n);
GroupElement minus(const GroupElement& g);
GroupElement compose(const GroupElement& a, const GroupElement& b);

// polynomials of the constructions
ExactPolynomial poly_F(int n);  // z^n + conj(z)^n, or (i z^n - i conj(z)^n) t for even n
ExactPolynomial poly_H(int n);  // i z^n - i conj(z)^n, or -(z^n + conj(z)^n) t for even n
ExactPolynomial octahedral_polynomial();
ExactPolynomial icosahedral_polynomial();
ExactPolynomial power_sum(int k, int m);  // sum x_i^m on R^k
ExactPolynomial vandermonde(int k);
ExactPolynomial vandermonde_tilde(int n);  // on R^{n+2}
// 4 x 3 isometry R^3 -> V^3 (row major) sending (1,1,1)/sqrt3 and its T-orbit to the simplex vertices
std::vector<QSqrt5> tetra_frame();
// the 3 x 3 matrix B^T sigma B of a vertex permutation sigma
GroupElement tetra_permutation(const std::vector<int>& sigma);

// catalog polynomial for a group (name, n); m is the power-sum exponent for T and T[O
ExactPolynomial invariant_polynomial(const std::string& name, int n = 0, int m = 3);

struct Invariance {
  bool invariant = false;
  double margin = 0.0;  // max |coeff(P o A) - coeff(P)| / max |coeff(P)|
  bool exact = false;
};
enum class InvarianceMode { Auto, Exact, Float };
Invariance is_invariant(const ExactPolynomial& p, const GroupElement& A, InvarianceMode mode = InvarianceMode::Auto);

struct StabilizerReport {
  std::string group;
  int order = 0, expected_order = 0, degree = 0;
  bool axioms = false, no_minus_id = false, members = false, witnesses = false, harmonic = false,
       odd = false;
  double member_margin = 0.0;   // worst over group elements
  double witness_margin = 0.0;  // smallest over witnesses
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
  std::string to_json() const;
};

StabilizerReport stabilizer_verify(const ExactPolynomial& p, const FiniteGroup& g,
                                   const std::vector<GroupElement>& witnesses);

struct CatalogEntry {
  FiniteGroup group;
  ExactPolynomial poly{3};
  std::vector<GroupElement> witnesses;
  std::string to_json() const;
};

CatalogEntry catalog_entry(const std::string& name, int n = 0);
// fixed groups plus every family for 2 <= n <= n_max; throws Integrity on a failing entry
std::vector<CatalogEntry> build_catalog(int n_max = 6);
std::vector<std::pair<std::string, int>> catalog_keys(int n_max = 6);

// restriction to S^2 as harmonic coefficients up to l_max (content above is dropped)
SphereFunction restrict_to_sphere(const ExactPolynomial& p, int l_max);

// regular (n+1)-simplex in V^{n+1} = N^perp in R^{n+2}
struct SimplexFrame {
  int n = 0;
  std::vector<Eigen::VectorXd> vertices;
  std::vector<Eigen::VectorXd> basis;  // orthonormal basis of V^{n+1}
  static SimplexFrame make(int n);
};

struct CriticalPoint {
  int k = 0;
  double a = 0.0, b = 0.0;  // first k coordinates a, the rest b
  Eigen::VectorXd x;
  double value = 0.0;  // t_k
  double gradient_norm = 0.0;
};

// representatives of C_k^+ for 1 <= k <= (n+2)/2; odd m > 1
std::vector<CriticalPoint> critical_points_powersum(int n, int m);
// number of distinct real roots of y^(m-1) - c y - d; throws Integrity above 2
int two_root_check(int m, double c, double d);

}  // namespace zf
