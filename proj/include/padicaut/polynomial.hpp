#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace padicaut {

using Monomial = std::vector<int>;

int total_degree(const Monomial& m);

/// Graded order: total degree first, then lexicographic on exponents.
struct GradedOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Coefficient ring of a polynomial map.
struct Ring {
  enum class Kind { Rationals, Integers, IntegersMod };
  Kind kind = Kind::Rationals;
  mpz_class modulus = 0;

  static Ring rationals() { return {}; }
  static Ring integers() { return {Kind::Integers, 0}; }
  static Ring integers_mod(const mpz_class& m);

  std::string tag() const;  // "Q", "Z" or "Z/<m>"
  static Ring parse(const std::string& tag);
  /// Canonical image of q in the ring; throws InputError when q is not representable.
  mpq_class normalize(const mpq_class& q) const;
  friend bool operator==(const Ring& a, const Ring& b) { return a.kind == b.kind && a.modulus == b.modulus; }
  friend bool operator!=(const Ring& a, const Ring& b) { return !(a == b); }
};

/// Sparse multivariate polynomial with exact rational coefficients.
class Polynomial {
 public:
  using Terms = std::map<Monomial, mpq_class, GradedOrder>;

  explicit Polynomial(int nvars = 0);
  static Polynomial constant(int nvars, const mpq_class& c);
  static Polynomial variable(int nvars, int index);
  static Polynomial monomial(const Monomial& m, const mpq_class& c);

  int nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// -1 for the zero polynomial.
  int degree() const;
  mpq_class coefficient(const Monomial& m) const;
  mpq_class constant_term() const;
  void add_term(const Monomial& m, const mpq_class& c);

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  Polynomial& operator*=(const mpq_class& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const mpq_class& c) { return a *= c; }
  friend Polynomial operator*(const mpq_class& c, Polynomial a) { return a *= c; }
  friend bool operator==(const Polynomial& a, const Polynomial& b);
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  Polynomial pow(unsigned e) const;
  Polynomial derivative(int var) const;
  /// Drops the terms of total degree above cap.
  Polynomial truncate(int cap) const;
  Polynomial homogeneous_part(int degree) const;
  /// Substitutes polynomials (all in the same variable set) for the variables;
  /// with cap >= 0 every intermediate product is truncated above that degree.
  Polynomial substitute(const std::vector<Polynomial>& values, int cap = -1) const;
  mpq_class evaluate(const std::vector<mpq_class>& point) const;
  /// Maps every coefficient through the ring's normalization.
  Polynomial normalized(const Ring& ring) const;

  /// Canonical text: monomials by decreasing graded order, variables x1..xn.
  std::string to_string() const;

 private:
  int nvars_;
  Terms terms_;
};

/// Exact polynomial self-map of affine d-space over Q, Z or Z/m.
class PolyMap {
 public:
  PolyMap() = default;
  PolyMap(Ring ring, std::vector<Polynomial> coords);

  static PolyMap identity(int d, Ring ring = Ring::rationals());
  /// x -> A x + b with A given row-major.
  static PolyMap affine(const std::vector<std::vector<mpq_class>>& a, const std::vector<mpq_class>& b,
                        Ring ring = Ring::rationals());
  static PolyMap linear(const std::vector<std::vector<mpq_class>>& a, Ring ring = Ring::rationals());

  int dim() const { return static_cast<int>(coords_.size()); }
  const Ring& ring() const { return ring_; }
  const std::vector<Polynomial>& coords() const { return coords_; }
  const Polynomial& operator[](int i) const { return coords_.at(static_cast<std::size_t>(i)); }
  int degree() const;
  bool is_identity() const;

  /// (*this) o inner.
  PolyMap compose(const PolyMap& inner) const;
  /// Composition truncated above total degree cap.
  PolyMap compose_truncated(const PolyMap& inner, int cap) const;
  PolyMap power(std::uint64_t k) const;
  std::vector<mpq_class> evaluate(const std::vector<mpq_class>& x) const;
  std::vector<std::vector<Polynomial>> jacobian() const;
  Polynomial jacobian_determinant() const;
  std::vector<std::vector<mpq_class>> linear_part() const;
  std::vector<mpq_class> constant_part() const;
  /// Exact polynomial inverse. Throws InputError when the Jacobian
  /// determinant is not a nonzero constant or no inverse of degree at most
  /// deg^(d-1) exists.
  PolyMap inverse() const;
  /// Coefficientwise reduction modulo a prime; "bad prime" error names the offending coefficient.
  PolyMap reduce_mod(std::int64_t ell) const;
  PolyMap with_ring(const Ring& ring) const;
  PolyMap truncate(int cap) const;

  std::string to_text() const;
  friend bool operator==(const PolyMap& a, const PolyMap& b);
  friend bool operator!=(const PolyMap& a, const PolyMap& b) { return !(a == b); }

 private:
  Ring ring_;
  std::vector<Polynomial> coords_;
};

/// Parses a polynomial in x1..xn (aliases x, y, z, w for small n).
Polynomial parse_polynomial(const std::string& text, int nvars);
/// Parses one map: header "d=<int>; ring=Q|Z|Z/<m>" then lines "f<i> = ...".
PolyMap parse_polymap(const std::string& text);
/// Parses a file holding several maps, each introduced by its own header.
std::vector<PolyMap> parse_polymap_list(const std::string& text);
std::string polymaps_to_text(const std::vector<PolyMap>& maps);

/// Exact determinant of a square matrix of polynomials (cofactor expansion).
Polynomial determinant(const std::vector<std::vector<Polynomial>>& m);
/// Determinant and inverse over Q by Gaussian elimination.
mpq_class determinant(std::vector<std::vector<mpq_class>> m);
std::vector<std::vector<mpq_class>> inverse_matrix(const std::vector<std::vector<mpq_class>>& m);

}  // namespace padicaut
