#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "padicaut/padic.hpp"
#include "padicaut/polynomial.hpp"

namespace padicaut {

/// Monomials of total degree <= D in n variables, in graded order, with
/// index arithmetic used by the series kernels. Instances are shared.
class MonomialBasis {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  static std::shared_ptr<const MonomialBasis> get(int nvars, int degree);

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  std::size_t size() const { return exps_.size(); }
  const Monomial& exponent(std::size_t i) const { return exps_[i]; }
  int degree_of(std::size_t i) const { return degs_[i]; }
  /// First index of degree k (k may be degree()+1, giving size()).
  std::size_t degree_start(int k) const { return starts_[static_cast<std::size_t>(k)]; }
  std::size_t index(const Monomial& m) const;
  /// Index of m_i * m_j, or npos when the degree exceeds the cap.
  std::size_t product(std::size_t i, std::size_t j) const;
  /// Index of m_i * x_var, or npos.
  std::size_t raise(std::size_t i, int var) const { return raise_[i * static_cast<std::size_t>(nvars_) + static_cast<std::size_t>(var)]; }
  /// Index of m_i / x_var, or npos when x_var does not divide m_i.
  std::size_t lower(std::size_t i, int var) const { return lower_[i * static_cast<std::size_t>(nvars_) + static_cast<std::size_t>(var)]; }

  MonomialBasis(int nvars, int degree);

 private:
  int nvars_;
  int degree_;
  std::vector<Monomial> exps_;
  std::vector<int> degs_;
  std::vector<std::size_t> starts_;
  std::vector<std::size_t> raise_;
  std::vector<std::size_t> lower_;
  std::vector<std::uint32_t> mul_;  // dense product table for small bases
};

/// Truncated power series over Z_p: the class of a series modulo
/// (p^N, total degree > D). Coefficients are residues in [0, p^N).
class TateSeries {
 public:
  TateSeries(std::int64_t p, int precision, int nvars, int degree);
  static TateSeries constant(std::int64_t p, int precision, int nvars, int degree, const mpz_class& c);
  static TateSeries variable(std::int64_t p, int precision, int nvars, int degree, int index);
  /// Image of a polynomial with p-integral coefficients; terms above D are dropped.
  /// Throws InputError("composition outside Z_p<x>") for a non-p-integral coefficient.
  static TateSeries from_polynomial(const Polynomial& f, std::int64_t p, int precision, int degree);

  std::int64_t prime() const { return p_; }
  int precision() const { return n_; }
  int nvars() const { return basis_->nvars(); }
  int degree() const { return basis_->degree(); }
  std::size_t size() const { return coeffs_.size(); }
  const MonomialBasis& basis() const { return *basis_; }
  const std::vector<mpz_class>& residues() const { return coeffs_; }
  const mpz_class& residue(std::size_t i) const { return coeffs_[i]; }
  void set_residue(std::size_t i, const mpz_class& v);
  PadicInt coefficient(const Monomial& m) const;
  void set_coefficient(const Monomial& m, const mpz_class& v);
  mpz_class constant_term() const { return coeffs_[0]; }

  /// Minimum coefficient valuation at working precision; nullopt when zero.
  NormExp gauss_norm() const;
  bool is_zero() const;

  TateSeries operator-() const;
  TateSeries& operator+=(const TateSeries& o);
  TateSeries& operator-=(const TateSeries& o);
  friend TateSeries operator+(TateSeries a, const TateSeries& b) { return a += b; }
  friend TateSeries operator-(TateSeries a, const TateSeries& b) { return a -= b; }
  friend TateSeries operator*(const TateSeries& a, const TateSeries& b);
  TateSeries scaled(const mpz_class& c) const;
  friend bool operator==(const TateSeries& a, const TateSeries& b);
  friend bool operator!=(const TateSeries& a, const TateSeries& b) { return !(a == b); }

  /// Partial derivative; the result carries degree cap D-1.
  TateSeries derivative(int var) const;
  TateSeries truncate(int degree) const;
  TateSeries with_precision(int n) const;
  /// Exact division by p^k; precision drops to N-k.
  TateSeries divide_by_p_power(int k) const;
  TateSeries homogeneous_part(int degree) const;
  PadicInt evaluate(const std::vector<PadicInt>& x) const;
  /// Polynomial with coefficients the symmetric residues.
  Polynomial to_polynomial() const;
  std::string to_string() const;

 private:
  void check_compatible(const TateSeries& o) const;
  void reduce_all();

  std::int64_t p_;
  int n_;
  std::shared_ptr<const MonomialBasis> basis_;
  std::vector<mpz_class> coeffs_;
};

/// d-tuple of TateSeries, read as a map Z_p^n -> Z_p^d.
class TateMap {
 public:
  TateMap() = default;
  explicit TateMap(std::vector<TateSeries> components);
  static TateMap identity(std::int64_t p, int precision, int d, int degree);
  static TateMap from_polymap(const PolyMap& f, std::int64_t p, int precision, int degree);

  int dim() const { return static_cast<int>(comps_.size()); }
  int nvars() const { return comps_.front().nvars(); }
  std::int64_t prime() const { return comps_.front().prime(); }
  int precision() const;
  int degree() const { return comps_.front().degree(); }
  const std::vector<TateSeries>& components() const { return comps_; }
  std::vector<TateSeries>& components() { return comps_; }
  const TateSeries& operator[](int i) const { return comps_.at(static_cast<std::size_t>(i)); }
  TateSeries& operator[](int i) { return comps_.at(static_cast<std::size_t>(i)); }

  NormExp gauss_norm() const;
  /// Exponent c with ||f - id|| = p^{-c}, recomputed from the coefficients.
  NormExp congruence_level() const;
  bool is_identity() const { return !congruence_level().has_value(); }

  TateMap operator-(const TateMap& o) const;
  TateMap operator+(const TateMap& o) const;
  friend bool operator==(const TateMap& a, const TateMap& b) { return a.comps_ == b.comps_; }
  friend bool operator!=(const TateMap& a, const TateMap& b) { return !(a == b); }
  TateMap truncate(int degree) const;
  TateMap with_precision(int n) const;
  std::vector<PadicInt> evaluate(const std::vector<PadicInt>& x) const;
  std::vector<Polynomial> to_polynomials() const;

 private:
  std::vector<TateSeries> comps_;
};

/// g o f modulo (p^N, degree > D). Exact when f has zero constant terms or
/// g is a polynomial of degree <= D.
TateSeries compose(const TateSeries& g, const TateMap& f);
TateMap compose(const TateMap& g, const TateMap& f);
/// k-fold iterate.
TateMap iterate(const TateMap& f, std::uint64_t k);

/// Gauss norm exponent of a polynomial over Q_p (may be negative).
NormExp gauss_norm(const Polynomial& f, std::int64_t p);

/// Local inverse of an exact map with Phi(0) = 0, computed over Q.
struct LocalInverse {
  PolyMap inverse;                  // truncated at the degree cap
  int degree_cap = 0;
  int k = 0;                        // rescaling exponent
  int linear_inverse_exp = 0;       // e with ||(D_0 Phi)^{-1}|| = p^{-e}
  std::vector<NormExp> homogeneous_norms;  // norm exponents of Psi_1..Psi_D
  bool norm_bound_holds = false;    // ||Psi_n|| <= max(1, ||(D_0 Phi)^{-1}||^n) for all n
  bool rescaled_integral = false;   // (1/p^k) Psi(p^k x) has Z_p coefficients
};
LocalInverse invert_local(const PolyMap& phi, std::int64_t p, int degree_cap);
/// Series reversion over Z_p; needs D_0 Phi in GL_d(Z_p).
TateMap invert_local(const TateMap& phi);

/// Inverse of f with congruence level c >= flow_threshold(p), by the
/// iteration g <- id - (f - id) o g; verified on both sides.
TateMap invert_diffeo(const TateMap& f);

struct CongruencePowerReport {
  std::vector<NormExp> levels;  // level of f^{p^c} for c = 1..N-guard
  bool all_hold = false;        // each level is >= c
};
CongruencePowerReport congruence_power(const TateMap& f, int guard);

/// Strassman bound for a univariate series. With tail_valuation unset the
/// window is asserted to be the whole function; otherwise every omitted
/// coefficient is asserted to have valuation >= tail_valuation.
int strassman_bound(const TateSeries& f, std::optional<int> tail_valuation = std::nullopt);

/// Roots in Z_p of an integer polynomial by Hensel refinement of residue disks.
struct RootCount {
  int simple_roots = 0;                    // certified distinct roots
  std::vector<mpz_class> approximations;   // one residue class per root
  std::vector<int> approximation_levels;   // the class is modulo p^level
  int unresolved_clusters = 0;             // disks still multiple at the depth cap
  int unresolved_multiplicity = 0;         // roots with multiplicity inside those disks
};
RootCount hensel_roots(const std::vector<mpz_class>& coeffs, std::int64_t p, int depth);

}  // namespace padicaut
