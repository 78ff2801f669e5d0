#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "padicaut/error.hpp"
#include "padicaut/polynomial.hpp"

namespace padicaut {

/// Upper unitriangular integer matrix, optionally reduced modulo m.
class UniTri {
 public:
  UniTri() = default;
  static UniTri identity(int n, std::optional<mpz_class> modulus = std::nullopt);
  /// I + a E_ij with 1-based indices i < j.
  static UniTri elementary(int n, int i, int j, const mpz_class& a = 1, std::optional<mpz_class> modulus = std::nullopt);
  static UniTri from_rows(const std::vector<std::vector<mpz_class>>& rows, std::optional<mpz_class> modulus = std::nullopt);
  /// "E12", "E23" or "I+2E13" style literals.
  static UniTri parse(int n, const std::string& text, std::optional<mpz_class> modulus = std::nullopt);

  int size() const { return n_; }
  const std::optional<mpz_class>& modulus() const { return mod_; }
  const mpz_class& at(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }
  bool is_identity() const;
  UniTri inverse() const;
  UniTri pow(std::uint64_t e) const;
  friend UniTri operator*(const UniTri& x, const UniTri& y);
  friend bool operator==(const UniTri& x, const UniTri& y) { return x.n_ == y.n_ && x.a_ == y.a_; }
  friend bool operator!=(const UniTri& x, const UniTri& y) { return !(x == y); }
  friend bool operator<(const UniTri& x, const UniTri& y) { return x.a_ < y.a_; }
  std::string to_string() const;

 private:
  void reduce();
  int n_ = 0;
  std::optional<mpz_class> mod_;
  std::vector<mpz_class> a_;
};

/// (t; b) in exp(tA) x| Q^n with A e_i = e_{i+1}. With p set the law uses exp(p t A).
template <class Scalar>
class ExpElement {
 public:
  ExpElement() = default;
  ExpElement(Scalar t, std::vector<Scalar> b, std::int64_t p = 0) : t_(std::move(t)), b_(std::move(b)), p_(p) {}

  const Scalar& t() const { return t_; }
  const std::vector<Scalar>& b() const { return b_; }
  std::int64_t padic_prime() const { return p_; }
  int n() const { return static_cast<int>(b_.size()); }

  /// exp(s A) c, scaled by p when the variant is p-adic.
  static std::vector<Scalar> exp_apply(const Scalar& s, const std::vector<Scalar>& c, std::int64_t p) {
    const Scalar st = p ? Scalar(s * mpq_class(static_cast<long>(p))) : s;
    std::vector<Scalar> out;
    for (std::size_t i = 0; i < c.size(); ++i) {
      Scalar acc = c[i];
      Scalar power = st;
      mpq_class fact = 1;
      for (std::size_t j = 1; j <= i; ++j) {
        fact /= static_cast<long>(j);
        acc = acc + Scalar(Scalar(power * c[i - j]) * fact);
        power = Scalar(power * st);
      }
      out.push_back(std::move(acc));
    }
    return out;
  }

  friend ExpElement operator*(const ExpElement& x, const ExpElement& y) {
    std::vector<Scalar> moved = exp_apply(x.t_, y.b_, x.p_);
    for (std::size_t i = 0; i < moved.size(); ++i) moved[i] = x.b_[i] + moved[i];
    return ExpElement(x.t_ + y.t_, std::move(moved), x.p_);
  }
  ExpElement inverse() const {
    const Scalar minus = Scalar(t_ * mpq_class(-1));
    std::vector<Scalar> moved = exp_apply(minus, b_, p_);
    for (auto& v : moved) v = Scalar(v * mpq_class(-1));
    return ExpElement(minus, std::move(moved), p_);
  }
  bool is_identity() const {
    if (!is_zero_scalar(t_)) return false;
    for (const auto& v : b_) {
      if (!is_zero_scalar(v)) return false;
    }
    return true;
  }
  friend bool operator==(const ExpElement& x, const ExpElement& y) { return x.t_ == y.t_ && x.b_ == y.b_ && x.p_ == y.p_; }
  friend bool operator!=(const ExpElement& x, const ExpElement& y) { return !(x == y); }

 private:
  static bool is_zero_scalar(const mpq_class& v) { return v == 0; }
  static bool is_zero_scalar(const Polynomial& v) { return v.is_zero(); }
  Scalar t_;
  std::vector<Scalar> b_;
  std::int64_t p_ = 0;
};

using RationalExp = ExpElement<mpq_class>;
using SymbolicExp = ExpElement<Polynomial>;

// Group operations shared by the element kinds.
inline UniTri group_mul(const UniTri& a, const UniTri& b) { return a * b; }
inline UniTri group_inv(const UniTri& a) { return a.inverse(); }
inline bool group_is_identity(const UniTri& a) { return a.is_identity(); }
template <class S>
ExpElement<S> group_mul(const ExpElement<S>& a, const ExpElement<S>& b) { return a * b; }
template <class S>
ExpElement<S> group_inv(const ExpElement<S>& a) { return a.inverse(); }
template <class S>
bool group_is_identity(const ExpElement<S>& a) { return a.is_identity(); }
inline PolyMap group_mul(const PolyMap& a, const PolyMap& b) { return a.compose(b); }
inline PolyMap group_inv(const PolyMap& a) { return a.inverse(); }
inline bool group_is_identity(const PolyMap& a) { return a.is_identity(); }

/// [a, b] = a b a^-1 b^-1.
template <class G>
G commutator(const G& a, const G& b) {
  return group_mul(group_mul(group_mul(a, b), group_inv(a)), group_inv(b));
}

/// Right-nested [h_1; ...; h_k] = [h_1, [h_2, ... [h_{k-1}, h_k]]].
template <class G>
G bracket_chain(const std::vector<G>& h) {
  if (h.empty()) throw InputError("bracket of an empty list");
  G acc = h.back();
  for (std::size_t i = h.size() - 1; i-- > 0;) acc = commutator(h[i], acc);
  return acc;
}

/// All right-nested brackets of the given length in the generators.
template <class G>
std::vector<G> all_chains(const std::vector<G>& gens, int length) {
  std::vector<G> out;
  if (length < 1) return out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(length), 0);
  for (;;) {
    std::vector<G> h;
    for (std::size_t i : idx) h.push_back(gens[i]);
    out.push_back(bracket_chain(h));
    std::size_t pos = idx.size();
    while (pos > 0 && ++idx[pos - 1] == gens.size()) idx[--pos] = 0;
    if (pos == 0) break;
  }
  return out;
}

/// Least k with every bracket of k+1 generators trivial; nullopt past max_length.
template <class G>
std::optional<int> nilpotency_class(const std::vector<G>& gens, int max_length) {
  for (int k = 0; k <= max_length; ++k) {
    bool trivial = true;
    for (const auto& c : all_chains(gens, k + 1)) {
      if (!group_is_identity(c)) {
        trivial = false;
        break;
      }
    }
    if (trivial) return k;
  }
  return std::nullopt;
}

/// Derived length of a nilpotent group of class <= max_class from generators:
/// D_{i+1} is generated by the brackets of length >= 2 in generators of D_i.
template <class G>
std::optional<int> derived_length(std::vector<G> gens, int max_class,
                                  const std::function<std::string(const G&)>& key) {
  int steps = 0;
  for (;;) {
    std::vector<G> nontrivial;
    for (auto& g : gens) {
      if (!group_is_identity(g)) nontrivial.push_back(g);
    }
    if (nontrivial.empty()) return steps;
    if (steps > max_class + 1) return std::nullopt;
    // Right-nested chains grown one generator at a time from the distinct
    // nontrivial chains of the previous length.
    std::vector<G> next;
    std::set<std::string> seen;
    std::vector<G> level = nontrivial;
    for (int len = 2; len <= max_class + 1 && !level.empty(); ++len) {
      std::vector<G> grown;
      std::set<std::string> level_seen;
      for (const auto& g : nontrivial) {
        for (const auto& c : level) {
          G b = commutator(g, c);
          if (group_is_identity(b)) continue;
          const std::string k = key(b);
          if (level_seen.insert(k).second) grown.push_back(b);
          if (seen.insert(k).second) next.push_back(std::move(b));
        }
      }
      level = std::move(grown);
    }
    gens = std::move(next);
    ++steps;
  }
}

std::string key_of(const UniTri& a);
std::string key_of(const RationalExp& a);

/// Finite subgroup of Tri_1(n, Z/m) given by generators.
struct FiniteUniTriGroup {
  std::vector<UniTri> elements;
  std::vector<UniTri> generators;
  std::set<UniTri> members;
  std::size_t size() const { return elements.size(); }
  bool contains(const UniTri& g) const { return members.count(g) != 0; }
};

FiniteUniTriGroup unitri_closure(const std::vector<UniTri>& gens, std::size_t budget = 200000);
/// Smallest subgroup containing the seeds and closed under conjugation by the normalizers.
FiniteUniTriGroup normal_closure(const std::vector<UniTri>& seeds, const std::vector<UniTri>& normalizers, int n,
                                 const mpz_class& modulus, std::size_t budget = 200000);

struct SeriesReport {
  std::vector<std::size_t> derived_orders;        // |D_0|, |D_1|, ..., 1
  std::vector<std::size_t> lower_central_orders;  // |C_0|, |C_1|, ..., 1
  int derived_length = 0;
  int nilpotency_class = 0;
};

/// Derived and lower central series of the closure of the generators mod m.
SeriesReport derived_series_quotient(const std::vector<UniTri>& gens, const mpz_class& modulus,
                                     std::size_t budget = 200000);

struct PowerIndexReport {
  std::size_t group_order = 0;
  std::size_t power_subgroup_order = 0;
  std::size_t index = 0;
};

/// [<S> : <s^m : s in S>] in Tri_1(n, Z/modulus).
PowerIndexReport power_subgroup_index(const std::vector<UniTri>& gens, std::uint64_t m, const mpz_class& modulus,
                                      std::size_t budget = 200000);

struct MultilinearityReport {
  int weight = 0;
  int checks = 0;
  int violations = 0;
};

/// Br_t(.., h h', ..) = Br_t(.., h, ..) Br_t(.., h', ..) in every slot on random words.
MultilinearityReport multilinearity_check(const std::vector<UniTri>& gens, int samples, std::uint64_t seed);
MultilinearityReport multilinearity_check(const std::vector<RationalExp>& gens, int samples, std::uint64_t seed);

/// (x, y) -> (x + t, y + sum_k c_k x^{k-1}/(k-1)! b_{n+1-k}) with c_k = p^{k-1} in the p-adic variant.
PolyMap exp_action(const RationalExp& g);

/// Symbolic right-nested bracket of k+1 generic elements.
struct BracketPolynomiality {
  int n = 0;
  int k = 0;
  int nvars = 0;
  Polynomial t;
  std::vector<Polynomial> b;
  bool nonconstant = false;
};
BracketPolynomiality bracket_polynomiality(int n, int k);

struct VdlWitness {
  int n = 0;
  bool faithful = false;                  // the parameter-to-coefficient map of exp_action is injective
  bool powers_noncommuting = false;       // [(t;b)^m, (s;c)^m] != id symbolically for m = 2, 3
  std::vector<int> power_exponents;
  bool commutators_are_translations = false;
  bool translations_commute = false;
  bool generic_commutator_nontrivial = false;
  int derived_length = 0;
  int nilpotency_class = 0;
  bool degenerate_commute = false;        // b = c = 0 makes the generators commute
};
VdlWitness faithfulness_and_vdl_witness(int n);

/// The generators (1; 0) and (0; e_1) of the n-dimensional family, as rational elements.
std::vector<RationalExp> exp_family_generators(int n, std::int64_t p = 0);

}  // namespace padicaut
