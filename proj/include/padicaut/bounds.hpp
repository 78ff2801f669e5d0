#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "padicaut/padic.hpp"

namespace padicaut {

/// Shape of the image of the 2-adic cyclotomic character.
enum class Case2 { None, A, B, C };
std::string case_name(Case2 c);

/// A base field: Q, Q(zeta_n), or explicit cyclotomic constants.
struct FieldSpec {
  enum class Kind { Rationals, Cyclotomic, Explicit };
  Kind kind = Kind::Rationals;
  std::uint64_t n = 1;  // Cyclotomic
  int t = 0;            // Explicit
  int m = 0;            // Explicit
  Case2 case2 = Case2::None;

  static FieldSpec rationals() { return {}; }
  static FieldSpec cyclotomic(std::uint64_t n);
  static FieldSpec explicit_data(int t, int m, Case2 c = Case2::None);
  /// "Q", "cyclotomic(n)", "Q(zeta_n)" or "explicit(t,m[,A|B|C])".
  static FieldSpec parse(const std::string& text);
  std::string to_string() const;
};

/// The constants t(k;p), m(k;p) and, for p = 2, the case of the image.
struct CyclotomicData {
  std::int64_t p = 3;
  int t = 2;
  int m = 1;
  Case2 case2 = Case2::None;
  FieldSpec field;

  /// Throws InputError when the constants violate their invariants.
  void validate() const;
};

/// Floor sum d/(p-1) + d/(p(p-1)) + ...
int minkowski_bound(int d, std::int64_t p);
int schur_bound(int d, const CyclotomicData& cyc);
/// Closed form of the infimum of sum_{i<=d} v_p(u^i - 1) over the character image.
int m_prime_bound(int d, const CyclotomicData& cyc);
/// v_p(|GL_d(F_q)|) = sum_{i=1}^{d} v_p(q^i - 1).
int gl_order_valuation(int d, const mpz_class& q, std::int64_t p);
CyclotomicData cyclotomic_data(const FieldSpec& field, std::int64_t p);

/// Smallest prime l > lower outside forbidden whose class generates (Z/p^2)^x.
std::uint64_t find_prime_generator(std::int64_t p, std::uint64_t lower, const std::set<std::uint64_t>& forbidden = {},
                                   std::uint64_t cap = 1000000);

/// Norms l^f mod p^N of primes above unramified l, in increasing order of l.
std::vector<PadicInt> sample_chi_image(const FieldSpec& field, std::int64_t p, int count, int precision);
/// Membership of u mod p^j in the image of the character mod p^j.
bool chi_image_contains(const CyclotomicData& cyc, const mpz_class& u, int j);
/// sum_{i=1}^{d} v_p(u^i - 1), each term capped at the precision of u.
int valuation_sum(const PadicInt& u, int d);

}  // namespace padicaut
