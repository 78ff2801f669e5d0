#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace padicaut {

/// Norm exponent e with |x| = p^{-e}; std::nullopt stands for +infinity
/// (the quantity is zero at working precision).
using NormExp = std::optional<int>;

/// min of two norm exponents, treating nullopt as +infinity.
NormExp min_exp(NormExp a, NormExp b);
std::string exp_to_string(NormExp e);

/// Exponent of p in n. Throws InputError when n = 0.
int vp(const mpz_class& n, std::int64_t p);
int vp(std::int64_t n, std::int64_t p);
/// Valuation of a nonzero rational.
int vp(const mpq_class& q, std::int64_t p);
/// v_p(n!) via Legendre's sum.
int vp_factorial(std::int64_t n, std::int64_t p);

/// p^n, cached per thread.
const mpz_class& prime_power(std::int64_t p, int n);

/// Smallest positive integer c with c > 1/(p-1).
int flow_threshold(std::int64_t p);

/// Residue precision together with the number of digits reserved before a
/// quantity is declared zero.
struct PrecisionPolicy {
  int precision = 16;
  int guard = 2;

  PrecisionPolicy() = default;
  PrecisionPolicy(int n, int g);
  int zero_threshold() const { return precision - guard; }
};

/// A p-adic integer known modulo p^N.
class PadicInt {
 public:
  PadicInt(std::int64_t p, int precision);
  PadicInt(std::int64_t p, int precision, const mpz_class& value);
  PadicInt(std::int64_t p, int precision, std::int64_t value);

  /// Image of a p-integral rational. Throws InputError when p divides the denominator.
  static PadicInt from_rational(const mpq_class& q, std::int64_t p, int precision);

  std::int64_t prime() const { return p_; }
  int precision() const { return n_; }
  const mpz_class& residue() const { return r_; }
  /// Representative in (-p^N/2, p^N/2].
  mpz_class signed_residue() const;

  /// Largest k <= N with p^k | r; equals N when the residue is zero.
  int valuation() const;
  bool is_zero() const { return r_ == 0; }
  bool is_unit() const { return valuation() == 0; }
  NormExp norm_exp() const;

  PadicInt operator-() const;
  PadicInt& operator+=(const PadicInt& o);
  PadicInt& operator-=(const PadicInt& o);
  PadicInt& operator*=(const PadicInt& o);
  friend PadicInt operator+(PadicInt a, const PadicInt& b) { return a += b; }
  friend PadicInt operator-(PadicInt a, const PadicInt& b) { return a -= b; }
  friend PadicInt operator*(PadicInt a, const PadicInt& b) { return a *= b; }
  friend bool operator==(const PadicInt& a, const PadicInt& b);
  friend bool operator!=(const PadicInt& a, const PadicInt& b) { return !(a == b); }

  PadicInt pow(std::uint64_t e) const;
  /// Inverse of a unit. Throws InputError("non-unit") otherwise.
  PadicInt inverse() const;
  /// Exact division by p^k; the result has precision N - k.
  PadicInt divide_by_p_power(int k) const;
  /// Reduction to a lower precision.
  PadicInt with_precision(int n) const;

  std::string to_string() const;

 private:
  void check_compatible(const PadicInt& o) const;
  void reduce();

  std::int64_t p_;
  int n_;
  mpz_class r_;
};

/// t(t-1)...(t-k+1)/k!; loses vp_factorial(k, p) digits of precision.
PadicInt binom_padic(const PadicInt& t, int k);

/// An element of Q_p with finite relative precision: p^v * u with u a unit
/// known modulo p^rel, or zero known modulo p^v.
class PadicNumber {
 public:
  PadicNumber(std::int64_t p, int abs_precision);  // zero modulo p^abs_precision
  static PadicNumber from_int(const PadicInt& x);
  static PadicNumber from_rational(const mpq_class& q, std::int64_t p, int rel_precision);

  std::int64_t prime() const { return p_; }
  bool is_zero() const { return zero_; }
  /// Valuation; for zero, the absolute precision.
  int valuation() const { return v_; }
  int abs_precision() const { return zero_ ? v_ : v_ + rel_; }
  int rel_precision() const { return zero_ ? 0 : rel_; }
  const mpz_class& unit() const { return u_; }

  PadicNumber operator-() const;
  friend PadicNumber operator+(const PadicNumber& a, const PadicNumber& b);
  friend PadicNumber operator-(const PadicNumber& a, const PadicNumber& b) { return a + (-b); }
  friend PadicNumber operator*(const PadicNumber& a, const PadicNumber& b);
  friend PadicNumber operator/(const PadicNumber& a, const PadicNumber& b);

  /// Integral representative modulo p^n for values with valuation >= 0.
  PadicInt to_padic_int(int n) const;
  std::string to_string() const;

 private:
  static PadicNumber make(std::int64_t p, int v, mpz_class u, int rel);

  std::int64_t p_;
  bool zero_ = true;
  int v_ = 0;
  int rel_ = 0;
  mpz_class u_;
};

}  // namespace padicaut
