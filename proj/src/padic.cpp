#include "padicaut/padic.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "padicaut/error.hpp"

namespace padicaut {

NormExp min_exp(NormExp a, NormExp b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

std::string exp_to_string(NormExp e) { return e ? std::to_string(*e) : std::string("inf"); }

int vp(const mpz_class& n, std::int64_t p) {
  if (n == 0) throw InputError("valuation of zero undefined");
  if (p < 2) throw InputError("valuation needs a prime p");
  mpz_class rest;
  mpz_class prime(static_cast<long>(p));
  return static_cast<int>(mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), prime.get_mpz_t()));
}

int vp(std::int64_t n, std::int64_t p) { return vp(mpz_class(static_cast<long>(n)), p); }

int vp(const mpq_class& q, std::int64_t p) {
  if (q == 0) throw InputError("valuation of zero undefined");
  return vp(q.get_num(), p) - vp(q.get_den(), p);
}

int vp_factorial(std::int64_t n, std::int64_t p) {
  if (n < 0) throw InputError("factorial of a negative integer");
  int total = 0;
  for (std::int64_t q = n / p; q > 0; q /= p) total += static_cast<int>(q);
  return total;
}

const mpz_class& prime_power(std::int64_t p, int n) {
  thread_local std::map<std::pair<std::int64_t, int>, mpz_class> cache;
  auto key = std::make_pair(p, n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  mpz_class value;
  mpz_ui_pow_ui(value.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(std::max(n, 0)));
  return cache.emplace(key, value).first->second;
}

int flow_threshold(std::int64_t p) { return p == 2 ? 2 : 1; }

PrecisionPolicy::PrecisionPolicy(int n, int g) : precision(n), guard(g) {
  if (n < 1) throw InputError("precision must be positive");
  if (g < 0 || g >= n) throw InputError("guard must satisfy 0 <= guard < precision");
}

// ---------------------------------------------------------------- PadicInt

PadicInt::PadicInt(std::int64_t p, int precision) : p_(p), n_(precision), r_(0) {
  if (p < 2) throw InputError("p-adic prime must be at least 2");
  if (precision < 1) throw PrecisionError("precision exhausted");
}

PadicInt::PadicInt(std::int64_t p, int precision, const mpz_class& value) : PadicInt(p, precision) {
  r_ = value;
  reduce();
}

PadicInt::PadicInt(std::int64_t p, int precision, std::int64_t value)
    : PadicInt(p, precision, mpz_class(static_cast<long>(value))) {}

PadicInt PadicInt::from_rational(const mpq_class& q, std::int64_t p, int precision) {
  PadicInt num(p, precision, q.get_num());
  PadicInt den(p, precision, q.get_den());
  if (!den.is_unit()) throw InputError("rational " + q.get_str() + " is not p-integral for p = " + std::to_string(p));
  return num * den.inverse();
}

void PadicInt::reduce() {
  const mpz_class& m = prime_power(p_, n_);
  mpz_fdiv_r(r_.get_mpz_t(), r_.get_mpz_t(), m.get_mpz_t());
}

void PadicInt::check_compatible(const PadicInt& o) const {
  if (p_ != o.p_) throw InputError("mismatched primes");
}

mpz_class PadicInt::signed_residue() const {
  const mpz_class& m = prime_power(p_, n_);
  mpz_class half = m / 2;
  return r_ > half ? mpz_class(r_ - m) : r_;
}

int PadicInt::valuation() const {
  if (r_ == 0) return n_;
  return vp(r_, p_);
}

NormExp PadicInt::norm_exp() const {
  if (r_ == 0) return std::nullopt;
  return valuation();
}

PadicInt PadicInt::operator-() const {
  PadicInt out(p_, n_);
  out.r_ = -r_;
  out.reduce();
  return out;
}

PadicInt& PadicInt::operator+=(const PadicInt& o) {
  check_compatible(o);
  n_ = std::min(n_, o.n_);
  r_ += o.r_;
  reduce();
  return *this;
}

PadicInt& PadicInt::operator-=(const PadicInt& o) {
  check_compatible(o);
  n_ = std::min(n_, o.n_);
  r_ -= o.r_;
  reduce();
  return *this;
}

PadicInt& PadicInt::operator*=(const PadicInt& o) {
  check_compatible(o);
  n_ = std::min(n_, o.n_);
  r_ *= o.r_;
  reduce();
  return *this;
}

bool operator==(const PadicInt& a, const PadicInt& b) {
  return a.p_ == b.p_ && a.n_ == b.n_ && a.r_ == b.r_;
}

PadicInt PadicInt::pow(std::uint64_t e) const {
  PadicInt out(p_, n_);
  const mpz_class& m = prime_power(p_, n_);
  mpz_class exponent(static_cast<unsigned long>(e));
  mpz_powm(out.r_.get_mpz_t(), r_.get_mpz_t(), exponent.get_mpz_t(), m.get_mpz_t());
  return out;
}

PadicInt PadicInt::inverse() const {
  if (!is_unit()) throw InputError("non-unit");
  PadicInt out(p_, n_);
  mpz_invert(out.r_.get_mpz_t(), r_.get_mpz_t(), prime_power(p_, n_).get_mpz_t());
  return out;
}

PadicInt PadicInt::divide_by_p_power(int k) const {
  if (k < 0) throw InputError("negative shift");
  if (k == 0) return *this;
  if (n_ - k < 1) throw PrecisionError("precision exhausted");
  if (r_ != 0 && valuation() < k) throw InputError("residue not divisible by p^" + std::to_string(k));
  PadicInt out(p_, n_ - k);
  out.r_ = r_ / prime_power(p_, k);
  out.reduce();
  return out;
}

PadicInt PadicInt::with_precision(int n) const {
  if (n > n_) throw InputError("cannot raise precision");
  return PadicInt(p_, n, r_);
}

std::string PadicInt::to_string() const {
  return r_.get_str() + " mod " + std::to_string(p_) + "^" + std::to_string(n_);
}

PadicInt binom_padic(const PadicInt& t, int k) {
  if (k < 0) throw InputError("binomial index must be nonnegative");
  const std::int64_t p = t.prime();
  const int loss = vp_factorial(k, p);
  const int out_prec = t.precision() - loss;
  if (out_prec <= 0) throw PrecisionError("precision exhausted");
  // Numerator and k! both carry the p-part; cancel it exactly on integers.
  mpz_class num = 1;
  const mpz_class& mod = prime_power(p, t.precision());
  for (int i = 0; i < k; ++i) {
    num *= t.residue() - i;
    mpz_fdiv_r(num.get_mpz_t(), num.get_mpz_t(), mod.get_mpz_t());
  }
  mpz_class fact;
  mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(k));
  const mpz_class& pl = prime_power(p, loss);
  if (num != 0 && mpz_divisible_p(num.get_mpz_t(), pl.get_mpz_t()) == 0) {
    throw PrecisionError("binomial numerator lost integrality");
  }
  PadicInt n(p, out_prec, mpz_class(num / pl));
  PadicInt f(p, out_prec, mpz_class(fact / pl));
  return n * f.inverse();
}

// ------------------------------------------------------------- PadicNumber

PadicNumber::PadicNumber(std::int64_t p, int abs_precision) : p_(p), zero_(true), v_(abs_precision), rel_(0), u_(0) {}

PadicNumber PadicNumber::make(std::int64_t p, int v, mpz_class u, int rel) {
  if (rel <= 0) return PadicNumber(p, v);
  const mpz_class& m = prime_power(p, rel);
  mpz_fdiv_r(u.get_mpz_t(), u.get_mpz_t(), m.get_mpz_t());
  PadicNumber out(p, v);
  out.zero_ = false;
  out.v_ = v;
  out.rel_ = rel;
  out.u_ = std::move(u);
  return out;
}

PadicNumber PadicNumber::from_int(const PadicInt& x) {
  if (x.is_zero()) return PadicNumber(x.prime(), x.precision());
  int v = x.valuation();
  return make(x.prime(), v, mpz_class(x.residue() / prime_power(x.prime(), v)), x.precision() - v);
}

PadicNumber PadicNumber::from_rational(const mpq_class& q, std::int64_t p, int rel_precision) {
  if (q == 0) return PadicNumber(p, rel_precision);
  mpz_class num = q.get_num();
  mpz_class den = q.get_den();
  int a = vp(num, p);
  int b = vp(den, p);
  num /= prime_power(p, a);
  den /= prime_power(p, b);
  const mpz_class& m = prime_power(p, rel_precision);
  mpz_class inv;
  mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
  return make(p, a - b, num * inv, rel_precision);
}

PadicNumber PadicNumber::operator-() const {
  if (zero_) return *this;
  return make(p_, v_, mpz_class(-u_), rel_);
}

PadicNumber operator+(const PadicNumber& a, const PadicNumber& b) {
  if (a.p_ != b.p_) throw InputError("mismatched primes");
  const std::int64_t p = a.p_;
  const int abs = std::min(a.abs_precision(), b.abs_precision());
  if (a.zero_ && b.zero_) return PadicNumber(p, abs);
  if (a.zero_ || b.zero_) {
    const PadicNumber& x = a.zero_ ? b : a;
    if (x.v_ >= abs) return PadicNumber(p, abs);
    return PadicNumber::make(p, x.v_, x.u_, abs - x.v_);
  }
  const int vmin = std::min(a.v_, b.v_);
  if (abs <= vmin) return PadicNumber(p, abs);
  mpz_class n = a.u_ * prime_power(p, a.v_ - vmin) + b.u_ * prime_power(p, b.v_ - vmin);
  mpz_fdiv_r(n.get_mpz_t(), n.get_mpz_t(), prime_power(p, abs - vmin).get_mpz_t());
  if (n == 0) return PadicNumber(p, abs);
  int k = vp(n, p);
  return PadicNumber::make(p, vmin + k, mpz_class(n / prime_power(p, k)), abs - vmin - k);
}

PadicNumber operator*(const PadicNumber& a, const PadicNumber& b) {
  if (a.p_ != b.p_) throw InputError("mismatched primes");
  if (a.zero_ && b.zero_) return PadicNumber(a.p_, a.v_ + b.v_);
  if (a.zero_) return PadicNumber(a.p_, a.v_ + b.v_);
  if (b.zero_) return PadicNumber(a.p_, a.v_ + b.v_);
  return PadicNumber::make(a.p_, a.v_ + b.v_, a.u_ * b.u_, std::min(a.rel_, b.rel_));
}

PadicNumber operator/(const PadicNumber& a, const PadicNumber& b) {
  if (a.p_ != b.p_) throw InputError("mismatched primes");
  if (b.zero_) throw PrecisionError("division by a quantity indistinguishable from zero");
  if (a.zero_) return PadicNumber(a.p_, a.v_ - b.v_);
  const int rel = std::min(a.rel_, b.rel_);
  mpz_class inv;
  mpz_invert(inv.get_mpz_t(), b.u_.get_mpz_t(), prime_power(a.p_, rel).get_mpz_t());
  return PadicNumber::make(a.p_, a.v_ - b.v_, a.u_ * inv, rel);
}

PadicInt PadicNumber::to_padic_int(int n) const {
  const int prec = std::min(n, abs_precision());
  if (prec < 1) throw PrecisionError("precision exhausted");
  if (zero_) return PadicInt(p_, prec);
  if (v_ < 0) throw InputError("value is not a p-adic integer");
  return PadicInt(p_, prec, mpz_class(u_ * prime_power(p_, v_)));
}

std::string PadicNumber::to_string() const {
  if (zero_) return "O(" + std::to_string(p_) + "^" + std::to_string(v_) + ")";
  return std::to_string(p_) + "^" + std::to_string(v_) + "*" + u_.get_str() + " + O(" + std::to_string(p_) + "^" +
         std::to_string(v_ + rel_) + ")";
}

}  // namespace padicaut
