#include "padicaut/bounds.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "padicaut/arith.hpp"
#include "padicaut/error.hpp"

namespace padicaut {

std::string case_name(Case2 c) {
  switch (c) {
    case Case2::A:
      return "A";
    case Case2::B:
      return "B";
    case Case2::C:
      return "C";
    case Case2::None:
      break;
  }
  return "";
}

FieldSpec FieldSpec::cyclotomic(std::uint64_t n) {
  if (n < 1) throw InputError("cyclotomic field needs n >= 1");
  FieldSpec f;
  f.kind = Kind::Cyclotomic;
  f.n = n;
  return f;
}

FieldSpec FieldSpec::explicit_data(int t, int m, Case2 c) {
  FieldSpec f;
  f.kind = Kind::Explicit;
  f.t = t;
  f.m = m;
  f.case2 = c;
  return f;
}

FieldSpec FieldSpec::parse(const std::string& raw) {
  std::string text;
  for (char ch : raw) {
    if (std::isspace(static_cast<unsigned char>(ch)) == 0) text += ch;
  }
  std::smatch match;
  if (text == "Q") return rationals();
  if (std::regex_match(text, match, std::regex(R"((?:cyclotomic|Q\(zeta_?)\(?(\d+)\)?\)?)"))) {
    const auto n = std::stoull(match[1]);
    return n == 1 ? rationals() : cyclotomic(n);
  }
  if (std::regex_match(text, match, std::regex(R"(explicit\((\d+),(\d+)(?:,([ABC]))?\))"))) {
    Case2 c = Case2::None;
    if (match[3].matched) c = match[3] == "A" ? Case2::A : (match[3] == "B" ? Case2::B : Case2::C);
    return explicit_data(std::stoi(match[1]), std::stoi(match[2]), c);
  }
  throw InputError("unknown field '" + raw + "' (use Q, cyclotomic(n) or explicit(t,m[,case]))");
}

std::string FieldSpec::to_string() const {
  switch (kind) {
    case Kind::Rationals:
      return "Q";
    case Kind::Cyclotomic:
      return "cyclotomic(" + std::to_string(n) + ")";
    case Kind::Explicit: {
      std::string s = "explicit(" + std::to_string(t) + "," + std::to_string(m);
      if (case2 != Case2::None) s += "," + case_name(case2);
      return s + ")";
    }
  }
  return "Q";
}

void CyclotomicData::validate() const {
  if (!is_prime(static_cast<std::uint64_t>(p))) throw InputError("p must be prime");
  if (t < 1 || m < 1) throw InputError("cyclotomic constants must be positive");
  if (p != 2) {
    if ((p - 1) % t != 0) throw InputError("t must divide p-1");
    return;
  }
  if (t > 2) throw InputError("t must be 1 or 2 for p = 2");
  if (m < 2) throw InputError("m must be at least 2 for p = 2");
  if (case2 == Case2::None) throw InputError("p = 2 needs a case A, B or C");
  if ((case2 == Case2::A) != (t == 1)) throw InputError("case A holds exactly when t = 1");
  if (case2 == Case2::B && m < 3) throw InputError("case B needs m >= 3");
}

int minkowski_bound(int d, std::int64_t p) {
  if (d < 1) throw InputError("dimension must be positive");
  int total = 0;
  for (std::int64_t q = p - 1; q <= d; q *= p) total += static_cast<int>(d / q);
  return total;
}

int schur_bound(int d, const CyclotomicData& cyc) {
  if (d < 1) throw InputError("dimension must be positive");
  cyc.validate();
  const std::int64_t p = cyc.p;
  const int t = cyc.t;
  int total = p == 2 ? d + (cyc.m - 1) * (d / t) : cyc.m * (d / t);
  for (std::int64_t q = p * t; q <= d; q *= p) total += static_cast<int>(d / q);
  return total;
}

int m_prime_bound(int d, const CyclotomicData& cyc) {
  if (d < 1) throw InputError("dimension must be positive");
  cyc.validate();
  if (cyc.p != 2 || cyc.case2 == Case2::A) {
    int total = 0;
    for (int i = cyc.t; i <= d; i += cyc.t) total += cyc.m + vp(static_cast<std::int64_t>(i), cyc.p);
    return total;
  }
  const int r1 = (d + 1) / 2;
  const int r0 = d / 2;
  const int v2 = vp_factorial(d, 2);
  if (cyc.case2 == Case2::B) return r1 + (cyc.m - 1) * r0 + v2;
  return r1 + cyc.m * r0 + v2;
}

int gl_order_valuation(int d, const mpz_class& q, std::int64_t p) {
  if (d < 1) throw InputError("dimension must be positive");
  if (q < 2) throw InputError("field size must be at least 2");
  if (mpz_divisible_ui_p(q.get_mpz_t(), static_cast<unsigned long>(p)) != 0) throw InputError("equal characteristic");
  int total = 0;
  mpz_class qi = 1;
  for (int i = 1; i <= d; ++i) {
    qi *= q;
    total += vp(mpz_class(qi - 1), p);
  }
  return total;
}

namespace {

std::uint64_t phi_ratio(std::uint64_t n, std::uint64_t pa) { return euler_phi(lcm_u64(n, pa)) / euler_phi(n); }

}  // namespace

CyclotomicData cyclotomic_data(const FieldSpec& field, std::int64_t p) {
  if (!is_prime(static_cast<std::uint64_t>(p))) throw InputError("p must be prime");
  CyclotomicData out;
  out.p = p;
  out.field = field;
  if (field.kind == FieldSpec::Kind::Explicit) {
    out.t = field.t;
    out.m = field.m;
    out.case2 = p == 2 ? field.case2 : Case2::None;
    out.validate();
    return out;
  }
  const std::uint64_t n = field.kind == FieldSpec::Kind::Rationals ? 1 : field.n;
  const auto up = static_cast<std::uint64_t>(p);
  const std::uint64_t base = p == 2 ? 4 : up;
  out.t = static_cast<int>(phi_ratio(n, base));
  int m = p == 2 ? 2 : 1;
  std::uint64_t pa = base;
  while (phi_ratio(n, pa * up) == static_cast<std::uint64_t>(out.t)) {
    pa *= up;
    ++m;
  }
  out.m = m;
  if (p == 2) {
    if (out.t == 1) {
      out.case2 = Case2::A;
    } else {
      // Image mod 2^J is {u odd : u = 1 mod 2^{v_2(n)}}; test -1.
      const int a0 = n % 2 == 0 ? vp(static_cast<std::int64_t>(n), 2) : 0;
      const int j = m + 2;
      const mpz_class minus_one = prime_power(2, j) - 1;
      const bool has_minus_one = a0 <= 1 || mpz_class(minus_one % prime_power(2, a0)) == 1;
      out.case2 = has_minus_one ? Case2::C : Case2::B;
    }
  }
  out.validate();
  return out;
}

std::uint64_t find_prime_generator(std::int64_t p, std::uint64_t lower, const std::set<std::uint64_t>& forbidden,
                                   std::uint64_t cap) {
  if (p == 2 || !is_prime(static_cast<std::uint64_t>(p))) throw InputError("generator search needs an odd prime p");
  const auto up = static_cast<std::uint64_t>(p);
  const std::uint64_t p2 = up * up;
  std::uint64_t candidate = lower;
  for (std::uint64_t examined = 0; examined < cap; ++examined) {
    candidate = next_prime(candidate);
    if (forbidden.count(candidate) != 0 || candidate % up == 0) continue;
    if (multiplicative_order(candidate % p2, p2) == up * (up - 1)) return candidate;
  }
  throw BudgetError("prime search cap " + std::to_string(cap) + " exceeded");
}

std::vector<PadicInt> sample_chi_image(const FieldSpec& field, std::int64_t p, int count, int precision) {
  if (field.kind == FieldSpec::Kind::Explicit) throw InputError("sampling needs Q or a cyclotomic field");
  const std::uint64_t n = field.kind == FieldSpec::Kind::Rationals ? 1 : field.n;
  std::vector<PadicInt> out;
  std::uint64_t ell = 1;
  while (static_cast<int>(out.size()) < count) {
    ell = next_prime(ell);
    if (ell == static_cast<std::uint64_t>(p) || n % ell == 0) continue;
    const std::uint64_t f = n == 1 ? 1 : multiplicative_order(ell % n, n);
    PadicInt value(p, precision, mpz_class(static_cast<unsigned long>(ell)));
    out.push_back(value.pow(f));
  }
  return out;
}

bool chi_image_contains(const CyclotomicData& cyc, const mpz_class& u, int j) {
  cyc.validate();
  const std::int64_t p = cyc.p;
  const int k = std::min(j, cyc.m);
  const mpz_class& mod = prime_power(p, k);
  mpz_class r = u;
  mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), mod.get_mpz_t());
  if (mpz_divisible_ui_p(u.get_mpz_t(), static_cast<unsigned long>(p)) != 0) return false;
  if (k == 0) return true;
  if (p != 2) {
    mpz_class power;
    mpz_class e(cyc.t);
    mpz_powm(power.get_mpz_t(), r.get_mpz_t(), e.get_mpz_t(), mod.get_mpz_t());
    return power == mpz_class(1) % mod;
  }
  const mpz_class one = mpz_class(1) % mod;
  if (r == one) return true;
  switch (cyc.case2) {
    case Case2::A:
      return false;
    case Case2::B: {
      mpz_class b = prime_power(2, cyc.m - 1) - 1;
      mpz_fdiv_r(b.get_mpz_t(), b.get_mpz_t(), mod.get_mpz_t());
      return r == b;
    }
    case Case2::C: {
      mpz_class minus = mod - 1;
      mpz_fdiv_r(minus.get_mpz_t(), minus.get_mpz_t(), mod.get_mpz_t());
      return r == minus;
    }
    case Case2::None:
      break;
  }
  return false;
}

int valuation_sum(const PadicInt& u, int d) {
  int total = 0;
  const PadicInt one(u.prime(), u.precision(), 1);
  for (int i = 1; i <= d; ++i) total += (u.pow(static_cast<std::uint64_t>(i)) - one).valuation();
  return total;
}

}  // namespace padicaut
