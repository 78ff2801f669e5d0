#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "padicaut/arith.hpp"
#include "padicaut/error.hpp"
#include "padicaut/padic.hpp"
#include "padicaut/padic_linalg.hpp"

using namespace padicaut;

TEST_CASE("valuations and factorials") {
  CHECK(vp(mpz_class(54), 3) == 3);
  CHECK(vp(mpq_class(2, 9), 3) == -2);
  CHECK_THROWS_AS(vp(mpz_class(0), 3), InputError);
  CHECK(vp_factorial(0, 7) == 0);
  CHECK(vp_factorial(2, 3) == 0);
  for (long p : {2L, 3L, 5L, 7L}) {
    for (long n = 0; n <= 50; ++n) CHECK(vp_factorial(n, p) == oracle::val(oracle::factorial(n), p));
  }
}

TEST_CASE("flow threshold") {
  CHECK(flow_threshold(2) == 2);
  CHECK(flow_threshold(3) == 1);
  CHECK(flow_threshold(7) == 1);
}

TEST_CASE("padic ring operations") {
  const PadicInt one_p(3, 10, 4);
  CHECK((one_p * one_p.inverse()) == PadicInt(3, 10, 1));
  CHECK((PadicInt(3, 10, 3) + PadicInt(3, 10, 6)).valuation() == 2);
  CHECK(PadicInt(3, 3, 4).pow(3).residue() == 10);
  CHECK_THROWS_WITH_AS(PadicInt(3, 10, 6).inverse(), doctest::Contains("non-unit"), InputError);
  CHECK_THROWS(PadicInt(3, 10, 1) + PadicInt(5, 10, 1));
  CHECK(PadicInt(3, 4, -1).residue() == 80);
  CHECK(PadicInt(3, 4, 80).signed_residue() == -1);
  CHECK(PadicInt::from_rational(mpq_class(1, 2), 3, 5).residue() * 2 % 243 == 1);
  CHECK_THROWS_AS(PadicInt::from_rational(mpq_class(1, 3), 3, 5), InputError);
}

TEST_CASE("ring laws and ultrametric inequality on samples") {
  std::mt19937_64 rng(7);
  for (long p : {2L, 3L, 5L}) {
    const int n = 12;
    const mpz_class mod = prime_power(p, n);
    std::uniform_int_distribution<long> dist(-100000, 100000);
    for (int i = 0; i < 100; ++i) {
      const long x = dist(rng), y = dist(rng), z = dist(rng);
      const PadicInt a(p, n, x), b(p, n, y), c(p, n, z);
      mpz_class expect = (mpz_class(x) * y + z) % mod;
      if (expect < 0) expect += mod;
      CHECK((a * b + c).residue() == expect);
      CHECK((a * (b + c)) == (a * b + a * c));
      const int va = a.valuation(), vb = b.valuation(), vs = (a + b).valuation();
      CHECK(vs >= std::min(va, vb));
      if (va != vb) CHECK(vs == std::min(va, vb));
      CHECK((a * b).valuation() >= std::min(n, va + vb));
    }
  }
}

TEST_CASE("binomials") {
  CHECK(binom_padic(PadicInt(3, 10, 3), 2).residue() == 3);
  for (int k = 0; k <= 5; ++k) {
    const PadicInt r = binom_padic(PadicInt(3, 10, -1), k);
    CHECK(r.signed_residue() == (k % 2 ? -1 : 1));
  }
  CHECK(binom_padic(PadicInt(3, 10, 3), 3).residue() == 1);
  CHECK_THROWS(binom_padic(PadicInt(3, 2, 5), 9));
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> dist(0, 1000000);
  for (int i = 0; i < 100; ++i) {
    const long t = dist(rng);
    for (int k = 0; k <= 20; ++k) {
      const PadicInt r = binom_padic(PadicInt(3, 30, t), k);
      CHECK(r.precision() == 30 - vp_factorial(k, 3));
      CHECK(r.residue() == oracle::binomial(t, k) % prime_power(3, r.precision()));
    }
  }
}

TEST_CASE("padic numbers") {
  const PadicNumber a = PadicNumber::from_rational(mpq_class(9, 2), 3, 8);
  CHECK(a.valuation() == 2);
  const PadicNumber b = PadicNumber::from_rational(mpq_class(1, 3), 3, 8);
  CHECK(b.valuation() == -1);
  CHECK((a * b).valuation() == 1);
  CHECK((a / a).valuation() == 0);
  CHECK((a - a).is_zero());
}

TEST_CASE("generator primes give the cyclotomic valuation identity") {
  for (std::uint64_t p : {3ULL, 5ULL, 7ULL}) {
    const long ell = oracle::smallest_generator_prime(static_cast<long>(p));
    CHECK(multiplicative_order(static_cast<std::uint64_t>(ell), p * p) == p * (p - 1));
    for (long i = 1; i <= 30; ++i) {
      mpz_class li;
      mpz_ui_pow_ui(li.get_mpz_t(), static_cast<unsigned long>(ell), static_cast<unsigned long>(i));
      li -= 1;
      if (li % static_cast<long>(p) == 0) CHECK(i % static_cast<long>(p - 1) == 0);
      if (i % static_cast<long>(p - 1) == 0) CHECK(vp(li, static_cast<std::int64_t>(p)) == 1 + vp(static_cast<std::int64_t>(i), static_cast<std::int64_t>(p)));
    }
  }
}

TEST_CASE("integer helpers") {
  CHECK(is_prime(97));
  CHECK_FALSE(is_prime(91));
  CHECK(next_prime(13) == 17);
  CHECK(lcm_u64(4, 6) == 12);
  CHECK(euler_phi(9) == 6);
  CHECK(powmod(2, 10, 1000) == 24);
}

TEST_CASE("padic rank") {
  const PrecisionPolicy pol(10, 2);
  const std::vector<std::vector<mpz_class>> rows = {{3, 0, 0}, {0, 9, 0}, {3, 9, 0}};
  const RankResult r = padic_rank(rows, 3, pol);
  CHECK(r.rank == 2);
  const std::vector<std::vector<mpz_class>> basis = {{3, 0, 0}, {0, 9, 0}};
  const Expression e = express_in_basis(basis, {6, 27, 0}, 3, pol);
  CHECK(e.in_span);
  CHECK(e.coefficients.size() == 2);
  CHECK_FALSE(express_in_basis(basis, {0, 0, 1}, 3, pol).in_span);
}
