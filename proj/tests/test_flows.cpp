#include "doctest.h"

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "padicaut/error.hpp"
#include "padicaut/flows.hpp"

using namespace padicaut;

namespace {

constexpr std::int64_t P = 3;

FlowOptions opts(int n = 12, int d = 8, int k = 10) {
  FlowOptions o;
  o.precision = n;
  o.degree = d;
  o.t_degree = k;
  return o;
}

PolyMap map(const std::string& text) { return parse_polymap(text); }

VectorField field(const std::string& comps, int d, int n = 12, int deg = 8) {
  std::vector<Polynomial> u;
  std::stringstream ss(comps);
  std::string item;
  while (std::getline(ss, item, ';')) u.push_back(parse_polynomial(item, d));
  return VectorField::from_polynomials(u, P, n, deg);
}

bool exp_ge(NormExp a, int b) { return !a || *a >= b; }

// Difference of two maps reduced to a common precision and degree cap.
NormExp distance(const TateMap& a, const TateMap& b) {
  const int n = std::min(a.precision(), b.precision());
  const int d = std::min(a.degree(), b.degree());
  return (a.with_precision(n).truncate(d) - b.with_precision(n).truncate(d)).gauss_norm();
}

NormExp distance(const VectorField& a, const VectorField& b) {
  const int n = std::min(a.precision(), b.precision());
  const int d = std::min(a.degree(), b.degree());
  return (a.with_precision(n).truncate(d) - b.with_precision(n).truncate(d)).gauss_norm();
}

// Random map id + 3^c h with integer h of degree <= 3 and zero constant term.
PolyMap random_admissible(std::mt19937_64& rng, int d, int c) {
  std::vector<Polynomial> comps;
  std::uniform_int_distribution<int> coef(-4, 4);
  for (int i = 0; i < d; ++i) {
    Polynomial u = Polynomial::variable(d, i);
    for (int deg = 1; deg <= 3; ++deg) {
      for (int j = 0; j < d; ++j) {
        Monomial m(static_cast<std::size_t>(d), 0);
        m[static_cast<std::size_t>(j)] = deg;
        if (deg == 2 && d > 1) m[static_cast<std::size_t>((j + 1) % d)] = 1;
        u.add_term(m, mpq_class(coef(rng)) * mpq_class(prime_power(P, c)));
      }
    }
    comps.push_back(u);
  }
  return PolyMap(Ring::rationals(), comps);
}

}  // namespace

TEST_CASE("bell-poonen flow of a translation") {
  const TateFlow phi = bell_poonen_flow(map("d=1; ring=Q\nf1 = x1 + 3\n"), P, opts());
  CHECK(phi.mahler.size() == 2);
  CHECK(phi.power[1][0].coefficient({0}).residue() == 3);
  for (std::size_t j = 2; j < phi.power.size(); ++j) CHECK(phi.power[j].is_identity() == false);
  CHECK(phi.iterates_verified);
  CHECK(flow_vector_field(phi) == field("3", 1).truncate(phi.degree));
}

TEST_CASE("bell-poonen flow of a linear map") {
  const PolyMap f = map("d=1; ring=Q\nf1 = 4*x1\n");
  const TateFlow phi = bell_poonen_flow(f, P, opts());
  CHECK(phi.iterates_verified);
  for (std::int64_t n = 0; n <= 5; ++n) {
    const TateMap fn = TateMap::from_polymap(f.power(static_cast<std::uint64_t>(n)), P, 12, 8);
    CHECK_FALSE(distance(flow_eval(phi, n), fn).has_value());
  }
  // log(1 + 3) = sum (-1)^{k+1} 3^k / k, summed far enough that the tail vanishes mod 3^12.
  mpq_class log = 0;
  mpq_class pk = 1;
  for (int k = 1; k <= 40; ++k) {
    pk *= 3;
    log += (k % 2 ? 1 : -1) * pk / k;
  }
  const PadicInt expect = PadicInt::from_rational(log, P, 12);
  const VectorField x = flow_vector_field(phi);
  const PadicInt got = x[0].coefficient({1});
  INFO(got.to_string() << " vs " << expect.to_string());
  CHECK(got.with_precision(std::min(got.precision(), 12)) == expect.with_precision(std::min(got.precision(), 12)));
}

TEST_CASE("bell-poonen flow laws for 4x + 3x^2") {
  const PolyMap f = map("d=1; ring=Q\nf1 = 4*x1 + 3*x1^2\n");
  const TateFlow phi = bell_poonen_flow(f, P, opts());
  CHECK(phi.iterates_verified);
  CHECK(flow_eval(phi, 0).is_identity());
  CHECK_FALSE(distance(flow_eval(phi, 1), TateMap::from_polymap(f, P, 12, 8)).has_value());
  std::mt19937_64 rng(37);
  for (int i = 0; i < 20; ++i) {
    const std::int64_t s = static_cast<std::int64_t>(rng() % 200) - 100;
    const std::int64_t t = static_cast<std::int64_t>(rng() % 200) - 100;
    CHECK_FALSE(distance(flow_eval(phi, s + t), compose(flow_eval(phi, t), flow_eval(phi, s))).has_value());
    CHECK_FALSE(distance(compose(flow_eval(phi, s), flow_eval(phi, -s)), TateMap::identity(P, 12, 1, 8)).has_value());
  }
}

TEST_CASE("flow evaluation at p-adic times") {
  const TateFlow phi = bell_poonen_flow(map("d=1; ring=Q\nf1 = 4*x1 + 3*x1^2\n"), P, opts());
  const PadicInt half = PadicInt::from_rational(mpq_class(1, 2), P, 12);
  const TateMap h = flow_eval(phi, half);
  CHECK_FALSE(distance(compose(h, h), flow_eval(phi, 1)).has_value());
}

TEST_CASE("bell-poonen preconditions") {
  CHECK_THROWS_WITH_AS(bell_poonen_flow(map("d=1; ring=Q\nf1 = x1 + 1\n"), P, opts()), doctest::Contains("threshold"), InputError);
}

TEST_CASE("vector field integration") {
  const TateFlow c = integrate_vector_field(field("3", 1), opts());
  CHECK(c.power[1][0].coefficient({0}).residue() == 3);
  CHECK(c.power[0][0].coefficient({1}).residue() == 1);

  const TateFlow g = integrate_vector_field(field("3*x1^2", 1), opts());
  for (int j = 0; j <= 7; ++j) {
    const mpz_class expect = prime_power(P, j) % prime_power(P, g.power_precision);
    CHECK(g.power[static_cast<std::size_t>(j)][0].coefficient({j + 1}).residue() == expect);
    for (int e = 0; e <= 8; ++e) {
      if (e != j + 1) CHECK(g.power[static_cast<std::size_t>(j)][0].coefficient({e}).is_zero());
    }
  }

  const TateFlow e = integrate_vector_field(field("3*x1", 1), opts());
  for (int j = 0; j <= 10; ++j) {
    mpq_class q(prime_power(P, j), oracle::factorial(j));
    q.canonicalize();
    const PadicInt expect = PadicInt::from_rational(q, P, e.power_precision);
    CHECK(e.power[static_cast<std::size_t>(j)][0].coefficient({1}) == expect);
  }
  CHECK_THROWS_WITH(integrate_vector_field(field("x1^2", 1), opts()), doctest::Contains("integrability threshold"));
}

TEST_CASE("vector field round trips") {
  CHECK(flow_vector_field(integrate_vector_field(field("3*x1^2", 1), opts())) == field("3*x1^2", 1));
  CHECK(flow_vector_field(integrate_vector_field(field("3*x1", 1), opts())) == field("3*x1", 1));
  std::mt19937_64 rng(41);
  for (int i = 0; i < 10; ++i) {
    const TateFlow phi = bell_poonen_flow(random_admissible(rng, 2, 1), P, opts(10, 6, 8));
    const VectorField x = flow_vector_field(phi);
    const TateFlow back = integrate_vector_field(x, opts(10, 6, 8));
    const int n = std::min(back.power_precision, phi.power_precision) - 2;
    for (std::size_t j = 0; j < 4; ++j) {
      INFO("j " << j << " dist " << exp_to_string(distance(back.power[j], phi.power[j])) << " n " << n << " prec " << back.power_precision << "/" << phi.power_precision);
      CHECK(exp_ge(distance(back.power[j], phi.power[j]), n));
    }
    CHECK(flow_vector_field(back) == x);
  }
}

TEST_CASE("lie brackets") {
  const VectorField d1 = field("1;0", 2), xd1 = field("x1;0", 2), d2 = field("0;1", 2);
  CHECK(lie_bracket(d1, xd1) == d1.truncate(7));
  CHECK(lie_bracket(xd1, xd1).is_zero());
  CHECK(lie_bracket(d1, d2).is_zero());
  std::mt19937_64 rng(43);
  for (int i = 0; i < 10; ++i) {
    std::vector<VectorField> v;
    for (int k = 0; k < 3; ++k) v.push_back(flow_vector_field(bell_poonen_flow(random_admissible(rng, 2, 1), P, opts(10, 6, 8))));
    CHECK(lie_bracket(v[0], v[1]) == lie_bracket(v[1], v[0]).scaled(-1));
    const VectorField a = v[0].truncate(5), b = v[1].truncate(5), c = v[2].truncate(5);
    const VectorField a4 = a.truncate(4), b4 = b.truncate(4), c4 = c.truncate(4);
    const VectorField jac = lie_bracket(a4, lie_bracket(b, c)) + lie_bracket(b4, lie_bracket(c, a)) + lie_bracket(c4, lie_bracket(a, b));
    CHECK(jac.is_zero());
  }
}

TEST_CASE("bracket compatibility with group commutators") {
  // The field of f^-1 g^-1 f g, with (f g)(x) = f(g(x)), matches [X_g, X_f] to first order.
  std::mt19937_64 rng(47);
  const int c = 2;
  int right = 0, wrong = 0, informative = 0;
  for (int i = 0; i < 10; ++i) {
    const PolyMap f0 = random_admissible(rng, 2, c), g0 = random_admissible(rng, 2, c);
    const FlowOptions o = opts(12, 6, 8);
    const TateMap f = TateMap::from_polymap(f0, P, 14, 6), g = TateMap::from_polymap(g0, P, 14, 6);
    const TateMap comm = compose(invert_diffeo(f), compose(invert_diffeo(g), compose(f, g)));
    const VectorField xf = flow_vector_field(bell_poonen_flow(f0, P, o));
    const VectorField xg = flow_vector_field(bell_poonen_flow(g0, P, o));
    const VectorField xc = flow_vector_field(bell_poonen_flow(comm, o));
    const VectorField br = lie_bracket(xg, xf);
    const NormExp e_right = distance(xc, br);
    const NormExp e_wrong = distance(xc, br.scaled(-1));
    INFO("right " << exp_to_string(e_right) << " wrong " << exp_to_string(e_wrong));
    if (exp_ge(e_right, 3 * c - 1)) ++right;
    if (br.gauss_norm() && *br.gauss_norm() < 3 * c - 1) ++informative;
    if (exp_ge(e_wrong, 3 * c - 1) && br.gauss_norm() && *br.gauss_norm() < 3 * c - 1) ++wrong;
    CHECK(exp_ge(e_right, 3 * c - 1));
  }
  CHECK(right == 10);
  CHECK(wrong == 0);
  CHECK(informative >= 5);
}

TEST_CASE("torsion freeness and ball stability") {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 10; ++i) {
    const PolyMap f0 = random_admissible(rng, 2, 1);
    const TateMap f = TateMap::from_polymap(f0, P, 12, 6);
    if (f.is_identity()) continue;
    TateMap g = f;
    for (int k = 1; k <= 4; ++k) {
      g = iterate(g, 3);
      CHECK_FALSE(g.is_identity());
    }
    const TateFlow phi = bell_poonen_flow(f0, P, opts(10, 6, 8));
    const PadicInt t(P, 10, 3 * static_cast<std::int64_t>(1 + rng() % 20));
    const TateMap fwd = flow_eval(phi, t), bwd = flow_eval(phi, -t);
    // Points of 3Z_p^2, where the omitted degrees above the cap are negligible.
    for (int s = 0; s < 5; ++s) {
      const int j = 1 + static_cast<int>(rng() % 2);
      std::vector<PadicInt> centre, x;
      for (int k = 0; k < 2; ++k) {
        centre.emplace_back(P, 10, 3 * static_cast<std::int64_t>(rng() % 81));
        x.push_back(centre.back() + PadicInt(P, 10, static_cast<std::int64_t>(rng() % 81)) * PadicInt(P, 10, prime_power(P, j + 1)));
      }
      const auto y = fwd.evaluate(x);
      for (int k = 0; k < 2; ++k) CHECK((y[k] - centre[k]).valuation() >= j + 1);
      const auto z = bwd.evaluate(y);
      for (int k = 0; k < 2; ++k) CHECK(exp_ge((z[k] - x[k]).norm_exp(), 7));
    }
  }
}

TEST_CASE("straightening") {
  const StraightenResult one = straighten({field("3;3*x1", 2)}, {0, 0}, opts(12, 6, 8));
  CHECK(one.verified);
  const StraightenResult diag = straighten({field("3;0", 2)}, {0, 0}, opts(12, 6, 8));
  CHECK(diag.verified);
  CHECK(diag.phi.is_identity());
  const StraightenResult two = straighten({field("3;0", 2), field("0;3", 2)}, {0, 0}, opts(12, 6, 8));
  CHECK(two.verified);
  CHECK(two.phi.is_identity());
  CHECK_THROWS_WITH(straighten({field("3;0", 2), field("0;3*x1", 2)}, {0, 0}, opts(12, 6, 8)), doctest::Contains("non-commuting"));
  CHECK_THROWS_WITH(straighten({field("3*x1;0", 2)}, {0, 0}, opts(12, 6, 8)), doctest::Contains("rank deficiency"));
}

TEST_CASE("lie closures") {
  const PrecisionPolicy pol(12, 2);
  const LieAlgebraBasis heis = lie_closure({field("3;0", 2), field("0;3*x1", 2)}, pol);
  CHECK(heis.dim() == 3);
  CHECK(derived_length(heis) == 2);
  CHECK(nilpotency_class(heis) == 2);
  CHECK(heis.derived_length <= heis.ambient_dim);
  const LieAlgebraBasis single = lie_closure({field("3;0", 2)}, pol);
  CHECK(single.dim() == 1);
  const LieAlgebraBasis ab = lie_closure({field("3;0", 2), field("0;3", 2)}, pol);
  CHECK(ab.derived_length == 1);
  CHECK(ab.nilpotency_class == 1);
  const LieAlgebraBasis aff = lie_closure({field("3", 1), field("3*x1", 1)}, pol);
  CHECK(aff.derived_length == 2);
  CHECK_FALSE(aff.nilpotency_class.has_value());
  CHECK_THROWS_AS(lie_closure({field("3;0", 2), field("0;3*x1^2", 2), field("3*x2;0", 2)}, pol, 6), BudgetError);
}

TEST_CASE("stirling numbers") {
  const auto s = stirling_first(12);
  for (int n = 0; n <= 12; ++n) {
    const auto c = oracle::falling_factorial_coeffs(n);
    for (int k = 0; k <= n; ++k) CHECK(s[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] == c[static_cast<std::size_t>(k)]);
  }
}
