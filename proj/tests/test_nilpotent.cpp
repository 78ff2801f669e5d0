#include "doctest.h"

#include <random>
#include <set>

#include "oracles.hpp"
#include "padicaut/nilpotent.hpp"

using namespace padicaut;

namespace {

const std::function<std::string(const UniTri&)> kUnitriKey = [](const UniTri& g) { return key_of(g); };
const std::function<std::string(const RationalExp&)> kExpKey = [](const RationalExp& g) { return key_of(g); };

UniTri random_unitri(std::mt19937_64& rng, int n) {
  std::vector<std::vector<mpz_class>> rows(static_cast<std::size_t>(n), std::vector<mpz_class>(static_cast<std::size_t>(n), 0));
  std::uniform_int_distribution<long> c(-5, 5);
  for (int i = 0; i < n; ++i) {
    rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    for (int j = i + 1; j < n; ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c(rng);
  }
  return UniTri::from_rows(rows);
}

RationalExp random_exp(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<long> c(-6, 6), den(1, 4);
  std::vector<mpq_class> b;
  for (int i = 0; i < n; ++i) {
    mpq_class q(c(rng), den(rng));
    q.canonicalize();
    b.push_back(q);
  }
  mpq_class t(c(rng), den(rng));
  t.canonicalize();
  return RationalExp(t, b);
}

oracle::IntMat to_int(const UniTri& g) {
  oracle::IntMat m(static_cast<std::size_t>(g.size()), std::vector<long>(static_cast<std::size_t>(g.size())));
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g.at(i, j).get_si();
  return m;
}

std::vector<UniTri> elementary_gens(int n, std::optional<mpz_class> mod) {
  std::vector<UniTri> g;
  for (int i = 1; i < n; ++i) g.push_back(UniTri::elementary(n, i, i + 1, 1, mod));
  return g;
}

}  // namespace

TEST_CASE("unitriangular basics") {
  const UniTri a = UniTri::parse(3, "E12"), b = UniTri::parse(3, "E23");
  CHECK(commutator(a, b) == UniTri::parse(3, "E13"));
  CHECK(commutator(a, UniTri::identity(3)).is_identity());
  CHECK(UniTri::parse(3, "I+2E13") == UniTri::elementary(3, 1, 3, 2));
  std::mt19937_64 rng(59);
  for (int i = 0; i < 20; ++i) {
    const UniTri x = random_unitri(rng, 4), y = random_unitri(rng, 4);
    CHECK((x * x.inverse()).is_identity());
    CHECK(to_int(x * y) == oracle::mat_mul(to_int(x), to_int(y)));
    CHECK(to_int(x.inverse()) == oracle::unitri_inverse(to_int(x)));
    CHECK(x.pow(3) == x * x * x);
  }
}

TEST_CASE("commutator identities on random triples") {
  std::mt19937_64 rng(61);
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const UniTri x = random_unitri(rng, 4), y = random_unitri(rng, 4), z = random_unitri(rng, 4);
    if (commutator(x, y).inverse() != commutator(y, x)) ++violations;
    if (commutator(x, y * z) != commutator(x, y) * commutator(y, commutator(x, z)) * commutator(x, z)) ++violations;
    if (commutator(x * y, z) != commutator(x, commutator(y, z)) * commutator(y, z) * commutator(x, z)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("nilpotency class and derived length of generator sets") {
  const auto heis = elementary_gens(3, std::nullopt);
  CHECK(nilpotency_class(heis, 6) == 2);
  CHECK(derived_length(heis, 2, kUnitriKey) == 2);
  CHECK(nilpotency_class(std::vector<UniTri>{UniTri::parse(3, "E12")}, 6) == 1);
  CHECK(nilpotency_class(elementary_gens(4, std::nullopt), 6) == 3);
  CHECK(derived_length(elementary_gens(4, std::nullopt), 3, kUnitriKey) == 2);
  CHECK(nilpotency_class(elementary_gens(5, std::nullopt), 6) == 4);
  CHECK(derived_length(elementary_gens(5, std::nullopt), 4, kUnitriKey) == 3);
}

TEST_CASE("finite quotients") {
  const SeriesReport h = derived_series_quotient(elementary_gens(3, mpz_class(3)), 3);
  CHECK(h.derived_orders == std::vector<std::size_t>{27, 3, 1});
  CHECK(h.derived_length == 2);
  CHECK(h.nilpotency_class == 2);
  const SeriesReport ab = derived_series_quotient({UniTri::parse(3, "E12", mpz_class(5))}, 5);
  CHECK(ab.derived_length == 1);
  const auto t4 = elementary_gens(4, mpz_class(3));
  const SeriesReport r4 = derived_series_quotient(t4, 3);
  CHECK(r4.derived_orders.front() == 729);
  CHECK(r4.derived_length == 2);
  CHECK(r4.nilpotency_class == 3);
  std::vector<oracle::IntMat> im;
  for (const auto& g : t4) im.push_back(to_int(g));
  CHECK(oracle::closure_order(im, 3) == 729);
}

TEST_CASE("lower central steps are generated by chains") {
  const auto gens = elementary_gens(4, mpz_class(3));
  const FiniteUniTriGroup g = unitri_closure(gens);
  REQUIRE(g.size() == 729);
  // C_2 and C_3 by brute force over element pairs, in plain integer matrices.
  auto comm_int = [](const oracle::IntMat& x, const oracle::IntMat& y) {
    oracle::IntMat xi = oracle::unitri_inverse(x), yi = oracle::unitri_inverse(y);
    return oracle::mat_mul(oracle::mat_mul(oracle::mat_mul(x, y, 3), xi, 3), yi, 3);
  };
  auto from_int = [](const oracle::IntMat& m) {
    std::vector<std::vector<mpz_class>> rows;
    for (const auto& r : m) rows.emplace_back(r.begin(), r.end());
    return UniTri::from_rows(rows, mpz_class(3));
  };
  std::vector<oracle::IntMat> gi;
  for (const auto& x : g.elements) gi.push_back(to_int(x));
  std::set<oracle::IntMat> c2s, c3s;
  for (const auto& x : gi)
    for (const auto& y : gi) c2s.insert(comm_int(x, y));
  std::vector<UniTri> c2seeds;
  for (const auto& m : c2s) c2seeds.push_back(from_int(m));
  const FiniteUniTriGroup c2 = unitri_closure(c2seeds);
  for (const auto& x : c2.elements)
    for (const auto& y : gi) c3s.insert(comm_int(to_int(x), y));
  std::vector<UniTri> c3seeds;
  for (const auto& m : c3s) c3seeds.push_back(from_int(m));
  const FiniteUniTriGroup c3 = unitri_closure(c3seeds);
  CHECK(c2.size() == 27);
  CHECK(c3.size() == 3);
  CHECK(derived_series_quotient(gens, 3).lower_central_orders == std::vector<std::size_t>{729, 27, 3, 1});
  std::vector<UniTri> k1 = gens;
  k1.insert(k1.end(), c2.elements.begin(), c2.elements.end());
  CHECK(unitri_closure(k1).size() == g.size());
  std::vector<UniTri> k2 = all_chains(gens, 2);
  k2.insert(k2.end(), c3.elements.begin(), c3.elements.end());
  CHECK(unitri_closure(k2).size() == c2.size());
}

TEST_CASE("power subgroup indices") {
  CHECK(power_subgroup_index({UniTri::parse(2, "E12", mpz_class(9))}, 3, 9).index == 3);
  CHECK(power_subgroup_index(elementary_gens(3, mpz_class(9)), 1, 9).index == 1);
  const PowerIndexReport h = power_subgroup_index(elementary_gens(3, mpz_class(9)), 3, 9);
  std::vector<oracle::IntMat> all, cubes;
  for (const auto& g : elementary_gens(3, mpz_class(9))) {
    all.push_back(to_int(g));
    cubes.push_back(to_int(g.pow(3)));
  }
  CHECK(h.group_order == oracle::closure_order(all, 9));
  CHECK(h.power_subgroup_order == oracle::closure_order(cubes, 9));
  CHECK(h.index == 81);
}

TEST_CASE("exp family group law") {
  const auto g = exp_family_generators(3);
  const RationalExp c = commutator(g[0], g[1]);
  CHECK(c.t() == 0);
  CHECK(c.b() == std::vector<mpq_class>{0, 1, mpq_class(1, 2)});
  CHECK(nilpotency_class(g, 6) == 3);
  CHECK(derived_length(g, 3, kExpKey) == 2);
  std::mt19937_64 rng(67);
  for (int i = 0; i < 30; ++i) {
    const RationalExp x = random_exp(rng, 4), y = random_exp(rng, 4), z = random_exp(rng, 4);
    CHECK((x * y) * z == x * (y * z));
    CHECK((x * x.inverse()).is_identity());
    CHECK((x.inverse() * x).is_identity());
  }
}

TEST_CASE("multilinearity") {
  const MultilinearityReport h = multilinearity_check(elementary_gens(3, std::nullopt), 30, 1);
  CHECK(h.checks > 0);
  CHECK(h.violations == 0);
  const MultilinearityReport e = multilinearity_check(exp_family_generators(3), 50, 2);
  CHECK(e.weight == 3);
  CHECK(e.violations == 0);
}

TEST_CASE("exp action is a right action on the plane") {
  const RationalExp tr(mpq_class(5, 2), {0, 0, 0});
  CHECK(exp_action(tr) == parse_polymap("d=2; ring=Q\nf1 = x1 + 5/2\nf2 = x2\n"));
  // With A e_i = e_{i+1}, the last coordinate of b is the translation part.
  const RationalExp pure(0, {mpq_class(3), mpq_class(2), mpq_class(1)});
  CHECK(exp_action(pure) == parse_polymap("d=2; ring=Q\nf1 = x1\nf2 = x2 + 1 + 2*x1 + 3/2*x1^2\n"));
  std::mt19937_64 rng(71);
  for (int i = 0; i < 30; ++i) {
    const RationalExp g = random_exp(rng, 3), h = random_exp(rng, 3);
    CHECK(exp_action(g * h) == exp_action(h).compose(exp_action(g)));
  }
  for (int n = 1; n <= 4; ++n) {
    const BracketPolynomiality sym = bracket_polynomiality(n, 0);
    CHECK(sym.nonconstant);
  }
}

TEST_CASE("symbolic right action for n <= 4") {
  for (int n = 1; n <= 4; ++n) {
    const int nv = 2 * (n + 1);
    std::vector<Polynomial> b, c;
    for (int i = 0; i < n; ++i) {
      b.push_back(Polynomial::variable(nv, 1 + i));
      c.push_back(Polynomial::variable(nv, n + 2 + i));
    }
    const SymbolicExp g(Polynomial::variable(nv, 0), b), h(Polynomial::variable(nv, n + 1), c);
    const SymbolicExp gh = g * h;
    // P_{b + e^{tA} c}(x) = P_b(x) + P_c(x + t), checked coefficientwise on the symbols.
    const int xv = nv;
    auto pb = [&](const std::vector<Polynomial>& v, const Polynomial& x) {
      Polynomial acc(xv + 1);
      Polynomial pow = Polynomial::constant(xv + 1, 1);
      mpq_class fact = 1;
      for (int k = 1; k <= n; ++k) {
        Polynomial coef(xv + 1);
        for (const auto& [m, q] : v[static_cast<std::size_t>(n - k)].terms()) {
          Monomial mm = m;
          mm.push_back(0);
          coef.add_term(mm, q);
        }
        acc += coef * pow * mpq_class(1 / fact);
        pow = pow * x;
        fact *= k;
      }
      return acc;
    };
    auto lift = [&](const Polynomial& q) {
      Polynomial out(xv + 1);
      for (const auto& [m, v] : q.terms()) {
        Monomial mm = m;
        mm.push_back(0);
        out.add_term(mm, v);
      }
      return out;
    };
    const Polynomial x = Polynomial::variable(xv + 1, xv);
    CHECK(pb(gh.b(), x) == pb(g.b(), x) + pb(h.b(), x + lift(g.t())));
  }
}

TEST_CASE("bracket polynomiality") {
  const BracketPolynomiality b2 = bracket_polynomiality(3, 2);
  CHECK(b2.t.is_zero());
  CHECK(b2.nonconstant);
  const BracketPolynomiality b3 = bracket_polynomiality(3, 3);
  CHECK_FALSE(b3.nonconstant);
  CHECK(b3.t.is_zero());
  for (const auto& v : b3.b) CHECK(v.is_zero());
}

TEST_CASE("faithfulness and vdl witness") {
  for (int n : {2, 3}) {
    const VdlWitness w = faithfulness_and_vdl_witness(n);
    CHECK(w.faithful);
    CHECK(w.powers_noncommuting);
    CHECK(w.commutators_are_translations);
    CHECK(w.translations_commute);
    CHECK(w.generic_commutator_nontrivial);
    CHECK(w.derived_length == 2);
    CHECK(w.nilpotency_class == n);
    CHECK(w.degenerate_commute);
  }
}
