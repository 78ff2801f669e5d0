// Acceptance run: one PASS/FAIL line per criterion, time limits included.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "padicaut/autgroup.hpp"
#include "padicaut/bounds.hpp"
#include "padicaut/error.hpp"
#include "padicaut/flows.hpp"
#include "padicaut/nilpotent.hpp"
#include "padicaut/pipeline.hpp"
#include "padicaut/tate.hpp"

using namespace padicaut;

namespace {

struct Closure {
  std::string name;
  std::optional<int> dl;
  int ambient = 0;
  bool nilpotent = false;
};

std::vector<Closure> g_closures;

void record(const std::string& name, const LieAlgebraBasis& h) {
  g_closures.push_back({name, h.derived_length, h.ambient_dim, h.nilpotency_class.has_value()});
}

std::vector<PolyMap> read_group(const std::string& name) {
  std::ifstream in(std::string(PADICAUT_DATA) + "/" + name);
  if (!in) throw InputError("missing data file " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_polymap_list(ss.str());
}

bool exp_ge(NormExp a, NormExp b) {
  if (!a) return true;
  if (!b) return false;
  return *a >= *b;
}

NormExp distance(const TateMap& a, const TateMap& b) {
  const int n = std::min(a.precision(), b.precision());
  const int d = std::min(a.degree(), b.degree());
  return (a.with_precision(n).truncate(d) - b.with_precision(n).truncate(d)).gauss_norm();
}

VectorField field(const std::string& comps, int d, std::int64_t p = 3, int n = 12, int deg = 8) {
  std::vector<Polynomial> u;
  std::stringstream ss(comps);
  std::string item;
  while (std::getline(ss, item, ';')) u.push_back(parse_polynomial(item, d));
  return VectorField::from_polynomials(u, p, n, deg);
}

FlowOptions flow_opts(int n, int d, int k) {
  FlowOptions o;
  o.precision = n;
  o.degree = d;
  o.t_degree = k;
  return o;
}

// Random series over Z_3 with coefficients divisible by 3^min_val.
TateSeries random_series(std::mt19937_64& rng, int nvars, int min_val, bool constant_term, int n, int deg) {
  TateSeries s(3, n, nvars, deg);
  const mpz_class top = prime_power(3, n - min_val);
  gmp_randclass r(gmp_randinit_default);
  r.seed(static_cast<unsigned long>(rng()));
  for (std::size_t i = constant_term ? 0 : 1; i < s.size(); ++i) {
    if (rng() % 3 == 0) continue;
    s.set_residue(i, r.get_z_range(top) * prime_power(3, min_val));
  }
  return s;
}

TateMap random_map(std::mt19937_64& rng, int d, int min_val, bool constant_term, int n = 10, int deg = 6) {
  std::vector<TateSeries> c;
  for (int i = 0; i < d; ++i) c.push_back(random_series(rng, d, min_val, constant_term, n, deg));
  return TateMap(std::move(c));
}

TateMap random_level_map(std::mt19937_64& rng, int d, int level, int n = 10, int deg = 6) {
  return TateMap::identity(3, n, d, deg) + random_map(rng, d, level, false, n, deg);
}

UniTri random_unitri(std::mt19937_64& rng, int n) {
  std::vector<std::vector<mpz_class>> rows(static_cast<std::size_t>(n), std::vector<mpz_class>(static_cast<std::size_t>(n), 0));
  std::uniform_int_distribution<long> c(-5, 5);
  for (int i = 0; i < n; ++i) {
    rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    for (int j = i + 1; j < n; ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c(rng);
  }
  return UniTri::from_rows(rows);
}

std::vector<UniTri> elementary_gens(int n, std::optional<mpz_class> mod) {
  std::vector<UniTri> g;
  for (int i = 1; i < n; ++i) g.push_back(UniTri::elementary(n, i, i + 1, 1, mod));
  return g;
}

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

int g_failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s > 0 && secs >= limit_s) out.require(false, "time limit " + std::to_string(limit_s) + " s exceeded");
  if (!out.ok) ++g_failures;
  std::printf("%s %2d  %-44s %8.3f s%s%s\n", out.ok ? "PASS" : "FAIL", id, name.c_str(), secs, out.detail.empty() ? "" : "  ",
              out.detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  criterion(1, "minkowski identity p in {3,5,7}, d <= 6", 1.0, [](Outcome& o) {
    for (std::int64_t p : {3, 5, 7}) {
      const std::uint64_t ell = find_prime_generator(p, 1);
      o.require(static_cast<long>(ell) == oracle::smallest_generator_prime(p), "generator prime for p=" + std::to_string(p));
      for (int d = 1; d <= 6; ++d) {
        o.require(gl_order_valuation(d, mpz_class(static_cast<unsigned long>(ell)), p) == minkowski_bound(d, p),
                  "p=" + std::to_string(p) + " d=" + std::to_string(d));
      }
    }
    o.require(oracle::brute_gl_order(2, 2) == 6, "|GL2(F2)| != 6");
  });

  criterion(2, "p = 2 constants over Q", 1.0, [](Outcome& o) {
    const CyclotomicData q2 = cyclotomic_data(FieldSpec::rationals(), 2);
    const int v = oracle::val(mpz_class(static_cast<unsigned long>(oracle::brute_gl_order(2, 3))), 2);
    o.require(oracle::brute_gl_order(2, 3) == 48, "|GL2(F3)| != 48");
    o.require(v == 4, "v2|GL2(F3)| != 4");
    o.require(m_prime_bound(2, q2) == v, "m_prime_bound(2) != 4");
    o.require(schur_bound(2, q2) == 3 && schur_bound(2, q2) + 1 == v, "schur_bound(2) + 1 != 4");
    o.require(gl_order_valuation(4, mpz_class(3), 2) == 9, "v2|GL4(F3)| != 9");
    o.require(oracle::val(oracle::gl_order_product(4, 3), 2) == 9, "product formula v2|GL4(F3)| != 9");
    o.require(m_prime_bound(4, q2) == 9, "m_prime_bound(4) != 9");
  });

  criterion(3, "linearization certificates, order 3 and 9", 10.0, [](Outcome& o) {
    const auto c3 = linearize_group(group_closure(read_group("order3_plane.txt")), 3);
    o.require(c3.passed() && c3.injective && c3.homomorphism, "order 3 certificate");
    o.require(c3.group_order == 3 && c3.vp_order <= c3.minkowski_bound, "order 3 chain");
    const auto c9 = linearize_group(group_closure(read_group("order9_a4.txt")), 3);
    o.require(c9.passed() && c9.injective && c9.homomorphism, "order 9 certificate");
    o.require(c9.group_order == 9 && c9.vp_order == 2 && c9.minkowski_bound == 2 && c9.bound_saturated, "order 9 saturation");
    o.require(minkowski_bound(4, 3) == 2, "M(4,3) != 2");
  });

  criterion(4, "optimal group d = 4, p = 3", 1.0, [](Outcome& o) {
    const OptimalGroupReport r = optimal_group(4, 3, FieldSpec::rationals());
    o.require(r.group.has_value() && r.group->size() == 18, "closure order != 18");
    o.require(r.sylow_valuation == 2 && minkowski_bound(4, 3) == 2, "v3 != 2");
  });

  criterion(5, "bell-poonen consistency for 4x + 3x^2", 10.0, [](Outcome& o) {
    const PolyMap f = parse_polymap("d=1; ring=Q\nf1 = 4*x1 + 3*x1^2\n");
    const TateFlow phi = bell_poonen_flow(f, 3, flow_opts(12, 8, 10));
    const TateMap tf = TateMap::from_polymap(f, 3, 12, 8);
    TateMap it = TateMap::identity(3, 12, 1, 8);
    for (int n = 0; n <= 5; ++n) {
      o.require(!distance(flow_eval(phi, n), it).has_value(), "iterate n=" + std::to_string(n));
      it = compose(tf, it);
    }
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
      const std::int64_t s = static_cast<std::int64_t>(rng() % 200) - 100;
      const std::int64_t t = static_cast<std::int64_t>(rng() % 200) - 100;
      o.require(!distance(flow_eval(phi, s + t), compose(flow_eval(phi, s), flow_eval(phi, t))).has_value(),
                "group law s=" + std::to_string(s) + " t=" + std::to_string(t));
    }
  });

  criterion(6, "vector field flows and round trips", 5.0, [](Outcome& o) {
    const FlowOptions fo = flow_opts(12, 8, 10);
    const TateFlow g = integrate_vector_field(field("3*x1^2", 1), fo);
    for (int j = 0; j <= 7; ++j) {
      const mpz_class expect = prime_power(3, j) % prime_power(3, g.power_precision);
      o.require(g.power[static_cast<std::size_t>(j)][0].coefficient({j + 1}).residue() == expect, "geometric t^" + std::to_string(j));
      for (int e = 0; e <= 8; ++e) {
        if (e != j + 1) o.require(g.power[static_cast<std::size_t>(j)][0].coefficient({e}).is_zero(), "geometric support");
      }
    }
    const TateFlow e = integrate_vector_field(field("3*x1", 1), fo);
    for (int j = 0; j <= 10; ++j) {
      mpq_class q(prime_power(3, j), oracle::factorial(j));
      q.canonicalize();
      o.require(e.power[static_cast<std::size_t>(j)][0].coefficient({1}) == PadicInt::from_rational(q, 3, e.power_precision),
                "exponential t^" + std::to_string(j));
    }
    for (const char* u : {"3*x1^2", "3*x1", "3", "9*x1^3 + 3*x1"}) {
      o.require(flow_vector_field(integrate_vector_field(field(u, 1), fo)) == field(u, 1), std::string("round trip ") + u);
    }
    o.require(flow_vector_field(integrate_vector_field(field("3*x2;3*x1^2", 2), fo)) == field("3*x2;3*x1^2", 2), "round trip d=2");
  });

  criterion(7, "reversion of x + x^2 through degree 10", 1.0, [](Outcome& o) {
    const LocalInverse inv = invert_local(parse_polymap("d=1; ring=Q\nf1 = x1 + x1^2\n"), 3, 10);
    const auto expect = oracle::lagrange_reversion_x_plus_x2(10);
    const auto cat = oracle::catalan(10);
    for (int n = 1; n <= 10; ++n) {
      const mpq_class sign = (n % 2) ? mpq_class(1) : mpq_class(-1);
      o.require(inv.inverse[0].coefficient(Monomial{n}) == expect[static_cast<std::size_t>(n)], "Lagrange degree " + std::to_string(n));
      o.require(expect[static_cast<std::size_t>(n)] == sign * mpq_class(cat[static_cast<std::size_t>(n - 1)]), "Catalan degree " + std::to_string(n));
    }
    o.require(inv.norm_bound_holds, "norm bound");
    for (const auto& v : inv.homogeneous_norms) o.require(exp_ge(v, NormExp(0)), "homogeneous norm > 1");
  });

  criterion(8, "strassman bound on 100 random polynomials", 10.0, [](Outcome& o) {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<long> c(-30, 30);
    std::uniform_int_distribution<int> degree(1, 5);
    int equal = 0, strict = 0;
    for (int i = 0; i < 100; ++i) {
      std::vector<mpz_class> coeffs;
      const int dg = degree(rng);
      for (int k = 0; k <= dg; ++k) coeffs.emplace_back(c(rng));
      if (coeffs.back() == 0) coeffs.back() = 1;
      std::string text = "0";
      for (int k = 0; k <= dg; ++k) text += " + (" + coeffs[static_cast<std::size_t>(k)].get_str() + ")*x1^" + std::to_string(k);
      const int bound = strassman_bound(TateSeries::from_polynomial(parse_polynomial(text, 1), 3, 8, 5));
      const RootCount r = hensel_roots(coeffs, 3, 8);
      const int roots = r.simple_roots + r.unresolved_multiplicity;
      o.require(roots <= bound, "roots exceed bound for " + text);
      if (roots == bound) ++equal;
      if (roots < bound) ++strict;
    }
    o.require(equal > 0, "no equality instance");
    o.require(strict > 0, "no strict instance");
  });

  criterion(9, "norm properties and congruence powers", 5.0, [](Outcome& o) {
    std::mt19937_64 rng(9);
    int violations = 0;
    for (int i = 0; i < 50; ++i) {
      const TateMap g = random_map(rng, 2, static_cast<int>(rng() % 3), true);
      const TateMap f = random_map(rng, 2, 0, false);
      if (!exp_ge(compose(g, f).gauss_norm(), g.gauss_norm())) ++violations;
      const TateMap diffeo = random_level_map(rng, 2, 1);
      if (compose(g, diffeo).gauss_norm() != g.gauss_norm()) ++violations;
      const TateMap h = random_map(rng, 2, static_cast<int>(rng() % 4), false);
      const TateMap shifted = compose(g, TateMap::identity(3, 10, 2, 6) + h) - g;
      if (!exp_ge(shifted.gauss_norm(), h.gauss_norm())) ++violations;
      const TateMap fi = random_level_map(rng, 2, 1 + static_cast<int>(rng() % 3));
      if (invert_diffeo(fi).congruence_level() != fi.congruence_level()) ++violations;
    }
    o.require(violations == 0, std::to_string(violations) + " norm violations");
    int cong = 0;
    for (int i = 0; i < 50; ++i) {
      if (!congruence_power(random_level_map(rng, 2, 1 + static_cast<int>(rng() % 2)), 2).all_hold) ++cong;
    }
    o.require(cong == 0, std::to_string(cong) + " congruence power violations");
  });

  criterion(10, "nilpotent calculus", 5.0, [](Outcome& o) {
    const std::function<std::string(const UniTri&)> key = [](const UniTri& g) { return key_of(g); };
    const auto heis = elementary_gens(3, std::nullopt);
    o.require(nilpotency_class(heis, 6) == 2, "Heisenberg class");
    o.require(derived_length(heis, 2, key) == 2, "Heisenberg dl");
    const SeriesReport t4 = derived_series_quotient(elementary_gens(4, mpz_class(3)), 3);
    o.require(t4.nilpotency_class == 3 && t4.derived_length == 2, "Tri1(4, Z/3) class/dl");
    std::vector<oracle::IntMat> im;
    for (const auto& g : elementary_gens(4, mpz_class(3))) {
      oracle::IntMat m(4, std::vector<long>(4));
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g.at(i, j).get_si();
      im.push_back(m);
    }
    o.require(t4.derived_orders.front() == static_cast<std::size_t>(oracle::closure_order(im, 3)), "Tri1(4, Z/3) order");
    o.require(power_subgroup_index({UniTri::parse(2, "E12", mpz_class(9))}, 3, 9).index == 3, "power index");
    std::mt19937_64 rng(10);
    int violations = 0;
    for (int i = 0; i < 100; ++i) {
      const UniTri x = random_unitri(rng, 4), y = random_unitri(rng, 4), z = random_unitri(rng, 4);
      if (commutator(x, y).inverse() != commutator(y, x)) ++violations;
      if (commutator(x, y * z) != commutator(x, y) * commutator(y, commutator(x, z)) * commutator(x, z)) ++violations;
      if (commutator(x * y, z) != commutator(x, commutator(y, z)) * commutator(y, z) * commutator(x, z)) ++violations;
    }
    o.require(violations == 0, std::to_string(violations) + " identity violations");
  });

  criterion(11, "theorem B optimality instance n = 3, p = 3", 30.0, [](Outcome& o) {
    const TheoremBReport r = theorem_b(exp_family_maps(3), 3);
    record("exp family n=3", r.algebra);
    o.require(r.d == 2, "d != 2");
    o.require(r.algebra.derived_length == 2, "dl != 2");
    o.require(r.equality && r.bound_holds, "dl != d");
    o.require(r.generator_class == 3, "group class != 3");
    for (bool v : r.flows_verified) o.require(v, "flow iterates");
    const VdlWitness w = faithfulness_and_vdl_witness(3);
    o.require(w.faithful, "action not faithful");
    o.require(w.powers_noncommuting && w.generic_commutator_nontrivial, "finite-index powers commute");
    o.require(w.derived_length == 2 && w.nilpotency_class == 3, "symbolic dl/class");
  });

  criterion(12, "every lie closure has dl <= ambient dimension", 30.0, [](Outcome& o) {
    const PrecisionPolicy pol(12, 2);
    record("heisenberg fields", lie_closure({field("3;0", 2), field("0;3*x1", 2)}, pol));
    record("abelian fields", lie_closure({field("3;0", 2), field("0;3", 2)}, pol));
    record("filiform fields", lie_closure({field("3;0;0", 3), field("0;3*x1;0", 3), field("0;0;3*x2", 3)}, pol));
    record("heisenberg group A3", theorem_b(read_group("heisenberg_a3.txt"), 3).algebra);
    record("translation A1", theorem_b(read_group("translation_a1.txt"), 3).algebra);
    o.require(g_closures.size() >= 6, "too few closures recorded");
    for (const auto& c : g_closures) {
      o.require(c.nilpotent, c.name + " is not nilpotent");
      o.require(c.dl.has_value() && *c.dl <= c.ambient, c.name + " has dl > d");
    }
  });

  return g_failures == 0 ? 0 : 1;
}
