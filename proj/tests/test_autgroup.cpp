#include "doctest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "padicaut/autgroup.hpp"
#include "padicaut/error.hpp"

using namespace padicaut;

namespace {

PolyMap map(const std::string& text) { return parse_polymap(text); }

const char* kRotation = "d=2; ring=Q\nf1 = -x2\nf2 = x1 - x2\n";
const char* kTau = "d=2; ring=Q\nf1 = x1\nf2 = x2 + x1^2\n";

std::vector<PolyMap> read_group(const std::string& name) {
  std::ifstream in(std::string(PADICAUT_TEST_DATA) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_polymap_list(ss.str());
}

}  // namespace

TEST_CASE("closure sizes") {
  const FiniteAutGroup rot = group_closure({map(kRotation)});
  CHECK(rot.size() == 3);
  CHECK(rot.element(0).is_identity());
  CHECK(group_closure({}, {}, 2).size() == 1);
  const PolyMap tau = map(kTau);
  const FiniteAutGroup conj = group_closure({tau.compose(map(kRotation)).compose(tau.inverse())});
  CHECK(conj.size() == 3);
  int max_deg = 0;
  for (const auto& g : conj.elements()) max_deg = std::max(max_deg, g.degree());
  CHECK(max_deg == 4);
  CHECK_THROWS_WITH_AS(group_closure({map("d=1; ring=Q\nf1 = x1 + 1\n")}), doctest::Contains("not finite within caps"), BudgetError);
}

TEST_CASE("closure tables are consistent with composition") {
  const FiniteAutGroup g = group_closure(read_group("order9_a4.txt"));
  REQUIRE(g.size() == 9);
  REQUIRE(g.has_table());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.element(g.inverse(i)).compose(g.element(i)).is_identity());
    for (std::size_t j = 0; j < g.size(); ++j) {
      CHECK(g.element(g.product(i, j)) == g.element(i).compose(g.element(j)));
    }
  }
}

TEST_CASE("reduction modulo primes") {
  const PolyMap g = map("d=2; ring=Q\nf1 = x1 + 1/2*x2\nf2 = x2\n");
  CHECK(g.reduce_mod(3) == map("d=2; ring=Z/3\nf1 = x1 + 2*x2\nf2 = x2\n"));
  CHECK(map("d=2; ring=Q\nf1 = x1\nf2 = x2\n").reduce_mod(3).is_identity());
  CHECK_THROWS_WITH(map("d=2; ring=Q\nf1 = x1 + 1/3*x2\nf2 = x2\n").reduce_mod(3), doctest::Contains("bad prime"));
  const FiniteAutGroup grp = group_closure(read_group("order3_plane.txt"));
  for (const auto& a : grp.elements()) {
    for (const auto& b : grp.elements()) CHECK(a.compose(b).reduce_mod(5) == a.reduce_mod(5).compose(b.reduce_mod(5)));
  }
}

TEST_CASE("good prime choice") {
  // L - id = (-x1 - x2, x1 - 2*x2) rules out 2.
  CHECK(choose_good_prime(group_closure({map(kRotation)}), 3) == 5);
  CHECK(choose_good_prime(group_closure({}, {}, 2), 3) == 2);
  CHECK(choose_good_prime(group_closure(read_group("order3_plane.txt")), 3) == 5);
}

TEST_CASE("fixed points by scan") {
  CHECK(fixed_point(reduce_group(group_closure({}, {}, 2), 2)) == std::vector<std::int64_t>{0, 0});
  CHECK(fixed_point(reduce_group(group_closure({map(kRotation)}), 2)) == std::vector<std::int64_t>{0, 0});
  const FiniteAutGroup red = reduce_group(group_closure(read_group("order3_plane.txt")), 5);
  const auto x0 = fixed_point(red);
  std::vector<mpq_class> pt(x0.begin(), x0.end());
  for (const auto& g : red.elements()) {
    const auto y = g.evaluate(pt);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const mpq_class diff = y[i] - pt[i];
      CHECK(diff.get_den() == 1);
      CHECK(diff.get_num() % 5 == 0);
    }
  }
}

TEST_CASE("unipotent power formula over Z/l") {
  const Ring r = Ring::integers_mod(5);
  const PolyMap g = parse_polymap("d=2; ring=Z/5\nf1 = x1 + x2^2\nf2 = x2 + x1^3\n");
  const Polynomial a0 = parse_polynomial("x2^2", 2);
  for (unsigned k = 1; k <= 5; ++k) {
    const PolyMap gk = g.power(k);
    CHECK(gk[0].homogeneous_part(1) == Polynomial::variable(2, 0));
    CHECK(gk[0].homogeneous_part(2) == (a0 * mpq_class(k)).normalized(r));
    CHECK(gk[1].homogeneous_part(2).is_zero());
  }
}

TEST_CASE("linearization certificates") {
  const auto c3 = linearize_group(group_closure(read_group("order3_plane.txt")), 3);
  CHECK(c3.passed());
  CHECK(c3.group_order == 3);
  CHECK(c3.vp_order == 1);
  CHECK(c3.minkowski_bound == 1);
  std::set<std::vector<std::vector<std::int64_t>>> distinct(c3.jacobians.begin(), c3.jacobians.end());
  CHECK(distinct.size() == 3);

  const auto c9 = linearize_group(group_closure(read_group("order9_a4.txt")), 3);
  CHECK(c9.passed());
  CHECK(c9.vp_order == 2);
  CHECK(c9.gl_order_valuation == 2);
  CHECK(c9.bound_saturated);

  const auto c1 = linearize_group(group_closure(read_group("identity.txt")), 3);
  CHECK(c1.passed());
  CHECK(c1.group_order == 1);
  CHECK(c1.vp_order == 0);

  CHECK_THROWS_AS(linearize_group(group_closure({map(kRotation)}), 2), InputError);
  CHECK_THROWS_AS(linearize_group(group_closure({map("d=1; ring=Q\nf1 = -x1\n")}), 3), InputError);
}

TEST_CASE("jacobians are a homomorphism modulo l") {
  const auto cert = linearize_group(group_closure(read_group("order9_a4.txt")), 3);
  const FiniteAutGroup g = group_closure(read_group("order9_a4.txt"));
  const long ell = static_cast<long>(cert.ell);
  auto to_mat = [](const std::vector<std::vector<std::int64_t>>& j) {
    oracle::IntMat m;
    for (const auto& r : j) m.emplace_back(r.begin(), r.end());
    return m;
  };
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      CHECK(to_mat(cert.jacobians[g.product(i, j)]) == oracle::mat_mul(to_mat(cert.jacobians[i]), to_mat(cert.jacobians[j]), ell));
    }
  }
}

TEST_CASE("optimal groups") {
  const OptimalGroupReport r4 = optimal_group(4, 3, FieldSpec::rationals());
  REQUIRE(r4.group.has_value());
  CHECK(r4.group->size() == 18);
  CHECK(r4.sylow_valuation == 2);
  CHECK(r4.schur_bound == 2);
  const OptimalGroupReport r2 = optimal_group(2, 3, FieldSpec::rationals());
  CHECK(r2.group->size() == 3);
  const OptimalGroupReport r1 = optimal_group(1, 3, FieldSpec::rationals());
  CHECK(r1.sylow_valuation == 0);
  const OptimalGroupReport r6 = optimal_group(6, 3, FieldSpec::rationals());
  CHECK(r6.sylow_valuation == minkowski_bound(6, 3));
  CHECK(*r6.full_order == 6 * 27);
}
