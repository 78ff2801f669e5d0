#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "padicaut/autgroup.hpp"
#include "padicaut/flows.hpp"
#include "padicaut/nilpotent.hpp"
#include "padicaut/polynomial.hpp"

namespace padicaut {

struct TheoremBOptions {
  int precision = 12;
  int degree = 8;
  int t_degree = 10;
  int guard = 2;
  std::uint64_t budget = 10000000;
  int max_class = 6;  // commutator-length budget for the nilpotency assertion
};

struct TheoremBReport {
  int d = 0;
  std::int64_t p = 0;
  int generator_class = 0;                      // nilpotency_class of the input generators
  bool had_fixed_point = false;
  std::uint64_t orbit_exponent = 1;             // lcm of permutation orders on F_p^d when no fixed point exists
  std::vector<std::int64_t> fixed_point;
  std::vector<std::uint64_t> affine_orders;     // order of each conjugated map modulo p
  std::vector<std::uint64_t> extra_p_powers;
  std::vector<PolyMap> analytic_generators;     // conjugated, powered maps in Diff^an
  std::vector<int> congruence_levels;
  std::vector<bool> flows_verified;
  std::vector<VectorField> fields;
  LieAlgebraBasis algebra;
  bool bound_holds = false;                     // dl(h) <= d
  bool equality = false;
};

/// Affine-space case: reduction mod p, fixed point, conjugation x -> z + p x,
/// powers to reach the flow threshold, flows, Lie closure and dl(h) <= d.
TheoremBReport theorem_b(const std::vector<PolyMap>& gens, std::int64_t p, const TheoremBOptions& opts = {});

/// Permutation of F_p^d induced by a map with p-integral coefficients.
std::vector<std::uint32_t> permutation_mod(const PolyMap& g, std::int64_t p, std::uint64_t budget);
std::uint64_t permutation_order(const std::vector<std::uint32_t>& perm);

/// (g(z + p x) - z) / p.
PolyMap conjugate_to_analytic(const PolyMap& g, const std::vector<std::int64_t>& z, std::int64_t p);

/// The exp-family generators acting on the affine plane.
std::vector<PolyMap> exp_family_maps(int n);

}  // namespace padicaut
