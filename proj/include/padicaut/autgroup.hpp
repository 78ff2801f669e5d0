#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "padicaut/bounds.hpp"
#include "padicaut/polynomial.hpp"

namespace padicaut {

struct GroupCaps {
  std::size_t max_elements = 10000;
  int max_degree = 16;
  std::size_t table_limit = 2000;  // composition table is built up to this size
};

/// A finite group of polynomial automorphisms, frozen after construction.
/// Element 0 is the identity.
class FiniteAutGroup {
 public:
  FiniteAutGroup(int d, Ring ring, std::vector<PolyMap> elements, std::vector<std::size_t> generators, bool build_table,
                 std::size_t table_limit);

  int dim() const { return d_; }
  const Ring& ring() const { return ring_; }
  std::size_t size() const { return elements_.size(); }
  const PolyMap& element(std::size_t i) const { return elements_.at(i); }
  const std::vector<PolyMap>& elements() const { return elements_; }
  const std::vector<std::size_t>& generators() const { return gens_; }
  std::optional<std::size_t> index_of(const PolyMap& g) const;
  bool has_table() const { return !table_.empty(); }
  /// Index of element(i) o element(j).
  std::size_t product(std::size_t i, std::size_t j) const;
  std::size_t inverse(std::size_t i) const;

 private:
  int d_;
  Ring ring_;
  std::vector<PolyMap> elements_;
  std::vector<std::size_t> gens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::uint32_t>> table_;
  std::vector<std::size_t> inverse_;
};

/// Breadth-first closure of the generators under composition. Every generator
/// is checked to have a polynomial inverse. d is required when gens is empty.
FiniteAutGroup group_closure(const std::vector<PolyMap>& gens, const GroupCaps& caps = {}, int d = -1);

/// Reduction of every element modulo l; element order and table are kept.
FiniteAutGroup reduce_group(const FiniteAutGroup& g, std::int64_t ell);

std::uint64_t choose_good_prime(const FiniteAutGroup& g, std::int64_t p, std::uint64_t cap = 1000000);

/// First common fixed point of a group over Z/l in lexicographic scan order.
std::vector<std::int64_t> fixed_point(const FiniteAutGroup& g, std::uint64_t budget = 10000000);

/// Jacobian matrix of a map over Z/l at a point, entries in [0, l).
std::vector<std::vector<std::int64_t>> jacobian_mod(const PolyMap& g, const std::vector<std::int64_t>& x);

struct LinearizationCertificate {
  std::int64_t p = 0;
  std::uint64_t ell = 0;
  std::uint64_t q = 0;
  int d = 0;
  std::size_t group_order = 0;
  std::vector<std::int64_t> fixed_point;
  std::vector<std::vector<std::vector<std::int64_t>>> jacobians;  // one per group element
  bool reduction_injective = false;
  bool reduction_homomorphism = false;
  bool support_condition = false;  // l divides no numerator or denominator of any g - id
  bool homomorphism = false;
  bool injective = false;
  int vp_order = 0;
  int gl_order_valuation = 0;
  int m_prime_bound = 0;
  int minkowski_bound = 0;
  bool chain_holds = false;
  bool bound_saturated = false;
  bool passed() const;
};

/// Reduction, fixed point and Jacobians at it. Throws CertificateError when a
/// clause fails.
LinearizationCertificate linearize_group(const FiniteAutGroup& g, std::int64_t p, std::uint64_t budget = 10000000);

struct OptimalGroupReport {
  int d = 0;
  std::int64_t p = 0;
  CyclotomicData cyc;
  int r = 0;                           // number of blocks
  int schur_bound = 0;
  bool explicit_matrices = false;
  std::optional<mpz_class> full_order;  // r! * p^r for Q, odd p
  std::optional<FiniteAutGroup> group;  // explicit closure of the full group when small enough
  std::optional<FiniteAutGroup> sylow;  // explicit closure of the p-Sylow generators
  int sylow_valuation = 0;
};

/// Companion blocks of the p-th cyclotomic polynomial permuted by S_r.
OptimalGroupReport optimal_group(int d, std::int64_t p, const FieldSpec& field, std::size_t closure_limit = 20000);

/// Companion matrix of 1 + x + ... + x^{p-1}.
std::vector<std::vector<mpq_class>> cyclotomic_companion(std::int64_t p);

}  // namespace padicaut
