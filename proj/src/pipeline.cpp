#include "padicaut/pipeline.hpp"

#include <limits>
#include <numeric>
#include <set>

#include "padicaut/arith.hpp"
#include "padicaut/error.hpp"

namespace padicaut {

namespace {

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InputError& e) {
    throw InputError("stage " + name + ": " + e.what());
  } catch (const PrecisionError& e) {
    throw PrecisionError("stage " + name + ": " + e.what());
  } catch (const BudgetError& e) {
    throw BudgetError("stage " + name + ": " + e.what());
  } catch (const CertificateError& e) {
    throw CertificateError("stage " + name + ": " + e.what());
  }
}

PolyMap capped_compose(const PolyMap& a, const PolyMap& b, int cap) {
  if (a.degree() * b.degree() > cap) throw BudgetError("commutator degree exceeds " + std::to_string(cap));
  return a.compose(b);
}

// Nilpotency class of polynomial maps with every intermediate degree kept under cap.
std::optional<int> map_nilpotency_class(const std::vector<PolyMap>& gens, int max_class, int cap) {
  std::vector<PolyMap> inv;
  for (const auto& g : gens) inv.push_back(g.inverse());
  std::vector<PolyMap> level;
  for (const auto& g : gens) {
    if (!g.is_identity()) level.push_back(g);
  }
  for (int k = 0; k <= max_class; ++k) {
    if (level.empty()) return k;
    std::vector<PolyMap> next;
    std::set<std::string> seen;
    for (const auto& c : level) {
      const PolyMap ci = c.inverse();
      for (std::size_t i = 0; i < gens.size(); ++i) {
        PolyMap b = capped_compose(capped_compose(capped_compose(gens[i], c, cap), inv[i], cap), ci, cap);
        if (b.is_identity()) continue;
        if (seen.insert(b.to_text()).second) next.push_back(std::move(b));
      }
    }
    level = std::move(next);
  }
  return std::nullopt;
}

std::uint64_t affine_order_mod(const PolyMap& h, std::int64_t p, std::uint64_t budget) {
  const PolyMap r = PolyMap::affine([&] {
    std::vector<std::vector<mpq_class>> a;
    for (const auto& row : h.linear_part()) a.push_back(row);
    return a;
  }(), h.constant_part()).reduce_mod(p);
  PolyMap acc = r;
  for (std::uint64_t k = 1; k <= budget; ++k) {
    if (acc.is_identity()) return k;
    acc = r.compose(acc);
  }
  throw BudgetError("affine order search exceeded the budget");
}

int level_of(const PolyMap& h, std::int64_t p) {
  NormExp e;
  const PolyMap id = PolyMap::identity(h.dim());
  for (int i = 0; i < h.dim(); ++i) e = min_exp(e, gauss_norm(h[i] - id[i], p));
  if (!e) return std::numeric_limits<int>::max();
  return *e;
}

}  // namespace

std::vector<std::uint32_t> permutation_mod(const PolyMap& g, std::int64_t p, std::uint64_t budget) {
  const int d = g.dim();
  std::uint64_t size = 1;
  for (int i = 0; i < d; ++i) {
    size *= static_cast<std::uint64_t>(p);
    if (size > budget) throw BudgetError("F_p^d is larger than the scan budget");
  }
  const PolyMap r = g.reduce_mod(p);
  std::vector<std::uint32_t> perm(size);
  std::vector<mpq_class> x(static_cast<std::size_t>(d));
  for (std::uint64_t idx = 0; idx < size; ++idx) {
    std::uint64_t rest = idx;
    for (int i = d - 1; i >= 0; --i) {
      x[static_cast<std::size_t>(i)] = static_cast<long>(rest % static_cast<std::uint64_t>(p));
      rest /= static_cast<std::uint64_t>(p);
    }
    const auto y = r.evaluate(x);
    std::uint64_t out = 0;
    for (int i = 0; i < d; ++i) out = out * static_cast<std::uint64_t>(p) + mpz_class(y[static_cast<std::size_t>(i)].get_num()).get_ui();
    perm[idx] = static_cast<std::uint32_t>(out);
  }
  return perm;
}

std::uint64_t permutation_order(const std::vector<std::uint32_t>& perm) {
  std::vector<bool> seen(perm.size(), false);
  std::uint64_t order = 1;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    std::uint64_t len = 0;
    for (std::size_t j = i; !seen[j]; j = perm[j]) {
      seen[j] = true;
      ++len;
    }
    order = lcm_u64(order, len);
  }
  return order;
}

PolyMap conjugate_to_analytic(const PolyMap& g, const std::vector<std::int64_t>& z, std::int64_t p) {
  const int d = g.dim();
  std::vector<Polynomial> inner;
  for (int i = 0; i < d; ++i) {
    inner.push_back(Polynomial::constant(d, static_cast<long>(z[static_cast<std::size_t>(i)])) +
                    Polynomial::variable(d, i) * mpq_class(static_cast<long>(p)));
  }
  std::vector<Polynomial> out;
  for (int i = 0; i < d; ++i) {
    Polynomial c = g[i].substitute(inner) - Polynomial::constant(d, static_cast<long>(z[static_cast<std::size_t>(i)]));
    out.push_back(c * mpq_class(1, static_cast<long>(p)));
  }
  PolyMap h(Ring::rationals(), std::move(out));
  for (int i = 0; i < d; ++i) {
    const NormExp e = gauss_norm(h[i], p);
    if (e && *e < 0) throw CertificateError("conjugated map is not p-integral; z is not a fixed point mod p");
  }
  return h;
}

std::vector<PolyMap> exp_family_maps(int n) {
  std::vector<PolyMap> out;
  for (const auto& g : exp_family_generators(n)) out.push_back(exp_action(g));
  return out;
}

TheoremBReport theorem_b(const std::vector<PolyMap>& gens, std::int64_t p, const TheoremBOptions& opts) {
  if (gens.empty()) throw InputError("theoremB needs at least one generator");
  if (p < 3 || !is_prime(static_cast<std::uint64_t>(p))) throw InputError("theoremB needs a prime p >= 3");
  TheoremBReport rep;
  rep.d = gens.front().dim();
  rep.p = p;
  for (const auto& g : gens) {
    if (g.dim() != rep.d) throw InputError("generators of different dimension");
    if (g.ring().kind == Ring::Kind::IntegersMod) throw InputError("theoremB needs maps over Q");
  }

  rep.generator_class = stage("nilpotency", [&] {
    const auto c = map_nilpotency_class(gens, opts.max_class, 4 * opts.degree);
    if (!c) throw InputError("generators are not nilpotent within commutator length " + std::to_string(opts.max_class + 1));
    return *c;
  });

  std::vector<PolyMap> current = gens;
  stage("fixed point", [&] {
    std::vector<std::vector<std::uint32_t>> perms;
    for (const auto& g : current) perms.push_back(permutation_mod(g, p, opts.budget));
    const std::size_t size = perms.front().size();
    std::optional<std::size_t> fixed;
    for (std::size_t x = 0; x < size && !fixed; ++x) {
      bool all = true;
      for (const auto& perm : perms) all = all && perm[x] == x;
      if (all) fixed = x;
    }
    rep.had_fixed_point = fixed.has_value();
    if (!fixed) {
      std::uint64_t e = 1;
      for (const auto& perm : perms) e = lcm_u64(e, permutation_order(perm));
      rep.orbit_exponent = e;
      for (auto& g : current) g = g.power(e);
      fixed = 0;
    }
    rep.fixed_point.assign(static_cast<std::size_t>(rep.d), 0);
    std::size_t rest = *fixed;
    for (int i = rep.d - 1; i >= 0; --i) {
      rep.fixed_point[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(p));
      rest /= static_cast<std::size_t>(p);
    }
    return 0;
  });

  stage("conjugation", [&] {
    for (auto& g : current) {
      PolyMap h = conjugate_to_analytic(g, rep.fixed_point, p);
      const std::uint64_t ord = affine_order_mod(h, p, opts.budget);
      rep.affine_orders.push_back(ord);
      if (ord > 1) h = h.power(ord);
      std::uint64_t extra = 0;
      while (level_of(h, p) < flow_threshold(p)) {
        h = h.power(static_cast<std::uint64_t>(p));
        if (++extra > 8) throw PrecisionError("congruence level does not reach the flow threshold");
      }
      rep.extra_p_powers.push_back(extra);
      rep.congruence_levels.push_back(level_of(h, p));
      rep.analytic_generators.push_back(std::move(h));
    }
    return 0;
  });

  FlowOptions fo;
  fo.precision = opts.precision;
  fo.degree = opts.degree;
  fo.t_degree = opts.t_degree;
  fo.guard = opts.guard;
  stage("flows", [&] {
    for (const auto& h : rep.analytic_generators) {
      if (h.degree() > opts.degree) throw InputError("map degree exceeds the degree cap");
      const TateFlow flow = bell_poonen_flow(h, p, fo);
      rep.flows_verified.push_back(flow.iterates_verified);
      rep.fields.push_back(flow_vector_field(flow));
    }
    return 0;
  });

  rep.algebra = stage("lie closure", [&] { return lie_closure(rep.fields, PrecisionPolicy(opts.precision, opts.guard)); });
  if (!rep.algebra.derived_length) throw CertificateError("stage lie closure: algebra is not solvable at this precision");
  rep.bound_holds = *rep.algebra.derived_length <= rep.d;
  rep.equality = *rep.algebra.derived_length == rep.d;
  if (!rep.bound_holds) throw CertificateError("dl(h) exceeds the dimension");
  return rep;
}

}  // namespace padicaut
