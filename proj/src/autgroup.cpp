#include "padicaut/autgroup.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "padicaut/arith.hpp"
#include "padicaut/error.hpp"
#include "padicaut/padic.hpp"

namespace padicaut {

FiniteAutGroup::FiniteAutGroup(int d, Ring ring, std::vector<PolyMap> elements, std::vector<std::size_t> generators,
                               bool build_table, std::size_t table_limit)
    : d_(d), ring_(std::move(ring)), elements_(std::move(elements)), gens_(std::move(generators)) {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (!index_.emplace(elements_[i].to_text(), i).second) throw InputError("duplicate group element");
  }
  if (!build_table || elements_.size() > table_limit) return;
  const std::size_t n = elements_.size();
  table_.assign(n, std::vector<std::uint32_t>(n));
  inverse_.assign(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      auto k = index_of(elements_[i].compose(elements_[j]));
      if (!k) throw CertificateError("element set is not closed under composition");
      table_[i][j] = static_cast<std::uint32_t>(*k);
      if (*k == 0) inverse_[i] = j;
    }
    if (inverse_[i] == n) throw CertificateError("element without inverse in the group");
  }
}

std::optional<std::size_t> FiniteAutGroup::index_of(const PolyMap& g) const {
  auto it = index_.find(g.to_text());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FiniteAutGroup::product(std::size_t i, std::size_t j) const {
  if (has_table()) return table_.at(i).at(j);
  auto k = index_of(elements_.at(i).compose(elements_.at(j)));
  if (!k) throw CertificateError("element set is not closed under composition");
  return *k;
}

std::size_t FiniteAutGroup::inverse(std::size_t i) const {
  if (has_table()) return inverse_.at(i);
  auto k = index_of(elements_.at(i).inverse());
  if (!k) throw CertificateError("element without inverse in the group");
  return *k;
}

FiniteAutGroup group_closure(const std::vector<PolyMap>& gens, const GroupCaps& caps, int d) {
  if (gens.empty() && d < 1) throw InputError("an empty generator list needs an explicit dimension");
  const int dim = gens.empty() ? d : gens.front().dim();
  const Ring ring = gens.empty() ? Ring::rationals() : gens.front().ring();
  for (const auto& g : gens) {
    if (g.dim() != dim || g.ring() != ring) throw InputError("generators of different dimension or ring");
    g.inverse();  // throws "non-invertible generator"
  }
  std::vector<PolyMap> elements{PolyMap::identity(dim, ring)};
  std::unordered_map<std::string, std::size_t> seen{{elements.front().to_text(), 0}};
  std::vector<std::size_t> gen_index;
  for (const auto& g : gens) {
    auto [it, inserted] = seen.emplace(g.to_text(), elements.size());
    if (inserted) elements.push_back(g);
    gen_index.push_back(it->second);
  }
  for (std::size_t head = 0; head < elements.size(); ++head) {
    for (const auto& g : gens) {
      PolyMap h = g.compose(elements[head]);
      if (h.degree() > caps.max_degree) {
        throw BudgetError("group not finite within caps (degree " + std::to_string(h.degree()) + " > " +
                          std::to_string(caps.max_degree) + ")");
      }
      auto [it, inserted] = seen.emplace(h.to_text(), elements.size());
      if (inserted) {
        if (elements.size() >= caps.max_elements) {
          throw BudgetError("group not finite within caps (more than " + std::to_string(caps.max_elements) + " elements)");
        }
        elements.push_back(std::move(h));
      }
    }
  }
  return FiniteAutGroup(dim, ring, std::move(elements), std::move(gen_index), true, caps.table_limit);
}

FiniteAutGroup reduce_group(const FiniteAutGroup& g, std::int64_t ell) {
  std::vector<PolyMap> reduced;
  for (const auto& e : g.elements()) reduced.push_back(e.reduce_mod(ell));
  std::set<std::string> distinct;
  for (const auto& e : reduced) distinct.insert(e.to_text());
  if (distinct.size() != reduced.size()) throw CertificateError("reduction modulo " + std::to_string(ell) + " is not injective");
  return FiniteAutGroup(g.dim(), Ring::integers_mod(mpz_class(static_cast<long>(ell))), std::move(reduced), g.generators(),
                        g.has_table(), g.size());
}

namespace {

bool prime_divides(const mpz_class& n, std::uint64_t ell) {
  return n != 0 && mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(ell)) != 0;
}

bool support_avoids(const FiniteAutGroup& g, std::uint64_t ell) {
  const PolyMap id = PolyMap::identity(g.dim(), g.ring());
  for (std::size_t i = 1; i < g.size(); ++i) {
    for (int c = 0; c < g.dim(); ++c) {
      Polynomial diff = g.element(i)[c] - id[c];
      for (const auto& [m, v] : diff.terms()) {
        if (prime_divides(v.get_num(), ell) || prime_divides(v.get_den(), ell)) return false;
      }
    }
  }
  return true;
}

bool is_power_of(std::size_t n, std::int64_t p) {
  while (n > 1 && n % static_cast<std::size_t>(p) == 0) n /= static_cast<std::size_t>(p);
  return n == 1;
}

// Coordinates compiled for evaluation modulo l.
struct CompiledMap {
  struct Term {
    std::vector<int> exps;
    std::int64_t coeff;
  };
  std::vector<std::vector<Term>> coords;
  std::int64_t mod;

  CompiledMap(const PolyMap& g, std::int64_t ell) : mod(ell) {
    for (const auto& c : g.coords()) {
      std::vector<Term> terms;
      for (const auto& [m, v] : c.terms()) {
        mpz_class r = v.get_num();
        mpz_fdiv_r_ui(r.get_mpz_t(), r.get_mpz_t(), static_cast<unsigned long>(ell));
        terms.push_back({m, r.get_si()});
      }
      coords.push_back(std::move(terms));
    }
  }

  bool fixes(const std::vector<std::int64_t>& x) const {
    for (std::size_t i = 0; i < coords.size(); ++i) {
      std::uint64_t acc = 0;
      for (const auto& t : coords[i]) {
        std::uint64_t term = static_cast<std::uint64_t>(t.coeff);
        for (std::size_t v = 0; v < t.exps.size(); ++v) {
          for (int e = 0; e < t.exps[v]; ++e) term = mulmod(term, static_cast<std::uint64_t>(x[v]), static_cast<std::uint64_t>(mod));
        }
        acc = (acc + term) % static_cast<std::uint64_t>(mod);
      }
      if (acc != static_cast<std::uint64_t>(x[i])) return false;
    }
    return true;
  }
};

}  // namespace

std::uint64_t choose_good_prime(const FiniteAutGroup& g, std::int64_t p, std::uint64_t cap) {
  if (g.ring().kind == Ring::Kind::IntegersMod) throw InputError("choose_good_prime needs a group over Q or Z");
  std::uint64_t lower = 1;
  for (std::uint64_t tries = 0; tries < cap; ++tries) {
    const std::uint64_t ell = find_prime_generator(p, lower, {}, cap);
    if (support_avoids(g, ell)) return ell;
    lower = ell;
  }
  throw BudgetError("prime search cap " + std::to_string(cap) + " exceeded");
}

std::vector<std::int64_t> fixed_point(const FiniteAutGroup& g, std::uint64_t budget) {
  if (g.ring().kind != Ring::Kind::IntegersMod || !g.ring().modulus.fits_slong_p()) {
    throw InputError("fixed point search needs a group over Z/l");
  }
  const std::int64_t ell = g.ring().modulus.get_si();
  if (!is_prime(static_cast<std::uint64_t>(ell))) throw InputError("fixed point search needs a prime modulus");
  std::vector<CompiledMap> maps;
  if (!g.generators().empty()) {
    for (std::size_t i : g.generators()) maps.emplace_back(g.element(i), ell);
  } else {
    for (const auto& e : g.elements()) maps.emplace_back(e, ell);
  }
  const int d = g.dim();
  std::vector<std::int64_t> x(static_cast<std::size_t>(d), 0);
  std::uint64_t used = 0;
  for (;;) {
    bool fixed = true;
    for (const auto& m : maps) {
      if (++used > budget) throw BudgetError("fixed point scan budget of " + std::to_string(budget) + " evaluations exceeded");
      if (!m.fixes(x)) {
        fixed = false;
        break;
      }
    }
    if (fixed) return x;
    int pos = d - 1;
    while (pos >= 0 && ++x[static_cast<std::size_t>(pos)] == ell) {
      x[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  throw CertificateError("no common fixed point over F_" + std::to_string(ell));
}

std::vector<std::vector<std::int64_t>> jacobian_mod(const PolyMap& g, const std::vector<std::int64_t>& x) {
  if (g.ring().kind != Ring::Kind::IntegersMod) throw InputError("jacobian_mod needs a map over Z/l");
  std::vector<mpq_class> point;
  for (auto v : x) point.emplace_back(static_cast<long>(v));
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& row : g.jacobian()) {
    std::vector<std::int64_t> r;
    for (const auto& entry : row) r.push_back(mpz_class(g.ring().normalize(entry.evaluate(point)).get_num()).get_si());
    out.push_back(std::move(r));
  }
  return out;
}

bool LinearizationCertificate::passed() const {
  return reduction_injective && reduction_homomorphism && homomorphism && injective && chain_holds;
}

namespace {

using Matrix = std::vector<std::vector<std::int64_t>>;

Matrix multiply_mod(const Matrix& a, const Matrix& b, std::int64_t ell) {
  const std::size_t n = a.size();
  Matrix c(n, std::vector<std::int64_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) c[i][j] = (c[i][j] + a[i][k] * b[k][j]) % ell;
    }
  }
  return c;
}

}  // namespace

LinearizationCertificate linearize_group(const FiniteAutGroup& g, std::int64_t p, std::uint64_t budget) {
  if (p == 2) throw InputError("the linearization pipeline covers odd p only");
  if (!is_prime(static_cast<std::uint64_t>(p))) throw InputError("p must be prime");
  if (!is_power_of(g.size(), p)) throw InputError("group of order " + std::to_string(g.size()) + " is not a p-group");
  LinearizationCertificate cert;
  cert.p = p;
  cert.d = g.dim();
  cert.group_order = g.size();
  cert.ell = choose_good_prime(g, p);
  cert.q = cert.ell;
  cert.support_condition = support_avoids(g, cert.ell);
  const auto ell = static_cast<std::int64_t>(cert.ell);

  const FiniteAutGroup red = reduce_group(g, ell);
  cert.reduction_injective = true;
  cert.reduction_homomorphism = true;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      const PolyMap lhs = g.element(g.product(i, j)).reduce_mod(ell);
      if (lhs != red.element(i).compose(red.element(j))) cert.reduction_homomorphism = false;
    }
  }
  cert.fixed_point = fixed_point(red, budget);
  for (const auto& e : red.elements()) cert.jacobians.push_back(jacobian_mod(e, cert.fixed_point));
  cert.homomorphism = true;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (cert.jacobians[g.product(i, j)] != multiply_mod(cert.jacobians[i], cert.jacobians[j], ell)) cert.homomorphism = false;
    }
  }
  std::set<Matrix> distinct(cert.jacobians.begin(), cert.jacobians.end());
  cert.injective = distinct.size() == g.size();
  cert.vp_order = g.size() == 1 ? 0 : vp(static_cast<std::int64_t>(g.size()), p);
  cert.gl_order_valuation = gl_order_valuation(g.dim(), mpz_class(static_cast<unsigned long>(cert.ell)), p);
  cert.m_prime_bound = m_prime_bound(g.dim(), cyclotomic_data(FieldSpec::rationals(), p));
  cert.minkowski_bound = minkowski_bound(g.dim(), p);
  cert.chain_holds = cert.vp_order <= cert.gl_order_valuation && cert.gl_order_valuation <= cert.m_prime_bound &&
                     cert.vp_order <= cert.minkowski_bound;
  cert.bound_saturated = cert.vp_order == cert.minkowski_bound;
  if (!cert.passed()) throw CertificateError("linearization certificate failed");
  return cert;
}

std::vector<std::vector<mpq_class>> cyclotomic_companion(std::int64_t p) {
  const auto t = static_cast<std::size_t>(p - 1);
  std::vector<std::vector<mpq_class>> c(t, std::vector<mpq_class>(t, 0));
  for (std::size_t i = 0; i + 1 < t; ++i) c[i + 1][i] = 1;
  for (std::size_t i = 0; i < t; ++i) c[i][t - 1] = -1;
  return c;
}

namespace {

using QMatrix = std::vector<std::vector<mpq_class>>;

QMatrix identity_matrix(int d) {
  QMatrix m(static_cast<std::size_t>(d), std::vector<mpq_class>(static_cast<std::size_t>(d), 0));
  for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
  return m;
}

QMatrix block_companion(int d, int t, int block, const QMatrix& c) {
  QMatrix m = identity_matrix(d);
  const auto o = static_cast<std::size_t>(block * t);
  for (std::size_t i = 0; i < static_cast<std::size_t>(t); ++i) {
    for (std::size_t j = 0; j < static_cast<std::size_t>(t); ++j) m[o + i][o + j] = c[i][j];
  }
  return m;
}

// Sends block b to block perm[b].
QMatrix block_permutation(int d, int t, const std::vector<int>& perm) {
  QMatrix m = identity_matrix(d);
  for (std::size_t b = 0; b < perm.size(); ++b) {
    for (int i = 0; i < t; ++i) {
      const auto src = static_cast<std::size_t>(static_cast<int>(b) * t + i);
      const auto dst = static_cast<std::size_t>(perm[b] * t + i);
      m[src][src] = 0;
      m[dst][src] = 1;
    }
  }
  return m;
}

// Generators of a Sylow p-subgroup of S_r: iterated cyclic shifts on base-p chunks.
std::vector<std::vector<int>> sylow_permutations(int r, std::int64_t p) {
  std::vector<std::vector<int>> gens;
  int offset = 0;
  std::vector<int> digits;
  for (int rest = r; rest > 0; rest /= static_cast<int>(p)) digits.push_back(rest % static_cast<int>(p));
  for (int k = static_cast<int>(digits.size()) - 1; k >= 0; --k) {
    int size = 1;
    for (int i = 0; i < k; ++i) size *= static_cast<int>(p);
    for (int copy = 0; copy < digits[static_cast<std::size_t>(k)]; ++copy) {
      int span = 1;
      for (int j = 1; j <= k; ++j) {
        const int sub = span;
        span *= static_cast<int>(p);
        std::vector<int> perm(static_cast<std::size_t>(r));
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = 0; i < span; ++i) perm[static_cast<std::size_t>(offset + i)] = offset + (i + sub) % span;
        gens.push_back(std::move(perm));
      }
      offset += size;
    }
  }
  return gens;
}

}  // namespace

OptimalGroupReport optimal_group(int d, std::int64_t p, const FieldSpec& field, std::size_t closure_limit) {
  if (d < 1) throw InputError("dimension must be positive");
  OptimalGroupReport rep;
  rep.d = d;
  rep.p = p;
  rep.cyc = cyclotomic_data(field, p);
  rep.r = d / rep.cyc.t;
  rep.schur_bound = schur_bound(d, rep.cyc);
  rep.explicit_matrices = field.kind == FieldSpec::Kind::Rationals && p != 2;
  if (!rep.explicit_matrices) return rep;
  const int t = rep.cyc.t;
  const QMatrix c = cyclotomic_companion(p);
  mpz_class order;
  mpz_fac_ui(order.get_mpz_t(), static_cast<unsigned long>(rep.r));
  order *= prime_power(p, rep.r);
  rep.full_order = order;
  GroupCaps caps;
  caps.max_elements = closure_limit;
  caps.max_degree = 1;
  std::vector<PolyMap> blocks;
  for (int b = 0; b < rep.r; ++b) blocks.push_back(PolyMap::linear(block_companion(d, t, b, c)));
  if (order <= static_cast<unsigned long>(closure_limit)) {
    std::vector<PolyMap> gens = blocks;
    for (int b = 0; b + 1 < rep.r; ++b) {
      std::vector<int> perm(static_cast<std::size_t>(rep.r));
      std::iota(perm.begin(), perm.end(), 0);
      std::swap(perm[static_cast<std::size_t>(b)], perm[static_cast<std::size_t>(b + 1)]);
      gens.push_back(PolyMap::linear(block_permutation(d, t, perm)));
    }
    rep.group = group_closure(gens, caps, d);
    if (mpz_class(static_cast<unsigned long>(rep.group->size())) != order) {
      throw CertificateError("optimal group closure has unexpected order");
    }
  }
  std::vector<PolyMap> sylow_gens = blocks;
  for (const auto& perm : sylow_permutations(rep.r, p)) sylow_gens.push_back(PolyMap::linear(block_permutation(d, t, perm)));
  rep.sylow = group_closure(sylow_gens, caps, d);
  rep.sylow_valuation = rep.sylow->size() == 1 ? 0 : vp(static_cast<std::int64_t>(rep.sylow->size()), p);
  if (!is_power_of(rep.sylow->size(), p)) throw CertificateError("Sylow closure is not a p-group");
  return rep;
}

}  // namespace padicaut
