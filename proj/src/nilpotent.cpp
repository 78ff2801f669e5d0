#include "padicaut/nilpotent.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

namespace padicaut {

// ---------------------------------------------------------------- UniTri

UniTri UniTri::identity(int n, std::optional<mpz_class> modulus) {
  if (n < 1) throw InputError("matrix size must be positive");
  if (modulus && *modulus < 2) throw InputError("modulus must be at least 2");
  UniTri u;
  u.n_ = n;
  u.mod_ = std::move(modulus);
  u.a_.assign(static_cast<std::size_t>(n * n), 0);
  for (int i = 0; i < n; ++i) u.a_[static_cast<std::size_t>(i * n + i)] = 1;
  return u;
}

UniTri UniTri::elementary(int n, int i, int j, const mpz_class& a, std::optional<mpz_class> modulus) {
  if (i < 1 || j <= i || j > n) throw InputError("elementary matrix needs 1 <= i < j <= n");
  UniTri u = identity(n, std::move(modulus));
  u.a_[static_cast<std::size_t>((i - 1) * n + (j - 1))] = a;
  u.reduce();
  return u;
}

UniTri UniTri::from_rows(const std::vector<std::vector<mpz_class>>& rows, std::optional<mpz_class> modulus) {
  const int n = static_cast<int>(rows.size());
  UniTri u = identity(n, std::move(modulus));
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n) throw InputError("matrix is not square");
    for (int j = 0; j < n; ++j) u.a_[static_cast<std::size_t>(i * n + j)] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  u.reduce();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      if (u.at(i, j) != (i == j ? 1 : 0)) throw InputError("matrix is not upper unitriangular");
    }
  }
  return u;
}

UniTri UniTri::parse(int n, const std::string& text, std::optional<mpz_class> modulus) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  UniTri u = identity(n, modulus);
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = s.find('+', pos);
    if (end == std::string::npos) end = s.size();
    const std::string term = s.substr(pos, end - pos);
    pos = end + 1;
    if (term == "I" || term.empty()) continue;
    const std::size_t e = term.find('E');
    if (e == std::string::npos || term.size() != e + 3) throw InputError("bad unitriangular literal: " + text);
    const std::string coef = term.substr(0, e);
    const mpz_class a = coef.empty() ? mpz_class(1) : (coef == "-" ? mpz_class(-1) : mpz_class(coef));
    const int i = term[e + 1] - '0', j = term[e + 2] - '0';
    if (i < 1 || j <= i || j > n) throw InputError("bad unitriangular literal: " + text);
    u.a_[static_cast<std::size_t>((i - 1) * n + (j - 1))] += a;
  }
  u.reduce();
  return u;
}

void UniTri::reduce() {
  if (!mod_) return;
  for (auto& v : a_) mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), mod_->get_mpz_t());
}

bool UniTri::is_identity() const {
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (at(i, j) != 0) return false;
    }
  }
  return true;
}

UniTri operator*(const UniTri& x, const UniTri& y) {
  if (x.n_ != y.n_ || x.mod_ != y.mod_) throw InputError("unitriangular matrices of different size or modulus");
  UniTri out = UniTri::identity(x.n_, x.mod_);
  const int n = x.n_;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      mpz_class acc = 0;
      for (int k = i; k <= j; ++k) acc += x.at(i, k) * y.at(k, j);
      out.a_[static_cast<std::size_t>(i * n + j)] = acc;
    }
  }
  out.reduce();
  return out;
}

UniTri UniTri::inverse() const {
  // (I + N)^{-1} = sum_k (-N)^k, finite since N is nilpotent.
  UniTri minus_n = identity(n_, mod_);
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) minus_n.a_[static_cast<std::size_t>(i * n_ + j)] = -at(i, j);
    minus_n.a_[static_cast<std::size_t>(i * n_ + i)] = 0;
  }
  std::vector<mpz_class> acc = identity(n_, mod_).a_;
  std::vector<mpz_class> power = acc;
  for (int k = 1; k < n_; ++k) {
    std::vector<mpz_class> next(power.size(), 0);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        for (int l = 0; l < n_; ++l) {
          next[static_cast<std::size_t>(i * n_ + j)] += power[static_cast<std::size_t>(i * n_ + l)] *
                                                        minus_n.a_[static_cast<std::size_t>(l * n_ + j)];
        }
      }
    }
    power = std::move(next);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += power[i];
  }
  UniTri out = identity(n_, mod_);
  out.a_ = std::move(acc);
  out.reduce();
  return out;
}

UniTri UniTri::pow(std::uint64_t e) const {
  UniTri out = identity(n_, mod_), base = *this;
  while (e) {
    if (e & 1) out = out * base;
    base = base * base;
    e >>= 1;
  }
  return out;
}

std::string UniTri::to_string() const {
  std::string out = "[";
  for (int i = 0; i < n_; ++i) {
    out += i ? ",[" : "[";
    for (int j = 0; j < n_; ++j) {
      if (j) out += ",";
      out += at(i, j).get_str();
    }
    out += "]";
  }
  return out + "]";
}

std::string key_of(const UniTri& a) { return a.to_string(); }

std::string key_of(const RationalExp& a) {
  std::string out = a.t().get_str();
  for (const auto& v : a.b()) out += ";" + v.get_str();
  return out;
}

// ------------------------------------------------------- finite quotients

FiniteUniTriGroup unitri_closure(const std::vector<UniTri>& gens, std::size_t budget) {
  if (gens.empty()) throw InputError("closure needs at least one generator");
  FiniteUniTriGroup g;
  g.generators = gens;
  const UniTri id = UniTri::identity(gens.front().size(), gens.front().modulus());
  if (!id.modulus()) throw InputError("finite closure needs a modulus");
  g.elements.push_back(id);
  g.members.insert(id);
  for (std::size_t head = 0; head < g.elements.size(); ++head) {
    for (const auto& s : gens) {
      UniTri h = g.elements[head] * s;
      if (g.members.insert(h).second) {
        if (g.elements.size() >= budget) throw BudgetError("closure budget of " + std::to_string(budget) + " elements exceeded");
        g.elements.push_back(std::move(h));
      }
    }
  }
  return g;
}

FiniteUniTriGroup normal_closure(const std::vector<UniTri>& seeds, const std::vector<UniTri>& normalizers, int n,
                                 const mpz_class& modulus, std::size_t budget) {
  std::vector<UniTri> gens{UniTri::identity(n, modulus)};
  for (const auto& s : seeds) {
    if (!s.is_identity()) gens.push_back(s);
  }
  FiniteUniTriGroup h = unitri_closure(gens, budget);
  for (bool grown = true; grown;) {
    grown = false;
    for (std::size_t i = 0; i < h.elements.size() && !grown; ++i) {
      for (const auto& g : normalizers) {
        UniTri c = g * h.elements[i] * g.inverse();
        if (!h.contains(c)) {
          gens.push_back(std::move(c));
          h = unitri_closure(gens, budget);
          grown = true;
          break;
        }
      }
    }
  }
  h.generators = gens;
  return h;
}

SeriesReport derived_series_quotient(const std::vector<UniTri>& gens, const mpz_class& modulus, std::size_t budget) {
  if (gens.empty()) throw InputError("series needs at least one generator");
  const int n = gens.front().size();
  std::vector<UniTri> reduced;
  for (const auto& g : gens) reduced.push_back(UniTri::from_rows([&] {
    std::vector<std::vector<mpz_class>> rows(static_cast<std::size_t>(n), std::vector<mpz_class>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g.at(i, j);
    }
    return rows;
  }(), modulus));
  SeriesReport rep;
  FiniteUniTriGroup g = unitri_closure(reduced, budget);
  rep.derived_orders.push_back(g.size());
  std::vector<UniTri> current = reduced;
  std::size_t order = g.size();
  while (order > 1) {
    std::vector<UniTri> seeds;
    for (const auto& x : current) {
      for (const auto& y : current) seeds.push_back(commutator(x, y));
    }
    FiniteUniTriGroup d = normal_closure(seeds, current, n, modulus, budget);
    if (d.size() == order) throw CertificateError("derived series stalls: group is not solvable");
    order = d.size();
    rep.derived_orders.push_back(order);
    current = d.generators;
  }
  rep.derived_length = static_cast<int>(rep.derived_orders.size()) - 1;

  rep.lower_central_orders.push_back(g.size());
  current = reduced;
  order = g.size();
  while (order > 1) {
    std::vector<UniTri> seeds;
    for (const auto& x : current) {
      for (const auto& y : reduced) seeds.push_back(commutator(x, y));
    }
    FiniteUniTriGroup c = normal_closure(seeds, reduced, n, modulus, budget);
    if (c.size() == order) throw CertificateError("lower central series stalls: group is not nilpotent");
    order = c.size();
    rep.lower_central_orders.push_back(order);
    current = c.generators;
  }
  rep.nilpotency_class = static_cast<int>(rep.lower_central_orders.size()) - 1;
  return rep;
}

PowerIndexReport power_subgroup_index(const std::vector<UniTri>& gens, std::uint64_t m, const mpz_class& modulus,
                                      std::size_t budget) {
  if (m == 0) throw InputError("power exponent must be positive");
  std::vector<UniTri> reduced, powers;
  for (const auto& g : gens) {
    std::vector<std::vector<mpz_class>> rows(static_cast<std::size_t>(g.size()), std::vector<mpz_class>(static_cast<std::size_t>(g.size())));
    for (int i = 0; i < g.size(); ++i) {
      for (int j = 0; j < g.size(); ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g.at(i, j);
    }
    reduced.push_back(UniTri::from_rows(rows, modulus));
    powers.push_back(reduced.back().pow(m));
  }
  PowerIndexReport rep;
  rep.group_order = unitri_closure(reduced, budget).size();
  rep.power_subgroup_order = unitri_closure(powers, budget).size();
  rep.index = rep.group_order / rep.power_subgroup_order;
  return rep;
}

namespace {

template <class G>
G random_word(const std::vector<G>& gens, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
  std::uniform_int_distribution<int> len(1, 4), sign(0, 1);
  G w = gens[pick(rng)];
  const int l = len(rng);
  for (int i = 1; i < l; ++i) {
    const G& g = gens[pick(rng)];
    w = group_mul(w, sign(rng) ? g : group_inv(g));
  }
  return w;
}

template <class G>
MultilinearityReport multilinearity(const std::vector<G>& gens, int weight, int samples, std::uint64_t seed) {
  MultilinearityReport rep;
  rep.weight = weight;
  if (weight < 1) return rep;
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    std::vector<G> h;
    for (int i = 0; i < weight; ++i) h.push_back(random_word(gens, rng));
    const G extra = random_word(gens, rng);
    for (int slot = 0; slot < weight; ++slot) {
      std::vector<G> a = h, b = h, ab = h;
      b[static_cast<std::size_t>(slot)] = extra;
      ab[static_cast<std::size_t>(slot)] = group_mul(h[static_cast<std::size_t>(slot)], extra);
      ++rep.checks;
      if (!(bracket_chain(ab) == group_mul(bracket_chain(a), bracket_chain(b)))) ++rep.violations;
    }
  }
  return rep;
}

}  // namespace

MultilinearityReport multilinearity_check(const std::vector<UniTri>& gens, int samples, std::uint64_t seed) {
  const auto cls = nilpotency_class(gens, gens.front().size());
  if (!cls) throw InputError("generators are not nilpotent within the class bound");
  return multilinearity(gens, *cls, samples, seed);
}

MultilinearityReport multilinearity_check(const std::vector<RationalExp>& gens, int samples, std::uint64_t seed) {
  const auto cls = nilpotency_class(gens, gens.front().n() + 1);
  if (!cls) throw InputError("generators are not nilpotent within the class bound");
  return multilinearity(gens, *cls, samples, seed);
}

// ------------------------------------------------------------ exp family

namespace {

// Shift of x and coefficients of y + sum_k coef_k x^{k-1}.
template <class S>
std::vector<S> action_coefficients(const ExpElement<S>& g) {
  const int n = g.n();
  std::vector<S> out{g.t()};
  mpq_class scale = 1;
  for (int k = 1; k <= n; ++k) {
    if (k > 1) {
      scale /= k - 1;
      if (g.padic_prime()) scale *= static_cast<long>(g.padic_prime());
    }
    out.push_back(S(g.b()[static_cast<std::size_t>(n - k)] * scale));
  }
  return out;
}

SymbolicExp generic_element(int n, int offset, int nvars, bool with_t = true, bool with_b = true) {
  Polynomial t = with_t ? Polynomial::variable(nvars, offset) : Polynomial(nvars);
  std::vector<Polynomial> b;
  for (int j = 0; j < n; ++j) b.push_back(with_b ? Polynomial::variable(nvars, offset + 1 + j) : Polynomial(nvars));
  return SymbolicExp(std::move(t), std::move(b));
}

SymbolicExp power(const SymbolicExp& g, int m) {
  SymbolicExp out = g;
  for (int i = 1; i < m; ++i) out = out * g;
  return out;
}

}  // namespace

PolyMap exp_action(const RationalExp& g) {
  const auto c = action_coefficients(g);
  Polynomial x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
  Polynomial fx = x + Polynomial::constant(2, c[0]);
  Polynomial fy = y;
  Polynomial xp = Polynomial::constant(2, 1);
  for (std::size_t k = 1; k < c.size(); ++k) {
    fy += xp * c[k];
    xp *= x;
  }
  return PolyMap(Ring::rationals(), {fx, fy});
}

BracketPolynomiality bracket_polynomiality(int n, int k) {
  if (n < 1 || k < 0) throw InputError("bracket_polynomiality needs n >= 1 and k >= 0");
  BracketPolynomiality out;
  out.n = n;
  out.k = k;
  out.nvars = (k + 1) * (n + 1);
  std::vector<SymbolicExp> h;
  for (int i = 0; i <= k; ++i) h.push_back(generic_element(n, i * (n + 1), out.nvars));
  const SymbolicExp br = bracket_chain(h);
  out.t = br.t();
  out.b = br.b();
  out.nonconstant = !out.t.is_constant();
  for (const auto& v : out.b) out.nonconstant = out.nonconstant || !v.is_constant();
  return out;
}

std::vector<RationalExp> exp_family_generators(int n, std::int64_t p) {
  if (n < 1) throw InputError("family dimension must be positive");
  std::vector<mpq_class> zero(static_cast<std::size_t>(n), 0), e1 = zero;
  e1[0] = 1;
  return {RationalExp(1, zero, p), RationalExp(0, e1, p)};
}

VdlWitness faithfulness_and_vdl_witness(int n) {
  if (n < 2) throw InputError("the witness needs n >= 2");
  VdlWitness w;
  w.n = n;
  const int nv = 2 * (n + 1);
  const SymbolicExp g = generic_element(n, 0, nv), h = generic_element(n, n + 1, nv);

  // Faithfulness: the coefficients are linear forms of full rank n+1 in the parameters.
  const auto coeffs = action_coefficients(g);
  std::vector<std::vector<mpq_class>> jac;
  bool linear = true;
  for (const auto& c : coeffs) {
    std::vector<mpq_class> row;
    for (int v = 0; v <= n; ++v) {
      Monomial m(static_cast<std::size_t>(nv), 0);
      m[static_cast<std::size_t>(v)] = 1;
      row.push_back(c.coefficient(m));
    }
    linear = linear && c.degree() == 1 && c.constant_term() == 0;
    jac.push_back(std::move(row));
  }
  w.faithful = linear && determinant(jac) != 0;

  for (int m : {2, 3}) {
    w.power_exponents.push_back(m);
    const SymbolicExp c = commutator(power(g, m), power(h, m));
    if (c.is_identity()) {
      w.powers_noncommuting = false;
      break;
    }
    w.powers_noncommuting = true;
  }

  const SymbolicExp c = commutator(g, h);
  w.generic_commutator_nontrivial = !c.is_identity();
  w.commutators_are_translations = c.t().is_zero();
  const SymbolicExp tg = generic_element(n, 0, nv, false, true), th = generic_element(n, n + 1, nv, false, true);
  w.translations_commute = commutator(tg, th).is_identity();
  const SymbolicExp dg = generic_element(n, 0, nv, true, false), dh = generic_element(n, n + 1, nv, true, false);
  w.degenerate_commute = commutator(dg, dh).is_identity();

  const auto gens = exp_family_generators(n);
  w.nilpotency_class = nilpotency_class(gens, n + 1).value_or(-1);
  const std::function<std::string(const RationalExp&)> key = [](const RationalExp& e) { return key_of(e); };
  w.derived_length = derived_length(gens, n, key).value_or(-1);
  return w;
}

}  // namespace padicaut
