#include "padicaut/flows.hpp"

#include <algorithm>

#include "padicaut/error.hpp"

namespace padicaut {

namespace {

TateSeries lift(const TateSeries& s, int n) {
  if (n <= s.precision()) return s.with_precision(n);
  TateSeries out(s.prime(), n, s.nvars(), s.degree());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.residue(i) != 0) out.set_residue(i, s.residue(i));
  }
  return out;
}

TateMap scaled_map(const TateMap& f, const mpz_class& c) {
  std::vector<TateSeries> out;
  for (const auto& s : f.components()) out.push_back(s.scaled(c));
  return TateMap(std::move(out));
}

// Multiplies s by the p-integral or p-fractional rational r; exact division
// by the p-part of the denominator lowers the precision.
TateSeries times_rational(const TateSeries& s, mpq_class r) {
  r.canonicalize();
  if (r == 0 || s.is_zero()) return TateSeries(s.prime(), s.precision(), s.nvars(), s.degree());
  const std::int64_t p = s.prime();
  const int v = vp(r, p);
  mpz_class num = r.get_num(), den = r.get_den();
  if (v < 0) den /= prime_power(p, -v);
  const mpz_class& mod = prime_power(p, s.precision());
  mpz_class inv;
  if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t()) == 0) throw InputError("denominator not invertible");
  TateSeries t = s.scaled(mpz_class(num * inv));
  if (v >= 0) return t;
  const NormExp e = t.gauss_norm();
  if (e && *e < -v) throw PrecisionError("power coefficient not p-integral at this precision");
  return t.divide_by_p_power(-v);
}

mpz_class binomial(const mpz_class& n, unsigned long k) {
  mpz_class out;
  mpz_bin_ui(out.get_mpz_t(), n.get_mpz_t(), k);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- fields

VectorField::VectorField(std::vector<TateSeries> components) : u_(std::move(components)) {
  if (u_.empty()) throw InputError("vector field needs at least one component");
  for (const auto& c : u_) {
    if (c.nvars() != dim() || c.degree() != u_.front().degree() || c.prime() != u_.front().prime()) {
      throw InputError("vector field components disagree in variables, caps or prime");
    }
  }
}

VectorField VectorField::from_polynomials(const std::vector<Polynomial>& u, std::int64_t p, int precision, int degree) {
  std::vector<TateSeries> comps;
  const int d = static_cast<int>(u.size());
  for (const auto& c : u) {
    if (c.nvars() > d) throw InputError("vector field component uses more variables than its dimension");
    Polynomial padded(d);
    for (const auto& [mono, v] : c.terms()) {
      Monomial full(static_cast<std::size_t>(d), 0);
      std::copy(mono.begin(), mono.end(), full.begin());
      padded.add_term(full, v);
    }
    comps.push_back(TateSeries::from_polynomial(padded, p, precision, degree));
  }
  return VectorField(std::move(comps));
}

VectorField VectorField::zero(std::int64_t p, int precision, int d, int degree) {
  return VectorField(std::vector<TateSeries>(static_cast<std::size_t>(d), TateSeries(p, precision, d, degree)));
}

int VectorField::precision() const {
  int n = u_.front().precision();
  for (const auto& c : u_) n = std::min(n, c.precision());
  return n;
}

NormExp VectorField::gauss_norm() const {
  NormExp e;
  for (const auto& c : u_) e = min_exp(e, c.gauss_norm());
  return e;
}

VectorField VectorField::operator+(const VectorField& o) const {
  std::vector<TateSeries> out;
  for (int i = 0; i < dim(); ++i) out.push_back(u_[static_cast<std::size_t>(i)] + o[i]);
  return VectorField(std::move(out));
}

VectorField VectorField::operator-(const VectorField& o) const {
  std::vector<TateSeries> out;
  for (int i = 0; i < dim(); ++i) out.push_back(u_[static_cast<std::size_t>(i)] - o[i]);
  return VectorField(std::move(out));
}

VectorField VectorField::scaled(const mpz_class& c) const {
  std::vector<TateSeries> out;
  for (const auto& s : u_) out.push_back(s.scaled(c));
  return VectorField(std::move(out));
}

VectorField VectorField::truncate(int degree) const {
  std::vector<TateSeries> out;
  for (const auto& s : u_) out.push_back(s.truncate(degree));
  return VectorField(std::move(out));
}

VectorField VectorField::with_precision(int n) const {
  std::vector<TateSeries> out;
  for (const auto& s : u_) out.push_back(s.with_precision(std::min(n, s.precision())));
  return VectorField(std::move(out));
}

std::vector<mpz_class> VectorField::flatten() const {
  std::vector<mpz_class> out;
  for (const auto& s : u_) out.insert(out.end(), s.residues().begin(), s.residues().end());
  return out;
}

std::vector<Polynomial> VectorField::to_polynomials() const {
  std::vector<Polynomial> out;
  for (const auto& s : u_) out.push_back(s.to_polynomial());
  return out;
}

std::string VectorField::to_string() const {
  std::string out;
  for (int i = 0; i < dim(); ++i) {
    if (i) out += "; ";
    out += "u" + std::to_string(i + 1) + " = " + u_[static_cast<std::size_t>(i)].to_string();
  }
  return out;
}

// -------------------------------------------------------------- Stirling

std::vector<std::vector<mpz_class>> stirling_first(int nmax) {
  std::vector<std::vector<mpz_class>> s(static_cast<std::size_t>(nmax + 1));
  s[0] = {1};
  for (int n = 1; n <= nmax; ++n) {
    auto& row = s[static_cast<std::size_t>(n)];
    const auto& prev = s[static_cast<std::size_t>(n - 1)];
    row.assign(static_cast<std::size_t>(n + 1), 0);
    for (int k = 1; k <= n; ++k) {
      const mpz_class above = k <= n - 1 ? prev[static_cast<std::size_t>(k)] : mpz_class(0);
      row[static_cast<std::size_t>(k)] = prev[static_cast<std::size_t>(k - 1)] - (n - 1) * above;
    }
  }
  return s;
}

// ---------------------------------------------------------- Bell-Poonen

TateFlow bell_poonen_flow(const TateMap& f, const FlowOptions& opts) {
  const std::int64_t p = f.prime();
  const int n = f.precision();
  const int d = f.dim();
  const int deg = f.degree();
  if (f.nvars() != d) throw InputError("flow needs a self-map");
  const NormExp level = f.congruence_level();
  if (level && *level < flow_threshold(p)) {
    throw InputError("congruence level " + std::to_string(*level) + " below Bell-Poonen threshold " +
                     std::to_string(flow_threshold(p)));
  }
  const int c = level.value_or(n);
  const int cap = opts.term_cap > 0 ? opts.term_cap : 4 * n + 16;

  TateFlow out;
  out.p = p;
  out.precision = n;
  out.dim = d;
  out.degree = deg;
  out.t_degree = opts.t_degree;

  std::vector<TateMap> iterates{TateMap::identity(p, n, d, deg)};
  out.mahler.push_back(iterates.front());
  out.mahler_norms.push_back(iterates.front().gauss_norm());
  NormExp prev;
  bool first = true;
  for (int k = 1;; ++k) {
    if (k > cap) throw CertificateError("tail not certified: Mahler terms did not vanish within " + std::to_string(cap) + " terms");
    iterates.push_back(compose(f, iterates.back()));
    TateMap delta = TateMap::identity(p, n, d, deg) - TateMap::identity(p, n, d, deg);
    for (int j = 0; j <= k; ++j) {
      mpz_class coef = binomial(k, static_cast<unsigned long>(j));
      if ((k - j) % 2) coef = -coef;
      delta = delta + scaled_map(iterates[static_cast<std::size_t>(j)], coef);
    }
    const NormExp v = delta.gauss_norm();
    if (!first && v) {
      const int vk = *v;
      const int vprev = prev.value_or(n);
      if ((p - 1) * (vk - vprev) < (p - 1) * static_cast<std::int64_t>(c) - 1 && vprev < n) {
        throw CertificateError("tail not certified: term " + std::to_string(k) + " decays from valuation " +
                               std::to_string(vprev) + " to " + std::to_string(vk));
      }
    }
    first = false;
    prev = v;
    if (!v) break;
    out.mahler.push_back(std::move(delta));
    out.mahler_norms.push_back(v);
  }
  const int kmax = static_cast<int>(out.mahler.size()) - 1;

  // Iterate check up to the requested n.
  while (static_cast<int>(iterates.size()) <= opts.verify_iterates) iterates.push_back(compose(f, iterates.back()));
  out.iterates_verified = true;
  for (int m = 0; m <= opts.verify_iterates; ++m) {
    if (flow_eval(out, static_cast<std::int64_t>(m)) != iterates[static_cast<std::size_t>(m)]) out.iterates_verified = false;
  }
  if (!out.iterates_verified) throw CertificateError("Bell-Poonen flow disagrees with the iterates");

  // Power view: a_j = sum_k Delta^k s(k, j) / k!.
  const auto s = stirling_first(kmax);
  std::vector<TateMap> coeffs;
  int prec = n;
  bool available = true;
  for (int j = 0; j <= kmax && available; ++j) {
    std::vector<TateSeries> comps;
    for (int i = 0; i < d; ++i) {
      TateSeries acc(p, n, d, deg);
      for (int k = j; k <= kmax; ++k) {
        const mpz_class& sk = s[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        if (sk == 0) continue;
        mpz_class fact;
        mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(k));
        try {
          acc = acc + times_rational(out.mahler[static_cast<std::size_t>(k)][i], mpq_class(sk, fact));
        } catch (const PrecisionError&) {
          available = false;
          break;
        }
      }
      if (!available) break;
      comps.push_back(std::move(acc));
    }
    if (!available) break;
    TateMap a(std::move(comps));
    if (j <= opts.t_degree) prec = std::min(prec, a.precision());
    coeffs.push_back(std::move(a));
  }
  if (available) {
    for (int j = 0; j <= std::min(opts.t_degree, kmax); ++j) out.power.push_back(coeffs[static_cast<std::size_t>(j)].with_precision(prec));
    out.power_precision = prec;
    for (int j = opts.t_degree + 1; j <= kmax; ++j) {
      const NormExp e = coeffs[static_cast<std::size_t>(j)].with_precision(std::min(prec, coeffs[static_cast<std::size_t>(j)].precision())).gauss_norm();
      out.power_tail = min_exp(out.power_tail, e);
    }
  }
  return out;
}

TateFlow bell_poonen_flow(const PolyMap& f, std::int64_t p, const FlowOptions& opts) {
  int work = opts.precision + opts.guard;
  for (int attempt = 0; attempt < 8; ++attempt) {
    TateFlow flow = bell_poonen_flow(TateMap::from_polymap(f, p, work, opts.degree), opts);
    if (!flow.power.empty() && flow.power_precision >= opts.precision) {
      flow.precision = opts.precision;
      for (auto& m : flow.mahler) m = m.with_precision(opts.precision);
      for (auto& m : flow.power) m = m.with_precision(opts.precision);
      flow.power_precision = opts.precision;
      return flow;
    }
    const int loss = flow.power.empty() ? work : work - flow.power_precision;
    work = opts.precision + loss + opts.guard + attempt + 1;
  }
  throw PrecisionError("precision exhausted building the power view of the flow");
}

TateMap flow_eval(const TateFlow& phi, const PadicInt& t0) {
  const std::int64_t p = phi.p;
  if (!phi.mahler.empty()) {
    const mpz_class r = t0.residue();
    int prec = std::min(phi.precision, t0.precision() + (phi.mahler.size() > 1 ? 0 : phi.precision));
    std::vector<TateSeries> comps;
    TateMap acc = phi.mahler.front();
    for (std::size_t k = 1; k < phi.mahler.size(); ++k) {
      const int vk = phi.mahler_norms[k].value_or(phi.precision);
      prec = std::min(prec, t0.precision() - vp_factorial(static_cast<std::int64_t>(k), p) + vk);
      acc = acc + scaled_map(phi.mahler[k], binomial(r, static_cast<unsigned long>(k)));
    }
    if (prec < 1) throw PrecisionError("precision exhausted evaluating the flow");
    return acc.with_precision(std::min(prec, acc.precision()));
  }
  if (phi.power.empty()) throw InputError("flow has neither Mahler nor power data");
  TateMap acc = phi.power.back();
  for (std::size_t j = phi.power.size() - 1; j-- > 0;) acc = scaled_map(acc, t0.residue()) + phi.power[j];
  return acc.with_precision(std::min(acc.precision(), t0.precision()));
}

TateMap flow_eval(const TateFlow& phi, std::int64_t n) {
  if (!phi.mahler.empty()) {
    TateMap acc = phi.mahler.front();
    for (std::size_t k = 1; k < phi.mahler.size(); ++k) {
      acc = acc + scaled_map(phi.mahler[k], binomial(static_cast<long>(n), static_cast<unsigned long>(k)));
    }
    return acc;
  }
  return flow_eval(phi, PadicInt(phi.p, phi.power_precision, n));
}

// ---------------------------------------------------------- integration

TateFlow integrate_vector_field(const VectorField& x, const FlowOptions& opts) {
  const std::int64_t p = x.prime();
  const int d = x.dim();
  const int n = opts.precision;
  const int deg = std::min(opts.degree, x.degree());
  const int kt = opts.t_degree;
  const NormExp norm = x.gauss_norm();
  if (norm && *norm < flow_threshold(p)) {
    throw InputError("norm above integrability threshold: ||X|| = p^-" + std::to_string(*norm));
  }
  const int work = n + vp_factorial(kt + 1, p) + opts.guard;
  std::vector<TateSeries> u;
  for (const auto& c : x.components()) u.push_back(lift(c.truncate(deg), work));

  // Series in (x_1..x_d, t) with total cap deg + K; only x-degree <= deg and t-degree <= K are kept.
  const int joint = deg + kt;
  auto jb = MonomialBasis::get(d + 1, joint);
  auto xb = MonomialBasis::get(d, deg);
  std::vector<TateSeries> phi;
  for (int i = 0; i < d; ++i) phi.push_back(TateSeries::variable(p, work, d + 1, joint, i));
  for (int pass = 0; pass <= kt; ++pass) {
    TateMap current(phi);
    std::vector<TateSeries> next;
    for (int i = 0; i < d; ++i) {
      const TateSeries integrand = compose(u[static_cast<std::size_t>(i)], current);
      TateSeries out = TateSeries::variable(p, work, d + 1, joint, i);
      for (std::size_t idx = 0; idx < integrand.size(); ++idx) {
        const mpz_class& r = integrand.residue(idx);
        if (r == 0) continue;
        Monomial m = jb->exponent(idx);
        const int tdeg = m[static_cast<std::size_t>(d)];
        if (tdeg + 1 > kt || total_degree(m) - tdeg > deg) continue;
        const int j = tdeg + 1;
        const int loss = vp(static_cast<std::int64_t>(j), p);
        mpz_class val = r;
        if (loss > 0) {
          if (mpz_divisible_p(val.get_mpz_t(), prime_power(p, loss).get_mpz_t()) == 0) {
            throw PrecisionError("divided-power coefficient not integral at t^" + std::to_string(j));
          }
          val /= prime_power(p, loss);
        }
        mpz_class unit = j / static_cast<long>(prime_power(p, loss).get_si());
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), unit.get_mpz_t(), prime_power(p, work).get_mpz_t());
        m[static_cast<std::size_t>(d)] = j;
        out.set_residue(jb->index(m), val * inv);
      }
      next.push_back(std::move(out));
    }
    phi = std::move(next);
  }

  TateFlow flow;
  flow.p = p;
  flow.precision = n;
  flow.dim = d;
  flow.degree = deg;
  flow.t_degree = kt;
  for (int j = 0; j <= kt; ++j) {
    std::vector<TateSeries> comps;
    for (int i = 0; i < d; ++i) {
      TateSeries a(p, n, d, deg);
      const auto& src = phi[static_cast<std::size_t>(i)];
      for (std::size_t idx = 0; idx < src.size(); ++idx) {
        if (src.residue(idx) == 0) continue;
        const Monomial& m = jb->exponent(idx);
        if (m[static_cast<std::size_t>(d)] != j) continue;
        Monomial xm(m.begin(), m.end() - 1);
        a.set_residue(xb->index(xm), src.residue(idx));
      }
      comps.push_back(std::move(a));
    }
    flow.power.emplace_back(std::move(comps));
  }
  flow.power_precision = n;
  // Lower bound for the omitted coefficients: v(a_j) >= j c - v_p(j!).
  const int c = norm.value_or(n);
  NormExp tail;
  for (int j = kt + 1; j <= kt + 4 * n; ++j) tail = min_exp(tail, j * c - vp_factorial(j, p));
  flow.power_tail = tail;
  return flow;
}

VectorField flow_vector_field(const TateFlow& phi) {
  if (phi.power.size() < 2) throw InputError("flow has no t-linear coefficient");
  return VectorField(phi.power[1].components());
}

// ---------------------------------------------------------------- bracket

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  if (x.dim() != y.dim()) throw InputError("bracket of fields of different dimension");
  if (x.degree() != y.degree()) throw InputError("incompatible caps");
  const int d = x.dim();
  const int cap = x.degree() - 1;
  if (cap < 0) throw PrecisionError("degree cap exhausted by brackets");
  std::vector<TateSeries> out;
  for (int j = 0; j < d; ++j) {
    TateSeries w(x.prime(), std::min(x.precision(), y.precision()), d, cap);
    for (int i = 0; i < d; ++i) {
      w += x[i].truncate(cap) * y[j].derivative(i);
      w -= y[i].truncate(cap) * x[j].derivative(i);
    }
    out.push_back(std::move(w));
  }
  return VectorField(std::move(out));
}

// ------------------------------------------------------------ straighten

namespace {

TateMap linear_map(const std::vector<std::vector<mpz_class>>& a, std::int64_t p, int n, int deg) {
  const int d = static_cast<int>(a.size());
  std::vector<TateSeries> comps;
  for (int i = 0; i < d; ++i) {
    TateSeries s(p, n, d, deg);
    for (int j = 0; j < d; ++j) {
      if (a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0) {
        s += TateSeries::variable(p, n, d, deg, j).scaled(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      }
    }
    comps.push_back(std::move(s));
  }
  return TateMap(std::move(comps));
}

// adj(A) h / det(A), exactly divisible by the p-part of det(A).
std::vector<TateSeries> apply_inverse(const std::vector<std::vector<mpq_class>>& adj, const mpz_class& det,
                                      const std::vector<TateSeries>& h) {
  const std::int64_t p = h.front().prime();
  const int e = vp(det, p);
  const mpz_class unit = det / prime_power(p, e);
  std::vector<TateSeries> out;
  for (std::size_t i = 0; i < adj.size(); ++i) {
    TateSeries acc(p, h.front().precision(), h.front().nvars(), h.front().degree());
    for (std::size_t j = 0; j < adj.size(); ++j) {
      if (adj[i][j] != 0) acc += h[j].scaled(mpz_class(adj[i][j]));
    }
    TateSeries q = acc.divide_by_p_power(e);
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), unit.get_mpz_t(), prime_power(p, q.precision()).get_mpz_t());
    out.push_back(q.scaled(inv));
  }
  return out;
}

// f(p^K z) / p^K for a series without constant term.
TateSeries rescale(const TateSeries& s, int k) {
  TateSeries out(s.prime(), s.precision(), s.nvars(), s.degree());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.residue(i) == 0) continue;
    const int n = s.basis().degree_of(i);
    if (n == 0) throw InputError("rescaling a series with a constant term");
    out.set_residue(i, s.residue(i) * prime_power(s.prime(), k * (n - 1)));
  }
  return out;
}

}  // namespace

StraightenResult straighten(const std::vector<VectorField>& fields, const std::vector<std::int64_t>& m,
                            const FlowOptions& opts) {
  if (fields.empty()) throw InputError("straighten needs at least one field");
  const int d = fields.front().dim();
  const int k = static_cast<int>(fields.size());
  const std::int64_t p = fields.front().prime();
  if (k > d) throw InputError("more fields than dimensions");
  if (static_cast<int>(m.size()) != d) throw InputError("base point has the wrong dimension");
  const PrecisionPolicy policy(opts.precision, opts.guard);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const NormExp b = lie_bracket(fields[static_cast<std::size_t>(i)], fields[static_cast<std::size_t>(j)]).gauss_norm();
      if (b && *b < policy.zero_threshold()) throw InputError("non-commuting inputs");
    }
  }
  const int deg = std::min({opts.degree, opts.t_degree, fields.front().degree()});
  const int work = opts.precision + 2 * opts.guard + 4 * d + 4;

  // Fields in coordinates centred at m.
  std::vector<VectorField> centred;
  std::vector<TateSeries> shift;
  for (int i = 0; i < d; ++i) {
    shift.push_back(TateSeries::variable(p, work, d, fields.front().degree(), i) +
                    TateSeries::constant(p, work, d, fields.front().degree(), mpz_class(static_cast<long>(m[static_cast<std::size_t>(i)]))));
  }
  const TateMap translate(shift);
  for (const auto& f : fields) {
    std::vector<TateSeries> comps;
    for (const auto& c : f.components()) comps.push_back(compose(lift(c, work), translate));
    centred.emplace_back(std::move(comps));
  }

  // Values at the base point and a complement of coordinates, by elimination mod p.
  std::vector<std::vector<std::int64_t>> rows;
  std::vector<int> valuations;
  for (const auto& f : centred) {
    NormExp e;
    for (int i = 0; i < d; ++i) {
      const mpz_class& c0 = f[i].constant_term();
      if (c0 != 0) e = min_exp(e, vp(c0, p));
    }
    if (!e || *e >= policy.zero_threshold()) throw InputError("rank deficiency at the base point");
    valuations.push_back(*e);
    std::vector<std::int64_t> row;
    for (int i = 0; i < d; ++i) {
      mpz_class r = f[i].constant_term() / prime_power(p, *e);
      mpz_fdiv_r_ui(r.get_mpz_t(), r.get_mpz_t(), static_cast<unsigned long>(p));
      row.push_back(r.get_si());
    }
    rows.push_back(std::move(row));
  }
  auto reduce_mod_p = [p, d](std::vector<std::vector<std::int64_t>> a) {
    int rank = 0;
    for (int c = 0; c < d && rank < static_cast<int>(a.size()); ++c) {
      std::size_t piv = a.size();
      for (std::size_t r = static_cast<std::size_t>(rank); r < a.size(); ++r) {
        if (a[r][static_cast<std::size_t>(c)] % p != 0) {
          piv = r;
          break;
        }
      }
      if (piv == a.size()) continue;
      std::swap(a[piv], a[static_cast<std::size_t>(rank)]);
      const auto& pr = a[static_cast<std::size_t>(rank)];
      mpz_class inv;
      mpz_invert(inv.get_mpz_t(), mpz_class(static_cast<long>(pr[static_cast<std::size_t>(c)])).get_mpz_t(), mpz_class(static_cast<long>(p)).get_mpz_t());
      for (std::size_t r = 0; r < a.size(); ++r) {
        if (r == static_cast<std::size_t>(rank)) continue;
        const std::int64_t f = (a[r][static_cast<std::size_t>(c)] * inv.get_si()) % p;
        for (int cc = 0; cc < d; ++cc) {
          a[r][static_cast<std::size_t>(cc)] = ((a[r][static_cast<std::size_t>(cc)] - f * pr[static_cast<std::size_t>(cc)]) % p + p) % p;
        }
      }
      ++rank;
    }
    return rank;
  };
  if (reduce_mod_p(rows) < k) throw InputError("rank deficiency at the base point");
  StraightenResult res;
  for (int j = 0; j < d && static_cast<int>(rows.size()) < d; ++j) {
    auto trial = rows;
    std::vector<std::int64_t> e(static_cast<std::size_t>(d), 0);
    e[static_cast<std::size_t>(j)] = 1;
    trial.push_back(e);
    if (reduce_mod_p(trial) == static_cast<int>(trial.size())) {
      rows = std::move(trial);
      res.complement.push_back(j);
    }
  }

  // Flows of the fields scaled into the admissible range.
  FlowOptions fo = opts;
  fo.precision = work;
  fo.degree = deg;
  fo.t_degree = deg;
  std::vector<TateFlow> flows;
  std::vector<int> scale;
  for (const auto& f : centred) {
    const int v = f.gauss_norm().value_or(work);
    const int a = std::max(0, flow_threshold(p) - v);
    scale.push_back(a);
    flows.push_back(integrate_vector_field(f.truncate(deg).scaled(prime_power(p, a)), fo));
  }

  // g(z) = phi^1_{z_1} o ... o phi^k_{z_k}(sum_j z_{k+j} e_{c_j}).
  std::vector<TateSeries> point(static_cast<std::size_t>(d), TateSeries(p, work, d, deg));
  for (std::size_t j = 0; j < res.complement.size(); ++j) {
    point[static_cast<std::size_t>(res.complement[j])] = TateSeries::variable(p, work, d, deg, k + static_cast<int>(j));
  }
  TateMap g(point);
  for (int i = k - 1; i >= 0; --i) {
    const TateFlow& fl = flows[static_cast<std::size_t>(i)];
    const TateSeries ti = TateSeries::variable(p, work, d, deg, i);
    std::vector<TateSeries> next(static_cast<std::size_t>(d), TateSeries(p, work, d, deg));
    TateSeries tpow = TateSeries::constant(p, work, d, deg, 1);
    for (std::size_t j = 0; j < fl.power.size(); ++j) {
      const TateMap aj = compose(fl.power[j].truncate(deg), g);
      for (int c = 0; c < d; ++c) next[static_cast<std::size_t>(c)] += aj[c] * tpow;
      tpow = tpow * ti;
    }
    g = TateMap(std::move(next));
  }

  // A = D_0 g, its determinant and adjugate.
  std::vector<std::vector<mpq_class>> aq(static_cast<std::size_t>(d), std::vector<mpq_class>(static_cast<std::size_t>(d)));
  res.a.assign(static_cast<std::size_t>(d), std::vector<mpz_class>(static_cast<std::size_t>(d)));
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      Monomial mono(static_cast<std::size_t>(d), 0);
      mono[static_cast<std::size_t>(c)] = 1;
      const mpz_class v = g[r].coefficient(mono).signed_residue();
      res.a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = v;
      aq[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = v;
    }
  }
  const mpq_class detq = determinant(aq);
  if (detq == 0) throw InputError("rank deficiency at the base point");
  const mpz_class det = detq.get_num();
  const auto ainv = inverse_matrix(aq);
  std::vector<std::vector<mpq_class>> adj = ainv;
  for (auto& row : adj) {
    for (auto& v : row) v *= detq;
  }
  const int e = vp(det, p);
  res.k_exp = e + 1;
  for (int i = 0; i < k; ++i) res.l_exp.push_back(scale[static_cast<std::size_t>(i)] + res.k_exp);

  std::vector<TateSeries> scaled_g;
  for (const auto& c : g.components()) scaled_g.push_back(rescale(c, res.k_exp));
  res.phi = TateMap(apply_inverse(adj, det, scaled_g));
  res.precision = res.phi.precision();

  // Straightened fields p^{L_i} X_i in the chart x = m + p^K A w.
  std::vector<std::vector<mpz_class>> pka = res.a;
  for (auto& row : pka) {
    for (auto& v : row) v *= prime_power(p, res.k_exp);
  }
  const TateMap chart = linear_map(pka, p, work, deg);
  for (int i = 0; i < k; ++i) {
    std::vector<TateSeries> pulled;
    const VectorField low = centred[static_cast<std::size_t>(i)].truncate(deg);
    for (const auto& c : low.components()) {
      pulled.push_back(compose(c, chart).scaled(prime_power(p, scale[static_cast<std::size_t>(i)])));
    }
    res.straightened.emplace_back(apply_inverse(adj, det, pulled));
  }

  // d phi / d z_i = Y_i(phi) on the polydisk.
  res.verified = true;
  const int check = res.precision - opts.guard;
  for (int i = 0; i < k; ++i) {
    for (int c = 0; c < d; ++c) {
      const TateSeries lhs = res.phi[c].derivative(i);
      const TateSeries rhs = compose(res.straightened[static_cast<std::size_t>(i)][c], res.phi).truncate(deg - 1);
      const NormExp diff = (lhs.with_precision(std::min(lhs.precision(), rhs.precision())) -
                            rhs.with_precision(std::min(lhs.precision(), rhs.precision()))).gauss_norm();
      if (diff && *diff < check) res.verified = false;
    }
  }
  if (!res.verified) throw CertificateError("straightening failed the pullback check");
  res.psi = invert_local(res.phi);
  for (auto& y : res.straightened) y = y.with_precision(opts.precision);
  res.phi = res.phi.with_precision(std::min(opts.precision, res.phi.precision()));
  res.psi = res.psi.with_precision(std::min(opts.precision, res.psi.precision()));
  return res;
}

// ----------------------------------------------------------- Lie closure

namespace {

struct Reduced {
  std::vector<VectorField> fields;
  bool warning = false;
};

Reduced independent_subset(const std::vector<VectorField>& xs, const PrecisionPolicy& policy) {
  Reduced out;
  if (xs.empty()) return out;
  std::vector<std::vector<mpz_class>> rows;
  for (const auto& x : xs) rows.push_back(x.flatten());
  const RankResult r = padic_rank(rows, xs.front().prime(), policy);
  out.warning = r.precision_warning;
  std::vector<std::size_t> idx = r.independent;
  std::sort(idx.begin(), idx.end());
  for (std::size_t i : idx) out.fields.push_back(xs[i]);
  return out;
}

std::vector<VectorField> at_cap(const std::vector<VectorField>& xs, int cap) {
  std::vector<VectorField> out;
  for (const auto& x : xs) out.push_back(x.degree() > cap ? x.truncate(cap) : x);
  return out;
}

// Dimensions of a bracket series: next = [left, current], or [current, current] when left is empty.
std::vector<int> bracket_series(const std::vector<VectorField>& h, bool derived, const PrecisionPolicy& policy,
                                std::optional<int>& length, bool& warning) {
  std::vector<int> dims{static_cast<int>(h.size())};
  std::vector<VectorField> current = h;
  length.reset();
  for (int step = 0; step <= static_cast<int>(h.size()) + 1; ++step) {
    if (current.empty()) {
      length = step;
      return dims;
    }
    const int cap = current.front().degree();
    if (cap < 1) throw PrecisionError("degree cap exhausted by brackets");
    std::vector<VectorField> brackets;
    const std::vector<VectorField> left = derived ? current : at_cap(h, cap);
    for (std::size_t i = 0; i < left.size(); ++i) {
      for (std::size_t j = derived ? i + 1 : 0; j < current.size(); ++j) brackets.push_back(lie_bracket(left[i], current[j]));
    }
    Reduced r = independent_subset(brackets, policy);
    warning = warning || r.warning;
    if (!r.fields.empty() && static_cast<int>(r.fields.size()) >= dims.back()) return dims;
    dims.push_back(static_cast<int>(r.fields.size()));
    current = std::move(r.fields);
  }
  return dims;
}

}  // namespace

LieAlgebraBasis lie_closure(const std::vector<VectorField>& seeds, const PrecisionPolicy& policy, std::size_t max_dim) {
  if (seeds.empty()) throw InputError("lie_closure needs at least one seed");
  LieAlgebraBasis h;
  h.ambient_dim = seeds.front().dim();
  h.policy = policy;
  int cap = seeds.front().degree();
  for (const auto& s : seeds) {
    if (s.dim() != h.ambient_dim) throw InputError("seeds of different dimension");
    cap = std::min(cap, s.degree());
  }
  if (max_dim == 0) {
    max_dim = static_cast<std::size_t>(h.ambient_dim) * MonomialBasis::get(h.ambient_dim, cap)->size();
  }
  auto reduce = [&](std::vector<VectorField> xs) {
    for (auto& x : xs) x = x.with_precision(policy.precision);
    Reduced r = independent_subset(xs, policy);
    h.precision_warning = h.precision_warning || r.warning;
    return r.fields;
  };
  std::vector<VectorField> basis = reduce(at_cap(seeds, cap));
  std::size_t fresh_from = 0;
  while (fresh_from < basis.size()) {
    if (cap < 1) throw PrecisionError("degree cap exhausted by brackets");
    std::vector<VectorField> candidates;
    for (std::size_t j = fresh_from; j < basis.size(); ++j) {
      for (std::size_t i = 0; i < j; ++i) candidates.push_back(lie_bracket(basis[i], basis[j]));
    }
    --cap;
    basis = at_cap(basis, cap);
    const std::size_t before = basis.size();
    if (reduce(basis).size() != before) throw PrecisionError("basis lost independence after truncation");
    std::vector<VectorField> all = basis;
    all.insert(all.end(), candidates.begin(), candidates.end());
    std::vector<VectorField> grown = reduce(all);
    // The reduction keeps the earliest rows, so the old basis stays a prefix.
    fresh_from = before;
    basis = std::move(grown);
    if (basis.size() > max_dim) throw BudgetError("not finite-dimensional at this precision");
  }
  h.basis = basis;
  h.degree = cap;

  // Structure constants at cap - 1.
  if (cap >= 1) {
    std::vector<std::vector<mpz_class>> rows;
    for (const auto& b : basis) rows.push_back(b.truncate(cap - 1).flatten());
    const std::size_t n = basis.size();
    h.structure.assign(n, std::vector<std::vector<PadicNumber>>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto target = lie_bracket(basis[i], basis[j]).flatten();
        Expression ex = express_in_basis(rows, target, seeds.front().prime(), policy);
        if (!ex.in_span) throw CertificateError("bracket closure failed for basis pair");
        h.structure[i][j] = std::move(ex.coefficients);
      }
    }
  }
  h.derived_dims = bracket_series(h.basis, true, policy, h.derived_length, h.precision_warning);
  h.lower_central_dims = bracket_series(h.basis, false, policy, h.nilpotency_class, h.precision_warning);
  if (h.nilpotency_class && h.derived_length && *h.derived_length > h.ambient_dim) {
    throw CertificateError("Epstein-Thurston bound violated: dl = " + std::to_string(*h.derived_length) + " > d = " +
                           std::to_string(h.ambient_dim));
  }
  return h;
}

std::optional<int> derived_length(const LieAlgebraBasis& h) { return h.derived_length; }
std::optional<int> nilpotency_class(const LieAlgebraBasis& h) { return h.nilpotency_class; }

}  // namespace padicaut
