#include "padicaut/tate.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <utility>

#include "padicaut/error.hpp"

namespace padicaut {

// ----------------------------------------------------------- MonomialBasis

namespace {

void monomials_of_degree(int nvars, int degree, Monomial& cur, int pos, std::vector<Monomial>& out) {
  if (pos == nvars - 1) {
    cur[static_cast<std::size_t>(pos)] = degree;
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= degree; ++e) {
    cur[static_cast<std::size_t>(pos)] = e;
    monomials_of_degree(nvars, degree - e, cur, pos + 1, out);
  }
}

constexpr std::size_t kDenseProductLimit = 1200;

}  // namespace

MonomialBasis::MonomialBasis(int nvars, int degree) : nvars_(nvars), degree_(degree) {
  if (nvars < 1) throw InputError("series need at least one variable");
  if (degree < 0) throw InputError("degree cap must be nonnegative");
  for (int k = 0; k <= degree; ++k) {
    starts_.push_back(exps_.size());
    std::vector<Monomial> level;
    Monomial cur(static_cast<std::size_t>(nvars), 0);
    monomials_of_degree(nvars, k, cur, 0, level);
    std::sort(level.begin(), level.end());
    for (auto& m : level) {
      exps_.push_back(std::move(m));
      degs_.push_back(k);
    }
  }
  starts_.push_back(exps_.size());
  const std::size_t n = exps_.size();
  const auto nv = static_cast<std::size_t>(nvars);
  raise_.assign(n * nv, npos);
  lower_.assign(n * nv, npos);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t v = 0; v < nv; ++v) {
      Monomial m = exps_[i];
      ++m[v];
      raise_[i * nv + v] = index(m);
      if (exps_[i][v] > 0) {
        m[v] -= 2;
        lower_[i * nv + v] = index(m);
      }
    }
  }
  if (n <= kDenseProductLimit) {
    mul_.assign(n * n, static_cast<std::uint32_t>(-1));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (degs_[i] + degs_[j] > degree_) break;
        Monomial m = exps_[i];
        for (std::size_t v = 0; v < nv; ++v) m[v] += exps_[j][v];
        mul_[i * n + j] = static_cast<std::uint32_t>(index(m));
      }
    }
  }
}

std::size_t MonomialBasis::index(const Monomial& m) const {
  if (static_cast<int>(m.size()) != nvars_) return npos;
  const int k = total_degree(m);
  if (k > degree_) return npos;
  for (int e : m) {
    if (e < 0) return npos;
  }
  auto first = exps_.begin() + static_cast<std::ptrdiff_t>(starts_[static_cast<std::size_t>(k)]);
  auto last = exps_.begin() + static_cast<std::ptrdiff_t>(starts_[static_cast<std::size_t>(k) + 1]);
  auto it = std::lower_bound(first, last, m);
  if (it == last || *it != m) return npos;
  return static_cast<std::size_t>(it - exps_.begin());
}

std::size_t MonomialBasis::product(std::size_t i, std::size_t j) const {
  if (degs_[i] + degs_[j] > degree_) return npos;
  if (!mul_.empty()) return mul_[i * exps_.size() + j];
  Monomial m = exps_[i];
  for (std::size_t v = 0; v < m.size(); ++v) m[v] += exps_[j][v];
  return index(m);
}

std::shared_ptr<const MonomialBasis> MonomialBasis::get(int nvars, int degree) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialBasis>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(nvars, degree);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto basis = std::make_shared<const MonomialBasis>(nvars, degree);
  cache.emplace(key, basis);
  return basis;
}

// -------------------------------------------------------------- TateSeries

TateSeries::TateSeries(std::int64_t p, int precision, int nvars, int degree)
    : p_(p), n_(precision), basis_(MonomialBasis::get(nvars, degree)) {
  if (p < 2) throw InputError("p-adic prime must be at least 2");
  if (precision < 1) throw PrecisionError("precision exhausted");
  coeffs_.assign(basis_->size(), mpz_class(0));
}

TateSeries TateSeries::constant(std::int64_t p, int precision, int nvars, int degree, const mpz_class& c) {
  TateSeries out(p, precision, nvars, degree);
  out.set_residue(0, c);
  return out;
}

TateSeries TateSeries::variable(std::int64_t p, int precision, int nvars, int degree, int index) {
  TateSeries out(p, precision, nvars, degree);
  if (degree < 1) return out;
  Monomial m(static_cast<std::size_t>(nvars), 0);
  m.at(static_cast<std::size_t>(index)) = 1;
  out.set_coefficient(m, 1);
  return out;
}

TateSeries TateSeries::from_polynomial(const Polynomial& f, std::int64_t p, int precision, int degree) {
  TateSeries out(p, precision, f.nvars(), degree);
  for (const auto& [m, c] : f.terms()) {
    if (total_degree(m) > degree) continue;
    if (mpz_divisible_ui_p(c.get_den().get_mpz_t(), static_cast<unsigned long>(p)) != 0) {
      throw InputError("composition outside Z_p<x>: coefficient " + c.get_str() + " is not " + std::to_string(p) + "-integral");
    }
    out.set_residue(out.basis_->index(m), PadicInt::from_rational(c, p, precision).residue());
  }
  return out;
}

void TateSeries::set_residue(std::size_t i, const mpz_class& v) {
  coeffs_.at(i) = v;
  mpz_fdiv_r(coeffs_[i].get_mpz_t(), coeffs_[i].get_mpz_t(), prime_power(p_, n_).get_mpz_t());
}

PadicInt TateSeries::coefficient(const Monomial& m) const {
  const std::size_t i = basis_->index(m);
  if (i == MonomialBasis::npos) return PadicInt(p_, n_);
  return PadicInt(p_, n_, coeffs_[i]);
}

void TateSeries::set_coefficient(const Monomial& m, const mpz_class& v) {
  const std::size_t i = basis_->index(m);
  if (i == MonomialBasis::npos) throw InputError("monomial outside the degree window");
  set_residue(i, v);
}

NormExp TateSeries::gauss_norm() const {
  NormExp e;
  for (const auto& c : coeffs_) {
    if (c != 0) e = min_exp(e, vp(c, p_));
  }
  return e;
}

bool TateSeries::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const mpz_class& c) { return c == 0; });
}

void TateSeries::check_compatible(const TateSeries& o) const {
  if (p_ != o.p_) throw InputError("mismatched primes");
  if (basis_ != o.basis_) throw InputError("series with incompatible variable count or degree cap");
}

void TateSeries::reduce_all() {
  const mpz_class& m = prime_power(p_, n_);
  for (auto& c : coeffs_) mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
}

TateSeries TateSeries::operator-() const {
  TateSeries out(*this);
  for (auto& c : out.coeffs_) c = -c;
  out.reduce_all();
  return out;
}

TateSeries& TateSeries::operator+=(const TateSeries& o) {
  check_compatible(o);
  n_ = std::min(n_, o.n_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  reduce_all();
  return *this;
}

TateSeries& TateSeries::operator-=(const TateSeries& o) {
  check_compatible(o);
  n_ = std::min(n_, o.n_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  reduce_all();
  return *this;
}

TateSeries operator*(const TateSeries& a, const TateSeries& b) {
  a.check_compatible(b);
  TateSeries out(a.p_, std::min(a.n_, b.n_), a.nvars(), a.degree());
  const MonomialBasis& basis = *a.basis_;
  const int cap = basis.degree();
  std::vector<std::size_t> nzb;
  for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
    if (b.coeffs_[j] != 0) nzb.push_back(j);
  }
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i] == 0) continue;
    const int di = basis.degree_of(i);
    for (std::size_t j : nzb) {
      if (di + basis.degree_of(j) > cap) break;
      mpz_addmul(out.coeffs_[basis.product(i, j)].get_mpz_t(), a.coeffs_[i].get_mpz_t(), b.coeffs_[j].get_mpz_t());
    }
  }
  out.reduce_all();
  return out;
}

TateSeries TateSeries::scaled(const mpz_class& c) const {
  TateSeries out(*this);
  for (auto& v : out.coeffs_) v *= c;
  out.reduce_all();
  return out;
}

bool operator==(const TateSeries& a, const TateSeries& b) {
  return a.p_ == b.p_ && a.n_ == b.n_ && a.basis_ == b.basis_ && a.coeffs_ == b.coeffs_;
}

TateSeries TateSeries::derivative(int var) const {
  if (var < 0 || var >= nvars()) throw InputError("variable index out of range");
  const int cap = std::max(degree() - 1, 0);
  TateSeries out(p_, n_, nvars(), cap);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    const int e = basis_->exponent(i)[static_cast<std::size_t>(var)];
    if (e == 0) continue;
    Monomial m = basis_->exponent(i);
    --m[static_cast<std::size_t>(var)];
    const std::size_t k = out.basis_->index(m);
    if (k != MonomialBasis::npos) out.coeffs_[k] += coeffs_[i] * e;
  }
  out.reduce_all();
  return out;
}

TateSeries TateSeries::truncate(int degree) const {
  if (degree > this->degree()) throw InputError("truncation cannot raise the degree cap");
  TateSeries out(p_, n_, nvars(), degree);
  for (std::size_t i = 0; i < out.coeffs_.size(); ++i) out.coeffs_[i] = coeffs_[i];
  return out;
}

TateSeries TateSeries::with_precision(int n) const {
  if (n > n_) throw InputError("cannot raise precision");
  TateSeries out(*this);
  out.n_ = n;
  out.reduce_all();
  return out;
}

TateSeries TateSeries::divide_by_p_power(int k) const {
  if (k == 0) return *this;
  if (n_ - k < 1) throw PrecisionError("precision exhausted");
  TateSeries out(p_, n_ - k, nvars(), degree());
  const mpz_class& pk = prime_power(p_, k);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    if (mpz_divisible_p(coeffs_[i].get_mpz_t(), pk.get_mpz_t()) == 0) {
      throw InputError("series coefficient not divisible by p^" + std::to_string(k));
    }
    out.coeffs_[i] = coeffs_[i] / pk;
  }
  out.reduce_all();
  return out;
}

TateSeries TateSeries::homogeneous_part(int degree) const {
  TateSeries out(p_, n_, nvars(), this->degree());
  if (degree < 0 || degree > this->degree()) return out;
  for (std::size_t i = basis_->degree_start(degree); i < basis_->degree_start(degree + 1); ++i) out.coeffs_[i] = coeffs_[i];
  return out;
}

PadicInt TateSeries::evaluate(const std::vector<PadicInt>& x) const {
  if (static_cast<int>(x.size()) != nvars()) throw InputError("evaluation point has the wrong dimension");
  int prec = n_;
  for (const auto& xi : x) {
    if (xi.prime() != p_) throw InputError("mismatched primes");
    prec = std::min(prec, xi.precision());
  }
  const mpz_class& mod = prime_power(p_, prec);
  // Monomial values in graded order from their lower neighbours.
  std::vector<mpz_class> val(coeffs_.size());
  val[0] = 1;
  mpz_class total = coeffs_[0];
  for (std::size_t i = 1; i < coeffs_.size(); ++i) {
    int v = 0;
    while (basis_->exponent(i)[static_cast<std::size_t>(v)] == 0) ++v;
    val[i] = val[basis_->lower(i, v)] * x[static_cast<std::size_t>(v)].residue();
    mpz_fdiv_r(val[i].get_mpz_t(), val[i].get_mpz_t(), mod.get_mpz_t());
    mpz_addmul(total.get_mpz_t(), coeffs_[i].get_mpz_t(), val[i].get_mpz_t());
  }
  return PadicInt(p_, prec, total);
}

Polynomial TateSeries::to_polynomial() const {
  Polynomial out(nvars());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] != 0) out.add_term(basis_->exponent(i), mpq_class(PadicInt(p_, n_, coeffs_[i]).signed_residue()));
  }
  return out;
}

std::string TateSeries::to_string() const {
  return to_polynomial().to_string() + " + O(" + std::to_string(p_) + "^" + std::to_string(n_) + ", deg>" +
         std::to_string(degree()) + ")";
}

// ----------------------------------------------------------------- TateMap

TateMap::TateMap(std::vector<TateSeries> components) : comps_(std::move(components)) {
  if (comps_.empty()) throw InputError("a map needs at least one component");
  for (const auto& c : comps_) {
    if (c.prime() != comps_.front().prime() || &c.basis() != &comps_.front().basis()) {
      throw InputError("map components with incompatible caps");
    }
  }
}

TateMap TateMap::identity(std::int64_t p, int precision, int d, int degree) {
  std::vector<TateSeries> comps;
  for (int i = 0; i < d; ++i) comps.push_back(TateSeries::variable(p, precision, d, degree, i));
  return TateMap(std::move(comps));
}

TateMap TateMap::from_polymap(const PolyMap& f, std::int64_t p, int precision, int degree) {
  if (f.ring().kind == Ring::Kind::IntegersMod) throw InputError("a map over Z/m has no Z_p image");
  std::vector<TateSeries> comps;
  for (const auto& c : f.coords()) comps.push_back(TateSeries::from_polynomial(c, p, precision, degree));
  return TateMap(std::move(comps));
}

int TateMap::precision() const {
  int n = comps_.front().precision();
  for (const auto& c : comps_) n = std::min(n, c.precision());
  return n;
}

NormExp TateMap::gauss_norm() const {
  NormExp e;
  for (const auto& c : comps_) e = min_exp(e, c.gauss_norm());
  return e;
}

NormExp TateMap::congruence_level() const {
  if (nvars() != dim()) throw InputError("congruence level needs a self-map");
  return (*this - identity(prime(), precision(), dim(), degree())).gauss_norm();
}

TateMap TateMap::operator-(const TateMap& o) const {
  if (o.dim() != dim()) throw InputError("maps of different dimensions");
  std::vector<TateSeries> out;
  for (int i = 0; i < dim(); ++i) out.push_back(comps_[static_cast<std::size_t>(i)] - o[i]);
  return TateMap(std::move(out));
}

TateMap TateMap::operator+(const TateMap& o) const {
  if (o.dim() != dim()) throw InputError("maps of different dimensions");
  std::vector<TateSeries> out;
  for (int i = 0; i < dim(); ++i) out.push_back(comps_[static_cast<std::size_t>(i)] + o[i]);
  return TateMap(std::move(out));
}

TateMap TateMap::truncate(int degree) const {
  std::vector<TateSeries> out;
  for (const auto& c : comps_) out.push_back(c.truncate(degree));
  return TateMap(std::move(out));
}

TateMap TateMap::with_precision(int n) const {
  std::vector<TateSeries> out;
  for (const auto& c : comps_) out.push_back(c.with_precision(n));
  return TateMap(std::move(out));
}

std::vector<PadicInt> TateMap::evaluate(const std::vector<PadicInt>& x) const {
  std::vector<PadicInt> out;
  for (const auto& c : comps_) out.push_back(c.evaluate(x));
  return out;
}

std::vector<Polynomial> TateMap::to_polynomials() const {
  std::vector<Polynomial> out;
  for (const auto& c : comps_) out.push_back(c.to_polynomial());
  return out;
}

// ------------------------------------------------------------- composition

namespace {

// Products f^m for every monomial m of degree <= max_degree of the outer basis.
std::vector<TateSeries> monomial_images(const MonomialBasis& outer, int max_degree, const TateMap& f) {
  const TateSeries& f0 = f[0];
  const int prec = f.precision();
  bool zero_constant = true;
  for (const auto& c : f.components()) zero_constant = zero_constant && c.constant_term() == 0;
  std::vector<TateSeries> images;
  const std::size_t end = outer.degree_start(max_degree + 1);
  images.reserve(end);
  images.push_back(TateSeries::constant(f0.prime(), prec, f0.nvars(), f0.degree(), 1));
  TateSeries zero(f0.prime(), prec, f0.nvars(), f0.degree());
  for (std::size_t i = 1; i < end; ++i) {
    if (zero_constant && outer.degree_of(i) > f0.degree()) {
      images.push_back(zero);
      continue;
    }
    int v = 0;
    while (outer.exponent(i)[static_cast<std::size_t>(v)] == 0) ++v;
    images.push_back(images[outer.lower(i, v)] * f[v]);
  }
  return images;
}

int max_nonzero_degree(const TateSeries& g) {
  int deg = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.residue(i) != 0) deg = g.basis().degree_of(i);
  }
  return deg;
}

TateSeries combine(const TateSeries& g, const std::vector<TateSeries>& images, int prec) {
  const TateSeries& proto = images.front();
  TateSeries out(proto.prime(), prec, proto.nvars(), proto.degree());
  std::vector<mpz_class> acc(proto.size());
  for (std::size_t i = 0; i < g.size() && i < images.size(); ++i) {
    if (g.residue(i) == 0) continue;
    const auto& img = images[i].residues();
    for (std::size_t k = 0; k < acc.size(); ++k) {
      if (img[k] != 0) mpz_addmul(acc[k].get_mpz_t(), g.residue(i).get_mpz_t(), img[k].get_mpz_t());
    }
  }
  for (std::size_t k = 0; k < acc.size(); ++k) {
    if (acc[k] != 0) out.set_residue(k, acc[k]);
  }
  return out;
}

void check_composable(const TateSeries& g, const TateMap& f) {
  if (g.nvars() != f.dim()) throw InputError("outer series variable count differs from inner map dimension");
  if (g.prime() != f.prime()) throw InputError("mismatched primes");
}

}  // namespace

TateSeries compose(const TateSeries& g, const TateMap& f) {
  check_composable(g, f);
  auto images = monomial_images(g.basis(), max_nonzero_degree(g), f);
  return combine(g, images, std::min(g.precision(), f.precision()));
}

TateMap compose(const TateMap& g, const TateMap& f) {
  int deg = 0;
  for (const auto& c : g.components()) {
    check_composable(c, f);
    deg = std::max(deg, max_nonzero_degree(c));
  }
  auto images = monomial_images(g[0].basis(), deg, f);
  std::vector<TateSeries> out;
  for (const auto& c : g.components()) out.push_back(combine(c, images, std::min(c.precision(), f.precision())));
  return TateMap(std::move(out));
}

TateMap iterate(const TateMap& f, std::uint64_t k) {
  TateMap out = TateMap::identity(f.prime(), f.precision(), f.dim(), f.degree());
  for (std::uint64_t i = 0; i < k; ++i) out = compose(f, out);
  return out;
}

NormExp gauss_norm(const Polynomial& f, std::int64_t p) {
  NormExp e;
  for (const auto& [m, c] : f.terms()) e = min_exp(e, vp(c, p));
  return e;
}

// ---------------------------------------------------------- local inverses

namespace {

NormExp map_norm(const std::vector<Polynomial>& comps, std::int64_t p) {
  NormExp e;
  for (const auto& c : comps) e = min_exp(e, gauss_norm(c, p));
  return e;
}

NormExp matrix_norm(const std::vector<std::vector<mpq_class>>& a, std::int64_t p) {
  NormExp e;
  for (const auto& row : a) {
    for (const auto& v : row) {
      if (v != 0) e = min_exp(e, vp(v, p));
    }
  }
  return e;
}

// Smallest k >= 0 with e + k(n-1) >= threshold, for the degree-n part of norm exponent e.
int rescale_needed(NormExp e, int n, int threshold) {
  if (!e || n < 2) return 0;
  const int gap = threshold - *e;
  if (gap <= 0) return 0;
  return (gap + n - 2) / (n - 1);
}

}  // namespace

LocalInverse invert_local(const PolyMap& phi, std::int64_t p, int degree_cap) {
  if (phi.ring().kind == Ring::Kind::IntegersMod) throw InputError("invert_local works over Q or Z");
  if (degree_cap < 1) throw InputError("degree cap must be at least 1");
  const int d = phi.dim();
  for (const auto& c : phi.constant_part()) {
    if (c != 0) throw InputError("invert_local needs Phi(0) = 0");
  }
  const auto a = phi.linear_part();
  if (determinant(a) == 0) throw InputError("not locally invertible");
  const auto ainv = inverse_matrix(a);
  const Ring q = Ring::rationals();
  PolyMap phiq = phi.with_ring(q);

  std::vector<Polynomial> higher;
  for (const auto& c : phiq.coords()) {
    Polynomial h(d);
    for (const auto& [m, v] : c.terms()) {
      if (total_degree(m) >= 2) h.add_term(m, v);
    }
    higher.push_back(std::move(h));
  }
  auto apply_ainv = [&](const std::vector<Polynomial>& v) {
    std::vector<Polynomial> out;
    for (int i = 0; i < d; ++i) {
      Polynomial f(d);
      for (int j = 0; j < d; ++j) f += v[static_cast<std::size_t>(j)] * ainv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      out.push_back(f.truncate(degree_cap));
    }
    return out;
  };
  std::vector<Polynomial> x;
  for (int i = 0; i < d; ++i) x.push_back(Polynomial::variable(d, i));
  std::vector<Polynomial> psi = apply_ainv(x);
  for (int pass = 2; pass <= degree_cap; ++pass) {
    std::vector<Polynomial> rhs;
    for (int i = 0; i < d; ++i) rhs.push_back(x[static_cast<std::size_t>(i)] - higher[static_cast<std::size_t>(i)].substitute(psi, degree_cap));
    psi = apply_ainv(rhs);
  }
  LocalInverse out;
  out.inverse = PolyMap(q, psi);
  out.degree_cap = degree_cap;
  if (!phiq.compose_truncated(out.inverse, degree_cap).truncate(degree_cap).is_identity()) {
    throw CertificateError("local inverse failed the Phi o Psi = id check");
  }
  const NormExp ainv_exp = matrix_norm(ainv, p);
  const NormExp a_exp = matrix_norm(a, p);
  out.linear_inverse_exp = ainv_exp.value_or(0);
  out.norm_bound_holds = true;
  int k = 0;
  for (int n = 1; n <= degree_cap; ++n) {
    std::vector<Polynomial> part_psi;
    std::vector<Polynomial> part_phi;
    for (const auto& c : psi) part_psi.push_back(c.homogeneous_part(n));
    for (const auto& c : phiq.coords()) part_phi.push_back(c.homogeneous_part(n));
    const NormExp e_psi = map_norm(part_psi, p);
    out.homogeneous_norms.push_back(e_psi);
    // ||Psi_n|| <= max(1, ||A^{-1}||^n)  <=>  e_psi >= min(0, n * e(A^{-1})).
    if (e_psi && *e_psi < std::min(0, n * out.linear_inverse_exp)) out.norm_bound_holds = false;
    k = std::max(k, rescale_needed(e_psi, n, std::min(0, out.linear_inverse_exp)));
    k = std::max(k, rescale_needed(map_norm(part_phi, p), n, std::min(0, a_exp.value_or(0))));
  }
  out.k = k;
  out.rescaled_integral = true;
  for (int n = 1; n <= degree_cap; ++n) {
    const NormExp e = out.homogeneous_norms[static_cast<std::size_t>(n - 1)];
    if (e && *e + k * (n - 1) < 0) out.rescaled_integral = false;
  }
  return out;
}

namespace {

// Inverse modulo p^N of a matrix whose determinant is a unit.
std::vector<std::vector<mpz_class>> inverse_mod(std::vector<std::vector<mpz_class>> m, std::int64_t p, int n) {
  const std::size_t d = m.size();
  const mpz_class& mod = prime_power(p, n);
  std::vector<std::vector<mpz_class>> inv(d, std::vector<mpz_class>(d, 0));
  for (std::size_t i = 0; i < d; ++i) inv[i][i] = 1;
  const mpz_class prime(static_cast<long>(p));
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    while (piv < d && mpz_divisible_p(m[piv][c].get_mpz_t(), prime.get_mpz_t()) != 0) ++piv;
    if (piv == d) throw InputError("not locally invertible over Z_p (linear part is not in GL_d(Z_p))");
    std::swap(m[piv], m[c]);
    std::swap(inv[piv], inv[c]);
    mpz_class u;
    mpz_invert(u.get_mpz_t(), m[c][c].get_mpz_t(), mod.get_mpz_t());
    for (std::size_t k = 0; k < d; ++k) {
      m[c][k] = m[c][k] * u % mod;
      inv[c][k] = inv[c][k] * u % mod;
    }
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c || m[r][c] == 0) continue;
      const mpz_class f = m[r][c];
      for (std::size_t k = 0; k < d; ++k) {
        m[r][k] -= f * m[c][k];
        mpz_fdiv_r(m[r][k].get_mpz_t(), m[r][k].get_mpz_t(), mod.get_mpz_t());
        inv[r][k] -= f * inv[c][k];
        mpz_fdiv_r(inv[r][k].get_mpz_t(), inv[r][k].get_mpz_t(), mod.get_mpz_t());
      }
    }
  }
  for (auto& row : inv) {
    for (auto& v : row) mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), mod.get_mpz_t());
  }
  return inv;
}

std::vector<TateSeries> apply_matrix(const std::vector<std::vector<mpz_class>>& m, const std::vector<TateSeries>& v) {
  std::vector<TateSeries> out;
  for (const auto& row : m) {
    TateSeries acc(v.front().prime(), v.front().precision(), v.front().nvars(), v.front().degree());
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] != 0) acc += v[j].scaled(row[j]);
    }
    out.push_back(std::move(acc));
  }
  return out;
}

}  // namespace

TateMap invert_local(const TateMap& phi) {
  const int d = phi.dim();
  if (phi.nvars() != d) throw InputError("invert_local needs a self-map");
  for (const auto& c : phi.components()) {
    if (c.constant_term() != 0) throw InputError("invert_local needs Phi(0) = 0");
  }
  const std::int64_t p = phi.prime();
  const int n = phi.precision();
  const int cap = phi.degree();
  std::vector<std::vector<mpz_class>> a(static_cast<std::size_t>(d), std::vector<mpz_class>(static_cast<std::size_t>(d)));
  TateMap higher = phi;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Monomial m(static_cast<std::size_t>(d), 0);
      m[static_cast<std::size_t>(j)] = 1;
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = phi[i].coefficient(m).residue();
      if (cap >= 1) higher[i].set_coefficient(m, 0);
    }
  }
  const auto ainv = inverse_mod(a, p, n);
  const TateMap id = TateMap::identity(p, n, d, cap);
  TateMap psi(apply_matrix(ainv, id.components()));
  for (int pass = 2; pass <= cap; ++pass) psi = TateMap(apply_matrix(ainv, (id - compose(higher, psi)).components()));
  if (!compose(phi, psi).with_precision(n).is_identity()) throw CertificateError("local inverse failed the Phi o Psi = id check");
  return psi;
}

TateMap invert_diffeo(const TateMap& f) {
  const NormExp c = f.congruence_level();
  const std::int64_t p = f.prime();
  const int n = f.precision();
  const TateMap id = TateMap::identity(p, n, f.dim(), f.degree());
  if (!c) return id;
  if (*c < flow_threshold(p)) throw InputError("below Bell-Poonen threshold: congruence level " + std::to_string(*c));
  const TateMap h = f - id;
  TateMap g = id;
  // Contraction gains at least c digits per pass.
  const int max_passes = n / *c + f.degree() + 3;
  bool converged = false;
  for (int pass = 0; pass < max_passes; ++pass) {
    TateMap next = id - compose(h, g);
    if (next == g) {
      converged = true;
      break;
    }
    g = std::move(next);
  }
  if (!converged) throw PrecisionError("inverse iteration did not converge");
  if (!compose(f, g).is_identity() || !compose(g, f).is_identity()) {
    throw CertificateError("inverse verification failed at the working window");
  }
  return g;
}

CongruencePowerReport congruence_power(const TateMap& f, int guard) {
  const NormExp c0 = f.congruence_level();
  if (c0 && *c0 < 1) throw InputError("congruence_power needs f = id mod p");
  const std::int64_t p = f.prime();
  CongruencePowerReport report;
  report.all_hold = true;
  TateMap current = f;
  for (int c = 1; c <= f.precision() - guard; ++c) {
    TateMap next = current;
    for (std::int64_t i = 1; i < p; ++i) next = compose(current, next);
    current = std::move(next);
    const NormExp level = current.congruence_level();
    report.levels.push_back(level);
    if (level && *level < c) report.all_hold = false;
  }
  return report;
}

// -------------------------------------------------------- zeros on Z_p

int strassman_bound(const TateSeries& f, std::optional<int> tail_valuation) {
  if (f.nvars() != 1) throw InputError("strassman bound needs a univariate series");
  const NormExp e = f.gauss_norm();
  if (!e) throw InputError("zero function");
  if (tail_valuation && *tail_valuation <= *e) {
    throw PrecisionError("the asserted tail may reach the maximal coefficient norm; bound not certified");
  }
  int bound = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.residue(i) != 0 && vp(f.residue(i), f.prime()) == *e) bound = static_cast<int>(i);
  }
  return bound;
}

namespace {

struct HenselSearch {
  std::vector<mpz_class> a;
  std::int64_t p;
  int depth;
  RootCount out;

  // Coefficients of f(r + p^j y) in y.
  std::vector<mpz_class> shifted(const mpz_class& r, int j) const {
    const std::size_t n = a.size();
    std::vector<mpz_class> b(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      mpz_class s = 0;
      mpz_class rpow = 1;
      for (std::size_t k = i; k < n; ++k) {
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(i));
        s += binom * a[k] * rpow;
        rpow *= r;
      }
      b[i] = s * prime_power(p, j * static_cast<int>(i));
    }
    return b;
  }

  // Multiplicity of s as a root of g over F_p.
  static int multiplicity(std::vector<std::int64_t> g, std::int64_t s, std::int64_t p) {
    int mult = 0;
    for (;;) {
      while (!g.empty() && g.back() == 0) g.pop_back();
      if (g.empty()) return mult;
      // Synthetic division by (y - s).
      std::vector<std::int64_t> q(g.size() > 1 ? g.size() - 1 : 0, 0);
      std::int64_t acc = 0;
      for (std::size_t k = g.size(); k-- > 0;) {
        acc = (acc * s + g[k]) % p;
        if (k > 0) q[k - 1] = acc;
      }
      if (acc != 0) return mult;
      ++mult;
      g = std::move(q);
    }
  }

  void visit(const mpz_class& r, int j) {
    auto b = shifted(r, j);
    int w = -1;
    for (const auto& c : b) {
      if (c != 0) {
        const int v = vp(c, p);
        w = (w < 0) ? v : std::min(w, v);
      }
    }
    if (w < 0) throw InputError("zero function");
    std::vector<std::int64_t> g;
    const mpz_class prime(static_cast<long>(p));
    for (const auto& c : b) {
      mpz_class q = c / prime_power(p, w);
      mpz_fdiv_r(q.get_mpz_t(), q.get_mpz_t(), prime.get_mpz_t());
      g.push_back(q.get_si());
    }
    for (std::int64_t s = 0; s < p; ++s) {
      const int mult = multiplicity(g, s, p);
      if (mult == 0) continue;
      const mpz_class next = r + prime_power(p, j) * s;
      if (mult == 1) {
        ++out.simple_roots;
        out.approximations.push_back(next);
        out.approximation_levels.push_back(j + 1);
      } else if (j + 1 >= depth) {
        ++out.unresolved_clusters;
        out.unresolved_multiplicity += mult;
      } else {
        visit(next, j + 1);
      }
    }
  }
};

}  // namespace

RootCount hensel_roots(const std::vector<mpz_class>& coeffs, std::int64_t p, int depth) {
  HenselSearch search{coeffs, p, depth, {}};
  while (!search.a.empty() && search.a.back() == 0) search.a.pop_back();
  if (search.a.empty()) throw InputError("zero function");
  search.visit(0, 0);
  return search.out;
}

}  // namespace padicaut
