#include "padicaut/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <optional>
#include <sstream>
#include <utility>

#include "padicaut/error.hpp"

namespace padicaut {

int total_degree(const Monomial& m) { return std::accumulate(m.begin(), m.end(), 0); }

bool GradedOrder::operator()(const Monomial& a, const Monomial& b) const {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  return a < b;
}

// -------------------------------------------------------------------- Ring

Ring Ring::integers_mod(const mpz_class& m) {
  if (m < 2) throw InputError("modulus must be at least 2");
  return {Kind::IntegersMod, m};
}

std::string Ring::tag() const {
  switch (kind) {
    case Kind::Rationals:
      return "Q";
    case Kind::Integers:
      return "Z";
    case Kind::IntegersMod:
      return "Z/" + modulus.get_str();
  }
  return "Q";
}

Ring Ring::parse(const std::string& tag) {
  if (tag == "Q") return rationals();
  if (tag == "Z") return integers();
  if (tag.size() > 2 && tag.compare(0, 2, "Z/") == 0) {
    mpz_class m;
    if (m.set_str(tag.substr(2), 10) != 0) throw InputError("bad ring tag '" + tag + "'");
    return integers_mod(m);
  }
  throw InputError("bad ring tag '" + tag + "'");
}

mpq_class Ring::normalize(const mpq_class& q) const {
  switch (kind) {
    case Kind::Rationals:
      return q;
    case Kind::Integers:
      if (q.get_den() != 1) throw InputError("coefficient " + q.get_str() + " is not an integer");
      return q;
    case Kind::IntegersMod: {
      mpz_class inv;
      if (mpz_invert(inv.get_mpz_t(), q.get_den().get_mpz_t(), modulus.get_mpz_t()) == 0) {
        throw InputError("coefficient " + q.get_str() + " has a denominator not invertible modulo " + modulus.get_str());
      }
      mpz_class r = q.get_num() * inv;
      mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), modulus.get_mpz_t());
      return mpq_class(r);
    }
  }
  return q;
}

// -------------------------------------------------------------- Polynomial

Polynomial::Polynomial(int nvars) : nvars_(nvars) {
  if (nvars < 0) throw InputError("negative variable count");
}

Polynomial Polynomial::constant(int nvars, const mpq_class& c) {
  Polynomial out(nvars);
  out.add_term(Monomial(static_cast<std::size_t>(nvars), 0), c);
  return out;
}

Polynomial Polynomial::variable(int nvars, int index) {
  if (index < 0 || index >= nvars) throw InputError("variable index out of range");
  Monomial m(static_cast<std::size_t>(nvars), 0);
  m[static_cast<std::size_t>(index)] = 1;
  return monomial(m, 1);
}

Polynomial Polynomial::monomial(const Monomial& m, const mpq_class& c) {
  Polynomial out(static_cast<int>(m.size()));
  out.add_term(m, c);
  return out;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
}

int Polynomial::degree() const {
  if (terms_.empty()) return -1;
  return total_degree(terms_.rbegin()->first);
}

mpq_class Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

mpq_class Polynomial::constant_term() const { return coefficient(Monomial(static_cast<std::size_t>(nvars_), 0)); }

void Polynomial::add_term(const Monomial& m, const mpq_class& c) {
  if (static_cast<int>(m.size()) != nvars_) throw InputError("monomial has the wrong number of variables");
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator-() const {
  Polynomial out(*this);
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.nvars_ != nvars_) throw InputError("polynomials in different variable sets");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.nvars_ != nvars_) throw InputError("polynomials in different variable sets");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.nvars_ != b.nvars_) throw InputError("polynomials in different variable sets");
  Polynomial out(a.nvars_);
  Monomial m(static_cast<std::size_t>(a.nvars_));
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) { return *this = *this * o; }

Polynomial& Polynomial::operator*=(const mpq_class& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

bool operator==(const Polynomial& a, const Polynomial& b) { return a.nvars_ == b.nvars_ && a.terms_ == b.terms_; }

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial result = constant(nvars_, 1);
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1U) result *= base;
    e >>= 1U;
    if (e > 0) base *= base;
  }
  return result;
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var >= nvars_) throw InputError("variable index out of range");
  Polynomial out(nvars_);
  for (const auto& [m, c] : terms_) {
    const int e = m[static_cast<std::size_t>(var)];
    if (e == 0) continue;
    Monomial n = m;
    --n[static_cast<std::size_t>(var)];
    out.add_term(n, c * e);
  }
  return out;
}

Polynomial Polynomial::truncate(int cap) const {
  Polynomial out(nvars_);
  for (const auto& [m, c] : terms_) {
    if (total_degree(m) <= cap) out.terms_.emplace(m, c);
  }
  return out;
}

Polynomial Polynomial::homogeneous_part(int degree) const {
  Polynomial out(nvars_);
  for (const auto& [m, c] : terms_) {
    if (total_degree(m) == degree) out.terms_.emplace(m, c);
  }
  return out;
}

Polynomial Polynomial::substitute(const std::vector<Polynomial>& values, int cap) const {
  if (static_cast<int>(values.size()) != nvars_) throw InputError("substitution needs one value per variable");
  const int target = values.empty() ? 0 : values.front().nvars();
  for (const auto& v : values) {
    if (v.nvars() != target) throw InputError("substituted polynomials in different variable sets");
  }
  auto cut = [cap](Polynomial q) { return cap >= 0 ? q.truncate(cap) : q; };
  // powers[i][e] = values[i]^e, extended lazily.
  std::vector<std::vector<Polynomial>> powers(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) powers[i].push_back(constant(target, 1));
  Polynomial out(target);
  for (const auto& [m, c] : terms_) {
    Polynomial term = constant(target, c);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto e = static_cast<std::size_t>(m[i]);
      while (powers[i].size() <= e) powers[i].push_back(cut(powers[i].back() * values[i]));
      if (e > 0) term = cut(term * powers[i][e]);
    }
    out += term;
  }
  return out;
}

mpq_class Polynomial::evaluate(const std::vector<mpq_class>& point) const {
  if (static_cast<int>(point.size()) != nvars_) throw InputError("evaluation point has the wrong dimension");
  mpq_class total = 0;
  for (const auto& [m, c] : terms_) {
    mpq_class term = c;
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (int k = 0; k < m[i]; ++k) term *= point[i];
    }
    total += term;
  }
  return total;
}

Polynomial Polynomial::normalized(const Ring& ring) const {
  Polynomial out(nvars_);
  for (const auto& [m, c] : terms_) out.add_term(m, ring.normalize(c));
  return out;
}

namespace {

std::string monomial_text(const Monomial& m) {
  std::string out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += "x" + std::to_string(i + 1);
    if (m[i] > 1) out += "^" + std::to_string(m[i]);
  }
  return out;
}

}  // namespace

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const Monomial& m = it->first;
    mpq_class c = it->second;
    const bool negative = c < 0;
    if (negative) c = -c;
    std::string body;
    const std::string mono = monomial_text(m);
    if (mono.empty()) {
      body = c.get_str();
    } else if (c == 1) {
      body = mono;
    } else {
      body = c.get_str() + "*" + mono;
    }
    if (first) {
      out = negative ? "-" + body : body;
      first = false;
    } else {
      out += negative ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

// ------------------------------------------------------------ matrices

Polynomial determinant(const std::vector<std::vector<Polynomial>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return Polynomial::constant(0, 1);
  const int nv = m[0][0].nvars();
  if (n == 1) return m[0][0];
  Polynomial total(nv);
  for (std::size_t j = 0; j < n; ++j) {
    if (m[0][j].is_zero()) continue;
    std::vector<std::vector<Polynomial>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Polynomial> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != j) row.push_back(m[i][k]);
      }
      minor.push_back(std::move(row));
    }
    Polynomial term = m[0][j] * determinant(minor);
    if (j % 2 == 1) term = -term;
    total += term;
  }
  return total;
}

mpq_class determinant(std::vector<std::vector<mpq_class>> m) {
  const std::size_t n = m.size();
  mpq_class det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      mpq_class f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

std::vector<std::vector<mpq_class>> inverse_matrix(const std::vector<std::vector<mpq_class>>& a) {
  const std::size_t n = a.size();
  std::vector<std::vector<mpq_class>> m = a;
  std::vector<std::vector<mpq_class>> inv(n, std::vector<mpq_class>(n, 0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) throw InputError("not locally invertible");
    std::swap(m[piv], m[c]);
    std::swap(inv[piv], inv[c]);
    const mpq_class d = m[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      m[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      const mpq_class f = m[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        m[r][k] -= f * m[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

// ----------------------------------------------------------------- PolyMap

PolyMap::PolyMap(Ring ring, std::vector<Polynomial> coords) : ring_(std::move(ring)), coords_(std::move(coords)) {
  const int d = dim();
  for (auto& c : coords_) {
    if (c.nvars() != d) throw InputError("map coordinates must be polynomials in d variables");
    c = c.normalized(ring_);
  }
}

PolyMap PolyMap::identity(int d, Ring ring) {
  std::vector<Polynomial> coords;
  for (int i = 0; i < d; ++i) coords.push_back(Polynomial::variable(d, i));
  return PolyMap(std::move(ring), std::move(coords));
}

PolyMap PolyMap::affine(const std::vector<std::vector<mpq_class>>& a, const std::vector<mpq_class>& b, Ring ring) {
  const int d = static_cast<int>(a.size());
  std::vector<Polynomial> coords;
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(a[static_cast<std::size_t>(i)].size()) != d) throw InputError("matrix must be square");
    Polynomial f = Polynomial::constant(d, b.empty() ? mpq_class(0) : b.at(static_cast<std::size_t>(i)));
    for (int j = 0; j < d; ++j) {
      f += Polynomial::variable(d, j) * a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    coords.push_back(std::move(f));
  }
  return PolyMap(std::move(ring), std::move(coords));
}

PolyMap PolyMap::linear(const std::vector<std::vector<mpq_class>>& a, Ring ring) { return affine(a, {}, std::move(ring)); }

int PolyMap::degree() const {
  int deg = -1;
  for (const auto& c : coords_) deg = std::max(deg, c.degree());
  return deg;
}

bool PolyMap::is_identity() const { return *this == identity(dim(), ring_); }

PolyMap PolyMap::compose(const PolyMap& inner) const {
  if (inner.dim() != dim()) throw InputError("composition of maps of different dimensions");
  if (inner.ring_ != ring_) throw InputError("composition of maps over different rings");
  std::vector<Polynomial> coords;
  coords.reserve(coords_.size());
  for (const auto& c : coords_) coords.push_back(c.substitute(inner.coords_).normalized(ring_));
  return PolyMap(ring_, std::move(coords));
}

PolyMap PolyMap::compose_truncated(const PolyMap& inner, int cap) const {
  if (inner.dim() != dim()) throw InputError("composition of maps of different dimensions");
  if (inner.ring_ != ring_) throw InputError("composition of maps over different rings");
  std::vector<Polynomial> coords;
  for (const auto& c : coords_) coords.push_back(c.substitute(inner.coords_, cap).normalized(ring_));
  return PolyMap(ring_, std::move(coords));
}

PolyMap PolyMap::power(std::uint64_t k) const {
  PolyMap result = identity(dim(), ring_);
  PolyMap base = *this;
  while (k > 0) {
    if (k & 1U) result = result.compose(base);
    k >>= 1U;
    if (k > 0) base = base.compose(base);
  }
  return result;
}

std::vector<mpq_class> PolyMap::evaluate(const std::vector<mpq_class>& x) const {
  std::vector<mpq_class> out;
  for (const auto& c : coords_) out.push_back(ring_.normalize(c.evaluate(x)));
  return out;
}

std::vector<std::vector<Polynomial>> PolyMap::jacobian() const {
  std::vector<std::vector<Polynomial>> jac;
  for (const auto& c : coords_) {
    std::vector<Polynomial> row;
    for (int j = 0; j < dim(); ++j) row.push_back(c.derivative(j).normalized(ring_));
    jac.push_back(std::move(row));
  }
  return jac;
}

Polynomial PolyMap::jacobian_determinant() const { return determinant(jacobian()).normalized(ring_); }

std::vector<std::vector<mpq_class>> PolyMap::linear_part() const {
  const int d = dim();
  std::vector<std::vector<mpq_class>> a(static_cast<std::size_t>(d), std::vector<mpq_class>(static_cast<std::size_t>(d), 0));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Monomial m(static_cast<std::size_t>(d), 0);
      m[static_cast<std::size_t>(j)] = 1;
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = coords_[static_cast<std::size_t>(i)].coefficient(m);
    }
  }
  return a;
}

std::vector<mpq_class> PolyMap::constant_part() const {
  std::vector<mpq_class> b;
  for (const auto& c : coords_) b.push_back(c.constant_term());
  return b;
}


PolyMap PolyMap::inverse() const {
  const int d = dim();
  if (d == 0) return *this;
  const Polynomial jd = jacobian_determinant();
  if (!jd.is_constant() || jd.is_zero()) throw InputError("non-invertible generator (Jacobian determinant is not a nonzero constant)");
  const int deg = std::max(degree(), 1);
  int bound = 1;
  for (int i = 1; i < d; ++i) bound *= deg;
  // Phi = c + A x + H(x): invert Phi0 = Phi - c by reversion, then precompose with x - c.
  auto a = linear_part();
  std::vector<std::vector<mpq_class>> ainv;
  if (ring_.kind == Ring::Kind::IntegersMod) {
    mpq_class det = ring_.normalize(determinant(a));
    if (det == 0) throw InputError("non-invertible generator");
    ainv = inverse_matrix(a);
    for (auto& row : ainv) {
      for (auto& v : row) v = ring_.normalize(v);
    }
  } else {
    ainv = inverse_matrix(a);
    if (ring_.kind == Ring::Kind::Integers) {
      for (auto& row : ainv) {
        for (auto& v : row) {
          if (v.get_den() != 1) throw InputError("non-invertible generator over Z");
        }
      }
    }
  }
  std::vector<Polynomial> higher;
  for (const auto& c : coords_) {
    Polynomial h(d);
    for (const auto& [m, v] : c.terms()) {
      if (total_degree(m) >= 2) h.add_term(m, v);
    }
    higher.push_back(std::move(h));
  }
  std::vector<Polynomial> psi;
  for (int i = 0; i < d; ++i) psi.push_back(Polynomial::variable(d, i));
  {
    std::vector<Polynomial> lin;
    for (int i = 0; i < d; ++i) {
      Polynomial f(d);
      for (int j = 0; j < d; ++j) f += Polynomial::variable(d, j) * ainv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      lin.push_back(f.normalized(ring_));
    }
    psi = lin;
  }
  // Psi = A^{-1}(x - H(Psi)); each pass fixes one more degree.
  for (int pass = 2; pass <= bound; ++pass) {
    std::vector<Polynomial> rhs;
    for (int i = 0; i < d; ++i) {
      rhs.push_back(Polynomial::variable(d, i) - higher[static_cast<std::size_t>(i)].substitute(psi, bound).normalized(ring_));
    }
    std::vector<Polynomial> next;
    for (int i = 0; i < d; ++i) {
      Polynomial f(d);
      for (int j = 0; j < d; ++j) f += rhs[static_cast<std::size_t>(j)] * ainv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      next.push_back(f.truncate(bound).normalized(ring_));
    }
    psi = std::move(next);
  }
  std::vector<Polynomial> shift;
  auto cpart = constant_part();
  for (int i = 0; i < d; ++i) shift.push_back(Polynomial::variable(d, i) - Polynomial::constant(d, cpart[static_cast<std::size_t>(i)]));
  PolyMap psi0(ring_, psi);
  PolyMap result = psi0.compose(PolyMap(ring_, shift));
  if (!compose(result).is_identity() || !result.compose(*this).is_identity()) {
    throw InputError("non-invertible generator (no polynomial inverse of degree <= " + std::to_string(bound) + ")");
  }
  return result;
}

PolyMap PolyMap::reduce_mod(std::int64_t ell) const {
  const Ring target = Ring::integers_mod(mpz_class(static_cast<long>(ell)));
  std::vector<Polynomial> coords;
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    Polynomial f(dim());
    for (const auto& [m, c] : coords_[i].terms()) {
      if (mpz_divisible_ui_p(c.get_den().get_mpz_t(), static_cast<unsigned long>(ell)) != 0) {
        throw InputError("bad prime " + std::to_string(ell) + ": coefficient " + c.get_str() + " of " +
                         (monomial_text(m).empty() ? std::string("1") : monomial_text(m)) + " in f" + std::to_string(i + 1));
      }
      f.add_term(m, target.normalize(c));
    }
    coords.push_back(std::move(f));
  }
  return PolyMap(target, std::move(coords));
}

PolyMap PolyMap::with_ring(const Ring& ring) const { return PolyMap(ring, coords_); }

PolyMap PolyMap::truncate(int cap) const {
  std::vector<Polynomial> coords;
  for (const auto& c : coords_) coords.push_back(c.truncate(cap));
  return PolyMap(ring_, std::move(coords));
}

std::string PolyMap::to_text() const {
  std::ostringstream out;
  out << "d=" << dim() << "; ring=" << ring_.tag() << "\n";
  for (int i = 0; i < dim(); ++i) out << "f" << (i + 1) << " = " << coords_[static_cast<std::size_t>(i)].to_string() << "\n";
  return out.str();
}

bool operator==(const PolyMap& a, const PolyMap& b) { return a.ring_ == b.ring_ && a.coords_ == b.coords_; }

// ------------------------------------------------------------------ parser

namespace {

class ExprParser {
 public:
  ExprParser(const std::string& text, int nvars) : s_(text), n_(nvars) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("polynomial parse error at column " + std::to_string(pos_ + 1) + ": " + what + " in '" + s_ + "'");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])) != 0) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      if (eat('+')) {
        acc += term();
      } else if (eat('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    for (;;) {
      if (eat('*')) {
        acc *= unary();
      } else if (eat('/')) {
        Polynomial d = unary();
        if (!d.is_constant() || d.is_zero()) fail("division by a non-constant or zero");
        acc *= mpq_class(1) / d.constant_term();
      } else {
        return acc;
      }
    }
  }

  Polynomial unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = atom();
    if (eat('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])) != 0) ++pos_;
      if (start == pos_) fail("exponent must be a nonnegative integer");
      base = base.pow(static_cast<unsigned>(std::stoul(s_.substr(start, pos_ - start))));
    }
    return base;
  }

  Polynomial atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (!eat(')')) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])) != 0) ++pos_;
      return Polynomial::constant(n_, mpq_class(mpz_class(s_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) != 0) {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])) != 0) ++pos_;
      int index = -1;
      if (start != pos_) {
        if (c != 'x') fail("unknown variable");
        index = std::stoi(s_.substr(start, pos_ - start)) - 1;
      } else {
        static const std::string aliases = "xyzw";
        auto k = aliases.find(c);
        if (k == std::string::npos) fail("unknown variable '" + std::string(1, c) + "'");
        index = static_cast<int>(k);
      }
      if (index < 0 || index >= n_) fail("variable out of range for d=" + std::to_string(n_));
      return Polynomial::variable(n_, index);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string s_;
  int n_;
  std::size_t pos_ = 0;
};

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a])) != 0) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])) != 0) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> content_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::pair<int, Ring> parse_header(const std::string& line) {
  int d = -1;
  Ring ring;
  bool have_ring = false;
  std::istringstream in(line);
  std::string field;
  while (std::getline(in, field, ';')) {
    field = trim(field);
    if (field.empty()) continue;
    auto eq = field.find('=');
    if (eq == std::string::npos) throw InputError("bad header field '" + field + "'");
    const std::string key = trim(field.substr(0, eq));
    const std::string value = trim(field.substr(eq + 1));
    if (key == "d") {
      try {
        d = std::stoi(value);
      } catch (const std::exception&) {
        throw InputError("bad dimension '" + value + "'");
      }
    } else if (key == "ring") {
      ring = Ring::parse(value);
      have_ring = true;
    } else {
      throw InputError("unknown header key '" + key + "'");
    }
  }
  if (d < 1) throw InputError("header must give d >= 1");
  if (!have_ring) throw InputError("header must give ring");
  return {d, ring};
}

PolyMap parse_block(const std::vector<std::string>& lines) {
  auto [d, ring] = parse_header(lines.front());
  std::vector<std::optional<Polynomial>> coords(static_cast<std::size_t>(d));
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const std::string& line = lines[k];
    auto eq = line.find('=');
    if (eq == std::string::npos || line[0] != 'f') throw InputError("expected 'f<i> = ...', got '" + line + "'");
    int index = 0;
    try {
      index = std::stoi(trim(line.substr(1, eq - 1)));
    } catch (const std::exception&) {
      throw InputError("bad coordinate label in '" + line + "'");
    }
    if (index < 1 || index > d) throw InputError("coordinate index out of range in '" + line + "'");
    if (coords[static_cast<std::size_t>(index - 1)]) throw InputError("coordinate f" + std::to_string(index) + " given twice");
    coords[static_cast<std::size_t>(index - 1)] = ExprParser(line.substr(eq + 1), d).parse();
  }
  std::vector<Polynomial> out;
  for (int i = 0; i < d; ++i) {
    if (!coords[static_cast<std::size_t>(i)]) throw InputError("missing coordinate f" + std::to_string(i + 1));
    out.push_back(*coords[static_cast<std::size_t>(i)]);
  }
  return PolyMap(ring, std::move(out));
}

}  // namespace

Polynomial parse_polynomial(const std::string& text, int nvars) { return ExprParser(text, nvars).parse(); }

std::vector<PolyMap> parse_polymap_list(const std::string& text) {
  std::vector<PolyMap> maps;
  std::vector<std::string> block;
  for (const auto& line : content_lines(text)) {
    if (line.compare(0, 2, "d=") == 0 || line.compare(0, 2, "d ") == 0) {
      if (!block.empty()) maps.push_back(parse_block(block));
      block.clear();
    } else if (block.empty()) {
      throw InputError("map text must start with a header line 'd=<int>; ring=...'");
    }
    block.push_back(line);
  }
  if (!block.empty()) maps.push_back(parse_block(block));
  return maps;
}

PolyMap parse_polymap(const std::string& text) {
  auto maps = parse_polymap_list(text);
  if (maps.size() != 1) throw InputError("expected exactly one map, found " + std::to_string(maps.size()));
  return maps.front();
}

std::string polymaps_to_text(const std::vector<PolyMap>& maps) {
  std::string out;
  for (const auto& m : maps) out += m.to_text();
  return out;
}

}  // namespace padicaut
