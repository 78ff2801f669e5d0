#include "padicaut/padic_linalg.hpp"

#include <limits>

#include "padicaut/error.hpp"

namespace padicaut {

namespace {

int valuation_capped(const mpz_class& r, std::int64_t p, int n) { return r == 0 ? n : std::min(vp(r, p), n); }

}  // namespace

RankResult padic_rank(const std::vector<std::vector<mpz_class>>& rows, std::int64_t p, const PrecisionPolicy& policy) {
  RankResult out;
  if (rows.empty()) return out;
  const int n = policy.precision;
  const int threshold = policy.zero_threshold();
  const mpz_class& mod = prime_power(p, n);
  const std::size_t ncols = rows.front().size();
  std::vector<std::vector<mpz_class>> a = rows;
  for (auto& row : a) {
    if (row.size() != ncols) throw InputError("rows of different length");
    for (auto& v : row) mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), mod.get_mpz_t());
  }
  std::vector<bool> row_used(a.size(), false), col_used(ncols, false);
  for (;;) {
    int best = std::numeric_limits<int>::max();
    std::size_t br = 0, bc = 0;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (row_used[r]) continue;
      for (std::size_t c = 0; c < ncols; ++c) {
        if (col_used[c] || a[r][c] == 0) continue;
        const int v = valuation_capped(a[r][c], p, n);
        if (v < best) {
          best = v;
          br = r;
          bc = c;
        }
      }
    }
    if (best >= threshold) break;
    if (best >= threshold - policy.guard) out.precision_warning = true;
    row_used[br] = col_used[bc] = true;
    out.independent.push_back(br);
    out.pivot_columns.push_back(bc);
    out.pivot_valuations.push_back(best);
    mpz_class unit = a[br][bc] / prime_power(p, best);
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), unit.get_mpz_t(), mod.get_mpz_t());
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (row_used[r] || a[r][bc] == 0) continue;
      mpz_class factor = a[r][bc] / prime_power(p, best) * inv;
      mpz_fdiv_r(factor.get_mpz_t(), factor.get_mpz_t(), mod.get_mpz_t());
      for (std::size_t c = 0; c < ncols; ++c) {
        if (a[br][c] == 0) continue;
        a[r][c] -= factor * a[br][c];
        mpz_fdiv_r(a[r][c].get_mpz_t(), a[r][c].get_mpz_t(), mod.get_mpz_t());
      }
    }
  }
  out.rank = static_cast<int>(out.independent.size());
  return out;
}

Expression express_in_basis(const std::vector<std::vector<mpz_class>>& basis, const std::vector<mpz_class>& target,
                            std::int64_t p, const PrecisionPolicy& policy) {
  const int n = policy.precision;
  Expression out;
  const std::size_t k = basis.size();
  if (k == 0) {
    NormExp e;
    for (const auto& v : target) {
      mpz_class r = v % prime_power(p, n);
      if (r != 0) e = min_exp(e, vp(r, p));
    }
    out.residual = e;
    out.in_span = !e || *e >= policy.zero_threshold();
    return out;
  }
  const RankResult rank = padic_rank(basis, p, policy);
  if (rank.rank != static_cast<int>(k)) throw PrecisionError("basis rows are not independent at this precision");

  // Square system on the pivot columns: sum_i c_i basis[i][col_j] = target[col_j].
  std::vector<std::vector<PadicNumber>> m(k);
  std::vector<PadicNumber> rhs;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t col = rank.pivot_columns[j];
    for (std::size_t i = 0; i < k; ++i) {
      m[j].push_back(PadicNumber::from_int(PadicInt(p, n, basis[i][col])));
    }
    rhs.push_back(PadicNumber::from_int(PadicInt(p, n, target[col])));
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = k;
    int best = std::numeric_limits<int>::max();
    for (std::size_t r = c; r < k; ++r) {
      if (!m[r][c].is_zero() && m[r][c].valuation() < best) {
        best = m[r][c].valuation();
        piv = r;
      }
    }
    if (piv == k) throw PrecisionError("singular pivot system");
    std::swap(m[c], m[piv]);
    std::swap(rhs[c], rhs[piv]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c || m[r][c].is_zero()) continue;
      const PadicNumber f = m[r][c] / m[c][c];
      for (std::size_t cc = c; cc < k; ++cc) m[r][cc] = m[r][cc] - f * m[c][cc];
      rhs[r] = rhs[r] - f * rhs[c];
    }
  }
  for (std::size_t c = 0; c < k; ++c) out.coefficients.push_back(rhs[c] / m[c][c]);

  // Residual on every column, in Q_p with the denominators cleared.
  int shift = 0;
  for (const auto& c : out.coefficients) {
    if (!c.is_zero()) shift = std::max(shift, -c.valuation());
  }
  const int work = n + shift;
  NormExp res;
  for (std::size_t col = 0; col < target.size(); ++col) {
    mpz_class acc = target[col] * prime_power(p, shift);
    for (std::size_t i = 0; i < k; ++i) {
      const PadicNumber& c = out.coefficients[i];
      if (c.is_zero()) continue;
      acc -= basis[i][col] * c.unit() * prime_power(p, c.valuation() + shift);
    }
    mpz_fdiv_r(acc.get_mpz_t(), acc.get_mpz_t(), prime_power(p, work).get_mpz_t());
    if (acc != 0) res = min_exp(res, vp(acc, p) - shift);
  }
  out.residual = res;
  int coeff_loss = 0;
  for (const auto& c : out.coefficients) {
    if (!c.is_zero()) coeff_loss = std::max(coeff_loss, n - c.abs_precision());
  }
  out.in_span = !res || *res >= policy.zero_threshold() - coeff_loss;
  return out;
}

}  // namespace padicaut
