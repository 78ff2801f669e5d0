#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "padicaut/padic.hpp"

namespace padicaut {

/// Windowed linear algebra over Q_p on residue vectors modulo p^N.
/// Entries with valuation >= N - guard count as zero.
struct RankResult {
  int rank = 0;
  std::vector<std::size_t> independent;  // input rows spanning the row space, in pivot order
  std::vector<std::size_t> pivot_columns;
  std::vector<int> pivot_valuations;
  bool precision_warning = false;  // a pivot came within guard digits of the threshold
};

RankResult padic_rank(const std::vector<std::vector<mpz_class>>& rows, std::int64_t p, const PrecisionPolicy& policy);

struct Expression {
  std::vector<PadicNumber> coefficients;
  NormExp residual;  // norm exponent of target - sum c_i basis_i
  bool in_span = false;
};

/// Coefficients of target in the span of independent basis rows, solved on
/// the pivot columns, with the residual checked against the zero threshold.
Expression express_in_basis(const std::vector<std::vector<mpz_class>>& basis, const std::vector<mpz_class>& target,
                            std::int64_t p, const PrecisionPolicy& policy);

}  // namespace padicaut
