#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "padicaut/padic.hpp"
#include "padicaut/padic_linalg.hpp"
#include "padicaut/polynomial.hpp"
#include "padicaut/tate.hpp"

namespace padicaut {

/// Tate-analytic vector field sum_i u_i d/dx_i.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::vector<TateSeries> components);
  static VectorField from_polynomials(const std::vector<Polynomial>& u, std::int64_t p, int precision, int degree);
  static VectorField zero(std::int64_t p, int precision, int d, int degree);

  int dim() const { return static_cast<int>(u_.size()); }
  std::int64_t prime() const { return u_.front().prime(); }
  int precision() const;
  int degree() const { return u_.front().degree(); }
  const std::vector<TateSeries>& components() const { return u_; }
  const TateSeries& operator[](int i) const { return u_.at(static_cast<std::size_t>(i)); }

  NormExp gauss_norm() const;
  bool is_zero() const { return !gauss_norm().has_value(); }
  VectorField operator+(const VectorField& o) const;
  VectorField operator-(const VectorField& o) const;
  VectorField scaled(const mpz_class& c) const;
  VectorField truncate(int degree) const;
  VectorField with_precision(int n) const;
  /// Concatenated coefficient residues of all components.
  std::vector<mpz_class> flatten() const;
  std::vector<Polynomial> to_polynomials() const;
  std::string to_string() const;
  friend bool operator==(const VectorField& a, const VectorField& b) { return a.u_ == b.u_; }

 private:
  std::vector<TateSeries> u_;
};

struct FlowOptions {
  int precision = 12;
  int degree = 8;
  int t_degree = 10;
  int guard = 2;
  int term_cap = 0;       // Mahler term cap; 0 chooses 4N + 16
  int verify_iterates = 5;
};

/// Phi(x, t) as Mahler differences and as a t-power view truncated at t^K.
struct TateFlow {
  std::int64_t p = 0;
  int precision = 0;
  int dim = 0;
  int degree = 0;
  int t_degree = 0;
  std::vector<TateMap> mahler;        // Delta^k, k = 0..; empty for integrated fields
  std::vector<NormExp> mahler_norms;
  std::vector<TateMap> power;         // coefficient of t^j, j = 0..K
  int power_precision = 0;            // power coefficients are valid modulo p^power_precision
  NormExp power_tail;                 // smallest norm exponent among omitted t^j, when known
  bool iterates_verified = false;     // Phi(x, n) = f^n(x) for n = 0..verify_iterates
};

TateFlow bell_poonen_flow(const TateMap& f, const FlowOptions& opts = {});
/// Builds the flow of an exact map at raised working precision so that the
/// power view is valid modulo p^N.
TateFlow bell_poonen_flow(const PolyMap& f, std::int64_t p, const FlowOptions& opts = {});

TateMap flow_eval(const TateFlow& phi, const PadicInt& t0);
TateMap flow_eval(const TateFlow& phi, std::int64_t n);

/// Picard iteration for dPhi/dt = X(Phi); residues of X are read as exact.
TateFlow integrate_vector_field(const VectorField& x, const FlowOptions& opts = {});
VectorField flow_vector_field(const TateFlow& phi);

/// Components w_j = sum_i u_i dv_j/dx_i - v_i du_j/dx_i; the cap drops by one.
VectorField lie_bracket(const VectorField& x, const VectorField& y);

struct StraightenResult {
  TateMap phi;                     // phi(z) = p^{-K} A^{-1} (g(p^K z + m) - m)
  TateMap psi;                     // local inverse of phi
  std::vector<std::vector<mpz_class>> a;  // D_0 g
  int k_exp = 0;                   // K
  std::vector<int> l_exp;          // phi pulls p^{L_i} X_i back to d/dz_i
  std::vector<int> complement;     // coordinates spanning with the fields at m
  std::vector<VectorField> straightened;  // p^{L_i} X_i in the rescaled chart
  int precision = 0;
  bool verified = false;
};

StraightenResult straighten(const std::vector<VectorField>& fields, const std::vector<std::int64_t>& m,
                            const FlowOptions& opts = {});

struct LieAlgebraBasis {
  std::vector<VectorField> basis;
  int ambient_dim = 0;
  int degree = 0;
  PrecisionPolicy policy;
  /// structure[i][j][k]: coefficient of basis k in [basis i, basis j].
  std::vector<std::vector<std::vector<PadicNumber>>> structure;
  std::vector<int> derived_dims;        // dim D_0, D_1, ...
  std::vector<int> lower_central_dims;  // dim C_0, C_1, ...
  std::optional<int> derived_length;
  std::optional<int> nilpotency_class;
  bool precision_warning = false;
  int dim() const { return static_cast<int>(basis.size()); }
};

/// Bracket-generated subalgebra of the seeds at the zero threshold of the
/// policy. Asserts dl <= ambient dimension whenever the algebra is nilpotent.
LieAlgebraBasis lie_closure(const std::vector<VectorField>& seeds, const PrecisionPolicy& policy,
                            std::size_t max_dim = 0);

/// Derived length, or nullopt when the series does not terminate.
std::optional<int> derived_length(const LieAlgebraBasis& h);
std::optional<int> nilpotency_class(const LieAlgebraBasis& h);

/// Signed Stirling numbers of the first kind s(n, k), 0 <= k <= n <= nmax.
std::vector<std::vector<mpz_class>> stirling_first(int nmax);

}  // namespace padicaut
