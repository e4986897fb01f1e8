#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hausdim/quadrature.hpp"
#include "hausdim/spectrum.hpp"

namespace hausdim {

/// Parameters of the Riesz product prod_k (1 + a cos(2 pi q^k x)).
struct RieszParams {
  double a = 1.0;
  int q = 3;

  /// Throws InvalidInput unless |a| <= 1 and q >= 3.
  void validate() const;
};

/// 1 + a cos(theta), evaluated without cancellation when |a| is close to 1.
double one_plus_a_cos(double a, double theta);

/// Coefficients of P_K(x) = prod_{k<K} (1 + a cos 2 pi q^k x). Requires 3^K <= 1e7.
SparseSpectrum riesz_spectrum(const RieszParams& params, int truncation);

/// P_K(j / M) for j = 0..M-1 by direct multiplication of the factors.
std::vector<double> partial_product_values(const RieszParams& params, int truncation, std::int64_t grid_size);

/// t_j = 1 - cos((2j+1) pi / q) / cos(pi / q) for j = 1..q-2: the nonzero
/// coordinates of 1 + v at the extremal vertex for B = {1, q-1}.
std::vector<double> riesz_vertex_profile(int q);

/// -(1/q) sum_j t_j log t_j.
double kappa_prime_riesz(int q);

/// 1 + kappa_prime_riesz(q) / log q; lower bound for dim of mu_{a,q}, any |a| <= 1.
double bound_theorem3(int q);

/// sum_{j=0}^{q-1} (1 - cos(2 pi j/q + phi)/cos phi) log(...), phi in [-pi/q, pi/q].
double riesz_entropy_objective(int q, double phi);

struct LogIntegral {
  double value = 0.0;
  double error_estimate = 0.0;
  int segments = 0;
  long evaluations = 0;
};

/// int_{pi/2}^{q pi/4} log(cos^2 z) sin(2z/q) dz for even q >= 4, split at
/// every zero of cos. Throws NumericError if a segment fails to converge.
LogIntegral log_integral(int q, const QuadratureOptions& options = {});

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double integral = 0.0;
  /// max relative error of 2^{2-q} T_{q/2}(a)^2 against prod_j |a - cos((2j+1)pi/q)|.
  double chebyshev_max_rel_error = 0.0;
  int chebyshev_points = 0;
  bool chebyshev_pass = false;
};

/// Residual of the sum/integral identity for sum_j t_j log t_j at even q in
/// [4, 64], plus the Chebyshev product factorization at 100 seeded points.
IdentityCheck chebyshev_identity_residual(int q, std::uint64_t seed = 0x5eed);

/// 1 - (1-log 2)/log q - (2 log 2 - 2 I_q/(q cos(pi/q)))/(q log q) - log cos(pi/q)/log q,
/// I_q = log_integral(q). Its last two terms carry the opposite sign to the
/// substituted form below, so at q = 4 it exceeds bound_theorem3.
double bound_prop4(int q);
/// The same quantity obtained by substituting the sum/integral identity into
/// 1 + kappa'(1)/log q.
double bound_prop4_substituted(int q);

/// 1 - (1-log 2)/log q - 4 pi/(q log q) - (1/cos(pi/q) - 1)/log q.
double bound_prop5(int q);

/// h(a) = int_0^1 (1 + a cos 2 pi x) log(1 + a cos 2 pi x) dx.
double fan_entropy_integral(double a);

/// 1 - h(a) / log q.
double fan_main_term(const RieszParams& params);

struct PeyriereEstimate {
  double estimate = 1.0;
  bool converged = false;
  int truncation = 0;
  std::int64_t grid_size = 0;
  /// Estimates at (K+1, M') and (K, 2M) used for the convergence flag.
  double refined_truncation_estimate = 1.0;
  double refined_grid_estimate = 1.0;
};

/// Midpoint-rule evaluation of 1 - (int log(1 + a cos 2 pi x) P_K dx) / log q.
/// Requires K >= 1 and q^K | M. Convergence compares against K+1 (on a grid
/// refined to a multiple of q^{K+1}) and against 2M, within 0.01.
PeyriereEstimate peyriere_dimension(const RieszParams& params, int truncation, std::int64_t grid_size);

/// Single midpoint evaluation without the convergence runs.
double peyriere_midpoint_value(const RieszParams& params, int truncation, std::int64_t grid_size);

struct GDerivativeReport {
  double sup_estimate = 0.0;
  /// sup_{[0, pi/2]} sin x (1 + log(1 + cos x)).
  double lipschitz_constant = 0.0;
  /// Grid maximum of |g'| for each a in {-1, -0.9, ..., 1}.
  std::vector<double> sup_by_a;
  bool pass = false;
};

GDerivativeReport g_derivative_bound_check();

/// Shannon entropy of the level-n q-adic interval masses of P_K, divided by
/// n log q. Requires q^n <= 1e6 and K >= n.
double entropy_dimension_estimate(const RieszParams& params, int truncation, int level);

/// Exact masses of [i/q^n, (i+1)/q^n) under the density with the given spectrum.
std::vector<double> qadic_interval_masses(const SparseSpectrum& density, int q, int level);

struct RieszEstimateOptions {
  int peyriere_truncation = 8;
  /// 0 selects the smallest multiple of q^{K+1} that is >= 2^20.
  std::int64_t peyriere_grid = 0;
  int entropy_level = 5;
  /// 0 selects 2 * level.
  int entropy_truncation = 0;
  bool include_estimates = true;
};

/// One row of the bound comparison table.
struct BoundTableRow {
  int q = 0;
  double a = 1.0;
  double theorem3 = 0.0;
  std::optional<double> prop4;
  std::optional<double> prop4_substituted;
  double prop5 = 0.0;
  double fan_main = 0.0;
  std::optional<PeyriereEstimate> peyriere;
  std::optional<double> entropy_estimate;
  int entropy_level = 0;
  int entropy_truncation = 0;
};

using BoundTable = std::vector<BoundTableRow>;

/// Estimator sizes shrink automatically for large q to respect the grid guards.
BoundTableRow riesz_bound_row(const RieszParams& params, const RieszEstimateOptions& options = {});

}  // namespace hausdim
