#include "hausdim/riesz_products.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>

#include <fftw3.h>

#include "hausdim/errors.hpp"
#include "hausdim/numeric.hpp"

namespace hausdim {

namespace {

constexpr std::int64_t kTermLimit = 10'000'000;      // 3^K
constexpr std::int64_t kLevelLimit = 1'000'000;      // q^n for interval masses
constexpr std::int64_t kGridLimit = 100'000'000;     // midpoint grids
constexpr std::int64_t kAutoGridTarget = 1 << 20;
constexpr std::int64_t kAutoGridCap = 1 << 22;

void require_even(int q, const char* what) {
  if (q < 4 || q % 2 != 0) {
    throw InvalidInput(std::string(what) + ": q must be even and >= 4, got " + std::to_string(q));
  }
}

void require_q(int q, const char* what) {
  if (q < 3) throw InvalidInput(std::string(what) + ": q must be >= 3, got " + std::to_string(q));
}

// q^k mod m for k = 0..count-1.
std::vector<std::int64_t> powers_mod(int q, int count, std::int64_t m) {
  std::vector<std::int64_t> out(count);
  std::int64_t p = 1 % m;
  for (int k = 0; k < count; ++k) {
    out[k] = p;
    p = (p * q) % m;
  }
  return out;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!data) throw ResourceError("fftw_malloc failed");
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

}  // namespace

void RieszParams::validate() const {
  if (!(std::abs(a) <= 1.0)) throw InvalidInput("Riesz parameter a must satisfy |a| <= 1");
  require_q(q, "RieszParams");
}

double one_plus_a_cos(double a, double theta) {
  if (a >= 0.0) {
    const double c = std::cos(0.5 * theta);
    return (1.0 - a) + 2.0 * a * c * c;
  }
  const double s = std::sin(0.5 * theta);
  return (1.0 + a) - 2.0 * a * s * s;
}

SparseSpectrum riesz_spectrum(const RieszParams& params, int truncation) {
  params.validate();
  if (truncation < 0) throw InvalidInput("riesz_spectrum: truncation must be >= 0");
  guarded_pow(3, truncation, kTermLimit, "riesz_spectrum term count");
  guarded_pow(params.q, truncation, std::int64_t{1} << 60, "riesz_spectrum frequency range");

  std::vector<SparseSpectrum::Entry> entries{{0, Complex{1.0, 0.0}}};
  const double half_a = 0.5 * params.a;
  std::int64_t qk = 1;
  for (int k = 0; k < truncation; ++k) {
    std::vector<SparseSpectrum::Entry> next;
    next.reserve(entries.size() * 3);
    for (const auto& [n, c] : entries) {
      next.emplace_back(n, c);
      next.emplace_back(n + qk, c * half_a);
      next.emplace_back(n - qk, c * half_a);
    }
    entries = std::move(next);
    qk *= params.q;
  }
  return SparseSpectrum(std::move(entries), params.q, truncation);
}

std::vector<double> partial_product_values(const RieszParams& params, int truncation, std::int64_t grid_size) {
  params.validate();
  if (grid_size < 1) throw InvalidInput("partial_product_values: grid size must be >= 1");
  if (grid_size > kGridLimit) throw ResourceError("partial_product_values: grid size exceeds limit");
  const auto qk = powers_mod(params.q, truncation, grid_size);
  std::vector<double> values(static_cast<std::size_t>(grid_size), 1.0);
  for (std::int64_t j = 0; j < grid_size; ++j) {
    double v = 1.0;
    for (int k = 0; k < truncation; ++k) {
      const std::int64_t r = (qk[k] * j) % grid_size;
      v *= one_plus_a_cos(params.a, 2.0 * kPi * static_cast<double>(r) / static_cast<double>(grid_size));
    }
    values[static_cast<std::size_t>(j)] = v;
  }
  return values;
}

std::vector<double> riesz_vertex_profile(int q) {
  require_q(q, "riesz_vertex_profile");
  const double c = std::cos(kPi / q);
  std::vector<double> t;
  for (int j = 1; j <= q - 2; ++j) t.push_back(1.0 - std::cos((2.0 * j + 1.0) * kPi / q) / c);
  return t;
}

double kappa_prime_riesz(int q) {
  CompensatedSum s;
  for (double t : riesz_vertex_profile(q)) s += xlogx(t);
  return -s.value() / q;
}

double bound_theorem3(int q) { return 1.0 + kappa_prime_riesz(q) / std::log(static_cast<double>(q)); }

double riesz_entropy_objective(int q, double phi) {
  require_q(q, "riesz_entropy_objective");
  const double c = std::cos(phi);
  CompensatedSum s;
  for (int j = 0; j < q; ++j) s += xlogx(1.0 - std::cos(2.0 * kPi * j / q + phi) / c);
  return s.value();
}

LogIntegral log_integral(int q, const QuadratureOptions& options) {
  require_even(q, "log_integral");
  // Zeros of cos lie at pi/2 + k pi; the range [pi/2, q pi/4] holds (q-2)/4 periods.
  const int full_segments = (q - 2) / 4;
  const bool partial = (q - 2) % 4 != 0;
  const int segments = full_segments + (partial ? 1 : 0);
  QuadratureOptions per_segment = options;
  per_segment.abs_tol = options.abs_tol / segments;

  LogIntegral out;
  out.segments = segments;
  CompensatedSum total;
  for (int k = 0; k < segments; ++k) {
    const double start = 0.5 * kPi + k * kPi;
    const double length = k < full_segments ? kPi : 0.5 * kPi;
    // log cos^2(start + u) = 2 log sin u, and sin u = sin(pi - u) near the far zero.
    auto integrand = [&](double, double dl, double dr) {
      const double u = dl <= 0.5 * kPi ? dl : dr + (kPi - length);
      return 2.0 * std::log(std::sin(u)) * std::sin(2.0 * (start + dl) / q);
    };
    const QuadratureResult r = tanh_sinh(integrand, start, start + length, per_segment);
    if (!r.converged) {
      throw NumericError("log_integral: segment " + std::to_string(k) + " for q = " + std::to_string(q) +
                         " did not converge (last change " + std::to_string(r.error_estimate) + " after " +
                         std::to_string(r.levels) + " levels)");
    }
    total += r.value;
    out.error_estimate += r.error_estimate;
    out.evaluations += r.evaluations;
  }
  out.value = total.value();
  return out;
}

IdentityCheck chebyshev_identity_residual(int q, std::uint64_t seed) {
  require_even(q, "chebyshev_identity_residual");
  if (q > 64) throw InvalidInput("chebyshev_identity_residual: q must be <= 64");
  IdentityCheck out;
  const double c = std::cos(kPi / q);
  out.integral = log_integral(q, QuadratureOptions{1e-12}).value;
  out.lhs = -q * kappa_prime_riesz(q);
  out.rhs = (1.0 - kLog2) * q + 2.0 * kLog2 + 2.0 / (q * c) * out.integral - q * std::log(c);
  out.residual = std::abs(out.lhs - out.rhs);

  const int p = q / 2;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  out.chebyshev_points = 100;
  for (int i = 0; i < out.chebyshev_points; ++i) {
    const double a = uniform(rng);
    const double tp = std::cos(p * std::acos(a));
    const double factored = std::ldexp(tp * tp, 2 - q);
    double product = 1.0;
    for (int j = 0; j < q; ++j) product *= std::abs(a - std::cos((2.0 * j + 1.0) * kPi / q));
    const double rel = std::abs(factored - product) / std::max(product, 1e-300);
    out.chebyshev_max_rel_error = std::max(out.chebyshev_max_rel_error, rel);
  }
  out.chebyshev_pass = out.chebyshev_max_rel_error <= 1e-9;
  return out;
}

double bound_prop4(int q) {
  require_even(q, "bound_prop4");
  const double lq = std::log(static_cast<double>(q));
  const double c = std::cos(kPi / q);
  const double integral = log_integral(q, QuadratureOptions{1e-12}).value;
  return 1.0 - (1.0 - kLog2) / lq - (2.0 * kLog2 - 2.0 / (q * c) * integral) / (q * lq) - std::log(c) / lq;
}

double bound_prop4_substituted(int q) {
  require_even(q, "bound_prop4_substituted");
  const double lq = std::log(static_cast<double>(q));
  const double c = std::cos(kPi / q);
  const double integral = log_integral(q, QuadratureOptions{1e-12}).value;
  const double sum = (1.0 - kLog2) * q + 2.0 * kLog2 + 2.0 / (q * c) * integral - q * std::log(c);
  return 1.0 - sum / (q * lq);
}

double bound_prop5(int q) {
  require_q(q, "bound_prop5");
  const double lq = std::log(static_cast<double>(q));
  return 1.0 - (1.0 - kLog2) / lq - 4.0 * kPi / (q * lq) - (1.0 / std::cos(kPi / q) - 1.0) / lq;
}

double fan_entropy_integral(double a) {
  if (!(std::abs(a) <= 1.0)) throw InvalidInput("fan_entropy_integral: |a| must be <= 1");
  const double b = std::abs(a);  // h is even in a
  if (b == 0.0) return 0.0;
  if (b == 1.0) return 1.0 - kLog2;
  // 1 + b cos 2 pi x = (1 - b) + 2 b cos^2(pi x), symmetric about x = 1/2.
  auto integrand = [b](double, double dl, double dr) {
    const double c = dl < dr ? std::cos(kPi * dl) : std::sin(kPi * dr);
    return 2.0 * xlogx((1.0 - b) + 2.0 * b * c * c);
  };
  const QuadratureResult r = tanh_sinh(integrand, 0.0, 0.5, QuadratureOptions{1e-13, 4, 16});
  if (!r.converged) throw NumericError("fan_entropy_integral: quadrature did not converge");
  return r.value;
}

double fan_main_term(const RieszParams& params) {
  params.validate();
  return 1.0 - fan_entropy_integral(params.a) / std::log(static_cast<double>(params.q));
}

double peyriere_midpoint_value(const RieszParams& params, int truncation, std::int64_t grid_size) {
  params.validate();
  if (truncation < 1) throw InvalidInput("peyriere_dimension: truncation must be >= 1");
  if (grid_size < 1 || grid_size > kGridLimit) {
    throw ResourceError("peyriere_dimension: grid size " + std::to_string(grid_size) + " outside [1, 1e8]");
  }
  const std::int64_t two_m = 2 * grid_size;
  const auto qk = powers_mod(params.q, truncation, two_m);
  CompensatedSum sum;
  for (std::int64_t j = 0; j < grid_size; ++j) {
    const std::int64_t odd = 2 * j + 1;
    auto angle = [&](int k) { return 2.0 * kPi * static_cast<double>((qk[k] * odd) % two_m) / static_cast<double>(two_m); };
    // The k = 0 factor of P_K coincides with 1 + a cos 2 pi x, so the
    // integrand is (s log s) times the remaining factors.
    double rest = 1.0;
    for (int k = 1; k < truncation; ++k) rest *= one_plus_a_cos(params.a, angle(k));
    sum += xlogx(one_plus_a_cos(params.a, angle(0))) * rest;
  }
  return 1.0 - sum.value() / static_cast<double>(grid_size) / std::log(static_cast<double>(params.q));
}

PeyriereEstimate peyriere_dimension(const RieszParams& params, int truncation, std::int64_t grid_size) {
  params.validate();
  if (truncation < 1) throw InvalidInput("peyriere_dimension: truncation must be >= 1");
  const std::int64_t period = guarded_pow(params.q, truncation, kGridLimit, "peyriere_dimension q^K");
  if (grid_size < 1 || grid_size % period != 0) {
    throw InvalidInput("peyriere_dimension: grid size must be a positive multiple of q^K = " +
                       std::to_string(period));
  }
  PeyriereEstimate out;
  out.truncation = truncation;
  out.grid_size = grid_size;
  out.estimate = peyriere_midpoint_value(params, truncation, grid_size);
  const std::int64_t refined_period = period * params.q;
  const std::int64_t grid_k1 = grid_size % refined_period == 0 ? grid_size : grid_size * params.q;
  out.refined_truncation_estimate = peyriere_midpoint_value(params, truncation + 1, grid_k1);
  out.refined_grid_estimate = peyriere_midpoint_value(params, truncation, 2 * grid_size);
  out.converged = std::abs(out.estimate - out.refined_truncation_estimate) <= 0.01 &&
                  std::abs(out.estimate - out.refined_grid_estimate) <= 0.01;
  return out;
}

GDerivativeReport g_derivative_bound_check() {
  constexpr int kGrid = 100'000;
  GDerivativeReport out;
  for (int i = 0; i <= 20; ++i) {
    const double a = (i - 10) / 10.0;
    double sup = 0.0;
    for (int k = 0; k < kGrid; ++k) {
      const double x = 2.0 * kPi * k / kGrid;
      const double s = one_plus_a_cos(a, x);
      // sin x vanishes wherever 1 + a cos x does.
      const double log_term = s > 0.0 ? std::log(s) : 0.0;
      sup = std::max(sup, std::abs(-a * std::sin(x) - a * std::sin(x) * log_term));
    }
    out.sup_by_a.push_back(sup);
    out.sup_estimate = std::max(out.sup_estimate, sup);
  }
  for (int k = 0; k <= kGrid; ++k) {
    const double x = 0.5 * kPi * k / kGrid;
    out.lipschitz_constant = std::max(out.lipschitz_constant, std::sin(x) * (1.0 + std::log(1.0 + std::cos(x))));
  }
  out.pass = out.sup_estimate <= 2.0 && out.lipschitz_constant >= 1.2 && out.lipschitz_constant <= 1.25;
  return out;
}

std::vector<double> qadic_interval_masses(const SparseSpectrum& density, int q, int level) {
  const std::int64_t cells = guarded_pow(q, level, kLevelLimit, "qadic_interval_masses q^n");
  // mass_i = 1/Q c_0 + sum_r e_r w^{ri}, w = e^{2 pi i / Q},
  // e_r = (w^r - 1) sum_{n = r mod Q, n != 0} c_n / (2 pi i n).
  std::vector<Complex> e(static_cast<std::size_t>(cells), Complex{0.0, 0.0});
  const Complex c0 = density.coefficient(0);
  for (const auto& [n, c] : density.entries()) {
    if (n == 0) continue;
    const std::int64_t r = ((n % cells) + cells) % cells;
    e[static_cast<std::size_t>(r)] += c / Complex(0.0, 2.0 * kPi * static_cast<double>(n));
  }
  for (std::int64_t r = 0; r < cells; ++r) {
    const double angle = 2.0 * kPi * static_cast<double>(r) / static_cast<double>(cells);
    e[static_cast<std::size_t>(r)] *= Complex(std::cos(angle) - 1.0, std::sin(angle));
  }

  FftwBuffer buffer(static_cast<std::size_t>(cells));
  std::copy(e.begin(), e.end(), reinterpret_cast<Complex*>(buffer.data));
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(cells), buffer.data, buffer.data, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  std::vector<double> masses(static_cast<std::size_t>(cells));
  const double base = c0.real() / static_cast<double>(cells);
  const Complex* result = reinterpret_cast<const Complex*>(buffer.data);
  for (std::int64_t i = 0; i < cells; ++i) masses[static_cast<std::size_t>(i)] = base + result[i].real();
  return masses;
}

double entropy_dimension_estimate(const RieszParams& params, int truncation, int level) {
  params.validate();
  if (level < 1) throw InvalidInput("entropy_dimension_estimate: level must be >= 1");
  if (truncation < level) throw InvalidInput("entropy_dimension_estimate: truncation must be >= level");
  guarded_pow(params.q, level, kLevelLimit, "entropy_dimension_estimate q^n");
  const std::vector<double> masses = qadic_interval_masses(riesz_spectrum(params, truncation), params.q, level);
  CompensatedSum entropy;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (masses[i] < -1e-10) {
      throw NumericError("entropy_dimension_estimate: negative mass " + std::to_string(masses[i]) +
                         " on interval " + std::to_string(i));
    }
    entropy += -xlogx(std::max(masses[i], 0.0));
  }
  return entropy.value() / (level * std::log(static_cast<double>(params.q)));
}

BoundTableRow riesz_bound_row(const RieszParams& params, const RieszEstimateOptions& options) {
  params.validate();
  const int q = params.q;
  BoundTableRow row;
  row.q = q;
  row.a = params.a;
  row.theorem3 = bound_theorem3(q);
  if (q % 2 == 0) {
    row.prop4 = bound_prop4(q);
    row.prop4_substituted = bound_prop4_substituted(q);
  }
  row.prop5 = bound_prop5(q);
  row.fan_main = fan_main_term(params);
  if (!options.include_estimates) return row;

  // Peyriere: keep q^{K+1} within the automatic grid cap.
  int k = std::max(1, options.peyriere_truncation);
  std::int64_t grid = options.peyriere_grid;
  if (grid == 0) {
    while (k > 1 && std::pow(static_cast<double>(q), k + 1) > static_cast<double>(kAutoGridCap)) --k;
    const std::int64_t period = guarded_pow(q, k + 1, kGridLimit, "peyriere_dimension q^{K+1}");
    grid = ((kAutoGridTarget + period - 1) / period) * period;
  }
  row.peyriere = peyriere_dimension(params, k, grid);

  int level = std::max(1, options.entropy_level);
  while (level > 1 && static_cast<double>(level) * std::log(static_cast<double>(q)) >
                          std::log(static_cast<double>(kLevelLimit)) + 1e-12) {
    --level;
  }
  int truncation = options.entropy_truncation > 0 ? options.entropy_truncation : 2 * level;
  truncation = std::max(truncation, level);
  while (truncation > level && std::pow(3.0, truncation) > static_cast<double>(kTermLimit)) --truncation;
  row.entropy_level = level;
  row.entropy_truncation = truncation;
  row.entropy_estimate = entropy_dimension_estimate(params, truncation, level);
  return row;
}

}  // namespace hausdim
