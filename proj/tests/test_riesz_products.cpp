#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "hausdim/errors.hpp"
#include "hausdim/kappa_bound.hpp"
#include "hausdim/numeric.hpp"
#include "hausdim/quadrature.hpp"
#include "hausdim/riesz_products.hpp"
#include "hausdim/zq_spectral.hpp"

using namespace hausdim;

namespace {

// Reference values from 30-digit mpmath quadrature split at the zeros of cos.
constexpr double kLogIntegral4 = -1.73582167561819142835;
constexpr double kLogIntegral6 = -3.42392350849395091830;
constexpr double kLogIntegral16 = -10.8033226085378659379;
constexpr double kProp4At4 = 0.557304959111036592640;

// h(a) = int_0^1 (1 + a cos 2 pi x) log(1 + a cos 2 pi x) dx in closed form.
double h_closed_form(double a) {
  const double r = std::sqrt(1.0 - a * a);
  return 1.0 - r + std::log((1.0 + r) / 2.0);
}

// Expand prod_k (1 + a cos 2 pi q^k x) by repeated multiplication of
// trigonometric polynomials.
std::map<std::int64_t, double> expand_product(double a, int q, int depth) {
  std::map<std::int64_t, double> poly{{0, 1.0}};
  std::int64_t f = 1;
  for (int k = 0; k < depth; ++k, f *= q) {
    std::map<std::int64_t, double> next;
    for (const auto& [n, c] : poly) {
      next[n] += c;
      next[n + f] += 0.5 * a * c;
      next[n - f] += 0.5 * a * c;
    }
    poly = std::move(next);
  }
  return poly;
}

}  // namespace

TEST_CASE("tanh-sinh on singular and smooth integrands") {
  auto log_x = [](double, double dl, double) { return std::log(dl); };
  auto r = tanh_sinh(log_x, 0.0, 1.0, {1e-12});
  CHECK(r.converged);
  CHECK(std::abs(r.value + 1.0) < 1e-12);

  auto inv_sqrt = [](double, double dl, double) { return 1.0 / std::sqrt(dl); };
  r = tanh_sinh(inv_sqrt, 0.0, 1.0, {1e-10});
  CHECK(std::abs(r.value - 2.0) < 1e-9);

  auto log_sin = [](double, double dl, double dr) { return std::log(std::sin(std::min(dl, dr))); };
  r = tanh_sinh(log_sin, 0.0, kPi, {1e-12});
  CHECK(std::abs(r.value + kPi * std::log(2.0)) < 1e-11);

  auto cubic = [](double x, double, double) { return x * x * x - 2.0 * x; };
  r = tanh_sinh(cubic, -1.0, 2.0);
  CHECK(std::abs(r.value - (15.0 / 4.0 - 3.0)) < 1e-12);

  CHECK_THROWS_AS(tanh_sinh(cubic, 1.0, 1.0), InvalidInput);
  auto bad = [](double, double, double) { return std::nan(""); };
  CHECK_THROWS_AS(tanh_sinh(bad, 0.0, 1.0), NumericError);
}

TEST_CASE("one_plus_a_cos matches the direct formula and stays non-negative") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng);
    const double t = 10.0 * u(rng);
    CHECK(std::abs(one_plus_a_cos(a, t) - (1.0 + a * std::cos(t))) < 1e-14);
  }
  CHECK(one_plus_a_cos(1.0, kPi) >= 0.0);
  CHECK(one_plus_a_cos(-1.0, 0.0) >= 0.0);
}

TEST_CASE("Riesz spectrum fixtures") {
  const SparseSpectrum zero = riesz_spectrum({0.0, 5}, 4);
  for (const auto& [n, c] : zero.entries()) {
    if (n == 0) CHECK(std::abs(c - Complex(1, 0)) < 1e-15);
    else CHECK(std::abs(c) == 0.0);
  }
  const SparseSpectrum one = riesz_spectrum({1.0, 3}, 1);
  CHECK(one.size() == 3);
  CHECK(std::abs(one.coefficient(1) - Complex(0.5, 0)) < 1e-15);
  CHECK(std::abs(one.coefficient(-1) - Complex(0.5, 0)) < 1e-15);
  const SparseSpectrum two = riesz_spectrum({1.0, 3}, 2);
  CHECK(two.size() == 9);
  for (std::int64_t n : {0, 1, -1, 2, -2, 3, -3, 4, -4}) CHECK(std::abs(two.coefficient(n)) > 0.0);
  CHECK(std::abs(two.coefficient(4) - Complex(0.25, 0)) < 1e-15);
  CHECK_THROWS_AS(riesz_spectrum({1.0, 3}, 15), ResourceError);
  CHECK_THROWS_AS(riesz_spectrum({1.5, 3}, 2), InvalidInput);
  CHECK_THROWS_AS(riesz_spectrum({1.0, 2}, 2), InvalidInput);
}

TEST_CASE("Riesz spectrum equals the expanded product and lives in C_{1,q-1}") {
  for (int q = 3; q <= 7; ++q) {
    for (double a : {1.0, -0.6, 0.3}) {
      const SparseSpectrum s = riesz_spectrum({a, q}, 5);
      const auto ref = expand_product(a, q, 5);
      CHECK(s.size() == ref.size());
      for (const auto& [n, c] : ref) CHECK(std::abs(s.coefficient(n) - Complex(c, 0)) < 1e-15);
      CHECK(s.conjugate_symmetric());
      const ResidueSet b(q, {1, q - 1});
      for (const auto& [n, c] : s.entries()) CHECK(in_cb(n, b));
    }
  }
}

TEST_CASE("partial products: fixtures, mean and two evaluation paths") {
  CHECK(partial_product_values({1.0, 3}, 1, 7)[0] == 2.0);
  for (int k = 0; k <= 6; ++k) CHECK(partial_product_values({1.0, 4}, k, 9)[0] == std::ldexp(1.0, k));

  std::mt19937_64 rng(17);
  for (int q = 3; q <= 6; ++q) {
    const int depth = 5;
    const RieszParams p{1.0, q};
    std::int64_t period = 1;
    for (int k = 0; k < depth; ++k) period *= q;
    const auto values = partial_product_values(p, depth, period * 2);
    CompensatedSum mean;
    for (double v : values) {
      CHECK(v >= 0.0);
      mean += v;
    }
    CHECK(std::abs(mean.value() / values.size() - 1.0) < 1e-10);

    const SparseSpectrum s = riesz_spectrum(p, depth);
    std::uniform_int_distribution<std::int64_t> size(50, 3000);
    const std::int64_t m = size(rng);
    const auto direct = partial_product_values(p, depth, m);
    for (std::int64_t j = 0; j < m; ++j) {
      const double synth = s.evaluate(static_cast<double>(j) / m).real();
      CHECK(std::abs(synth - direct[j]) <= 1e-10 * std::max(1.0, direct[j]));
    }
  }
}

TEST_CASE("Riesz closed-form bound: fixtures and agreement with the vertex solver") {
  CHECK(std::abs(bound_theorem3(3)) < 1e-15);
  CHECK(std::abs(bound_theorem3(4) - 0.5) < 1e-15);
  CHECK(std::abs(kappa_prime_riesz(3) + std::log(3.0)) < 1e-15);
  CHECK(std::abs(kappa_prime_riesz(4) + std::log(2.0)) < 1e-15);
  for (int q = 3; q <= 12; ++q) {
    const VertexSet vs = polytope_vertices(FeasiblePolytope(wb_basis(ResidueSet(q, {1, q - 1}))));
    CHECK(std::abs(kappa_prime_riesz(q) - kappa_prime_1(vs).value) <= 1e-9);
    // The profile is 1 + v at a vertex with v_0 = v_{q-1} = -1 (the two zero coordinates).
    CHECK(riesz_vertex_profile(q).size() == static_cast<std::size_t>(q - 2));
  }
  // Leading behaviour 1 - (1 - log 2)/log q.
  for (int q : {256, 1024, 4096}) {
    const double lead = 1.0 - (1.0 - kLog2) / std::log(double(q));
    CHECK(std::abs(bound_theorem3(q) - lead) * std::log(double(q)) < 0.05);
  }
}

TEST_CASE("entropy objective is maximized at the endpoints") {
  for (int q = 3; q <= 12; ++q) {
    const double lim = kPi / q;
    double best = -1e300;
    for (int i = 0; i <= 1000; ++i) best = std::max(best, riesz_entropy_objective(q, -lim + 2.0 * lim * i / 1000));
    const double ends = std::max(riesz_entropy_objective(q, -lim), riesz_entropy_objective(q, lim));
    CHECK(best <= ends + 1e-9);
    // The endpoint value is q times -kappa'(1).
    CHECK(std::abs(riesz_entropy_objective(q, lim) + q * kappa_prime_riesz(q)) < 1e-12);
  }
}

TEST_CASE("log integral against reference values") {
  CHECK(std::abs(log_integral(4).value - kLogIntegral4) < 1e-9);
  CHECK(std::abs(log_integral(6).value - kLogIntegral6) < 1e-9);
  CHECK(std::abs(log_integral(16).value - kLogIntegral16) < 1e-9);
  CHECK(log_integral(4).segments == 1);
  for (int q = 4; q <= 40; q += 2) {
    const double coarse = log_integral(q).value;
    const double fine = log_integral(q, {1e-13, 5, 16}).value;
    CHECK(coarse <= 0.0);
    CHECK(std::abs(coarse - fine) < 1e-9);
  }
  CHECK_THROWS_AS(log_integral(5), InvalidInput);
  CHECK_THROWS_AS(log_integral(2), InvalidInput);
}

TEST_CASE("sum/integral identity and Chebyshev factorization") {
  CHECK(chebyshev_identity_residual(4).residual <= 1e-8);
  CHECK(chebyshev_identity_residual(16).residual <= 1e-7);
  for (int q = 4; q <= 32; q += 2) {
    const IdentityCheck c = chebyshev_identity_residual(q);
    CHECK(c.residual <= 1e-7);
    CHECK(c.chebyshev_pass);
    CHECK(c.chebyshev_points == 100);
  }
  // a = 0, q = 4: T_2(0)^2 / 4 = 1/4 and prod_j |cos((2j+1) pi / 4)| = (1/sqrt 2)^4 = 1/4.
  double prod = 1.0;
  for (int j = 0; j < 4; ++j) prod *= std::abs(std::cos((2 * j + 1) * kPi / 4));
  CHECK(std::abs(prod - 0.25) < 1e-15);
  CHECK_THROWS_AS(chebyshev_identity_residual(66), InvalidInput);
  CHECK_THROWS_AS(chebyshev_identity_residual(7), InvalidInput);
}

TEST_CASE("even-q integral form and the elementary lower form") {
  // The integral form at q = 4 exceeds the closed-form bound; the substituted
  // form reproduces it exactly.
  CHECK(std::abs(bound_prop4(4) - kProp4At4) < 1e-9);
  for (int q = 4; q <= 32; q += 2) CHECK(std::abs(bound_prop4_substituted(q) - bound_theorem3(q)) < 1e-9);
  CHECK(std::abs(bound_prop4(16) - bound_theorem3(16)) < 0.2);
  CHECK_THROWS_AS(bound_prop4(5), InvalidInput);

  CHECK(std::abs(bound_prop5(3) + 4.002349856189054) < 1e-12);
  for (int q = 3; q <= 200; ++q) CHECK(bound_prop5(q) <= bound_theorem3(q) + 1e-12);
  for (int q : {64, 128, 256, 512}) CHECK((bound_theorem3(q) - bound_prop5(q)) * q < 5.0);
}

TEST_CASE("Fan entropy integral") {
  CHECK(fan_entropy_integral(0.0) == 0.0);
  CHECK(fan_entropy_integral(1.0) == 1.0 - kLog2);
  CHECK(fan_entropy_integral(-1.0) == 1.0 - kLog2);
  for (int i = -99; i <= 99; ++i) {
    const double a = i / 100.0;
    CHECK(std::abs(fan_entropy_integral(a) - h_closed_form(a)) < 1e-12);
  }
  CHECK(std::abs(fan_entropy_integral(0.9999999) - h_closed_form(0.9999999)) < 1e-10);
  CHECK(fan_main_term({0.0, 7}) == 1.0);
  for (int q : {3, 8, 64}) {
    CHECK(std::abs(fan_main_term({1.0, q}) - (1.0 - (1.0 - kLog2) / std::log(double(q)))) < 1e-15);
  }
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(rng), b = u(rng);
    CHECK(std::abs(fan_entropy_integral(a) - fan_entropy_integral(b)) <= std::abs(a - b) + 1e-12);
  }
  for (int q : {8, 16, 32, 64, 128}) {
    CHECK(std::abs(bound_theorem3(q) - fan_main_term({1.0, q})) * q * std::log(double(q)) <= 10.0);
  }
}

TEST_CASE("Peyriere midpoint estimate") {
  const PeyriereEstimate flat = peyriere_dimension({0.0, 4}, 3, 64 * 4);
  CHECK(flat.estimate == 1.0);
  CHECK(flat.converged);

  std::int64_t m = 1;
  for (int k = 0; k < 10; ++k) m *= 4;
  const PeyriereEstimate e = peyriere_dimension({1.0, 4}, 8, m);
  CHECK(e.converged);
  CHECK(e.estimate >= bound_theorem3(4) - 0.02);
  CHECK(e.estimate <= 1.0 + 1e-9);
  CHECK(std::abs(e.estimate - 0.766) < 0.01);

  for (double a : {-1.0, -0.5, 0.5}) CHECK(peyriere_midpoint_value({a, 3}, 5, 3 * 243) <= 1.0 + 1e-9);
  CHECK_THROWS_AS(peyriere_dimension({1.0, 4}, 3, 100), InvalidInput);
  CHECK_THROWS_AS(peyriere_dimension({1.0, 4}, 0, 64), InvalidInput);
}

TEST_CASE("derivative bound and Lipschitz constant") {
  const GDerivativeReport g = g_derivative_bound_check();
  CHECK(g.pass);
  CHECK(g.sup_estimate <= 2.0);
  CHECK(g.lipschitz_constant >= 1.2);
  CHECK(g.lipschitz_constant <= 1.25);
  REQUIRE(g.sup_by_a.size() == 21);
  CHECK(g.sup_by_a[10] == 0.0);
}

TEST_CASE("q-adic interval masses and the entropy estimate") {
  // Direct per-interval evaluation of the antiderivative as the oracle.
  const RieszParams p{1.0, 3};
  const SparseSpectrum s = riesz_spectrum(p, 5);
  const int level = 3;
  const auto masses = qadic_interval_masses(s, 3, level);
  REQUIRE(masses.size() == 27);
  CompensatedSum total;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const double lo = static_cast<double>(i) / 27.0, hi = static_cast<double>(i + 1) / 27.0;
    Complex m = 0;
    for (const auto& [n, c] : s.entries()) {
      if (n == 0) {
        m += c * (hi - lo);
        continue;
      }
      const double w = 2.0 * kPi * static_cast<double>(n);
      m += c * (std::polar(1.0, w * hi) - std::polar(1.0, w * lo)) / Complex(0.0, w);
    }
    CHECK(std::abs(m.real() - masses[i]) < 1e-13);
    CHECK(masses[i] >= -1e-12);
    total += masses[i];
  }
  CHECK(std::abs(total.value() - 1.0) < 1e-10);

  for (int n = 1; n <= 4; ++n) CHECK(std::abs(entropy_dimension_estimate({0.0, 5}, n, n) - 1.0) < 1e-12);
  const double est = entropy_dimension_estimate({1.0, 4}, 10, 5);
  CHECK(est >= 0.45);
  CHECK(est <= 1.0 + 1e-12);
  CHECK_THROWS_AS(entropy_dimension_estimate({1.0, 4}, 3, 5), InvalidInput);
  CHECK_THROWS_AS(entropy_dimension_estimate({1.0, 4}, 12, 11), ResourceError);
}

TEST_CASE("bound table row shrinks estimator sizes for large q") {
  const BoundTableRow row = riesz_bound_row({1.0, 128});
  REQUIRE(row.peyriere);
  CHECK(row.peyriere->truncation >= 1);
  CHECK(row.entropy_level >= 1);
  CHECK(row.prop4.has_value());
  CHECK(row.peyriere->estimate <= 1.0 + 1e-9);
  const BoundTableRow odd = riesz_bound_row({1.0, 5}, {.include_estimates = false});
  CHECK_FALSE(odd.prop4.has_value());
  CHECK_FALSE(odd.peyriere.has_value());
  CHECK_FALSE(odd.entropy_estimate.has_value());
}
