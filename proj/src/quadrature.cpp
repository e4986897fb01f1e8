#include "hausdim/quadrature.hpp"

#include <cmath>

#include "hausdim/errors.hpp"
#include "hausdim/numeric.hpp"

namespace hausdim {

namespace {

// Abscissa parameter range: beyond this the weights underflow.
constexpr double kTMax = 6.5;

struct Node {
  double offset;      // x - c, in units of the half length
  double complement;  // 1 - |x - c| / half, accurate near the endpoints
  double weight;
};

Node node_at(double t) {
  const double u = 0.5 * kPi * std::sinh(t);
  const double e = std::exp(-2.0 * std::abs(u));
  const double complement = 2.0 * e / (1.0 + e);
  const double cosh_u = std::cosh(u);
  const double offset = t >= 0 ? 1.0 - complement : complement - 1.0;
  return {offset, complement, 0.5 * kPi * std::cosh(t) / (cosh_u * cosh_u)};
}

}  // namespace

QuadratureResult tanh_sinh(const EndpointAwareIntegrand& f, double a, double b,
                           const QuadratureOptions& options) {
  if (!(b > a)) throw InvalidInput("tanh_sinh: empty or reversed interval");
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  QuadratureResult result;

  auto eval = [&](double t) {
    const Node n = node_at(t);
    const double dist = half * n.complement;
    if (dist <= 0.0 || n.weight == 0.0) return 0.0;
    const double x = mid + half * n.offset;
    const double dl = t < 0 ? dist : (b - a) - dist;
    const double dr = t < 0 ? (b - a) - dist : dist;
    ++result.evaluations;
    const double y = f(x, dl, dr);
    if (!std::isfinite(y)) {
      throw NumericError("tanh_sinh: non-finite integrand at x = " + std::to_string(x));
    }
    return n.weight * y;
  };

  // Level 0: step 1 on [-kTMax, kTMax].
  double h = 1.0;
  CompensatedSum sum;
  sum += eval(0.0);
  for (int i = 1; i * h <= kTMax; ++i) {
    sum += eval(i * h);
    sum += eval(-i * h);
  }
  double previous = half * h * sum.value();
  result.value = previous;

  for (int level = 1; level <= options.max_level; ++level) {
    h *= 0.5;
    // New nodes are the odd multiples of the halved step.
    for (long i = 1; i * h <= kTMax; i += 2) {
      sum += eval(static_cast<double>(i) * h);
      sum += eval(-static_cast<double>(i) * h);
    }
    const double current = half * h * sum.value();
    result.error_estimate = std::abs(current - previous);
    result.value = current;
    result.levels = level;
    if (level >= options.min_level && result.error_estimate <= options.abs_tol) {
      result.converged = true;
      return result;
    }
    previous = current;
  }
  return result;
}

}  // namespace hausdim
