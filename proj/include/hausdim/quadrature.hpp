#pragma once

#include <functional>

namespace hausdim {

struct QuadratureOptions {
  double abs_tol = 1e-9;
  /// Refinement levels always taken before testing convergence. Each level
  /// halves the step and doubles the node count.
  int min_level = 4;
  int max_level = 14;
};

struct QuadratureResult {
  double value = 0.0;
  /// |I_level - I_{level-1}| at termination.
  double error_estimate = 0.0;
  int levels = 0;
  long evaluations = 0;
  bool converged = false;
};

/// Integrand on [a, b] receiving the node x together with its distances to
/// the left and right endpoints, each computed without cancellation.
using EndpointAwareIntegrand = std::function<double(double x, double dist_left, double dist_right)>;

/// Double-exponential (tanh-sinh) quadrature on a finite interval. Endpoint
/// singularities of logarithmic or algebraic type are integrated without
/// ever evaluating the integrand at an endpoint.
QuadratureResult tanh_sinh(const EndpointAwareIntegrand& f, double a, double b,
                           const QuadratureOptions& options = {});

}  // namespace hausdim
