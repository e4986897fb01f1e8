#include "hausdim/kappa_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hausdim/errors.hpp"
#include "hausdim/numeric.hpp"

namespace hausdim {

namespace {

constexpr double kCombinationLimit = 2e7;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Advances `idx` to the next k-combination of {0..n-1} in lexicographic order.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

bool lexicographically_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

FeasiblePolytope::FeasiblePolytope(SubspaceBasis basis) : basis_(std::move(basis)) {
  if (basis_.columns.rows() != basis_.q) {
    throw InvalidInput("FeasiblePolytope: basis has " + std::to_string(basis_.columns.rows()) +
                       " rows, expected q = " + std::to_string(basis_.q));
  }
}

VertexSet polytope_vertices(const FeasiblePolytope& polytope) {
  const int q = polytope.q();
  const int d = polytope.dim();
  VertexSet out;
  out.q = q;
  if (d == 0) return out;
  if (d > q) throw InvalidInput("polytope_vertices: dimension exceeds number of constraints");
  if (binomial(q, d) > kCombinationLimit) {
    throw ResourceError("polytope_vertices: C(" + std::to_string(q) + "," + std::to_string(d) +
                        ") active sets exceed the enumeration limit");
  }

  const Eigen::MatrixXd& m = polytope.basis().columns;
  const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(d, -1.0);
  Eigen::MatrixXd active(d, d);
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;

  do {
    for (int r = 0; r < d; ++r) active.row(r) = m.row(idx[r]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(active);
    lu.setThreshold(1e-10);
    if (lu.rank() < d) continue;
    const Eigen::VectorXd v = m * lu.solve(rhs);
    if (v.minCoeff() < -1.0 - out.feasibility_tolerance) continue;
    const bool duplicate = std::any_of(out.vertices.begin(), out.vertices.end(), [&](const Eigen::VectorXd& w) {
      return (w - v).cwiseAbs().maxCoeff() < out.dedup_tolerance;
    });
    if (!duplicate) out.vertices.push_back(v);
  } while (next_combination(idx, q));

  std::sort(out.vertices.begin(), out.vertices.end(), lexicographically_less);
  return out;
}

double kappa_objective(double theta, const Eigen::VectorXd& v) {
  const double p = 1.0 / theta;
  double log_max = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double x = 1.0 + v(j);
    if (x > 0.0) log_max = std::max(log_max, std::log(x));
  }
  if (!std::isfinite(log_max)) return -std::numeric_limits<double>::infinity();
  CompensatedSum scaled;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double x = 1.0 + v(j);
    if (x > 0.0) scaled += std::exp(p * (std::log(x) - log_max));
  }
  return log_max + theta * (std::log(scaled.value()) - std::log(static_cast<double>(v.size())));
}

double kappa(double theta, const VertexSet& vertices) {
  if (!(theta > 0.0) || theta > 1.0) {
    throw InvalidInput("kappa: theta must lie in (0, 1], got " + std::to_string(theta));
  }
  // Every feasible v has mean(1+v) = 1.
  if (theta == 1.0 || vertices.empty()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices.vertices) best = std::max(best, kappa_objective(theta, v));
  return best;
}

double kappa_prime_objective(const Eigen::VectorXd& v) {
  CompensatedSum s;
  for (Eigen::Index j = 0; j < v.size(); ++j) s += xlogx(1.0 + v(j));
  return -s.value() / static_cast<double>(v.size());
}

KappaPrime kappa_prime_1(const VertexSet& vertices) {
  KappaPrime out;
  if (vertices.empty()) {
    out.witness = Eigen::VectorXd::Zero(vertices.q);
    return out;
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : vertices.vertices) best = std::min(best, kappa_prime_objective(v));
  // Vertices are sorted, so the first one at the optimum is the lexicographic minimum.
  const double tie = 1e-12 * std::max(1.0, std::abs(best));
  for (const auto& v : vertices.vertices) {
    const double value = kappa_prime_objective(v);
    if (value <= best + tie) {
      out.value = value;
      out.witness = v;
      break;
    }
  }
  return out;
}

double kappa_left_derivative_fd(const VertexSet& vertices, double h) {
  if (!(h > 0.0) || !(h < 0.5)) {
    throw InvalidInput("kappa_left_derivative_fd: step must lie in (0, 1/2), got " + std::to_string(h));
  }
  return -kappa(1.0 - h, vertices) / h;
}

SubgroupBound subgroup_bound(const ResidueSet& b) {
  SubgroupBound out;
  if (b.empty()) return out;
  const auto containment = minimal_subgroup_containing(b);
  out.group = containment.group;
  out.proper = containment.proper_inclusion;
  out.bound = 1.0 - std::log(static_cast<double>(containment.group.order())) / std::log(static_cast<double>(b.q()));
  return out;
}

DimensionBound dimension_bound(const ResidueSet& b) {
  DimensionBound out{.residues = b.symmetric() ? b : symmetrize(b), .symmetrized = !b.symmetric()};
  const FeasiblePolytope polytope(wb_basis(out.residues));
  const VertexSet vertices = polytope_vertices(polytope);
  const KappaPrime kp = kappa_prime_1(vertices);

  out.kappa_prime_1 = kp.value;
  out.witness_vertex = kp.witness;
  out.vertex_count = vertices.size();
  out.raw_bound = 1.0 + kp.value / std::log(static_cast<double>(b.q()));
  out.bound = std::clamp(out.raw_bound, 0.0, 1.0);
  out.subgroup = subgroup_bound(out.residues);
  out.delta = out.bound - out.subgroup.bound;
  return out;
}

bool def_reform_check(double a, const Eigen::VectorXd& b, double p, const SubspaceBasis& basis,
                      const VertexSet& vertices) {
  if (!(p > 1.0)) throw PreconditionError("def_reform_check: p must exceed 1");
  if (!(a >= 0.0)) throw PreconditionError("def_reform_check: a must be non-negative");
  if (b.size() != basis.q) throw PreconditionError("def_reform_check: b has the wrong length");
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  const Eigen::VectorXd off_subspace = b - basis.columns * (basis.columns.transpose() * b);
  if (off_subspace.cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw PreconditionError("def_reform_check: b does not lie in W_B");
  }
  if (b.minCoeff() < -a - 1e-12 * scale) {
    throw PreconditionError("def_reform_check: some b_j < -a");
  }
  CompensatedSum s;
  for (Eigen::Index j = 0; j < b.size(); ++j) s += std::pow(std::abs(a + b(j)), p);
  const double lhs = std::pow(s.value() / static_cast<double>(b.size()), 1.0 / p);
  const double rhs = a * std::exp(kappa(1.0 / p, vertices));
  return lhs <= rhs * (1.0 + 1e-9) + 1e-12;
}

}  // namespace hausdim
