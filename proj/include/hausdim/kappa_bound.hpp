#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hausdim/zq_spectral.hpp"

namespace hausdim {

/// {v = M t : (M t)_j >= -1 for all j}, M the q x d basis matrix of W_B.
class FeasiblePolytope {
 public:
  explicit FeasiblePolytope(SubspaceBasis basis);

  const SubspaceBasis& basis() const { return basis_; }
  int q() const { return basis_.q; }
  int dim() const { return basis_.dim(); }

 private:
  SubspaceBasis basis_;
};

/// Extreme points of a FeasiblePolytope, as q-vectors, sorted lexicographically.
struct VertexSet {
  int q = 0;
  std::vector<Eigen::VectorXd> vertices;
  double feasibility_tolerance = 1e-9;
  double dedup_tolerance = 1e-7;

  std::size_t size() const { return vertices.size(); }
  bool empty() const { return vertices.empty(); }
};

/// Active-set enumeration over all d-subsets of the q coordinate constraints.
/// d = 0 yields an empty set (the polytope is the origin).
VertexSet polytope_vertices(const FeasiblePolytope& polytope);

/// theta log((1/q) sum_j |1+v_j|^{1/theta}) for a single feasible v.
double kappa_objective(double theta, const Eigen::VectorXd& v);

/// kappa(theta) for 0 < theta <= 1, maximized over the vertex set.
double kappa(double theta, const VertexSet& vertices);

/// -(1/q) sum_j (1+v_j) log(1+v_j) for a single feasible v.
double kappa_prime_objective(const Eigen::VectorXd& v);

struct KappaPrime {
  double value = 0.0;
  /// Lexicographically smallest maximizing vertex (zero vector when d = 0).
  Eigen::VectorXd witness;
};

/// Left derivative of kappa at 1.
KappaPrime kappa_prime_1(const VertexSet& vertices);

/// (kappa(1) - kappa(1-h)) / h, 0 < h < 1/2. Convexity of kappa makes this a
/// lower bound for kappa'(1) that is nonincreasing in h.
double kappa_left_derivative_fd(const VertexSet& vertices, double h);

/// Rounding floor of kappa_left_derivative_fd at step h: 64 eps max(1, |kappa'(1)|) / h.
/// Where kappa is affine near 1 the quotients agree exactly and only this noise remains.
inline double kappa_fd_rounding(double kappa_prime, double h) {
  return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(kappa_prime)) / h;
}

struct SubgroupBound {
  double bound = 1.0;
  /// Absent for the empty residue set.
  std::optional<Subgroup> group;
  bool proper = false;
};

/// 1 - log|H| / log q for the subgroup H generated by B.
SubgroupBound subgroup_bound(const ResidueSet& b);

struct DimensionBound {
  ResidueSet residues;
  /// The input was not symmetric and has been replaced by its symmetrization.
  bool symmetrized = false;
  double kappa_prime_1 = 0.0;
  /// 1 + kappa'(1)/log q before clamping.
  double raw_bound = 1.0;
  /// raw_bound clamped to [0, 1].
  double bound = 1.0;
  SubgroupBound subgroup{};
  double delta = 0.0;
  Eigen::VectorXd witness_vertex{};
  std::size_t vertex_count = 0;
};

DimensionBound dimension_bound(const ResidueSet& b);

/// Checks ((1/q) sum |a+b_j|^p)^{1/p} <= a e^{kappa(1/p)} (1 + 1e-9).
/// Throws PreconditionError if b is not in W_B or b_j < -a.
bool def_reform_check(double a, const Eigen::VectorXd& b, double p, const SubspaceBasis& basis,
                      const VertexSet& vertices);

}  // namespace hausdim
