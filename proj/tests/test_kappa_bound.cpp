#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hausdim/errors.hpp"
#include "hausdim/kappa_bound.hpp"
#include "hausdim/numeric.hpp"

using namespace hausdim;

namespace {

VertexSet vertices_of(const ResidueSet& b) { return polytope_vertices(FeasiblePolytope(wb_basis(b))); }

bool has_vertex(const VertexSet& vs, std::initializer_list<double> entries) {
  Eigen::VectorXd target(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double e : entries) target(i++) = e;
  return std::any_of(vs.vertices.begin(), vs.vertices.end(),
                     [&](const Eigen::VectorXd& v) { return (v - target).cwiseAbs().maxCoeff() < 1e-12; });
}

std::vector<ResidueSet> symmetric_sets(int q) {
  std::vector<ResidueSet> out;
  for (unsigned mask = 0; mask < (1u << (q - 1)); ++mask) {
    std::vector<int> members;
    for (int m = 1; m < q; ++m) {
      if (mask & (1u << (m - 1))) members.push_back(m);
    }
    ResidueSet b(q, members);
    if (b.symmetric()) out.push_back(b);
  }
  return out;
}

// Random boundary point of the polytope: a random direction t scaled until
// the first constraint (M t)_j = -1 becomes active.
Eigen::VectorXd random_boundary_point(const SubspaceBasis& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd t(basis.dim());
  for (int i = 0; i < basis.dim(); ++i) t(i) = g(rng);
  const Eigen::VectorXd dir = basis.columns * t;
  return dir / (-dir.minCoeff());
}

}  // namespace

TEST_CASE("vertex fixtures at q = 4 and q = 3") {
  const VertexSet b2 = vertices_of(ResidueSet(4, {2}));
  CHECK(b2.size() == 2);
  CHECK(has_vertex(b2, {1, -1, 1, -1}));
  CHECK(has_vertex(b2, {-1, 1, -1, 1}));

  const VertexSet b13 = vertices_of(ResidueSet(4, {1, 3}));
  CHECK(b13.size() == 4);
  CHECK(has_vertex(b13, {1, 1, -1, -1}));
  CHECK(has_vertex(b13, {-1, -1, 1, 1}));
  CHECK(has_vertex(b13, {1, -1, -1, 1}));
  CHECK(has_vertex(b13, {-1, 1, 1, -1}));

  const VertexSet full3 = vertices_of(ResidueSet(3, {1, 2}));
  CHECK(full3.size() == 3);
  CHECK(has_vertex(full3, {2, -1, -1}));
  CHECK(has_vertex(full3, {-1, 2, -1}));
  CHECK(has_vertex(full3, {-1, -1, 2}));

  CHECK(vertices_of(ResidueSet(5, {})).empty());
}

TEST_CASE("vertices are sorted, feasible, distinct and closed under feasible negation") {
  for (int q = 3; q <= 9; ++q) {
    for (const ResidueSet& b : symmetric_sets(q)) {
      const SubspaceBasis basis = wb_basis(b);
      const VertexSet vs = polytope_vertices(FeasiblePolytope(basis));
      for (std::size_t i = 0; i < vs.size(); ++i) {
        const Eigen::VectorXd& v = vs.vertices[i];
        CHECK(v.minCoeff() >= -1.0 - 1e-10);
        CHECK((v - basis.columns * (basis.columns.transpose() * v)).norm() <= 1e-10);
        CHECK(std::abs(v.sum()) <= 1e-10);
        int active = 0;
        for (int j = 0; j < q; ++j) active += std::abs(v(j) + 1.0) <= 1e-9;
        CHECK(active >= basis.dim());
        for (std::size_t k = i + 1; k < vs.size(); ++k) {
          CHECK((v - vs.vertices[k]).cwiseAbs().maxCoeff() >= 1e-7);
          CHECK(std::lexicographical_compare(v.data(), v.data() + q, vs.vertices[k].data(),
                                             vs.vertices[k].data() + q));
        }
        if ((-v).minCoeff() >= -1.0 - 1e-9) {
          const bool found = std::any_of(vs.vertices.begin(), vs.vertices.end(), [&](const Eigen::VectorXd& w) {
            return (w + v).cwiseAbs().maxCoeff() < 1e-7;
          });
          CHECK(found);
        }
      }
    }
  }
}

TEST_CASE("full residue set: vertices are the permutations of (q-1, -1, ..., -1)") {
  for (int q = 3; q <= 9; ++q) {
    const VertexSet vs = vertices_of(ResidueSet::full(q));
    CHECK(vs.size() == static_cast<std::size_t>(q));
    for (const auto& v : vs.vertices) CHECK(std::abs(v.maxCoeff() - (q - 1)) < 1e-9);
    CHECK(std::abs(kappa_prime_1(vs).value + std::log(double(q))) < 1e-12);
    const DimensionBound d = dimension_bound(ResidueSet::full(q));
    CHECK(std::abs(d.bound) < 1e-12);
    CHECK(std::abs(d.raw_bound) < 1e-12);
  }
}

TEST_CASE("kappa values") {
  const VertexSet b2 = vertices_of(ResidueSet(4, {2}));
  CHECK(kappa(1.0, b2) == 0.0);
  CHECK(std::abs(kappa(0.5, b2) - 0.5 * std::log(2.0)) < 1e-14);
  CHECK(kappa(0.3, vertices_of(ResidueSet(5, {}))) == 0.0);
  CHECK_THROWS_AS(kappa(0.0, b2), InvalidInput);
  CHECK_THROWS_AS(kappa(1.5, b2), InvalidInput);
  // Small theta stays finite; kappa(theta) -> log max(1+v) = log q for the full set.
  for (int q : {3, 6, 10}) {
    const double k = kappa(1e-4, vertices_of(ResidueSet::full(q)));
    CHECK(std::isfinite(k));
    CHECK(std::abs(k - std::log(double(q))) < 1e-3);
  }
}

TEST_CASE("kappa is convex in theta and vertex-attained") {
  std::mt19937_64 rng(11);
  for (int q : {4, 5, 6, 8}) {
    for (const ResidueSet& b : symmetric_sets(q)) {
      if (b.empty()) continue;
      const SubspaceBasis basis = wb_basis(b);
      const VertexSet vs = polytope_vertices(FeasiblePolytope(basis));
      for (int i = 2; i < 19; ++i) {
        const double t = i / 20.0;
        const double mid = kappa(t, vs);
        const double chord = 0.5 * (kappa(t - 0.05, vs) + kappa(t + 0.05, vs));
        CHECK(mid <= chord + 1e-12);
      }
      // No boundary point beats the vertex maximum (maximum principle oracle).
      const double kp = kappa_prime_1(vs).value;
      const double k2 = kappa(0.5, vs);
      for (int s = 0; s < 200; ++s) {
        const Eigen::VectorXd v = random_boundary_point(basis, rng);
        CHECK(kappa_prime_objective(v) >= kp - 1e-12);
        CHECK(kappa_objective(0.5, v) <= k2 + 1e-12);
      }
    }
  }
}

TEST_CASE("kappa'(1) and dimension bound fixtures") {
  for (const char* list : {"2", "1,3"}) {
    const DimensionBound d = dimension_bound(ResidueSet::parse(4, list));
    CHECK(std::abs(d.kappa_prime_1 + std::log(2.0)) < 1e-12);
    CHECK(std::abs(d.bound - 0.5) < 1e-12);
    CHECK(std::abs(kappa_prime_objective(d.witness_vertex) - d.kappa_prime_1) < 1e-12);
  }
  const DimensionBound d3 = dimension_bound(ResidueSet(3, {1, 2}));
  CHECK(std::abs(d3.kappa_prime_1 + std::log(3.0)) < 1e-12);
  CHECK(std::abs(d3.bound) < 1e-12);
  const DimensionBound empty = dimension_bound(ResidueSet(4, {}));
  CHECK(empty.bound == 1.0);
  CHECK(empty.kappa_prime_1 == 0.0);

  const DimensionBound asym = dimension_bound(ResidueSet(5, {1}));
  CHECK(asym.symmetrized);
  CHECK(asym.residues.members() == std::vector<int>{1, 4});

  // Witness is the lexicographically smallest maximizer: (-1, -1, 1, 1) for B = {1,3}.
  const DimensionBound d13 = dimension_bound(ResidueSet(4, {1, 3}));
  CHECK(d13.witness_vertex(0) == doctest::Approx(-1.0));
  CHECK(d13.witness_vertex(1) == doctest::Approx(-1.0));
}

TEST_CASE("subgroup bound fixtures") {
  auto s = subgroup_bound(ResidueSet(4, {2}));
  CHECK(std::abs(s.bound - 0.5) < 1e-15);
  CHECK_FALSE(s.proper);
  REQUIRE(s.group);
  CHECK(s.group->elements() == std::vector<int>{0, 2});
  s = subgroup_bound(ResidueSet(8, {2}));
  CHECK(std::abs(s.bound - 1.0 / 3.0) < 1e-15);
  CHECK(s.proper);
  s = subgroup_bound(ResidueSet(5, {1, 4}));
  CHECK(std::abs(s.bound) < 1e-15);
  CHECK(s.group->order() == 5);
  CHECK(subgroup_bound(ResidueSet(5, {})).bound == 1.0);
}

TEST_CASE("dominance, strictness, monotonicity and positivity for q <= 10") {
  for (int q = 3; q <= 10; ++q) {
    const auto sets = symmetric_sets(q);
    std::vector<double> bounds;
    for (const ResidueSet& b : sets) {
      const DimensionBound d = dimension_bound(b);
      bounds.push_back(d.bound);
      CHECK(d.bound >= 0.0);
      CHECK(d.bound <= 1.0);
      CHECK(d.kappa_prime_1 <= 0.0);
      CHECK(d.delta >= -1e-12);
      if (d.subgroup.proper) CHECK(d.delta >= 1e-6);
      if (!b.is_full()) CHECK(d.bound > 0.0);
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (std::size_t j = 0; j < sets.size(); ++j) {
        if (sets[i].subset_of(sets[j])) CHECK(bounds[i] >= bounds[j] - 1e-12);
      }
    }
  }
}

TEST_CASE("finite-difference left derivative") {
  const VertexSet b2 = vertices_of(ResidueSet(4, {2}));
  const double kp = kappa_prime_1(b2).value;
  double previous = -std::numeric_limits<double>::infinity();
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const double fd = kappa_left_derivative_fd(b2, h);
    CHECK(fd <= kp + kappa_fd_rounding(kp, h));
    CHECK(fd >= previous - kappa_fd_rounding(kp, h));
    previous = fd;
  }
  CHECK(std::abs(previous + std::log(2.0)) < 1e-3);
  // Where the maximizer is not a 0/c vertex kappa is strictly convex and the ordering is strict.
  const VertexSet r5 = vertices_of(ResidueSet(5, {1, 4}));
  const double kp5 = kappa_prime_1(r5).value;
  CHECK(kappa_left_derivative_fd(r5, 1e-2) < kappa_left_derivative_fd(r5, 1e-3));
  CHECK(kappa_left_derivative_fd(r5, 1e-3) < kappa_left_derivative_fd(r5, 1e-4));
  CHECK(kappa_left_derivative_fd(r5, 1e-4) < kp5);
  CHECK(kappa_fd_rounding(-0.5, 1e-4) == doctest::Approx(64.0 * 2.220446049250313e-16 / 1e-4));
  for (double h : {1e-2, 1e-3, 1e-4}) CHECK(kappa_left_derivative_fd(vertices_of(ResidueSet(4, {})), h) == 0.0);
  CHECK_THROWS_AS(kappa_left_derivative_fd(b2, 0.5), InvalidInput);
  CHECK_THROWS_AS(kappa_left_derivative_fd(b2, 0.0), InvalidInput);
}

TEST_CASE("one-step inequality") {
  const ResidueSet b(4, {2});
  const SubspaceBasis basis = wb_basis(b);
  const VertexSet vs = polytope_vertices(FeasiblePolytope(basis));
  CHECK(def_reform_check(0.0, Eigen::VectorXd::Zero(4), 2.0, basis, vs));

  const Eigen::VectorXd v = vs.vertices.front();
  CHECK(def_reform_check(1.0, v, 2.0, basis, vs));
  const double lhs = std::sqrt((1.0 + v.array()).square().mean());
  CHECK(std::abs(lhs - std::exp(kappa(0.5, vs))) < 1e-12);

  CHECK_THROWS_AS(def_reform_check(1.0, v, 1.0, basis, vs), PreconditionError);
  CHECK_THROWS_AS(def_reform_check(-1.0, v, 2.0, basis, vs), PreconditionError);
  CHECK_THROWS_AS(def_reform_check(0.5, v, 2.0, basis, vs), PreconditionError);
  Eigen::VectorXd off(4);
  off << 1, -1, 0, 0;
  CHECK_THROWS_AS(def_reform_check(1.0, off, 2.0, basis, vs), PreconditionError);

  // Interior points are strictly inside.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int q : {5, 6, 7}) {
    for (const ResidueSet& bb : symmetric_sets(q)) {
      if (bb.empty()) continue;
      const SubspaceBasis bs = wb_basis(bb);
      const VertexSet vv = polytope_vertices(FeasiblePolytope(bs));
      for (int t = 0; t < 10; ++t) {
        Eigen::VectorXd mix = Eigen::VectorXd::Zero(q);
        double total = 0;
        for (const auto& w : vv.vertices) {
          const double c = unit(rng);
          mix += c * w;
          total += c;
        }
        mix *= 0.9 / total;
        const double a = 0.5 + unit(rng);
        for (double p : {1.25, 2.0, 4.0}) {
          CHECK(def_reform_check(a, a * mix, p, bs, vv));
          CompensatedSum s;
          for (int j = 0; j < q; ++j) s += std::pow(a + a * mix(j), p);
          CHECK(std::pow(s.value() / q, 1.0 / p) < a * std::exp(kappa(1.0 / p, vv)));
        }
      }
    }
  }
}

TEST_CASE("enumeration guard") {
  // d = 20 constraints chosen from 41: C(41, 20) active sets exceed the limit.
  std::vector<int> members;
  for (int m = 1; m <= 10; ++m) {
    members.push_back(m);
    members.push_back(41 - m);
  }
  CHECK_THROWS_AS(vertices_of(ResidueSet(41, members)), ResourceError);
}
