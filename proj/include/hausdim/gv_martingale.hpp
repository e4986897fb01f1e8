#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hausdim/kappa_bound.hpp"
#include "hausdim/numeric.hpp"
#include "hausdim/spectrum.hpp"
#include "hausdim/zq_spectral.hpp"

namespace hausdim {

/// The points j / q^N, j = 0..q^N-1, addressed by their integer index.
class QadicGrid {
 public:
  /// Throws ResourceError when q^N > 1e7.
  QadicGrid(int q, int levels);

  int q() const { return q_; }
  int levels() const { return levels_; }
  std::int64_t size() const { return size_; }
  /// q^k for 0 <= k <= N.
  std::int64_t power(int k) const { return powers_.at(static_cast<std::size_t>(k)); }
  double point(std::int64_t j) const { return static_cast<double>(j) / static_cast<double>(size_); }

 private:
  int q_;
  int levels_;
  std::int64_t size_;
  std::vector<std::int64_t> powers_;
};

/// A vertex of the q-regular tree: the level-k atom {j : j = cls mod q^k}.
/// Child i of (k-1, c) is (k, c + i q^{k-1}).
struct TreeAddress {
  int level = 0;
  std::int64_t cls = 0;

  TreeAddress child(int i, const QadicGrid& grid) const {
    return {level + 1, cls + static_cast<std::int64_t>(i) * grid.power(level)};
  }
};

using GridFunction = std::vector<double>;

/// f(j / q^N) = sum_n c_n e^{2 pi i n j / q^N}. Requires max |n| < q^N / 2 and
/// a conjugate-symmetric spectrum.
GridFunction sample_on_grid(const SparseSpectrum& spectrum, const QadicGrid& grid);

/// Sum over the frequencies selected by `keep`, evaluated on the grid by
/// exact index arithmetic. Returns the real part.
template <typename Predicate>
GridFunction synthesize_on_grid(const SparseSpectrum& spectrum, const QadicGrid& grid, Predicate keep);

/// The backwards martingale f_0, ..., f_N of a grid function.
class MartingaleSequence {
 public:
  /// `atom_values[k]` holds the q^k values of f_k on the level-k atoms.
  MartingaleSequence(QadicGrid grid, std::vector<std::vector<double>> atom_values, SparseSpectrum source);

  const QadicGrid& grid() const { return grid_; }
  int depth() const { return grid_.levels(); }
  /// f_k on the level-k atoms, indexed by class j mod q^k.
  const std::vector<double>& atom_values(int k) const { return atoms_.at(static_cast<std::size_t>(k)); }
  /// f_k expanded to every grid point.
  GridFunction level(int k) const;
  /// Value of f_k on a level-k atom.
  double value(const TreeAddress& atom) const;
  /// The spectrum the sequence was built from (empty if built from samples only).
  const SparseSpectrum& source() const { return source_; }
  double sup_norm() const;

 private:
  QadicGrid grid_;
  std::vector<std::vector<double>> atoms_;
  SparseSpectrum source_;
};

/// f_N = f; f_k(x) = (1/q) sum_i f_{k+1}(x + i / q^{N-k}), which is the mean of f
/// over the shifts x + j / q^{N-k}, j < q^{N-k}.
MartingaleSequence martingale_levels(GridFunction f, const QadicGrid& grid, SparseSpectrum source = {});

/// Convenience: sample a spectrum and build its martingale.
MartingaleSequence martingale_from_spectrum(const SparseSpectrum& spectrum, const QadicGrid& grid);

/// max_x |f_k(x) - sum_{q^{N-k} | l} c_l e^{2 pi i l x}|.
double spectral_projection_check(const MartingaleSequence& seq, int k);

/// (df_k(alpha[0]), ..., df_k(alpha[q-1])) for a parent atom at level k-1.
std::vector<double> sibling_difference_vector(const MartingaleSequence& seq, const TreeAddress& parent);

/// The same vector synthesized as sum_{m=1}^{q-1} e_m omega_m from the
/// frequencies l with q^{N-k} || l.
ComplexVector sibling_difference_synthesis(const MartingaleSequence& seq, const TreeAddress& parent);

/// Max over all parent atoms of the distance from the sibling difference
/// vector to W_B. Throws PreconditionError naming the first frequency of the
/// source outside C_B. B must be symmetric.
double wb_membership_check(const MartingaleSequence& seq, const ResidueSet& b);

/// ((1/q^N) sum_j |g_j|^p)^{1/p}.
double lp_norm(std::span<const double> g, double p);

struct InequalityViolation {
  std::string kind;
  int level = 0;
  std::int64_t atom = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct GrowthReport {
  double p = 0.0;
  double kappa = 0.0;
  /// ||f_k||_p for k = 0..N.
  std::vector<double> norms;
  /// min over all checked inequalities of (rhs - lhs) / rhs.
  double worst_relative_slack = 0.0;
  std::size_t checks = 0;
  std::vector<InequalityViolation> violations;
  bool pass() const { return violations.empty(); }
};

/// Per-step, per-atom and global L_p growth bounds with exponent kappa(1/p).
GrowthReport growth_check(const MartingaleSequence& seq, const VertexSet& vertices, double p);
GrowthReport growth_check(const MartingaleSequence& seq, const ResidueSet& b, double p);

struct SetAverageReport {
  double p = 0.0;
  double beta = 0.0;
  double kappa = 0.0;
  std::size_t set_size = 0;
  double average = 0.0;      // (1/q^N) sum_{x in C} f(x)
  double holder_bound = 0.0; // ||f||_p (q^{-N} #C)^{(p-1)/p}
  double growth_bound = 0.0; // q e^{kappa N} c_0 (q^{-N} #C)^{(p-1)/p}
  /// e^{kappa(1/p)} q^{(beta-1)(p-1)/p}; the estimate decays in N when < 1.
  double decay_factor = 0.0;
  /// growth_bound rewritten as e^{kappa N} q^{gamma(beta-1)N}(q^{-beta N} #C)^gamma q c_0.
  double rewritten_growth_bound = 0.0;
  bool pass = false;
};

/// The Holder chain bounding the average of f over a set of grid indices.
SetAverageReport set_average_check(const MartingaleSequence& seq, std::span<const std::int64_t> subset,
                                   double beta, double p, const VertexSet& vertices);

struct SandwichReport {
  std::int64_t points = 0;
  /// min over grid points of (middle - inner mass) and (outer mass - middle).
  double min_lower_gap = 0.0;
  double min_upper_gap = 0.0;
  std::vector<double> inner_mass;
  std::vector<double> smoothed;  // q^{-N} (Phi_N * mu)(x)
  std::vector<double> outer_mass;
  bool pass = false;
};

/// Fourier coefficient of the trapezoidal kernel Phi_N (height q^N on
/// |t| <= 1/(2q^N), linear decay to 0 at |t| = 1/(2q^{N-1})).
double phi_kernel_coefficient(int q, int levels, std::int64_t n);

/// mu(|y - x| <= r) for the density with the given spectrum.
double interval_mass(const SparseSpectrum& density, double center, double radius);

/// Checks mu(x +- 1/(2q^N)) <= q^{-N} Phi_N * mu(x) <= mu(x +- 1/(2q^{N-1})) on every grid point.
SandwichReport phi_kernel_mass_sandwich(const SparseSpectrum& density, const QadicGrid& grid);

// ---------------------------------------------------------------------------

template <typename Predicate>
GridFunction synthesize_on_grid(const SparseSpectrum& spectrum, const QadicGrid& grid, Predicate keep) {
  const std::int64_t size = grid.size();
  std::vector<Complex> roots(static_cast<std::size_t>(size));
  for (std::int64_t r = 0; r < size; ++r) {
    const double angle = 2.0 * kPi * static_cast<double>(r) / static_cast<double>(size);
    roots[static_cast<std::size_t>(r)] = {std::cos(angle), std::sin(angle)};
  }
  std::vector<Complex> acc(static_cast<std::size_t>(size), Complex{0.0, 0.0});
  for (const auto& [n, c] : spectrum.entries()) {
    if (!keep(n)) continue;
    const std::int64_t step = ((n % size) + size) % size;
    std::int64_t r = 0;
    for (std::int64_t j = 0; j < size; ++j) {
      acc[static_cast<std::size_t>(j)] += c * roots[static_cast<std::size_t>(r)];
      r += step;
      if (r >= size) r -= size;
    }
  }
  GridFunction out(static_cast<std::size_t>(size));
  for (std::int64_t j = 0; j < size; ++j) out[static_cast<std::size_t>(j)] = acc[static_cast<std::size_t>(j)].real();
  return out;
}

}  // namespace hausdim
