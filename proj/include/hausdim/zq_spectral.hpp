#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hausdim/spectrum.hpp"

namespace hausdim {

using ComplexVector = std::vector<Complex>;

/// A modulus q >= 3 together with a set of nonzero residues.
///
/// Members are stored sorted and unique. Construction rejects any member
/// outside {1, ..., q-1}.
class ResidueSet {
 public:
  ResidueSet(int q, std::vector<int> members);

  /// {1, ..., q-1}.
  static ResidueSet full(int q);
  /// Parses a comma separated list ("1,3", "" for the empty set).
  static ResidueSet parse(int q, std::string_view list);

  int q() const { return q_; }
  const std::vector<int>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(int m) const;
  /// m in B implies q-m in B.
  bool symmetric() const;
  bool is_full() const { return static_cast<int>(members_.size()) == q_ - 1; }
  bool subset_of(const ResidueSet& other) const;

  /// "1,3"
  std::string to_string() const;

  friend bool operator==(const ResidueSet&, const ResidueSet&) = default;

 private:
  int q_;
  std::vector<int> members_;
};

/// omega_m = (e^{2 pi i m j / q})_{j=0..q-1}.
struct HarmonicVector {
  int m;
  ComplexVector entries;
};

HarmonicVector harmonic(int q, int m);

/// Orthonormal real basis (as the columns of a q x dim matrix) of W_B.
struct SubspaceBasis {
  int q = 0;
  Eigen::MatrixXd columns;

  int dim() const { return static_cast<int>(columns.cols()); }
};

/// Unnormalized forward transform  v^(m) = sum_j e^{-2 pi i m j / q} v_j.
ComplexVector dft_zq(std::span<const Complex> v, int q);
/// (1/q) sum_m e^{+2 pi i m j / q} v^(m).
ComplexVector inverse_dft_zq(std::span<const Complex> vhat, int q);
/// Forward transform of a real vector.
ComplexVector dft_zq_real(std::span<const double> v, int q);

/// B together with q - B.
ResidueSet symmetrize(const ResidueSet& b);

/// Real span of {omega_m : m in B}; equivalently the zero-sum real vectors
/// whose transform vanishes off B. Requires a symmetric B.
SubspaceBasis wb_basis(const ResidueSet& b);

/// n = k q^v with q not dividing k.
struct Valuation {
  int exponent;
  std::int64_t cofactor;
};

Valuation q_valuation(std::int64_t n, int q);

/// Membership in C_B = {k q^v : k mod q in B, v >= 0} U {0}. Negative n is
/// tested literally with k mod q reduced into {0, ..., q-1}.
bool in_cb(std::int64_t n, const ResidueSet& b);

/// The subgroup {0, d, 2d, ...} of Z_q for a divisor d of q.
struct Subgroup {
  int q;
  int step;

  int order() const { return q / step; }
  bool contains(int residue) const { return residue % step == 0; }
  std::vector<int> elements() const;
};

/// All subgroups of Z_q sorted by order.
std::vector<Subgroup> subgroups(int q);

struct SubgroupContainment {
  Subgroup group;
  /// B is a strict subset of H \ {0}.
  bool proper_inclusion;
};

/// The subgroup generated by B (multiples of gcd(B U {q})).
SubgroupContainment minimal_subgroup_containing(const ResidueSet& b);

/// Residues m in {1..q-1} such that some nonzero n of the spectrum has a
/// divisor congruent to m mod q. Signs are ignored.
std::vector<int> spectrum_richness(std::span<const std::int64_t> spectrum, int q);

/// A point mass at `position` with complex weight.
struct Atom {
  double position;
  Complex weight;
};

/// The complex measure (1/q) sum_k omega^{kl} delta_{k/q}.
struct CounterexampleMeasure {
  int q;
  int l;
  std::vector<Atom> atoms;
  /// Fourier coefficients for |n| <= q^2.
  SparseSpectrum spectrum;
};

CounterexampleMeasure counterexample_measure(int q, int l);

}  // namespace hausdim
