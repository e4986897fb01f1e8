#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace hausdim {

using Complex = std::complex<double>;

/// A finitely supported Fourier series  x -> sum_n c_n e^{2 pi i n x}.
///
/// Entries are kept sorted by frequency with no duplicates. `q` and
/// `truncation` are informational metadata (0 when not applicable).
class SparseSpectrum {
 public:
  using Entry = std::pair<std::int64_t, Complex>;

  SparseSpectrum() = default;
  /// Duplicate frequencies are summed; exact zeros are kept.
  explicit SparseSpectrum(std::vector<Entry> entries, int q = 0, int truncation = 0);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int q() const { return q_; }
  int truncation() const { return truncation_; }

  /// Coefficient at frequency n (zero if absent).
  Complex coefficient(std::int64_t n) const;
  std::int64_t max_abs_frequency() const;

  /// c_{-n} == conj(c_n) within `tol` (absolute) for every stored n.
  bool conjugate_symmetric(double tol = 1e-12) const;

  Complex evaluate(double x) const;

 private:
  std::vector<Entry> entries_;
  int q_ = 0;
  int truncation_ = 0;
};

}  // namespace hausdim
