#include "hausdim/spectrum.hpp"

#include <algorithm>
#include <cstdlib>

#include "hausdim/numeric.hpp"

namespace hausdim {

SparseSpectrum::SparseSpectrum(std::vector<Entry> entries, int q, int truncation)
    : q_(q), truncation_(truncation) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (auto& e : entries) {
    if (!entries_.empty() && entries_.back().first == e.first) {
      entries_.back().second += e.second;
    } else {
      entries_.push_back(e);
    }
  }
}

Complex SparseSpectrum::coefficient(std::int64_t n) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), n,
                             [](const Entry& e, std::int64_t v) { return e.first < v; });
  if (it != entries_.end() && it->first == n) return it->second;
  return {0.0, 0.0};
}

std::int64_t SparseSpectrum::max_abs_frequency() const {
  std::int64_t m = 0;
  for (const auto& [n, c] : entries_) m = std::max(m, n < 0 ? -n : n);
  return m;
}

bool SparseSpectrum::conjugate_symmetric(double tol) const {
  for (const auto& [n, c] : entries_) {
    if (std::abs(coefficient(-n) - std::conj(c)) > tol) return false;
  }
  return true;
}

Complex SparseSpectrum::evaluate(double x) const {
  Complex sum{0.0, 0.0};
  for (const auto& [n, c] : entries_) {
    sum += c * std::polar(1.0, 2.0 * kPi * static_cast<double>(n) * x);
  }
  return sum;
}

}  // namespace hausdim
