#include "hausdim/zq_spectral.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hausdim/errors.hpp"
#include "hausdim/numeric.hpp"

namespace hausdim {

namespace {

// e^{sign * 2 pi i r / q} with r reduced exactly into [0, q).
Complex root_of_unity(std::int64_t r, int q, int sign) {
  const std::int64_t reduced = ((r % q) + q) % q;
  const double angle = 2.0 * kPi * static_cast<double>(reduced) / q;
  return {std::cos(angle), sign * std::sin(angle)};
}

void require_modulus(int q) {
  if (q < 3) throw InvalidInput("modulus q must be >= 3, got " + std::to_string(q));
}

}  // namespace

ResidueSet::ResidueSet(int q, std::vector<int> members) : q_(q), members_(std::move(members)) {
  require_modulus(q);
  for (int m : members_) {
    if (m < 1 || m > q - 1) {
      throw InvalidInput("residue " + std::to_string(m) + " outside {1,...," +
                         std::to_string(q - 1) + "}");
    }
  }
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

ResidueSet ResidueSet::full(int q) {
  require_modulus(q);
  std::vector<int> all(q - 1);
  std::iota(all.begin(), all.end(), 1);
  return ResidueSet(q, std::move(all));
}

ResidueSet ResidueSet::parse(int q, std::string_view list) {
  std::vector<int> members;
  std::string token;
  std::istringstream in{std::string(list)};
  while (std::getline(in, token, ',')) {
    token.erase(std::remove_if(token.begin(), token.end(), [](unsigned char c) { return std::isspace(c); }),
                token.end());
    if (token.empty()) continue;
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(token, &used);
    } catch (const std::exception&) {
      throw InvalidInput("cannot parse residue '" + token + "'");
    }
    if (used != token.size()) throw InvalidInput("cannot parse residue '" + token + "'");
    members.push_back(value);
  }
  return ResidueSet(q, std::move(members));
}

bool ResidueSet::contains(int m) const {
  return std::binary_search(members_.begin(), members_.end(), m);
}

bool ResidueSet::symmetric() const {
  return std::all_of(members_.begin(), members_.end(), [&](int m) { return contains(q_ - m); });
}

bool ResidueSet::subset_of(const ResidueSet& other) const {
  return q_ == other.q_ &&
         std::includes(other.members_.begin(), other.members_.end(), members_.begin(), members_.end());
}

std::string ResidueSet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(members_[i]);
  }
  return out;
}

HarmonicVector harmonic(int q, int m) {
  HarmonicVector h{m, ComplexVector(q)};
  for (int j = 0; j < q; ++j) h.entries[j] = root_of_unity(static_cast<std::int64_t>(m) * j, q, +1);
  return h;
}

ComplexVector dft_zq(std::span<const Complex> v, int q) {
  if (static_cast<int>(v.size()) != q) {
    throw InvalidInput("dft_zq: vector length " + std::to_string(v.size()) + " != q = " +
                       std::to_string(q));
  }
  ComplexVector out(q);
  for (int m = 0; m < q; ++m) {
    Complex s{0.0, 0.0};
    for (int j = 0; j < q; ++j) s += root_of_unity(static_cast<std::int64_t>(m) * j, q, -1) * v[j];
    out[m] = s;
  }
  return out;
}

ComplexVector inverse_dft_zq(std::span<const Complex> vhat, int q) {
  if (static_cast<int>(vhat.size()) != q) {
    throw InvalidInput("inverse_dft_zq: vector length " + std::to_string(vhat.size()) +
                       " != q = " + std::to_string(q));
  }
  ComplexVector out(q);
  for (int j = 0; j < q; ++j) {
    Complex s{0.0, 0.0};
    for (int m = 0; m < q; ++m) s += root_of_unity(static_cast<std::int64_t>(m) * j, q, +1) * vhat[m];
    out[j] = s / static_cast<double>(q);
  }
  return out;
}

ComplexVector dft_zq_real(std::span<const double> v, int q) {
  ComplexVector c(v.begin(), v.end());
  return dft_zq(c, q);
}

ResidueSet symmetrize(const ResidueSet& b) {
  std::vector<int> members = b.members();
  for (int m : b.members()) members.push_back(b.q() - m);
  return ResidueSet(b.q(), std::move(members));
}

SubspaceBasis wb_basis(const ResidueSet& b) {
  if (!b.symmetric()) {
    throw InvalidInput("wb_basis: residue set {" + b.to_string() +
                       "} is not symmetric; symmetrize it first");
  }
  const int q = b.q();
  std::vector<Eigen::VectorXd> cols;
  for (int m : b.members()) {
    if (2 * m < q) {
      const double scale = std::sqrt(2.0 / q);
      Eigen::VectorXd c(q), s(q);
      for (int j = 0; j < q; ++j) {
        const Complex w = root_of_unity(static_cast<std::int64_t>(m) * j, q, +1);
        c(j) = scale * w.real();
        s(j) = scale * w.imag();
      }
      cols.push_back(std::move(c));
      cols.push_back(std::move(s));
    } else if (2 * m == q) {
      Eigen::VectorXd alt(q);
      for (int j = 0; j < q; ++j) alt(j) = (j % 2 == 0 ? 1.0 : -1.0) / std::sqrt(static_cast<double>(q));
      cols.push_back(std::move(alt));
    }
  }
  SubspaceBasis basis{q, Eigen::MatrixXd(q, static_cast<Eigen::Index>(cols.size()))};
  for (std::size_t i = 0; i < cols.size(); ++i) basis.columns.col(static_cast<Eigen::Index>(i)) = cols[i];
  return basis;
}

Valuation q_valuation(std::int64_t n, int q) {
  if (n == 0) throw InvalidInput("q_valuation: n must be nonzero");
  if (q < 2) throw InvalidInput("q_valuation: modulus must be >= 2");
  Valuation v{0, n};
  while (v.cofactor % q == 0) {
    v.cofactor /= q;
    ++v.exponent;
  }
  return v;
}

bool in_cb(std::int64_t n, const ResidueSet& b) {
  if (n == 0) return true;
  const auto [exponent, k] = q_valuation(n, b.q());
  const int residue = static_cast<int>(((k % b.q()) + b.q()) % b.q());
  return b.contains(residue);
}

std::vector<int> Subgroup::elements() const {
  std::vector<int> out;
  for (int r = 0; r < q; r += step) out.push_back(r);
  return out;
}

std::vector<Subgroup> subgroups(int q) {
  if (q < 2) throw InvalidInput("subgroups: modulus must be >= 2");
  std::vector<Subgroup> out;
  for (int d = q; d >= 1; --d) {
    if (q % d == 0) out.push_back({q, d});
  }
  // step decreasing == order increasing
  return out;
}

SubgroupContainment minimal_subgroup_containing(const ResidueSet& b) {
  if (b.empty()) throw InvalidInput("minimal_subgroup_containing: B is empty");
  int g = b.q();
  for (int m : b.members()) g = std::gcd(g, m);
  const Subgroup h{b.q(), g};
  return {h, static_cast<int>(b.size()) != h.order() - 1};
}

std::vector<int> spectrum_richness(std::span<const std::int64_t> spectrum, int q) {
  if (q < 2) throw InvalidInput("spectrum_richness: modulus must be >= 2");
  std::vector<bool> seen(q, false);
  auto mark = [&](std::int64_t d) { seen[static_cast<std::size_t>(d % q)] = true; };
  for (std::int64_t n : spectrum) {
    if (n == 0) continue;
    const std::int64_t a = n < 0 ? -n : n;
    for (std::int64_t d = 1; d <= a / d; ++d) {
      if (a % d == 0) {
        mark(d);
        mark(a / d);
      }
    }
  }
  std::vector<int> out;
  for (int m = 1; m < q; ++m) {
    if (seen[m]) out.push_back(m);
  }
  return out;
}

CounterexampleMeasure counterexample_measure(int q, int l) {
  require_modulus(q);
  if (l < 1 || l > q - 1) {
    throw InvalidInput("counterexample_measure: l = " + std::to_string(l) + " outside {1,...," +
                       std::to_string(q - 1) + "}");
  }
  CounterexampleMeasure mu{q, l, {}, {}};
  for (int k = 0; k < q; ++k) {
    mu.atoms.push_back({static_cast<double>(k) / q,
                        root_of_unity(static_cast<std::int64_t>(k) * l, q, +1) / static_cast<double>(q)});
  }
  // mu^(n) = sum_k w_k e^{-2 pi i n k / q}
  std::vector<SparseSpectrum::Entry> entries;
  const std::int64_t limit = static_cast<std::int64_t>(q) * q;
  for (std::int64_t n = -limit; n <= limit; ++n) {
    Complex c{0.0, 0.0};
    for (int k = 0; k < q; ++k) c += mu.atoms[k].weight * root_of_unity(n * k, q, -1);
    if (std::abs(c) > 1e-12) entries.emplace_back(n, c);
  }
  mu.spectrum = SparseSpectrum(std::move(entries), q, 0);
  return mu;
}

}  // namespace hausdim
