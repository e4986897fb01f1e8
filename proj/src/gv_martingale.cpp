#include "hausdim/gv_martingale.hpp"

#include <algorithm>
#include <cmath>

#include "hausdim/errors.hpp"
#include "hausdim/numeric.hpp"

namespace hausdim {

namespace {

constexpr std::int64_t kGridPointLimit = 10'000'000;
constexpr double kInequalitySlack = 1e-9;

double total_mass(const MartingaleSequence& seq) {
  if (!seq.source().empty()) return seq.source().coefficient(0).real();
  return seq.atom_values(0).at(0);
}

Complex grid_root(std::int64_t n, std::int64_t j, std::int64_t size) {
  const std::int64_t r = (((n % size) + size) % size * j) % size;
  const double angle = 2.0 * kPi * static_cast<double>(r) / static_cast<double>(size);
  return {std::cos(angle), std::sin(angle)};
}

void require_parent(const MartingaleSequence& seq, const TreeAddress& parent) {
  const int n = seq.depth();
  if (parent.level < 0 || parent.level >= n || parent.cls < 0 || parent.cls >= seq.grid().power(parent.level)) {
    throw InvalidInput("tree address (" + std::to_string(parent.level) + ", " + std::to_string(parent.cls) +
                       ") is not a parent atom of a depth-" + std::to_string(n) + " tree");
  }
}

}  // namespace

QadicGrid::QadicGrid(int q, int levels) : q_(q), levels_(levels) {
  if (q < 3) throw InvalidInput("QadicGrid: q must be >= 3");
  if (levels < 1) throw InvalidInput("QadicGrid: N must be >= 1");
  size_ = guarded_pow(q, levels, kGridPointLimit, "QadicGrid q^N");
  powers_.push_back(1);
  for (int k = 1; k <= levels; ++k) powers_.push_back(powers_.back() * q);
}

GridFunction sample_on_grid(const SparseSpectrum& spectrum, const QadicGrid& grid) {
  if (2 * spectrum.max_abs_frequency() >= grid.size()) {
    throw InvalidInput("sample_on_grid: max |frequency| " + std::to_string(spectrum.max_abs_frequency()) +
                       " is not below q^N / 2 = " + std::to_string(grid.size() / 2));
  }
  if (!spectrum.conjugate_symmetric(1e-12)) {
    throw InvalidInput("sample_on_grid: spectrum is not conjugate symmetric; the function is not real");
  }
  return synthesize_on_grid(spectrum, grid, [](std::int64_t) { return true; });
}

MartingaleSequence::MartingaleSequence(QadicGrid grid, std::vector<std::vector<double>> atom_values,
                                       SparseSpectrum source)
    : grid_(std::move(grid)), atoms_(std::move(atom_values)), source_(std::move(source)) {
  if (static_cast<int>(atoms_.size()) != grid_.levels() + 1) {
    throw InvalidInput("MartingaleSequence: expected N + 1 levels");
  }
  for (int k = 0; k <= grid_.levels(); ++k) {
    if (static_cast<std::int64_t>(atoms_[k].size()) != grid_.power(k)) {
      throw InvalidInput("MartingaleSequence: level " + std::to_string(k) + " must have q^k atoms");
    }
  }
}

GridFunction MartingaleSequence::level(int k) const {
  const auto& atoms = atom_values(k);
  const std::int64_t period = grid_.power(k);
  GridFunction out(static_cast<std::size_t>(grid_.size()));
  for (std::int64_t j = 0; j < grid_.size(); ++j) out[static_cast<std::size_t>(j)] = atoms[static_cast<std::size_t>(j % period)];
  return out;
}

double MartingaleSequence::value(const TreeAddress& atom) const {
  return atom_values(atom.level).at(static_cast<std::size_t>(atom.cls));
}

double MartingaleSequence::sup_norm() const {
  const auto& top = atoms_.back();
  double m = 0.0;
  for (double v : top) m = std::max(m, std::abs(v));
  return m;
}

MartingaleSequence martingale_levels(GridFunction f, const QadicGrid& grid, SparseSpectrum source) {
  if (static_cast<std::int64_t>(f.size()) != grid.size()) {
    throw InvalidInput("martingale_levels: grid function has " + std::to_string(f.size()) + " samples, expected " +
                       std::to_string(grid.size()));
  }
  const int n = grid.levels();
  const int q = grid.q();
  std::vector<std::vector<double>> atoms(static_cast<std::size_t>(n + 1));
  atoms[n] = std::move(f);
  for (int k = n - 1; k >= 0; --k) {
    // Atom c at level k splits into the level-(k+1) atoms c + i q^k.
    const std::int64_t count = grid.power(k);
    const auto& finer = atoms[k + 1];
    auto& coarse = atoms[k];
    coarse.assign(static_cast<std::size_t>(count), 0.0);
    for (std::int64_t c = 0; c < count; ++c) {
      CompensatedSum s;
      for (int i = 0; i < q; ++i) s += finer[static_cast<std::size_t>(c + i * count)];
      coarse[static_cast<std::size_t>(c)] = s.value() / q;
    }
  }
  return MartingaleSequence(grid, std::move(atoms), std::move(source));
}

MartingaleSequence martingale_from_spectrum(const SparseSpectrum& spectrum, const QadicGrid& grid) {
  return martingale_levels(sample_on_grid(spectrum, grid), grid, spectrum);
}

double spectral_projection_check(const MartingaleSequence& seq, int k) {
  const QadicGrid& grid = seq.grid();
  if (k < 0 || k > grid.levels()) throw InvalidInput("spectral_projection_check: level out of range");
  const std::int64_t divisor = grid.power(grid.levels() - k);
  const GridFunction direct =
      synthesize_on_grid(seq.source(), grid, [divisor](std::int64_t l) { return l % divisor == 0; });
  const GridFunction fk = seq.level(k);
  double worst = 0.0;
  for (std::size_t j = 0; j < fk.size(); ++j) worst = std::max(worst, std::abs(fk[j] - direct[j]));
  return worst;
}

std::vector<double> sibling_difference_vector(const MartingaleSequence& seq, const TreeAddress& parent) {
  require_parent(seq, parent);
  const int q = seq.grid().q();
  const double base = seq.value(parent);
  std::vector<double> out(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) out[static_cast<std::size_t>(i)] = seq.value(parent.child(i, seq.grid())) - base;
  return out;
}

ComplexVector sibling_difference_synthesis(const MartingaleSequence& seq, const TreeAddress& parent) {
  require_parent(seq, parent);
  const QadicGrid& grid = seq.grid();
  const int q = grid.q();
  const int k = parent.level + 1;
  const int exact = grid.levels() - k;
  ComplexVector e(static_cast<std::size_t>(q), Complex{0.0, 0.0});
  for (const auto& [l, c] : seq.source().entries()) {
    if (l == 0) continue;
    const Valuation v = q_valuation(l, q);
    if (v.exponent != exact) continue;
    const int m = static_cast<int>(((v.cofactor % q) + q) % q);
    e[static_cast<std::size_t>(m)] += c * grid_root(l, parent.cls, grid.size());
  }
  ComplexVector out(static_cast<std::size_t>(q), Complex{0.0, 0.0});
  for (int m = 1; m < q; ++m) {
    const HarmonicVector w = harmonic(q, m);
    for (int j = 0; j < q; ++j) out[static_cast<std::size_t>(j)] += e[static_cast<std::size_t>(m)] * w.entries[static_cast<std::size_t>(j)];
  }
  return out;
}

double wb_membership_check(const MartingaleSequence& seq, const ResidueSet& b) {
  if (b.q() != seq.grid().q()) throw InvalidInput("wb_membership_check: modulus mismatch");
  for (const auto& [n, c] : seq.source().entries()) {
    if (std::abs(c) > 0.0 && !in_cb(n, b)) {
      throw PreconditionError("wb_membership_check: source frequency " + std::to_string(n) + " is outside C_B for B = {" +
                              b.to_string() + "}");
    }
  }
  const SubspaceBasis basis = wb_basis(b);
  const int q = b.q();
  double worst = 0.0;
  Eigen::VectorXd d(q);
  for (int level = 0; level < seq.depth(); ++level) {
    for (std::int64_t c = 0; c < seq.grid().power(level); ++c) {
      const auto diff = sibling_difference_vector(seq, {level, c});
      for (int i = 0; i < q; ++i) d(i) = diff[static_cast<std::size_t>(i)];
      const Eigen::VectorXd off = d - basis.columns * (basis.columns.transpose() * d);
      worst = std::max(worst, off.norm());
    }
  }
  return worst;
}

double lp_norm(std::span<const double> g, double p) {
  if (!(p >= 1.0)) throw InvalidInput("lp_norm: p must be >= 1");
  if (g.empty()) throw InvalidInput("lp_norm: empty grid function");
  CompensatedSum s;
  for (double v : g) s += std::pow(std::abs(v), p);
  return std::pow(s.value() / static_cast<double>(g.size()), 1.0 / p);
}

GrowthReport growth_check(const MartingaleSequence& seq, const VertexSet& vertices, double p) {
  if (!(p >= 1.0)) throw InvalidInput("growth_check: p must be >= 1");
  const QadicGrid& grid = seq.grid();
  const int n = grid.levels();
  const int q = grid.q();
  GrowthReport report;
  report.p = p;
  report.kappa = kappa(1.0 / p, vertices);
  report.worst_relative_slack = std::numeric_limits<double>::infinity();
  const double growth = std::exp(report.kappa);
  const double abs_slack = 1e-12 * std::max(1.0, seq.sup_norm());

  auto record = [&](const char* kind, int level, std::int64_t atom, double lhs, double rhs, double absolute) {
    ++report.checks;
    // Atoms of negligible mass only carry the absolute tolerance.
    if (rhs > 1e3 * absolute) report.worst_relative_slack = std::min(report.worst_relative_slack, (rhs - lhs) / rhs);
    if (lhs > rhs * (1.0 + kInequalitySlack) + absolute) report.violations.push_back({kind, level, atom, lhs, rhs});
  };

  for (int k = 0; k <= n; ++k) {
    // Each level-k atom carries q^{N-k} grid points.
    const auto& atoms = seq.atom_values(k);
    CompensatedSum s;
    for (double v : atoms) s += std::pow(std::abs(v), p);
    report.norms.push_back(std::pow(s.value() / static_cast<double>(atoms.size()), 1.0 / p));
  }
  for (int k = 1; k <= n; ++k) {
    record("step", k, -1, report.norms[k], growth * report.norms[k - 1], abs_slack);
    const double points_per_child = static_cast<double>(grid.power(n - k));
    for (std::int64_t c = 0; c < grid.power(k - 1); ++c) {
      const TreeAddress parent{k - 1, c};
      CompensatedSum children;
      for (int i = 0; i < q; ++i) children += std::pow(std::abs(seq.value(parent.child(i, grid))), p);
      const double lhs = std::pow(points_per_child * children.value(), 1.0 / p);
      const double rhs = growth * std::pow(q * points_per_child * std::pow(std::abs(seq.value(parent)), p), 1.0 / p);
      record("atom", k, c, lhs, rhs, abs_slack * std::pow(q * points_per_child, 1.0 / p));
    }
  }
  const double chained = std::exp(report.kappa * n) * report.norms[0];
  record("global", n, -1, report.norms[n], chained, abs_slack);
  record("global_mass", 0, -1, chained, q * std::exp(report.kappa * n) * std::abs(total_mass(seq)), abs_slack);
  return report;
}

GrowthReport growth_check(const MartingaleSequence& seq, const ResidueSet& b, double p) {
  return growth_check(seq, polytope_vertices(FeasiblePolytope(wb_basis(b))), p);
}

SetAverageReport set_average_check(const MartingaleSequence& seq, std::span<const std::int64_t> subset, double beta,
                                   double p, const VertexSet& vertices) {
  if (!(p > 1.0)) throw InvalidInput("set_average_check: p must exceed 1");
  if (subset.empty()) throw InvalidInput("set_average_check: subset must be nonempty");
  const QadicGrid& grid = seq.grid();
  const auto& f = seq.atom_values(grid.levels());
  SetAverageReport r;
  r.p = p;
  r.beta = beta;
  r.kappa = kappa(1.0 / p, vertices);
  r.set_size = subset.size();
  CompensatedSum sum;
  for (std::int64_t j : subset) {
    if (j < 0 || j >= grid.size()) throw InvalidInput("set_average_check: grid index out of range");
    sum += f[static_cast<std::size_t>(j)];
  }
  const double size = static_cast<double>(grid.size());
  const double n = grid.levels();
  const double q = grid.q();
  const double gamma = (p - 1.0) / p;
  const double density = static_cast<double>(subset.size()) / size;
  const double c0 = std::abs(total_mass(seq));
  r.average = sum.value() / size;
  r.holder_bound = lp_norm(f, p) * std::pow(density, gamma);
  r.growth_bound = q * std::exp(r.kappa * n) * c0 * std::pow(density, gamma);
  r.decay_factor = std::exp(r.kappa) * std::pow(q, gamma * (beta - 1.0));
  r.rewritten_growth_bound = std::exp(r.kappa * n) * std::pow(q, gamma * (beta - 1.0) * n) *
                             std::pow(std::pow(q, -beta * n) * static_cast<double>(subset.size()), gamma) * q * c0;
  const double abs_slack = 1e-12 * std::max(1.0, seq.sup_norm());
  r.pass = r.average <= r.holder_bound * (1.0 + kInequalitySlack) + abs_slack &&
           r.holder_bound <= r.growth_bound * (1.0 + kInequalitySlack) + abs_slack &&
           std::abs(r.rewritten_growth_bound - r.growth_bound) <= 1e-9 * r.growth_bound;
  return r;
}

double phi_kernel_coefficient(int q, int levels, std::int64_t n) {
  const double height = std::pow(static_cast<double>(q), levels);
  const double inner = 0.5 / height;
  const double outer = q * inner;
  if (n == 0) return height * (inner + outer);
  // Trapezoid = (height / (outer - inner)) * box(half-width A) * box(half-width B).
  const double a = 0.5 * (outer + inner);
  const double b = 0.5 * (outer - inner);
  const double pn = kPi * static_cast<double>(n);
  return height / (outer - inner) * (std::sin(2.0 * pn * a) / pn) * (std::sin(2.0 * pn * b) / pn);
}

double interval_mass(const SparseSpectrum& density, double center, double radius) {
  CompensatedSum s;
  for (const auto& [n, c] : density.entries()) {
    if (n == 0) {
      s += c.real() * 2.0 * radius;
      continue;
    }
    const double pn = kPi * static_cast<double>(n);
    s += (c * std::polar(1.0, 2.0 * pn * center)).real() * std::sin(2.0 * pn * radius) / pn;
  }
  return s.value();
}

SandwichReport phi_kernel_mass_sandwich(const SparseSpectrum& density, const QadicGrid& grid) {
  if (!density.conjugate_symmetric(1e-12)) throw InvalidInput("phi_kernel_mass_sandwich: density must be real");
  const int q = grid.q();
  const int n = grid.levels();
  const std::int64_t size = grid.size();
  const double inner = 0.5 / static_cast<double>(size);
  const double outer = q * inner;

  std::vector<double> kernel;
  kernel.reserve(density.size());
  for (const auto& [l, c] : density.entries()) kernel.push_back(phi_kernel_coefficient(q, n, l));

  SandwichReport r;
  r.points = size;
  r.min_lower_gap = std::numeric_limits<double>::infinity();
  r.min_upper_gap = std::numeric_limits<double>::infinity();
  for (std::int64_t j = 0; j < size; ++j) {
    CompensatedSum in, mid, out;
    std::size_t idx = 0;
    for (const auto& [l, c] : density.entries()) {
      const Complex phase = c * grid_root(l, j, size);
      const double kn = kernel[idx++];
      mid += phase.real() * kn;
      if (l == 0) {
        in += phase.real() * 2.0 * inner;
        out += phase.real() * 2.0 * outer;
      } else {
        const double pl = kPi * static_cast<double>(l);
        in += phase.real() * std::sin(2.0 * pl * inner) / pl;
        out += phase.real() * std::sin(2.0 * pl * outer) / pl;
      }
    }
    const double smoothed = mid.value() / static_cast<double>(size);
    r.inner_mass.push_back(in.value());
    r.smoothed.push_back(smoothed);
    r.outer_mass.push_back(out.value());
    r.min_lower_gap = std::min(r.min_lower_gap, smoothed - in.value());
    r.min_upper_gap = std::min(r.min_upper_gap, out.value() - smoothed);
  }
  r.pass = r.min_lower_gap >= -1e-10 && r.min_upper_gap >= -1e-10;
  return r;
}

}  // namespace hausdim
