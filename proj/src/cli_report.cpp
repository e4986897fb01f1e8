#include "hausdim/cli_report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "hausdim/errors.hpp"
#include "hausdim/gv_martingale.hpp"
#include "hausdim/kappa_bound.hpp"
#include "hausdim/numeric.hpp"
#include "hausdim/riesz_products.hpp"
#include "hausdim/zq_spectral.hpp"

namespace hausdim {

using nlohmann::json;

const std::vector<std::string> kCsvColumns = {
    "q",     "B",     "kappa_prime_1", "bound",    "subgroup_bound",     "delta",       "theorem3",
    "prop4", "prop5", "fan_main",      "peyriere", "peyriere_converged", "entropy_est", "fan_consistency"};

namespace {

constexpr std::int64_t kMartingaleGridLimit = 10'000'000;
constexpr std::int64_t kTermLimit = 10'000'000;

CheckResult check_le(std::string name, double value, double tolerance, std::string detail = {}) {
  return {std::move(name), value <= tolerance, value, tolerance, std::move(detail)};
}

CheckResult check_ge(std::string name, double value, double tolerance, std::string detail = {}) {
  return {std::move(name), value >= tolerance, value, tolerance, std::move(detail)};
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

/// Every nonempty symmetric subset of {1, ..., q-1}.
std::vector<ResidueSet> symmetric_residue_sets(int q) {
  std::vector<std::vector<int>> blocks;
  for (int m = 1; 2 * m < q; ++m) blocks.push_back({m, q - m});
  if (q % 2 == 0) blocks.push_back({q / 2});
  std::vector<ResidueSet> out;
  const unsigned count = 1u << blocks.size();
  for (unsigned mask = 1; mask < count; ++mask) {
    std::vector<int> members;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (mask & (1u << i)) members.insert(members.end(), blocks[i].begin(), blocks[i].end());
    }
    out.emplace_back(q, std::move(members));
  }
  return out;
}

json dimension_bound_json(const DimensionBound& d) {
  json row;
  row["q"] = d.residues.q();
  row["B"] = d.residues.to_string();
  row["symmetrized"] = d.symmetrized;
  row["kappa_prime_1"] = d.kappa_prime_1;
  row["raw_bound"] = d.raw_bound;
  row["bound"] = d.bound;
  row["subgroup_bound"] = d.subgroup.bound;
  if (d.subgroup.group) {
    row["subgroup_order"] = d.subgroup.group->order();
    row["subgroup_elements"] = d.subgroup.group->elements();
  } else {
    row["subgroup_order"] = nullptr;
    row["subgroup_elements"] = json::array();
  }
  row["subgroup_proper"] = d.subgroup.proper;
  row["delta"] = d.delta;
  row["witness_vertex"] = vector_json(d.witness_vertex);
  row["vertex_count"] = d.vertex_count;
  return row;
}

struct RieszRow {
  json row;
  std::vector<CheckResult> checks;
};

RieszRow riesz_row(const RunConfig& config, int q) {
  const RieszParams params{config.a, q};
  RieszEstimateOptions options;
  if (config.k > 0) options.peyriere_truncation = config.k;
  options.peyriere_grid = config.grid;
  options.entropy_level = config.entropy_level;
  options.include_estimates = config.estimates;
  const BoundTableRow r = riesz_bound_row(params, options);
  const DimensionBound d = dimension_bound(ResidueSet(q, {1, q - 1}));

  RieszRow out;
  json& row = out.row;
  row = dimension_bound_json(d);
  row["a"] = config.a;
  row["theorem3"] = r.theorem3;
  row["prop4"] = r.prop4 ? json(*r.prop4) : json(nullptr);
  row["prop4_substituted"] = r.prop4_substituted ? json(*r.prop4_substituted) : json(nullptr);
  row["prop5"] = r.prop5;
  row["fan_main"] = r.fan_main;
  const double consistency = std::abs(r.theorem3 - r.fan_main) * q * std::log(static_cast<double>(q));
  row["fan_consistency"] = consistency;
  if (r.peyriere) {
    row["peyriere"] = r.peyriere->estimate;
    row["peyriere_converged"] = r.peyriere->converged;
    row["peyriere_truncation"] = r.peyriere->truncation;
    row["peyriere_grid"] = r.peyriere->grid_size;
    row["peyriere_refined_truncation"] = r.peyriere->refined_truncation_estimate;
    row["peyriere_refined_grid"] = r.peyriere->refined_grid_estimate;
  } else {
    row["peyriere"] = nullptr;
    row["peyriere_converged"] = nullptr;
  }
  row["entropy_est"] = r.entropy_estimate ? json(*r.entropy_estimate) : json(nullptr);
  if (r.entropy_estimate) {
    row["entropy_level"] = r.entropy_level;
    row["entropy_truncation"] = r.entropy_truncation;
  }

  const std::string tag = "q=" + std::to_string(q);
  out.checks.push_back(check_le("theorem3_matches_vertex_solver[" + tag + "]",
                                std::abs(kappa_prime_riesz(q) - d.kappa_prime_1), 1e-9));
  out.checks.push_back({"theorem3_in_unit_interval[" + tag + "]", r.theorem3 >= -1e-12 && r.theorem3 <= 1.0 + 1e-12,
                        r.theorem3, 1e-12, "0 <= theorem3 <= 1"});
  out.checks.push_back(check_le("prop5_below_theorem3[" + tag + "]", r.prop5 - r.theorem3, 1e-12));
  if (r.peyriere) {
    out.checks.push_back(check_le("peyriere_at_most_one[" + tag + "]", r.peyriere->estimate, 1.0 + 1e-9));
    if (r.peyriere->converged) {
      out.checks.push_back(check_ge("peyriere_dominates_theorem3[" + tag + "]", r.peyriere->estimate - r.theorem3,
                                    -0.02));
    }
  }
  return out;
}

std::filesystem::path resolve_output(const RunConfig& config) {
  const char* dir = std::getenv("HAUSDIM_OUTPUT_DIR");
  std::filesystem::path path = config.output;
  if (path.empty()) {
    if (!dir || !*dir) return {};
    const std::string ext = config.format == "csv" ? ".csv" : config.format == "text" ? ".txt" : ".json";
    path = config.command + ext;
  }
  if (path.is_relative() && dir && *dir) path = std::filesystem::path(dir) / path;
  return path;
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }
  if (v.is_number_float()) return fmt(v.get<double>());
  return v.dump();
}

}  // namespace

void RunConfig::validate() const {
  if (q < 3) throw InvalidInput("q must be >= 3, got " + std::to_string(q));
  if (!(std::abs(a) <= 1.0)) throw InvalidInput("a must satisfy |a| <= 1");
  if (format != "json" && format != "csv" && format != "text") {
    throw InvalidInput("unknown output format '" + format + "'");
  }
  if (command == "bound") ResidueSet::parse(q, b);
  if (command == "verify") {
    if (suite != "martingale" && suite != "kappa" && suite != "riesz-identities" && suite != "all") {
      throw InvalidInput("unknown suite '" + suite + "' (expected martingale, kappa, riesz-identities or all)");
    }
    if (suite == "martingale" || suite == "all") {
      if (n < 1) throw InvalidInput("N must be >= 1");
      guarded_pow(q, n, kMartingaleGridLimit, "martingale grid q^N");
      const int depth = k > 0 ? k : n;
      if (depth > n) throw InvalidInput("K must not exceed N (aliasing guard)");
      guarded_pow(3, depth, kTermLimit, "Riesz term count 3^K");
      for (double pv : p) {
        if (!(pv >= 1.0)) throw InvalidInput("every p must be >= 1");
      }
    }
    if (q_max < 3) throw InvalidInput("q-max must be >= 3");
    if ((suite == "riesz-identities" || suite == "all") && q_max > 64) {
      throw InvalidInput("q-max must be <= 64 for the identity suite");
    }
  }
  if (command == "riesz" && k > 0) guarded_pow(3, k, kTermLimit, "Riesz term count 3^K");
}

void to_json(json& j, const RunConfig& c) {
  j = json{{"command", c.command}, {"q", c.q},
           {"B", c.b},             {"a", c.a},
           {"K", c.k},             {"N", c.n},
           {"p", c.p},             {"grid", c.grid},
           {"entropy_level", c.entropy_level},
           {"estimates", c.estimates},
           {"suite", c.suite},     {"q_max", c.q_max},
           {"q_lo", c.q_lo},       {"q_hi", c.q_hi},
           {"step", c.step},       {"even_only", c.even_only},
           {"seed", c.seed},       {"format", c.format},
           {"output", c.output}};
}

void from_json(const json& j, RunConfig& c) {
  RunConfig d;
  c.command = j.value("command", d.command);
  c.q = j.value("q", d.q);
  c.b = j.value("B", d.b);
  c.a = j.value("a", d.a);
  c.k = j.value("K", d.k);
  c.n = j.value("N", d.n);
  c.p = j.value("p", d.p);
  c.grid = j.value("grid", d.grid);
  c.entropy_level = j.value("entropy_level", d.entropy_level);
  c.estimates = j.value("estimates", d.estimates);
  c.suite = j.value("suite", d.suite);
  c.q_max = j.value("q_max", d.q_max);
  c.q_lo = j.value("q_lo", d.q_lo);
  c.q_hi = j.value("q_hi", d.q_hi);
  c.step = j.value("step", d.step);
  c.even_only = j.value("even_only", d.even_only);
  c.seed = j.value("seed", d.seed);
  c.format = j.value("format", d.format);
  c.output = j.value("output", d.output);
}

void to_json(json& j, const CheckResult& c) {
  j = json{{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance}, {"detail", c.detail}};
}

void from_json(const json& j, CheckResult& c) {
  c.name = j.at("name").get<std::string>();
  c.pass = j.at("pass").get<bool>();
  c.value = j.at("value").get<double>();
  c.tolerance = j.at("tolerance").get<double>();
  c.detail = j.value("detail", std::string{});
}

bool ReportEnvelope::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

json ReportEnvelope::to_json(bool deterministic) const {
  json j{{"version", version}, {"config", config}, {"results", results}, {"checks", checks}};
  if (!deterministic) j["wall_time_s"] = wall_time_s;
  return j;
}

ReportEnvelope ReportEnvelope::from_json(const json& j) {
  ReportEnvelope r;
  r.version = j.at("version").get<std::string>();
  r.config = j.at("config").get<RunConfig>();
  r.results = j.at("results");
  r.checks = j.at("checks").get<std::vector<CheckResult>>();
  r.wall_time_s = j.value("wall_time_s", 0.0);
  return r;
}

std::vector<int> expand_q_range(int lo, int hi, const std::string& step, bool even_only) {
  if (lo < 3 || hi < lo) {
    throw InvalidInput("empty or invalid q range " + std::to_string(lo) + ".." + std::to_string(hi));
  }
  if (step.size() < 2 || (step[0] != 'x' && step[0] != '+')) {
    throw InvalidInput("step must look like x2 or +1, got '" + step + "'");
  }
  int amount = 0;
  try {
    amount = std::stoi(step.substr(1));
  } catch (const std::exception&) {
    throw InvalidInput("step must look like x2 or +1, got '" + step + "'");
  }
  if ((step[0] == 'x' && amount < 2) || (step[0] == '+' && amount < 1)) {
    throw InvalidInput("step '" + step + "' does not advance");
  }
  std::vector<int> out;
  for (long q = lo; q <= hi; q = step[0] == 'x' ? q * amount : q + amount) {
    if (!even_only || q % 2 == 0) out.push_back(static_cast<int>(q));
  }
  if (out.empty()) throw InvalidInput("q range selects no moduli");
  return out;
}

ReportEnvelope cmd_bound(const RunConfig& config) {
  ReportEnvelope report;
  report.config = config;
  const ResidueSet b = ResidueSet::parse(config.q, config.b);
  const DimensionBound d = dimension_bound(b);
  report.results["rows"] = json::array({dimension_bound_json(d)});
  report.checks.push_back(
      {"bound_in_unit_interval", d.bound >= 0.0 && d.bound <= 1.0, d.bound, 0.0, "0 <= bound <= 1"});
  report.checks.push_back(check_ge("delta_nonnegative", d.delta, -1e-12));
  const double reeval = d.witness_vertex.size() > 0 ? kappa_prime_objective(d.witness_vertex) : 0.0;
  report.checks.push_back(check_le("witness_reproduces_kappa_prime", std::abs(reeval - d.kappa_prime_1), 1e-12));
  return report;
}

ReportEnvelope cmd_riesz(const RunConfig& config) {
  ReportEnvelope report;
  report.config = config;
  RieszRow r = riesz_row(config, config.q);
  report.results["rows"] = json::array({r.row});
  report.checks = std::move(r.checks);
  return report;
}

ReportEnvelope cmd_sweep(const RunConfig& config) {
  ReportEnvelope report;
  report.config = config;
  const std::vector<int> qs = expand_q_range(config.q_lo, config.q_hi, config.step, config.even_only);
  json rows = json::array();
  double worst_consistency = 0.0;
  for (int q : qs) {
    RieszRow r = riesz_row(config, q);
    worst_consistency = std::max(worst_consistency, r.row["fan_consistency"].get<double>());
    rows.push_back(std::move(r.row));
    for (auto& c : r.checks) report.checks.push_back(std::move(c));
  }
  report.results["rows"] = std::move(rows);
  if (config.a == 1.0) {
    report.checks.push_back(check_le("fan_consistency_max", worst_consistency, 10.0,
                                     "|theorem3 - fan_main| q log q over the sweep"));
  }
  return report;
}

std::vector<CheckResult> verify_kappa_suite(int q_max, std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);

  // Reference fixtures at q = 4.
  for (const char* list : {"2", "1,3"}) {
    const DimensionBound d = dimension_bound(ResidueSet::parse(4, list));
    const Eigen::VectorXd& w = d.witness_vertex;
    bool extremal = w.size() == 4;
    for (Eigen::Index j = 0; extremal && j < 4; ++j) extremal = std::abs(std::abs(w(j)) - 1.0) <= 1e-12;
    extremal = extremal && std::abs(w.sum()) <= 1e-12;
    out.push_back({std::string("q4_fixture[B=") + list + "]", std::abs(d.bound - 0.5) <= 1e-12 && extremal,
                   std::abs(d.bound - 0.5), 1e-12, "witness entries are +-1 with zero sum"});
  }

  double worst_dominance = std::numeric_limits<double>::infinity();
  double worst_strict = std::numeric_limits<double>::infinity();
  double worst_positive = std::numeric_limits<double>::infinity();
  double worst_monotone = std::numeric_limits<double>::infinity();
  double worst_witness = 0.0;
  double worst_feasibility = 0.0;
  double worst_fd_gap = 0.0;
  double worst_fd_order = std::numeric_limits<double>::infinity();
  double worst_reform = std::numeric_limits<double>::infinity();
  std::string dominance_at, strict_at, positive_at, monotone_at, fd_at;
  bool reform_pass = true;

  for (int q = 3; q <= q_max; ++q) {
    const auto sets = symmetric_residue_sets(q);
    std::vector<double> bounds;
    for (const ResidueSet& b : sets) {
      const SubspaceBasis basis = wb_basis(b);
      const VertexSet vs = polytope_vertices(FeasiblePolytope(basis));
      const DimensionBound d = dimension_bound(b);
      bounds.push_back(d.bound);
      const std::string tag = "q=" + std::to_string(q) + " B={" + b.to_string() + "}";

      if (d.delta < worst_dominance) {
        worst_dominance = d.delta;
        dominance_at = tag;
      }
      if (d.subgroup.proper && d.delta < worst_strict) {
        worst_strict = d.delta;
        strict_at = tag;
      }
      if (q <= 10 && !b.is_full() && d.bound < worst_positive) {
        worst_positive = d.bound;
        positive_at = tag;
      }
      worst_witness = std::max(worst_witness, std::abs(kappa_prime_objective(d.witness_vertex) - d.kappa_prime_1));
      for (const auto& v : vs.vertices) {
        const Eigen::VectorXd off = v - basis.columns * (basis.columns.transpose() * v);
        worst_feasibility = std::max({worst_feasibility, off.norm(), -1.0 - v.minCoeff()});
      }

      if (q <= 8) {
        const double kp = kappa_prime_1(vs).value;
        const double f2 = kappa_left_derivative_fd(vs, 1e-2);
        const double f3 = kappa_left_derivative_fd(vs, 1e-3);
        const double f4 = kappa_left_derivative_fd(vs, 1e-4);
        // Secant slopes of a convex function: FD(1e-2) <= FD(1e-3) <= FD(1e-4) <= kappa'(1).
        // Measured in units of the rounding floor at h = 1e-4.
        const double order = std::min({f3 - f2, f4 - f3, kp - f4}) / kappa_fd_rounding(kp, 1e-4);
        if (order < worst_fd_order) worst_fd_order = order;
        if (std::abs(f4 - kp) > worst_fd_gap) {
          worst_fd_gap = std::abs(f4 - kp);
          fd_at = tag;
        }

        // Random feasible b: a times a convex combination of vertices.
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double ps[] = {1.25, 2.0, 4.0};
        for (int trial = 0; trial < 5 && !vs.empty(); ++trial) {
          Eigen::VectorXd mix = Eigen::VectorXd::Zero(q);
          double total = 0.0;
          for (const auto& v : vs.vertices) {
            const double w = unit(rng);
            mix += w * v;
            total += w;
          }
          mix /= total;
          const double a = 0.1 + 1.9 * unit(rng);
          const double p = ps[trial % 3];
          const double lhs = [&] {
            CompensatedSum s;
            for (int j = 0; j < q; ++j) s += std::pow(std::abs(a + a * mix(j)), p);
            return std::pow(s.value() / q, 1.0 / p);
          }();
          const double rhs = a * std::exp(kappa(1.0 / p, vs));
          worst_reform = std::min(worst_reform, (rhs - lhs) / rhs);
          reform_pass = reform_pass && def_reform_check(a, a * mix, p, basis, vs);
        }
      }
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (std::size_t j = 0; j < sets.size(); ++j) {
        if (i == j || !sets[i].subset_of(sets[j])) continue;
        const double gap = bounds[i] - bounds[j];
        if (gap < worst_monotone) {
          worst_monotone = gap;
          monotone_at = "q=" + std::to_string(q) + " {" + sets[i].to_string() + "} in {" + sets[j].to_string() + "}";
        }
      }
    }
  }

  out.push_back(check_ge("dominance_over_subgroup_bound", worst_dominance, -1e-12, "worst at " + dominance_at));
  out.push_back(check_ge("strictness_for_proper_inclusion", worst_strict, 1e-6, "worst at " + strict_at));
  out.push_back(check_ge("delta_q_positive", worst_positive, 1e-300, "q <= 10, B not full; worst at " + positive_at));
  out.push_back(check_ge("monotone_in_B", worst_monotone, -1e-12, "worst at " + monotone_at));
  out.push_back(check_le("witness_reproduces_kappa_prime", worst_witness, 1e-12));
  out.push_back(check_le("vertex_feasibility", worst_feasibility, 1e-10, "W_B residual and v_j >= -1"));
  out.push_back(check_ge("fd_quotients_nonincreasing", worst_fd_order, -1.0,
                          "h = 1e-2, 1e-3, 1e-4; q <= 8; value in units of 64 eps max(1, |kappa'|) / h"));
  out.push_back(check_le("fd_converges_to_kappa_prime", worst_fd_gap, 1e-3, "h = 1e-4; worst at " + fd_at));
  out.push_back({"def_reform_random", reform_pass, worst_reform, 0.0, "min relative slack over random feasible b"});

  // Vertex attains the supremum in kappa(1/2): equality for q = 4, B = {2}.
  {
    const ResidueSet b(4, {2});
    const SubspaceBasis basis = wb_basis(b);
    const VertexSet vs = polytope_vertices(FeasiblePolytope(basis));
    const Eigen::VectorXd v = vs.vertices.front();
    double s = 0.0;
    for (int j = 0; j < 4; ++j) s += std::pow(1.0 + v(j), 2.0);
    const double gap = std::abs(std::sqrt(s / 4.0) - std::exp(kappa(0.5, vs)));
    out.push_back(check_le("def_reform_vertex_equality", gap, 1e-12, "q=4 B={2} p=2"));
  }

  // The complex atomic measure with spectrum in C_{l}: a positive bound for
  // B = {l} would contradict dimension 0, so non-negativity cannot be dropped.
  {
    const CounterexampleMeasure m = counterexample_measure(4, 1);
    const ResidueSet l(4, {1});
    bool support = true;
    for (const auto& [n, c] : m.spectrum.entries()) support = support && (std::abs(c) <= 1e-12 || in_cb(n, l));
    bool negative_somewhere = false;
    for (const Atom& atom : m.atoms) {
      negative_somewhere = negative_somewhere || std::abs(atom.weight.imag()) > 1e-12 || atom.weight.real() < 0.0;
    }
    const bool pass = support && m.atoms.size() == 4 && negative_somewhere && std::abs(m.spectrum.coefficient(0)) <= 1e-12;
    out.push_back({"counterexample_measure[q=4,l=1]", pass, static_cast<double>(m.atoms.size()), 4.0,
                   "spectrum in C_{1}, 4 atoms (dimension 0), weights not non-negative: the non-negativity "
                   "hypothesis is necessary"});
  }
  return out;
}

std::vector<CheckResult> verify_riesz_suite(int q_max, std::uint64_t seed) {
  std::vector<CheckResult> out;
  for (int q = 4; q <= std::min(q_max, 64); q += 2) {
    const IdentityCheck c = chebyshev_identity_residual(q, seed);
    out.push_back(check_le("identity_residual[q=" + std::to_string(q) + "]", c.residual, 1e-7));
    out.push_back({"chebyshev_factorization[q=" + std::to_string(q) + "]", c.chebyshev_pass,
                   c.chebyshev_max_rel_error, 1e-9, std::to_string(c.chebyshev_points) + " seeded points"});
  }

  double worst_closed = 0.0;
  double worst_endpoint = -std::numeric_limits<double>::infinity();
  double worst_support = 0.0;
  double worst_two_path = 0.0;
  for (int q = 3; q <= std::min(q_max, 12); ++q) {
    const ResidueSet b(q, {1, q - 1});
    const VertexSet vs = polytope_vertices(FeasiblePolytope(wb_basis(b)));
    worst_closed = std::max(worst_closed, std::abs(kappa_prime_riesz(q) - kappa_prime_1(vs).value));

    const double lim = kPi / q;
    double grid_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1000; ++i) grid_max = std::max(grid_max, riesz_entropy_objective(q, -lim + 2.0 * lim * i / 1000.0));
    const double ends = std::max(riesz_entropy_objective(q, -lim), riesz_entropy_objective(q, lim));
    worst_endpoint = std::max(worst_endpoint, grid_max - ends);

    const RieszParams params{1.0, q};
    const int depth = q <= 4 ? 6 : 4;
    const SparseSpectrum spec = riesz_spectrum(params, depth);
    for (const auto& [n, c] : spec.entries()) {
      if (n != 0 && !in_cb(n, b)) worst_support = std::max(worst_support, std::abs(c));
    }
    const std::int64_t m = 997;
    const auto direct = partial_product_values(params, depth, m);
    for (std::int64_t j = 0; j < m; ++j) {
      const double synth = spec.evaluate(static_cast<double>(j) / m).real();
      worst_two_path = std::max(worst_two_path, std::abs(synth - direct[j]) / std::max(1.0, std::abs(direct[j])));
    }
  }
  out.push_back(check_le("kappa_prime_closed_form", worst_closed, 1e-9, "B = {1, q-1}, q = 3..12"));
  out.push_back(check_le("entropy_objective_endpoint_max", worst_endpoint, 1e-9, "1001-point phi grid"));
  out.push_back(check_le("spectrum_support_in_C_B", worst_support, 0.0, "B = {1, q-1}"));
  out.push_back(check_le("partial_product_two_path", worst_two_path, 1e-10));

  const GDerivativeReport g = g_derivative_bound_check();
  out.push_back({"g_derivative_sup", g.sup_estimate <= 2.0, g.sup_estimate, 2.0, "21 values of a, 1e5 grid"});
  out.push_back({"lipschitz_constant_L", g.lipschitz_constant >= 1.2 && g.lipschitz_constant <= 1.25,
                 g.lipschitz_constant, 1.25, "1.2 <= L <= 1.25"});

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst_ratio = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const double a = unit(rng);
    const double b = unit(rng);
    if (a == b) continue;
    worst_ratio = std::max(worst_ratio, std::abs(fan_entropy_integral(a) - fan_entropy_integral(b)) / std::abs(a - b));
  }
  out.push_back(check_le("h_one_lipschitz", worst_ratio, 1.0 + 1e-9, "1e4 seeded pairs"));
  out.push_back(check_le("h_at_one", std::abs(fan_entropy_integral(1.0) - (1.0 - kLog2)), 0.0));

  double worst_fan = 0.0;
  for (int q : {8, 16, 32, 64, 128}) {
    const double d = std::abs(bound_theorem3(q) - fan_main_term({1.0, q})) * q * std::log(static_cast<double>(q));
    worst_fan = std::max(worst_fan, d);
  }
  out.push_back(check_le("fan_consistency", worst_fan, 10.0, "q in {8, 16, 32, 64, 128}"));

  double worst_prop5 = -std::numeric_limits<double>::infinity();
  for (int q = 3; q <= std::max(q_max, 12); ++q) worst_prop5 = std::max(worst_prop5, bound_prop5(q) - bound_theorem3(q));
  out.push_back(check_le("prop5_below_theorem3", worst_prop5, 1e-12));
  return out;
}

std::vector<CheckResult> verify_martingale_suite(int q, int levels, int truncation, double a,
                                                 const std::vector<double>& p, std::uint64_t seed) {
  std::vector<CheckResult> out;
  const QadicGrid grid(q, levels);
  const SparseSpectrum spec = riesz_spectrum({a, q}, truncation > 0 ? truncation : levels);
  const MartingaleSequence seq = martingale_from_spectrum(spec, grid);
  const double scale = std::max(1.0, seq.sup_norm());
  const std::string tag = "[q=" + std::to_string(q) + ",N=" + std::to_string(levels) + "]";

  double worst_parent = 0.0;
  double worst_min = std::numeric_limits<double>::infinity();
  double worst_synth = 0.0;
  for (int k = 0; k <= levels; ++k) {
    for (double v : seq.atom_values(k)) worst_min = std::min(worst_min, v);
  }
  for (int level = 0; level < levels; ++level) {
    for (std::int64_t c = 0; c < grid.power(level); ++c) {
      const TreeAddress parent{level, c};
      const auto diff = sibling_difference_vector(seq, parent);
      CompensatedSum s;
      for (double d : diff) s += d;
      worst_parent = std::max(worst_parent, std::abs(s.value()));
      const ComplexVector synth = sibling_difference_synthesis(seq, parent);
      for (int i = 0; i < q; ++i) worst_synth = std::max(worst_synth, std::abs(synth[i] - diff[i]));
    }
  }
  double worst_projection = 0.0;
  for (int k = 0; k <= levels; ++k) worst_projection = std::max(worst_projection, spectral_projection_check(seq, k));

  out.push_back(check_le("martingale_property" + tag, worst_parent, 1e-12 * scale, "parent = mean of children"));
  out.push_back(check_ge("nonnegativity" + tag, worst_min, -1e-10));
  out.push_back(check_le("spectral_projection" + tag, worst_projection, 1e-10 * scale));
  out.push_back(check_le("difference_synthesis" + tag, worst_synth, 1e-10 * scale, "exact-division filter"));
  const ResidueSet b(q, {1, q - 1});
  out.push_back(check_le("wb_membership" + tag, wb_membership_check(seq, b), 1e-10 * scale));

  const VertexSet vs = polytope_vertices(FeasiblePolytope(wb_basis(b)));
  for (double pv : p) {
    const GrowthReport g = growth_check(seq, vs, pv);
    std::string detail = std::to_string(g.checks) + " inequalities";
    if (!g.pass()) {
      const auto& v = g.violations.front();
      detail += "; first violation " + v.kind + " level " + std::to_string(v.level) + " atom " +
                std::to_string(v.atom) + ": " + fmt(v.lhs) + " > " + fmt(v.rhs);
    }
    out.push_back({"growth_p=" + fmt(pv) + tag, g.pass(), g.worst_relative_slack, 0.0, detail});
  }
  {
    const GrowthReport g1 = growth_check(seq, vs, 1.0);
    double spread = 0.0;
    for (double nrm : g1.norms) spread = std::max(spread, std::abs(nrm - g1.norms.front()));
    out.push_back(check_le("l1_norm_conserved" + tag, spread, 1e-12 * scale, "kappa(1) = 0"));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool sets_pass = true;
  double min_slack = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 100; ++t) {
    const double density = unit(rng);
    std::vector<std::int64_t> subset;
    for (std::int64_t j = 0; j < grid.size(); ++j) {
      if (unit(rng) < density) subset.push_back(j);
    }
    if (subset.empty()) subset.push_back(static_cast<std::int64_t>(unit(rng) * grid.size()) % grid.size());
    const double beta = unit(rng);
    for (double pv : p) {
      if (pv <= 1.0) continue;
      const SetAverageReport r = set_average_check(seq, subset, beta, pv, vs);
      sets_pass = sets_pass && r.pass;
      min_slack = std::min(min_slack, r.growth_bound - r.average);
    }
  }
  out.push_back({"set_average_chain" + tag, sets_pass, min_slack, 0.0, "100 seeded random subsets"});

  const SandwichReport sw = phi_kernel_mass_sandwich(spec, grid);
  out.push_back({"phi_kernel_sandwich" + tag, sw.pass, std::min(sw.min_lower_gap, sw.min_upper_gap), -1e-10,
                 std::to_string(sw.points) + " grid points"});
  return out;
}

ReportEnvelope cmd_verify(const RunConfig& config) {
  ReportEnvelope report;
  report.config = config;
  auto append = [&](std::vector<CheckResult> more) {
    for (auto& c : more) report.checks.push_back(std::move(c));
  };
  json suites = json::array();
  if (config.suite == "kappa" || config.suite == "all") {
    append(verify_kappa_suite(config.q_max, config.seed));
    suites.push_back("kappa");
  }
  if (config.suite == "riesz-identities" || config.suite == "all") {
    append(verify_riesz_suite(config.q_max, config.seed));
    suites.push_back("riesz-identities");
  }
  if (config.suite == "martingale" || config.suite == "all") {
    append(verify_martingale_suite(config.q, config.n, config.k, config.a, config.p, config.seed));
    suites.push_back("martingale");
  }
  report.results["suites"] = suites;
  std::size_t failed = 0;
  for (const auto& c : report.checks) failed += c.pass ? 0 : 1;
  report.results["checks_run"] = report.checks.size();
  report.results["checks_failed"] = failed;
  return report;
}

std::string render_csv(const ReportEnvelope& report) {
  std::ostringstream os;
  const json& rows = report.results.contains("rows") ? report.results["rows"] : json(nullptr);
  if (rows.is_array()) {
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) os << (i ? "," : "") << kCsvColumns[i];
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
        os << (i ? "," : "") << csv_cell(row.contains(kCsvColumns[i]) ? row[kCsvColumns[i]] : json(nullptr));
      }
      os << "\n";
    }
    return os.str();
  }
  os << "check,pass,value,tolerance,detail\n";
  for (const auto& c : report.checks) {
    os << csv_cell(c.name) << "," << (c.pass ? "true" : "false") << "," << fmt(c.value) << "," << fmt(c.tolerance)
       << "," << csv_cell(c.detail) << "\n";
  }
  return os.str();
}

std::string render_text(const ReportEnvelope& report) {
  std::ostringstream os;
  os << "hausdim " << report.version << " " << report.config.command << "\n";
  if (report.results.contains("rows")) {
    for (const auto& row : report.results["rows"]) {
      for (const auto& col : kCsvColumns) {
        if (row.contains(col) && !row[col].is_null()) os << "  " << col << " = " << csv_cell(row[col]) << "\n";
      }
      os << "\n";
    }
  }
  for (const auto& c : report.checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << "  value=" << fmt(c.value) << " tol=" << fmt(c.tolerance);
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << "\n";
  }
  os << (report.all_pass() ? "all checks passed" : "some checks FAILED") << "\n";
  return os.str();
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  ReportEnvelope report;
  try {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    if (config.command == "bound") {
      report = cmd_bound(config);
    } else if (config.command == "riesz") {
      report = cmd_riesz(config);
    } else if (config.command == "verify") {
      report = cmd_verify(config);
    } else if (config.command == "sweep") {
      report = cmd_sweep(config);
    } else {
      throw InvalidInput("unknown command '" + config.command + "'");
    }
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return 1;
  }

  std::string text;
  if (config.format == "csv") {
    text = render_csv(report);
  } else if (config.format == "text") {
    text = render_text(report);
  } else {
    text = report.to_json().dump(2) + "\n";
  }
  const std::filesystem::path path = resolve_output(config);
  if (path.empty()) {
    out << text;
  } else {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream file(path);
    if (!file) {
      err << "error: cannot write " << path << "\n";
      return 2;
    }
    file << text;
    err << "wrote " << path.string() << "\n";
  }
  for (const auto& c : report.checks) {
    if (!c.pass) err << "FAIL " << c.name << " value=" << fmt(c.value) << " tol=" << fmt(c.tolerance) << "\n";
  }
  return report.all_pass() ? 0 : 1;
}

}  // namespace hausdim
