#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace hausdim {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
  std::string command;  // bound | riesz | verify | sweep
  int q = 4;
  std::string b;        // comma list, bound only
  double a = 1.0;
  int k = 0;            // Riesz truncation; 0 means K = N (martingale) or the estimator default
  int n = 6;            // martingale depth
  std::vector<double> p{1.25, 2.0, 4.0};
  std::int64_t grid = 0;  // Peyriere midpoint grid; 0 = automatic
  int entropy_level = 5;
  bool estimates = true;
  std::string suite = "all";
  int q_max = 12;
  // sweep
  int q_lo = 0;
  int q_hi = 0;
  std::string step = "+1";
  bool even_only = false;
  std::uint64_t seed = 0x5eed;
  std::string format = "json";  // json | csv | text
  std::string output;           // empty = stdout

  /// Enforces q >= 3, |a| <= 1 and the q^N / 3^K guards. Throws InvalidInput or ResourceError.
  void validate() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

void to_json(nlohmann::json& j, const CheckResult& c);
void from_json(const nlohmann::json& j, CheckResult& c);

struct ReportEnvelope {
  std::string version = kToolVersion;
  RunConfig config;
  nlohmann::json results = nlohmann::json::object();
  std::vector<CheckResult> checks;
  double wall_time_s = 0.0;

  bool all_pass() const;

  /// {version, config, results, checks} plus wall_time_s unless `deterministic`.
  nlohmann::json to_json(bool deterministic = false) const;
  static ReportEnvelope from_json(const nlohmann::json& j);
};

/// Column order of the bound tables; results["rows"] holds one object per row
/// keyed by these names (plus extra detail fields).
extern const std::vector<std::string> kCsvColumns;

ReportEnvelope cmd_bound(const RunConfig& config);
ReportEnvelope cmd_riesz(const RunConfig& config);
ReportEnvelope cmd_verify(const RunConfig& config);
ReportEnvelope cmd_sweep(const RunConfig& config);

/// Property suites behind `verify`; each returns one CheckResult per property.
std::vector<CheckResult> verify_kappa_suite(int q_max, std::uint64_t seed);
std::vector<CheckResult> verify_riesz_suite(int q_max, std::uint64_t seed);
/// Riesz partial product of depth `truncation` (0 means N) on the q^N grid.
std::vector<CheckResult> verify_martingale_suite(int q, int levels, int truncation, double a,
                                                 const std::vector<double>& p, std::uint64_t seed);

/// Expands "8..128" with step "x2" or "+k" into a list of moduli.
std::vector<int> expand_q_range(int lo, int hi, const std::string& step, bool even_only);

std::string render_csv(const ReportEnvelope& report);
std::string render_text(const ReportEnvelope& report);

/// Runs the configured command, writes the report in the requested format to
/// `out` (or config.output, relative to $HAUSDIM_OUTPUT_DIR when set) and
/// returns the exit code: 0 pass, 1 check failure, 2 usage, 3 resource guard.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace hausdim
