#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hausdim/cli_report.hpp"

namespace {

std::vector<double> parse_p_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::invalid_argument(item);
  }
  return out;
}

// "8..128" or a single modulus.
bool parse_q_range(const std::string& text, int& lo, int& hi) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      lo = hi = std::stoi(text);
    } else {
      lo = std::stoi(text.substr(0, dots));
      hi = std::stoi(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

void add_common(CLI::App* sub, hausdim::RunConfig& c) {
  sub->add_option("--format", c.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  sub->add_option("-o,--output", c.output, "Output file (relative to $HAUSDIM_OUTPUT_DIR when set)");
  sub->add_option("--seed", c.seed, "Seed for randomized property checks");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lower bounds for the Hausdorff dimension of spectrally restricted measures"};
  app.set_version_flag("--version", std::string(hausdim::kToolVersion));
  app.require_subcommand(1);

  hausdim::RunConfig c;
  std::string p_text = "1.25,2,4";
  std::string q_range;
  bool no_estimates = false;

  auto* bound = app.add_subcommand("bound", "kappa'(1) dimension bound for a residue set B");
  bound->add_option("--q", c.q, "Modulus q >= 3")->required();
  bound->add_option("--b", c.b, "Comma separated residues, e.g. 1,3 (empty for B = {})")->required();
  add_common(bound, c);

  auto* riesz = app.add_subcommand("riesz", "Bound table row for the Riesz product mu_{a,q}");
  riesz->add_option("--q", c.q, "Modulus q >= 3")->required();
  riesz->add_option("--a", c.a, "Riesz parameter, |a| <= 1");
  riesz->add_option("--k", c.k, "Peyriere truncation K (default 8, reduced for large q)");
  riesz->add_option("--grid", c.grid, "Peyriere midpoint grid size, a multiple of q^K (default automatic)");
  riesz->add_option("--entropy-level", c.entropy_level, "q-adic level n of the entropy estimate");
  riesz->add_flag("--no-estimates", no_estimates, "Skip the Peyriere and entropy estimates");
  add_common(riesz, c);

  auto* verify = app.add_subcommand("verify", "Run a property suite");
  verify->add_option("--suite", c.suite, "martingale, kappa, riesz-identities or all");
  verify->add_option("--q", c.q, "Modulus for the martingale suite");
  verify->add_option("--n", c.n, "Grid depth N for the martingale suite");
  verify->add_option("--k", c.k, "Riesz truncation K <= N (default N)");
  verify->add_option("--a", c.a, "Riesz parameter for the martingale suite");
  verify->add_option("--p", p_text, "Comma separated exponents p >= 1");
  verify->add_option("--q-max", c.q_max, "Largest modulus for the kappa and identity suites");
  add_common(verify, c);

  auto* sweep = app.add_subcommand("sweep", "Bound table across a range of q");
  sweep->add_option("--q", q_range, "Range lo..hi")->required();
  sweep->add_option("--step", c.step, "x2 (geometric) or +k (arithmetic)");
  sweep->add_flag("--even-only", c.even_only, "Keep even q only");
  sweep->add_option("--a", c.a, "Riesz parameter");
  sweep->add_option("--k", c.k, "Peyriere truncation K");
  sweep->add_option("--entropy-level", c.entropy_level, "q-adic level n of the entropy estimate");
  sweep->add_flag("--no-estimates", no_estimates, "Skip the Peyriere and entropy estimates");
  add_common(sweep, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  c.command = app.get_subcommands().front()->get_name();
  c.estimates = !no_estimates;
  try {
    c.p = parse_p_list(p_text);
  } catch (const std::exception&) {
    std::cerr << "error: --p expects a comma separated list of numbers\n";
    return 2;
  }
  if (c.command == "sweep") {
    if (!parse_q_range(q_range, c.q_lo, c.q_hi)) {
      std::cerr << "error: --q expects lo..hi\n";
      return 2;
    }
    c.q = std::max(c.q_lo, 3);
  }
  return hausdim::run_command(c, std::cout, std::cerr);
}
