// Command-line front end: run, compare, sweep, derive-effective, list-scenarios.
// Exit codes: 0 ok, 1 configuration/parse error, 2 regime-validity violation,
// 3 numerical failure, 4 comparison outside tolerance.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cqed/errors.hpp"
#include "cqed/reports.hpp"
#include "cqed/scenario.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kRegime = 2, kNumeric = 3, kCompareFailed = 4 };

int run_cmd(const std::string& config, const std::string& out, bool force) {
  auto cfg = cqed::resolve_config(config);
  if (force) cfg.force = true;
  const auto result = cqed::run_scenario(cfg);
  std::filesystem::path path = out.empty() ? cfg.output_path : std::filesystem::path(out);
  if (path.empty()) path = cfg.name + ".csv";
  cqed::write_csv(result, path);
  std::cout << cqed::summarize(result) << "  csv: " << path.string() << "\n";
  return kOk;
}

int compare_cmd(const std::string& a, const std::string& b, const std::string& column, double tol,
                const std::string& report) {
  std::optional<std::filesystem::path> rp;
  if (!report.empty()) rp = report;
  const auto rep = cqed::compare_runs(a, b, column, tol, rp);
  std::cout << "a: " << a << "\nb: " << b << "\n" << rep.format();
  return rep.passed ? kOk : kCompareFailed;
}

int sweep_cmd(const std::string& config, const std::vector<int>& cutoffs, double tol) {
  const auto cfg = cqed::resolve_config(config);
  const auto rep = cqed::convergence_sweep(cfg, cutoffs, tol);
  std::cout << rep.format();
  return kOk;
}

int derive_cmd(const std::string& config, double window, int samples) {
  const auto cfg = cqed::resolve_config(config);
  std::cout << cqed::derive_effective_report(cfg, window, samples).format();
  return kOk;
}

int list_cmd() {
  for (const auto& name : cqed::builtin_scenarios()) {
    const auto cfg = cqed::load_config(cqed::builtin_scenario_path(name));
    std::cout << name << "  (" << cfg.model.describe() << ", cutoff " << cfg.cutoff_a;
    if (cfg.cutoff_b) std::cout << "x" << *cfg.cutoff_b;
    std::cout << ", t in [" << cfg.t_start << ", " << cfg.t_end << "])\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven cavity-QED simulator: effective Hamiltonians, squeezing and open-system dynamics"};
  app.require_subcommand(1);

  std::string config, out, a, b, column, report;
  bool force = false;
  double tol = 0.0, sweep_tol = 1e-5, window = 200.0;
  int samples = 2000;
  std::vector<int> cutoffs;

  auto* run = app.add_subcommand("run", "Run a scenario and write its CSV");
  run->add_option("--config", config, "Config file or built-in scenario name")->required();
  run->add_option("--out", out, "CSV output path (defaults to [output] path, then <name>.csv)");
  run->add_flag("--force", force, "Downgrade regime-validity failures to annotated warnings");

  auto* cmp = app.add_subcommand("compare", "Compare one column of two run CSVs");
  cmp->add_option("--a", a, "Reference CSV")->required();
  cmp->add_option("--b", b, "Candidate CSV")->required();
  cmp->add_option("--column", column, "Column to compare")->required();
  cmp->add_option("--tol", tol, "Tolerance on the maximum relative deviation")->required();
  cmp->add_option("--report", report, "Also write the report to this file");

  auto* sweep = app.add_subcommand("sweep", "Cutoff convergence sweep");
  sweep->add_option("--config", config, "Config file or built-in scenario name")->required();
  sweep->add_option("--cutoffs", cutoffs, "Comma-separated cutoffs")->required()->delimiter(',');
  sweep->add_option("--tol", sweep_tol, "Convergence tolerance on var_x_min (default 1e-5)");

  auto* derive = app.add_subcommand("derive-effective", "Numerical second-order effective generator report");
  derive->add_option("--config", config, "Config file or built-in scenario name")->required();
  derive->add_option("--window", window, "Averaging window (default 200)");
  derive->add_option("--samples", samples, "Residue samples over the window (default 2000)");

  auto* list = app.add_subcommand("list-scenarios", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return run_cmd(config, out, force);
    if (*cmp) return compare_cmd(a, b, column, tol, report);
    if (*sweep) return sweep_cmd(config, cutoffs, sweep_tol);
    if (*derive) return derive_cmd(config, window, samples);
    if (*list) return list_cmd();
  } catch (const cqed::RegimeValidityError& e) {
    std::cerr << "regime-validity violation: " << e.what() << "\n(re-run with --force to proceed anyway)\n";
    return kRegime;
  } catch (const cqed::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const cqed::AmbiguousResonance& e) {
    std::cerr << "ambiguous resonance: " << e.what()
              << "\n(widen --window past 10 / slowest beat, or move the detunings off the near-degenerate pair)\n";
    return kConfig;
  } catch (const cqed::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kOk;
}
