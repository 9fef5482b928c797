#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cqed/config.hpp"
#include "cqed/dynamics.hpp"

namespace cqed {

/// Column order of every emitted CSV.
inline constexpr std::array<const char*, 11> kCsvColumns = {
    "time", "r", "var_x_min", "theta_min", "squeezing_degree", "n_a", "n_b", "pop_e", "purity", "trace_error",
    "tail_weight"};

/// One CSV row. n_b / pop_e are NaN without mode b / atom; r is NaN without chi.
/// purity is Tr(rho_field^2) over all modes (the atom traced out).
struct CsvRow {
  double time = 0.0;
  double r = 0.0;
  double var_x_min = 0.0;
  double theta_min = 0.0;
  double squeezing_degree = 0.0;
  double n_a = 0.0;
  double n_b = 0.0;
  double pop_e = 0.0;
  double purity = 0.0;
  double trace_error = 0.0;
  double tail_weight = 0.0;

  std::array<double, 11> values() const;
};

/// Generator, frame and squeezing rate for a scenario.
struct ScenarioModel {
  PiecewiseHamiltonian hamiltonian;
  Frame frame = Frame::Interaction;
  std::optional<double> chi;
  std::optional<EffectiveCoupling> coupling;
  std::vector<Margin> violations;
  std::vector<std::string> warnings;
};

ScenarioModel build_scenario_model(const ScenarioConfig& cfg);
/// Product initial state; truncated coherent amplitudes are renormalized.
State initial_state(const ScenarioConfig& cfg, std::vector<std::string>* warnings = nullptr);
CsvRow observe(const State& state, double time, std::optional<double> chi, const SampleDiagnostics& diag);

struct RunResult {
  std::string name;
  std::string model;
  Trajectory trajectory;
  std::vector<CsvRow> rows;
  std::optional<double> chi;
  std::optional<EffectiveCoupling> coupling;
  std::vector<Margin> violations;
  std::vector<std::string> warnings;
  double lambda_a_si = 0.0;
  double wall_seconds = 0.0;
};

/// Builds, propagates and observes a scenario. Throws ConfigurationError,
/// RegimeValidityError (unless forced) or NumericalFailure.
RunResult run_scenario(const ScenarioConfig& cfg);

/// CSV text: '#' comment lines for forced margins and warnings, then the header and rows.
std::string format_csv(const RunResult& result);
/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
void write_csv(const RunResult& result, const std::filesystem::path& path);
/// Short human-readable digest of a run.
std::string summarize(const RunResult& result);

}  // namespace cqed
