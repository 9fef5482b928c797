#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cqed/dynamics.hpp"
#include "cqed/effective.hpp"
#include "cqed/model.hpp"

namespace cqed {

enum class ModelKind { Full, Lab, Laser, Effective, Sss, Ajc, PulsedJcAjc, AnalyticSqueeze };

std::string to_string(ModelKind kind);

/// Parsed model selector, e.g. "full", "effective:squeeze,down" or "effective:pdc,plus,intermediate".
struct ModelSpec {
  ModelKind kind = ModelKind::Full;
  EffectiveKind effective = EffectiveKind::Squeeze;
  Branch branch = Branch::Down;
  std::optional<RegimeTag> regime;

  static ModelSpec parse(const std::string& text);
  std::string describe() const;
};

/// Initial state of one factor: vacuum | fock n | coherent re [im] for modes;
/// g | e | plus | minus for the atom (plus/minus are the dressed states).
struct FactorState {
  std::string label;
  std::string spec;
};

enum class Solver { Auto, Schrodinger, Lindblad };

struct ScenarioConfig {
  std::string name;
  SystemParams params;
  ModelSpec model;
  int cutoff_a = 30;
  std::optional<int> cutoff_b;
  bool with_atom = true;
  std::vector<FactorState> initial;
  Solver solver = Solver::Auto;
  Thresholds thresholds;
  bool force = false;
  PulseSchedule schedule;
  bool has_schedule = false;

  /// Physical lambda_a in 1/s; echoed in reports, never used numerically.
  double lambda_a_si = 0.0;

  IntegratorConfig integrator;
  double t_start = 0.0;
  double t_end = 1.0;
  /// Number of uniform output intervals on [t_start, t_end].
  int samples = 100;
  /// Additional output times merged into the uniform grid.
  std::vector<double> extra_times;

  std::filesystem::path output_path;
  /// File the config was loaded from (empty for in-memory text).
  std::filesystem::path source;

  std::vector<double> time_grid() const;

  /// Cross-field checks (modes referenced by the initial state exist, schedule present, ...).
  void validate() const;
  HilbertSpace space() const;
  /// Effective solver choice: Lindblad whenever a decay rate is non-zero.
  Solver resolved_solver() const;
};

/// Flat INI text with [system], [scenario], [integrator], [schedule], [output].
/// Throws ConfigurationError on unknown keys, unparsable values, or failed validation.
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Built-in scenario fixtures shipped with the project.
std::vector<std::string> builtin_scenarios();
std::filesystem::path builtin_scenario_path(const std::string& name);
/// Loads `name_or_path` as a file when it exists, otherwise as a built-in scenario name.
ScenarioConfig resolve_config(const std::string& name_or_path);

}  // namespace cqed
