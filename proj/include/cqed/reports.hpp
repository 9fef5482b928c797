#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqed/config.hpp"
#include "cqed/scenario.hpp"

namespace cqed {

/// Numeric CSV as written by format_csv ('#' lines kept as comments).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;

  static CsvTable parse(const std::string& text);
  static CsvTable read(const std::filesystem::path& path);
  /// Index of `name`; throws ConfigurationError when missing.
  int index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

struct CompareReport {
  std::string column;
  /// "r" when both files carry a finite r column, else "time".
  std::string abscissa;
  bool interpolated = false;
  int points = 0;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  double max_rel = 0.0;
  double mean_rel = 0.0;
  /// Deviation at the last compared abscissa (r = 1 for the squeezing runs).
  double end_x = 0.0;
  double end_abs = 0.0;
  double end_rel = 0.0;
  double tolerance = 0.0;
  bool passed = false;

  std::string format() const;
};

/// Deviation of b from a over the shared grid (restricted to r in [0, 1] when
/// r is the abscissa); b is linearly interpolated onto a's grid when the grids
/// differ. Passes when the maximum relative deviation is within `tolerance`.
CompareReport compare_tables(const CsvTable& a, const CsvTable& b, const std::string& column, double tolerance);
CompareReport compare_runs(const std::filesystem::path& a, const std::filesystem::path& b, const std::string& column,
                           double tolerance, const std::optional<std::filesystem::path>& report = std::nullopt);

struct SweepEntry {
  int cutoff = 0;
  double var_x_min = 0.0;
  double squeezing_degree = 0.0;
  double n_a = 0.0;
  double n_b = 0.0;
  double tail_weight = 0.0;
  /// |var_x_min - previous var_x_min|; NaN for the first cutoff.
  double change = 0.0;
};

struct SweepReport {
  std::string scenario;
  std::vector<SweepEntry> entries;
  double tolerance = 1e-5;
  bool converged = false;

  std::string format() const;
};

/// Runs the scenario once per cutoff (every mode gets the same cutoff), in
/// parallel across cutoffs. Converged when the last successive change of the
/// endpoint var_x_min is below `tolerance`. Throws NumericalFailure on
/// non-finite endpoints or a change that grows tenfold past 1e-3.
SweepReport convergence_sweep(const ScenarioConfig& cfg, std::span<const int> cutoffs, double tolerance = 1e-5);

struct DeriveLine {
  std::string label;
  Complex numeric;
  Complex predicted;
  double percent_deviation = 0.0;
};

struct DeriveReport {
  std::string scenario;
  std::string model;
  double window = 0.0;
  int samples = 0;
  int resonant_pairs = 0;
  double residue_max = 0.0;
  double slowest_beat = 0.0;
  std::vector<DeriveLine> lines;
  Operator generator;

  std::string format() const;
};

/// Numerical second-order generator of a single-drive scenario next to the
/// closed-form prediction. Laser-frame PDC/PUC configurations report the
/// ab / ab^dagger element on the selected dressed block; drive-free
/// interaction-picture configurations report the dispersive shifts g^2/delta.
DeriveReport derive_effective_report(const ScenarioConfig& cfg, double window, int samples);

}  // namespace cqed
