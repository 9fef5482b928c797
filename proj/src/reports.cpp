#include "cqed/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>

#include "cqed/errors.hpp"

namespace cqed {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v, int digits = 10) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string num(Complex z) {
  std::string s = num(z.real());
  if (z.imag() != 0.0) s += (z.imag() < 0 ? " - " : " + ") + num(std::abs(z.imag())) + "i";
  return s;
}

double parse_cell(const std::string& cell) {
  if (cell == "nan") return kNaN;
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw ConfigurationError("CSV cell '" + cell + "' is not a number");
  }
  if (used != cell.size()) throw ConfigurationError("CSV cell '" + cell + "' is not a number");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

/// Linear interpolation of (x, y) at q; x strictly increasing and q inside [x.front(), x.back()].
double interpolate(const std::vector<double>& x, const std::vector<double>& y, double q) {
  auto it = std::lower_bound(x.begin(), x.end(), q);
  if (it == x.end()) return y.back();
  const auto j = static_cast<std::size_t>(it - x.begin());
  if (*it == q || j == 0) return y[j];
  const double w = (q - x[j - 1]) / (x[j] - x[j - 1]);
  return (1.0 - w) * y[j - 1] + w * y[j];
}

bool all_finite(const std::vector<double>& v) {
  return !v.empty() && std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

CsvTable CsvTable::parse(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      t.comments.push_back(line);
      continue;
    }
    auto cells = split_csv(line);
    if (t.columns.empty()) {
      t.columns = std::move(cells);
      continue;
    }
    if (cells.size() != t.columns.size()) throw ConfigurationError("CSV row has " + std::to_string(cells.size()) +
                                                                    " cells, header has " + std::to_string(t.columns.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_cell(c));
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw ConfigurationError("CSV has no header");
  return t;
}

CsvTable CsvTable::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open CSV '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

int CsvTable::index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ConfigurationError("CSV has no column '" + name + "'");
  return static_cast<int>(it - columns.begin());
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto i = static_cast<std::size_t>(index(name));
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[i]);
  return out;
}

std::string CompareReport::format() const {
  std::ostringstream out;
  out << "column " << column << " over " << abscissa << (abscissa == "r" ? " in [0, 1]" : "") << ", " << points
      << " points" << (interpolated ? " (b linearly interpolated onto a's grid)" : "") << "\n";
  out << "  max abs deviation  = " << num(max_abs) << "\n";
  out << "  mean abs deviation = " << num(mean_abs) << "\n";
  out << "  max rel deviation  = " << num(max_rel) << " (" << num(100.0 * max_rel, 4) << " %)\n";
  out << "  mean rel deviation = " << num(mean_rel) << "\n";
  out << "  at " << abscissa << " = " << num(end_x) << ": abs " << num(end_abs) << ", rel " << num(end_rel) << " ("
      << num(100.0 * end_rel, 4) << " %)\n";
  out << "  tolerance (max rel) = " << num(tolerance) << " -> " << (passed ? "PASS" : "FAIL") << "\n";
  return out.str();
}

CompareReport compare_tables(const CsvTable& a, const CsvTable& b, const std::string& column, double tolerance) {
  CompareReport rep;
  rep.column = column;
  rep.tolerance = tolerance;
  const auto ya = a.column(column);
  const auto yb = b.column(column);

  const bool use_r = std::find(a.columns.begin(), a.columns.end(), "r") != a.columns.end() &&
                     std::find(b.columns.begin(), b.columns.end(), "r") != b.columns.end() && all_finite(a.column("r")) &&
                     all_finite(b.column("r"));
  rep.abscissa = use_r ? "r" : "time";
  const auto xa = a.column(rep.abscissa);
  const auto xb = b.column(rep.abscissa);
  if (xa.empty() || xb.empty()) throw ConfigurationError("compare: empty CSV");
  for (const auto* x : {&xa, &xb})
    for (std::size_t i = 1; i < x->size(); ++i)
      if (!((*x)[i] > (*x)[i - 1])) throw ConfigurationError("compare: abscissa is not strictly increasing");

  double lo = std::max(xa.front(), xb.front());
  double hi = std::min(xa.back(), xb.back());
  if (use_r) {
    lo = std::max(lo, 0.0);
    hi = std::min(hi, 1.0 + 1e-12);
  }
  if (hi < lo) throw ConfigurationError("compare: the two runs have disjoint " + rep.abscissa + " ranges");
  rep.interpolated = xa != xb;

  double sum_abs = 0.0, sum_rel = 0.0;
  int rel_points = 0;
  for (std::size_t i = 0; i < xa.size(); ++i) {
    const double x = xa[i];
    if (x < lo - 1e-12 || x > hi + 1e-12) continue;
    const double vb = rep.interpolated ? interpolate(xb, yb, x) : yb[i];
    const double d = std::abs(ya[i] - vb);
    if (std::isnan(ya[i]) && std::isnan(vb)) continue;
    ++rep.points;
    rep.max_abs = std::max(rep.max_abs, d);
    sum_abs += d;
    rep.end_x = x;
    rep.end_abs = d;
    rep.end_rel = ya[i] != 0.0 ? d / std::abs(ya[i]) : (d == 0.0 ? 0.0 : kNaN);
    if (ya[i] != 0.0) {
      const double rel = d / std::abs(ya[i]);
      rep.max_rel = std::max(rep.max_rel, rel);
      sum_rel += rel;
      ++rel_points;
    }
  }
  if (rep.points == 0) throw ConfigurationError("compare: no overlapping samples");
  rep.mean_abs = sum_abs / rep.points;
  rep.mean_rel = rel_points ? sum_rel / rel_points : 0.0;
  rep.passed = std::isfinite(rep.max_rel) && rep.max_rel <= tolerance;
  return rep;
}

CompareReport compare_runs(const std::filesystem::path& a, const std::filesystem::path& b, const std::string& column,
                           double tolerance, const std::optional<std::filesystem::path>& report) {
  auto rep = compare_tables(CsvTable::read(a), CsvTable::read(b), column, tolerance);
  if (report) {
    write_file_atomic(*report, "a: " + a.string() + "\nb: " + b.string() + "\n" + rep.format());
  }
  return rep;
}

std::string SweepReport::format() const {
  std::ostringstream out;
  out << "convergence sweep of " << scenario << " (endpoint values)\n";
  out << "  cutoff  var_x_min             squeezing_degree   n_a                tail_weight        change\n";
  for (const auto& e : entries) {
    char line[256];
    std::snprintf(line, sizeof line, "  %6d  %-20.14g  %-17.10g  %-17.10g  %-17.6g  %s\n", e.cutoff, e.var_x_min,
                  e.squeezing_degree, e.n_a, e.tail_weight, std::isnan(e.change) ? "-" : num(e.change, 6).c_str());
    out << line;
  }
  out << "  tolerance " << num(tolerance) << " -> " << (converged ? "converged" : "NOT converged") << "\n";
  return out.str();
}

SweepReport convergence_sweep(const ScenarioConfig& cfg, std::span<const int> cutoffs, double tolerance) {
  if (cutoffs.size() < 2) throw ConfigurationError("convergence sweep needs at least two cutoffs");
  if (!(tolerance > 0.0)) throw ConfigurationError("convergence tolerance must be positive");
  std::vector<SweepEntry> entries(cutoffs.size());
  std::vector<std::exception_ptr> errors(cutoffs.size());
  const int n = static_cast<int>(cutoffs.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    try {
      ScenarioConfig run = cfg;
      run.cutoff_a = cutoffs[static_cast<std::size_t>(i)];
      if (run.cutoff_b) run.cutoff_b = run.cutoff_a;
      const auto result = run_scenario(run);
      const auto& last = result.rows.back();
      auto& e = entries[static_cast<std::size_t>(i)];
      e.cutoff = run.cutoff_a;
      e.var_x_min = last.var_x_min;
      e.squeezing_degree = last.squeezing_degree;
      e.n_a = last.n_a;
      e.n_b = last.n_b;
      e.tail_weight = last.tail_weight;
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  SweepReport rep;
  rep.scenario = cfg.name;
  rep.tolerance = tolerance;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto& e = entries[i];
    if (!std::isfinite(e.var_x_min) || !std::isfinite(e.n_a)) {
      throw NumericalFailure("convergence sweep: non-finite endpoint at cutoff " + std::to_string(e.cutoff));
    }
    e.change = i == 0 ? kNaN : std::abs(e.var_x_min - entries[i - 1].var_x_min);
    if (i >= 2 && e.change > 1e-3 && e.change > 10.0 * entries[i - 1].change) {
      throw NumericalFailure("convergence sweep: change grows from " + num(entries[i - 1].change) + " to " +
                             num(e.change) + " at cutoff " + std::to_string(e.cutoff) + " (non-monotone blowup)");
    }
  }
  rep.entries = std::move(entries);
  rep.converged = rep.entries.back().change < tolerance;
  return rep;
}

std::string DeriveReport::format() const {
  std::ostringstream out;
  out << "second-order effective generator for " << scenario << " (" << model << ")\n";
  out << "  averaging window = " << num(window) << ", residue samples = " << samples << "\n";
  out << "  resonant pairs = " << resonant_pairs << ", slowest discarded beat = " << num(slowest_beat)
      << ", max discarded residue = " << num(residue_max) << "\n";
  for (const auto& l : lines) {
    out << "  " << l.label << ": numeric " << num(l.numeric) << ", closed form " << num(l.predicted) << ", deviation "
        << num(l.percent_deviation, 4) << " %\n";
  }
  return out.str();
}

DeriveReport derive_effective_report(const ScenarioConfig& cfg, double window, int samples) {
  cfg.validate();
  const auto& p = cfg.params;
  if (p.has_drive2) throw ConfigurationError("derive-effective needs a single-drive configuration (no Omega_2)");
  const HilbertSpace space = cfg.space();
  BuildOptions options{cfg.thresholds, cfg.force, nullptr};

  HarmonicHamiltonian h;
  if (cfg.model.kind == ModelKind::Laser) {
    h = build_laser_frame(p, space, options);
  } else if (cfg.model.kind == ModelKind::Full) {
    if (p.Omega1 != 0.0) {
      throw ConfigurationError("derive-effective on the interaction picture expects Omega_1 = 0 (dispersive "
                               "coupling); use model = laser:<kind>,<branch>,<regime> for driven configurations");
    }
    h = build_interaction_picture(p, space);
  } else {
    throw ConfigurationError("derive-effective supports model = laser:... or a drive-free full model");
  }

  const auto gen = derive_effective_numeric(h, window, samples);
  DeriveReport rep;
  rep.scenario = cfg.name;
  rep.model = cfg.model.describe();
  rep.window = window;
  rep.samples = samples;
  rep.resonant_pairs = gen.resonant_pairs;
  rep.residue_max = gen.residue_max;
  rep.slowest_beat = gen.slowest_beat;
  rep.generator = gen.generator;

  auto ket = [&](int na, int nb, const Eigen::Vector2cd& atom) {
    std::vector<Vector> kets;
    for (const auto& f : space.factors()) {
      if (f.kind == FactorKind::Atom) kets.push_back(atom);
      else kets.push_back(fock_ket(f.dim, f.label == "a" ? na : nb));
    }
    return product_state(space, kets).vector();
  };
  auto element = [&](const Vector& bra, const Vector& k) { return bra.dot(gen.generator.matrix() * k); };
  auto add = [&](std::string label, Complex numeric, Complex predicted) {
    const double dev = std::abs(predicted) > 0.0 ? 100.0 * std::abs(numeric - predicted) / std::abs(predicted) : kNaN;
    rep.lines.push_back({std::move(label), numeric, predicted, dev});
  };

  if (cfg.model.kind == ModelKind::Laser) {
    const auto& m = cfg.model;
    if (!m.regime || m.effective == EffectiveKind::Squeeze) {
      throw ConfigurationError("derive-effective on the laser frame needs model = laser:<pdc|puc>,<branch>,<regime>");
    }
    const bool plus = m.branch == Branch::Plus;
    const Eigen::Vector2cd dressed = plus ? dressed_plus(p.phi1) : dressed_minus(p.phi1);
    const std::string block = plus ? "+" : "-";
    if (m.effective == EffectiveKind::PDC) {
      const auto c = pdc_coupling(p, m.branch, *m.regime, options);
      add("<0,0," + block + "|H_eff|1,1," + block + "> (ab coefficient)", element(ket(0, 0, dressed), ket(1, 1, dressed)),
          c.coupling);
    } else {
      const auto c = puc_coupling(p, m.branch, *m.regime, options);
      add("<0,1," + block + "|H_eff|1,0," + block + "> (ab^dagger coefficient)",
          element(ket(0, 1, dressed), ket(1, 0, dressed)), c.coupling);
    }
  } else {
    const double g = p.lambda_a;
    const double d = p.delta_a;
    if (d == 0.0) throw SingularCoupling("dispersive report needs delta_a != 0");
    const auto e = atom_ket(Level::e);
    const auto gk = atom_ket(Level::g);
    const double shift = g * g / d;
    add("<e,0|H_eff|e,0>", element(ket(0, 0, e), ket(0, 0, e)), shift);
    add("<e,1|H_eff|e,1>", element(ket(1, 0, e), ket(1, 0, e)), 2.0 * shift);
    add("<g,1|H_eff|g,1>", element(ket(1, 0, gk), ket(1, 0, gk)), -shift);
  }
  return rep;
}

}  // namespace cqed
