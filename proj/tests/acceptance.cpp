// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset. Exit status is non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cqed/config.hpp"
#include "cqed/observables.hpp"
#include "cqed/reports.hpp"
#include "cqed/scenario.hpp"

using namespace cqed;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Row whose r is closest to 1.
const CsvRow& at_r1(const RunResult& res) {
  const CsvRow* best = &res.rows.front();
  for (const auto& row : res.rows)
    if (std::abs(row.r - 1.0) < std::abs(best->r - 1.0)) best = &row;
  return *best;
}

Outcome squeezed_vacuum_law() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = run_scenario(resolve_config("fig3-effective"));
  const double secs = seconds_since(t0);
  double max_err = 0.0;
  for (const auto& row : res.rows) {
    if (row.r > 1.0 + 1e-12) continue;
    max_err = std::max(max_err, std::abs(row.var_x_min - std::exp(-2.0 * row.r) / 4.0));
  }
  const double vac_err = std::abs(res.rows.front().var_x_min - 0.25);
  Outcome o;
  o.pass = max_err <= 1e-4 && vac_err <= 1e-10 && secs <= 1.0;
  o.detail = "max |var - e^{-2r}/4| = " + fmt("%.3e", max_err) + " (<= 1e-4), |var(0) - 0.25| = " +
             fmt("%.1e", vac_err) + " (<= 1e-10), runtime " + fmt("%.3f", secs) + " s (<= 1 s)";
  return o;
}

Outcome analytic_gap() {
  const auto analytic = run_scenario(resolve_config("fig3-analytic"));
  const auto numeric = run_scenario(resolve_config("fig3-effective"));
  const auto rep = compare_tables(CsvTable::parse(format_csv(analytic)), CsvTable::parse(format_csv(numeric)),
                                  "var_x_min", 0.005);
  Outcome o;
  o.pass = rep.passed;
  o.detail = "relative deviation at r = 1: " + fmt("%.4f", 100.0 * rep.end_rel) + " %, max over r in [0,1]: " +
             fmt("%.4f", 100.0 * rep.max_rel) + " % (<= 0.5 %)";
  o.notes.push_back("a 0.3 % gap at r = 1 appears with about 40 levels and is a cutoff effect; this run uses cutoff " +
                    std::to_string(resolve_config("fig3-effective").cutoff_a));
  return o;
}

Outcome full_model() {
  const auto cfg = resolve_config("fig3-full");
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = run_scenario(cfg);
  const double secs = seconds_since(t0);
  const double deg = at_r1(res).squeezing_degree;
  Outcome o;
  o.pass = deg >= 84.6 && deg <= 86.6 && secs <= 600.0 && cfg.cutoff_a >= 25;
  o.detail = "degree at r = 1: " + fmt("%.3f", deg) + " % in [84.6, 86.6], cutoff " + std::to_string(cfg.cutoff_a) +
             ", delta_a = " + fmt("%g", cfg.params.delta_a) + ", runtime " + fmt("%.1f", secs) + " s (<= 600 s)";

  auto literal = cfg;
  literal.params.delta_a = 0.1;
  const double lit = at_r1(run_scenario(literal)).squeezing_degree;
  o.notes.push_back("same run with delta_a = 0.1 gives " + fmt("%.2f", lit) +
                    " %; the dispersive shift 2 chi a^dagger a is cancelled by delta_a = 2 chi = 0.025");
  return o;
}

/// fig3-dissipative feeds two criteria; run it once.
const RunResult& dissipative_run(double* seconds = nullptr) {
  static double secs = 0.0;
  static const RunResult res = [] {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = run_scenario(resolve_config("fig3-dissipative"));
    secs = seconds_since(t0);
    return r;
  }();
  if (seconds) *seconds = secs;
  return res;
}

Outcome dissipative() {
  double secs = 0.0;
  const auto& res = dissipative_run(&secs);
  const double deg = at_r1(res).squeezing_degree;
  Outcome o;
  o.pass = deg >= 79.0 && deg <= 82.0 && secs <= 1800.0;
  o.detail = "degree at r = 1: " + fmt("%.3f", deg) + " % in [79.0, 82.0], runtime " + fmt("%.1f", secs) +
             " s (<= 1800 s)";
  return o;
}

Outcome pdc_oracle() {
  const auto res = run_scenario(resolve_config("pdc-intermediate"));
  const double lambda = std::abs(res.coupling->coupling);
  const HilbertSpace& space = res.trajectory.states.front().space();
  const int nb = space.factor(1).dim;
  double max_err = 0.0, max_off = 0.0, max_lt = 0.0;
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const double lt = lambda * res.rows[i].time;
    if (lt > 1.0 + 1e-12) continue;
    max_lt = std::max(max_lt, lt);
    const double s = std::sinh(lt);
    max_err = std::max({max_err, std::abs(res.rows[i].n_a - s * s), std::abs(res.rows[i].n_b - s * s)});
    const auto pops = populations(res.trajectory.states[i]);
    double off = 0.0;
    for (std::size_t k = 0; k < pops.size(); ++k)
      if (static_cast<int>(k) / nb != static_cast<int>(k) % nb) off += pops[k];
    max_off = std::max(max_off, off);
  }
  Outcome o;
  o.pass = max_err <= 1e-6 && max_off < 1e-10 && space.factor(0).dim == 30;
  o.detail = "|Lambda| = " + fmt("%g", lambda) + ", max |n - sinh^2(|Lambda| t)| = " + fmt("%.3e", max_err) +
             " (<= 1e-6) up to |Lambda| t = " + fmt("%.3f", max_lt) + ", population off n_a = n_b: " +
             fmt("%.1e", max_off) + " (< 1e-10)";
  return o;
}

Outcome puc_oracle() {
  const auto cfg = resolve_config("puc-intermediate");
  const auto res = run_scenario(cfg);
  const double sigma = std::abs(res.coupling->coupling);
  const double phase = res.coupling->residual_phase.value_or(std::numeric_limits<double>::quiet_NaN());
  const int nb = *cfg.cutoff_b;
  double max_err = 0.0;
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const double s = std::sin(sigma * res.rows[i].time);
    max_err = std::max(max_err, std::abs(populations(res.trajectory.states[i])[0 * nb + 1] - s * s));
  }
  const auto model = build_scenario_model(cfg);
  const HilbertSpace& space = model.hamiltonian.space();
  const Matrix ntot = (embed(number(space.factor(0).dim), 0, space) + embed(number(nb), 1, space)).matrix();
  double comm = 0.0;
  for (double t : {0.0, 1.3, 7.7}) {
    const Matrix h = model.hamiltonian.evaluate(t);
    comm = std::max(comm, (h * ntot - ntot * h).cwiseAbs().maxCoeff());
  }
  Outcome o;
  o.pass = phase == 0.0 && max_err <= 1e-8 && comm == 0.0;
  o.detail = "Phi = " + fmt("%g", phase) + ", max |P(0,1) - sin^2(|Sigma| t)| = " + fmt("%.3e", max_err) +
             " (<= 1e-8), max |[H, n_a + n_b]| = " + fmt("%g", comm) + " (exactly 0)";
  return o;
}

Outcome ajc_oracle() {
  const auto res = run_scenario(resolve_config("ajc"));
  double max_err = 0.0;
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const double s = std::sin(res.rows[i].time);
    max_err = std::max(max_err, std::abs(populations(res.trajectory.states[i])[1 * 2 + 1] - s * s));
  }
  const auto pcfg = resolve_config("pulsed-jc-ajc");
  const auto pulsed = run_scenario(pcfg);
  const double t_star = pcfg.schedule.tau + std::numbers::pi / (2.0 * std::sqrt(2.0) * pcfg.params.lambda_a);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < pulsed.rows.size(); ++i)
    if (std::abs(pulsed.rows[i].time - t_star) < std::abs(pulsed.rows[idx].time - t_star)) idx = i;
  const double p_g2 = populations(pulsed.trajectory.states[idx])[2 * 2 + 0];
  Outcome o;
  o.pass = max_err <= 1e-8 && std::abs(p_g2 - 1.0) <= 1e-6 && std::abs(pulsed.rows[idx].time - t_star) < 1e-12;
  o.detail = "max |P(e,1) - sin^2(lambda t)| = " + fmt("%.3e", max_err) + " (<= 1e-8), P(g,2) at t = " +
             fmt("%.6f", pulsed.rows[idx].time) + ": 1 - " + fmt("%.3e", 1.0 - p_g2) + " (<= 1e-6)";
  return o;
}

Outcome extractor() {
  struct Witness {
    std::string text;
    double limit_percent;
  };
  const std::string pdc = "[system]\nlambda_a = 1\nlambda_b = 1\n";
  const std::vector<Witness> witnesses = {
      {"[system]\nlambda_a = 0.05\ndelta_a = 1\n[scenario]\nname = dispersive-jc\nmodel = full\ncutoff_a = 4\n", 2.0},
      {pdc + "Omega1 = 10\ndelta_a = 30\ndelta_b = -30\n[scenario]\nname = pdc-intermediate+\n"
             "model = laser:pdc,plus,intermediate\ncutoff_a = 3\ncutoff_b = 3\n",
       5.0},
      {pdc + "Omega1 = 10\ndelta_a = 30\ndelta_b = -30\n[scenario]\nname = pdc-intermediate-\n"
             "model = laser:pdc,minus,intermediate\ncutoff_a = 3\ncutoff_b = 3\n",
       5.0},
      {pdc + "Omega1 = 100\ndelta_a = 10\ndelta_b = -10\n[scenario]\nname = pdc-strong+\n"
             "model = laser:pdc,plus,strong\ncutoff_a = 3\ncutoff_b = 3\n",
       5.0},
      {pdc + "Omega1 = 100\ndelta_a = 10\ndelta_b = -10\n[scenario]\nname = pdc-strong-\n"
             "model = laser:pdc,minus,strong\ncutoff_a = 3\ncutoff_b = 3\n",
       5.0},
  };
  Outcome o;
  o.pass = true;
  std::ostringstream detail;
  for (const auto& w : witnesses) {
    const auto rep = derive_effective_report(parse_config(w.text), 200.0, 2000);
    double worst = 0.0;
    for (const auto& line : rep.lines) worst = std::max(worst, line.percent_deviation);
    const bool ok = !rep.lines.empty() && worst <= w.limit_percent;
    o.pass = o.pass && ok;
    detail << rep.scenario << " " << fmt("%.3f", worst) << " % (<= " << w.limit_percent << " %); ";
    for (const auto& line : rep.lines)
      o.notes.push_back(rep.scenario + " " + line.label + ": numeric " + fmt("%.6g", line.numeric.real()) +
                        ", closed form " + fmt("%.6g", line.predicted.real()));
  }
  o.detail = detail.str();
  return o;
}

Outcome open_system() {
  const auto& res = dissipative_run();
  double trace = 0.0, herm = 0.0, min_eig = std::numeric_limits<double>::infinity();
  for (const auto& s : res.trajectory.states) {
    trace = std::max(trace, s.norm_error());
    herm = std::max(herm, s.hermiticity_error());
    min_eig = std::min(min_eig, s.min_eigenvalue());
  }

  // Pure limit: the same generator with both rates off, against a Schrodinger run.
  auto cfg = resolve_config("fig3-full");
  cfg.cutoff_a = 12;
  cfg.t_end = 4.0;
  cfg.samples = 20;
  // RK4 on rho and on psi differ at O(dt^4); at the scenario step that is ~1e-5 in squeezing_degree.
  cfg.integrator.dt = 5e-6;
  const auto pure = run_scenario(cfg);
  cfg.solver = Solver::Lindblad;
  const auto mixed = run_scenario(cfg);
  double diff = 0.0;
  for (std::size_t i = 0; i < pure.rows.size(); ++i) {
    const auto a = pure.rows[i].values();
    const auto b = mixed.rows[i].values();
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (std::string(kCsvColumns[k]) == "trace_error" || std::isnan(a[k])) continue;
      diff = std::max(diff, std::abs(a[k] - b[k]));
    }
  }
  Outcome o;
  o.pass = trace <= 1e-8 && herm <= 1e-10 && min_eig >= -1e-8 && diff <= 1e-8;
  o.detail = "fig3-dissipative over " + std::to_string(res.trajectory.states.size()) +
             " samples: trace drift " + fmt("%.2e", trace) + " (<= 1e-8), Hermiticity " + fmt("%.1e", herm) +
             " (<= 1e-10), min eigenvalue " + fmt("%.2e", min_eig) + " (>= -1e-8); Gamma = 0 vs Schrodinger " +
             fmt("%.2e", diff) + " (<= 1e-8)";
  return o;
}

Outcome convergence() {
  const auto cfg = resolve_config("fig3-effective");
  const int cutoffs[] = {20, 25, 30};
  const auto rep = convergence_sweep(cfg, cutoffs, 1e-6);
  const double change = rep.entries.back().change;
  const bool identical = format_csv(run_scenario(cfg)) == format_csv(run_scenario(cfg));
  Outcome o;
  o.pass = change < 1e-6 && identical;
  o.detail = "var_x_min change 25 -> 30: " + fmt("%.3e", change) + " (< 1e-6); repeated runs bit-identical: " +
             (identical ? "yes" : "no");
  std::ostringstream e;
  for (const auto& x : rep.entries) e << " N=" << x.cutoff << ": " << fmt("%.9f", x.var_x_min);
  o.notes.push_back("sweep endpoints" + e.str() + "; exact e^{-2}/4 = " + fmt("%.9f", std::exp(-2.0) / 4.0));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"squeezed-vacuum law (effective model)", squeezed_vacuum_law},
      {"effective vs analytic gap", analytic_gap},
      {"full-model squeezing", full_model},
      {"dissipative squeezing", dissipative},
      {"PDC oracle", pdc_oracle},
      {"PUC oracle", puc_oracle},
      {"AJC and pulsed JC/AJC oracle", ajc_oracle},
      {"second-order extractor", extractor},
      {"open-system invariants", open_system},
      {"cutoff convergence and determinism", convergence},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str());
    for (const auto& n : o.notes) std::printf("    note: %s\n", n.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
