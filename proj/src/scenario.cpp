#include "cqed/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "cqed/errors.hpp"
#include "cqed/observables.hpp"

namespace cqed {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Branch branch_from_atom(const ScenarioConfig& cfg) {
  for (const auto& f : cfg.initial) {
    if (f.label == "atom" && f.spec == "e") return Branch::Up;
  }
  return Branch::Down;
}

/// Squeezing rate of a two-drive configuration, when it is set up for squeezing.
std::optional<double> two_drive_chi(const ScenarioConfig& cfg, const BuildOptions& options,
                                    std::vector<std::string>& warnings) {
  const auto& p = cfg.params;
  if (!p.has_drive2) return std::nullopt;
  const double tol = 1e-6 * std::max(1.0, p.Omega1);
  if (p.delta_2 > 0.0 && std::abs(p.Omega1 - 0.5 * p.delta_2) <= tol) {
    std::ostringstream msg;
    msg << "delta_2 = " << p.delta_2 << " is positive; the two-drive squeezing scheme needs delta_2 = -2|Omega_1| = "
        << -2.0 * p.Omega1 << ". Running as configured, r is not reported";
    warnings.push_back(msg.str());
    return std::nullopt;
  }
  if (p.delta_2 < 0.0 && std::abs(p.Omega1 + 0.5 * p.delta_2) <= tol) {
    return squeeze_coupling(p, branch_from_atom(cfg), options).chi;
  }
  return std::nullopt;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::array<double, 11> CsvRow::values() const {
  return {time, r, var_x_min, theta_min, squeezing_degree, n_a, n_b, pop_e, purity, trace_error, tail_weight};
}

ScenarioModel build_scenario_model(const ScenarioConfig& cfg) {
  ScenarioModel out;
  const HilbertSpace space = cfg.space();
  const auto& p = cfg.params;
  BuildOptions options{cfg.thresholds, cfg.force, &out.violations};

  switch (cfg.model.kind) {
    case ModelKind::Full:
      out.hamiltonian = build_interaction_picture(p, space);
      out.frame = Frame::Interaction;
      out.chi = two_drive_chi(cfg, options, out.warnings);
      break;
    case ModelKind::Lab:
      out.hamiltonian = build_lab_hamiltonian(p, space);
      out.frame = Frame::Lab;
      out.chi = two_drive_chi(cfg, options, out.warnings);
      break;
    case ModelKind::Laser:
      out.hamiltonian = build_laser_frame(p, space, options);
      out.frame = Frame::Laser;
      break;
    case ModelKind::Effective:
    case ModelKind::AnalyticSqueeze: {
      EffectiveCoupling c;
      const auto& m = cfg.model;
      if (cfg.model.kind == ModelKind::AnalyticSqueeze || m.effective == EffectiveKind::Squeeze) {
        const Branch b = cfg.model.kind == ModelKind::AnalyticSqueeze ? Branch::Down : m.branch;
        c = squeeze_coupling(p, b, options);
        out.chi = c.chi;
      } else if (m.effective == EffectiveKind::PDC) {
        c = pdc_coupling(p, m.branch, *m.regime, options);
      } else {
        c = puc_coupling(p, m.branch, *m.regime, options);
      }
      out.hamiltonian = build_effective_hamiltonian(c, space);
      out.coupling = c;
      out.frame = Frame::Effective;
      break;
    }
    case ModelKind::Sss:
      out.hamiltonian = build_sss_hamiltonian(p, space);
      out.chi = p.lambda_a * p.lambda_a / (4.0 * p.Omega2);
      out.frame = Frame::Effective;
      break;
    case ModelKind::Ajc:
      out.hamiltonian = build_ajc_hamiltonian(p, space, options);
      out.frame = Frame::Effective;
      break;
    case ModelKind::PulsedJcAjc:
      out.hamiltonian = build_pulsed_jc_ajc(p, cfg.schedule, space, options);
      out.frame = Frame::Effective;
      break;
  }
  return out;
}

State initial_state(const ScenarioConfig& cfg, std::vector<std::string>* warnings) {
  const HilbertSpace space = cfg.space();
  std::vector<Vector> kets;
  for (const auto& f : space.factors()) {
    std::string spec = f.kind == FactorKind::Atom ? "g" : "vacuum";
    for (const auto& s : cfg.initial)
      if (s.label == f.label) spec = s.spec;

    if (f.kind == FactorKind::Atom) {
      if (spec == "g") kets.push_back(atom_ket(Level::g));
      else if (spec == "e") kets.push_back(atom_ket(Level::e));
      else if (spec == "plus") kets.push_back(dressed_plus(cfg.params.phi1));
      else kets.push_back(dressed_minus(cfg.params.phi1));
      continue;
    }
    std::istringstream in(spec);
    std::string kind;
    in >> kind;
    if (kind == "vacuum") {
      kets.push_back(fock_ket(f.dim, 0));
    } else if (kind == "fock") {
      int n = 0;
      in >> n;
      if (n >= f.dim) throw ConfigurationError("initial_" + f.label + ": Fock index exceeds the cutoff");
      kets.push_back(fock_ket(f.dim, n));
    } else {
      double re = 0.0, im = 0.0;
      in >> re;
      if (!(in >> im)) im = 0.0;
      Vector v = coherent_ket(f.dim, {re, im});
      const double lost = 1.0 - v.squaredNorm();
      if (lost > 1e-6 && warnings) {
        warnings->push_back("coherent amplitude on mode " + f.label + " loses " + format_double(lost) +
                            " of its norm to truncation; renormalized");
      }
      v.normalize();
      kets.push_back(std::move(v));
    }
  }
  return product_state(space, kets);
}

CsvRow observe(const State& state, double time, std::optional<double> chi, const SampleDiagnostics& diag) {
  const HilbertSpace& space = state.space();
  CsvRow row;
  row.time = time;
  row.r = chi ? 2.0 * *chi * time : kNaN;

  const Matrix rho_a = reduced_density(state, "a");
  const auto q = quadrature_from_reduced(rho_a);
  row.var_x_min = q.var_min;
  row.theta_min = q.theta_min;
  row.squeezing_degree = q.squeezing_degree;
  row.n_a = q.mean_n;
  row.n_b = space.find("b") ? photon_number(state, "b") : kNaN;
  row.pop_e = space.atom_slot() ? excited_population(state) : kNaN;

  std::vector<std::string> field;
  for (const auto& f : space.factors())
    if (f.kind == FactorKind::Mode) field.push_back(f.label);
  row.purity = field.size() == static_cast<std::size_t>(space.num_factors()) ? purity(state) : purity(state, field);
  row.trace_error = diag.norm_error;
  row.tail_weight = diag.tail_weight;
  return row;
}

RunResult run_scenario(const ScenarioConfig& input) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioConfig cfg = input;
  cfg.integrator.t_grid = cfg.time_grid();
  cfg.validate();

  RunResult result;
  result.name = cfg.name;
  result.model = cfg.model.describe();
  result.lambda_a_si = cfg.lambda_a_si;

  ScenarioModel model = build_scenario_model(cfg);
  result.chi = model.chi;
  result.coupling = model.coupling;
  result.violations = model.violations;
  result.warnings = model.warnings;

  if (cfg.model.kind == ModelKind::AnalyticSqueeze) {
    // Squeezed vacuum with r = 2 chi t: e^{-i t (c a^2 + h.c.)} |0> has squeeze angle arg(2 i c^*).
    const Complex c = model.coupling->coupling;
    const double theta = std::fmod(std::arg(2.0 * kI * std::conj(c)) / 2.0 + 2.0 * std::numbers::pi, std::numbers::pi);
    for (double t : cfg.integrator.t_grid) {
      const double r = 2.0 * std::abs(c) * t;
      CsvRow row;
      row.time = t;
      row.r = r;
      row.var_x_min = std::exp(-2.0 * r) / 4.0;
      row.theta_min = r == 0.0 ? 0.0 : theta;
      row.squeezing_degree = squeezing_degree(row.var_x_min);
      row.n_a = std::sinh(r) * std::sinh(r);
      row.n_b = kNaN;
      row.pop_e = kNaN;
      row.purity = 1.0;
      row.trace_error = 0.0;
      row.tail_weight = 0.0;
      result.rows.push_back(row);
      result.trajectory.times.push_back(t);
    }
    result.trajectory.frame = Frame::Effective;
  } else {
    const State psi0 = initial_state(cfg, &result.warnings);
    if (cfg.resolved_solver() == Solver::Lindblad) {
      result.trajectory = evolve_lindblad(model.hamiltonian, psi0.to_mixed(), cfg.params.Gamma_f, cfg.params.Gamma_a,
                                          cfg.integrator);
    } else {
      result.trajectory = evolve_schrodinger(model.hamiltonian, psi0, cfg.integrator);
    }
    result.trajectory = align_frames(std::move(result.trajectory), model.frame);
    for (const auto& w : result.trajectory.warnings) result.warnings.push_back(w);
    const auto& tr = result.trajectory;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      result.rows.push_back(observe(tr.states[i], tr.times[i], model.chi, tr.diagnostics[i]));
    }
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string format_csv(const RunResult& result) {
  std::ostringstream out;
  for (const auto& m : result.violations) {
    out << "# forced: violated margin " << m.label << " (ratio " << format_double(m.ratio) << ", required "
        << format_double(m.required) << ")\n";
  }
  for (const auto& w : result.warnings) out << "# warning: " << w << "\n";
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
  out << "\n";
  for (const auto& row : result.rows) {
    const auto v = row.values();
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << format_double(v[i]);
    out << "\n";
  }
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigurationError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw ConfigurationError("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

void write_csv(const RunResult& result, const std::filesystem::path& path) { write_file_atomic(path, format_csv(result)); }

std::string summarize(const RunResult& result) {
  std::ostringstream out;
  out << "scenario " << result.name << " (" << result.model << ")\n";
  if (result.chi) out << "  chi = " << format_double(*result.chi) << "\n";
  if (result.coupling) {
    const auto& c = *result.coupling;
    out << "  coupling = " << format_double(c.coupling.real()) << (c.coupling.imag() < 0 ? " - " : " + ")
        << format_double(std::abs(c.coupling.imag())) << "i";
    if (c.residual_phase) out << ", residual phase = " << format_double(*c.residual_phase);
    if (c.required_detuning) out << ", required detuning = " << format_double(*c.required_detuning);
    out << "\n";
  }
  if (result.lambda_a_si > 0.0) {
    out << "  units: lambda_a = " << format_double(result.lambda_a_si) << " 1/s, time unit = "
        << format_double(1.0 / result.lambda_a_si) << " s\n";
  }
  if (!result.rows.empty()) {
    const auto& last = result.rows.back();
    out << "  samples = " << result.rows.size() << ", t_end = " << format_double(last.time);
    if (!std::isnan(last.r)) out << ", r_end = " << format_double(last.r);
    out << "\n  var_x_min = " << format_double(last.var_x_min) << ", squeezing_degree = "
        << format_double(last.squeezing_degree) << " %, n_a = " << format_double(last.n_a) << "\n";
  }
  const auto& tr = result.trajectory;
  if (!tr.diagnostics.empty()) {
    double tail = 0.0;
    for (const auto& d : tr.diagnostics) tail = std::max(tail, d.tail_weight);
    out << "  max norm/trace drift = " << format_double(tr.max_norm_error())
        << ", max Hermiticity error = " << format_double(tr.max_hermiticity_error());
    const double me = tr.min_eigenvalue();
    if (std::isfinite(me)) out << ", min eigenvalue = " << format_double(me);
    out << ", max tail weight = " << format_double(tail) << "\n";
    out << "  steps = " << tr.steps;
    if (tr.rejected_steps) out << " (+" << tr.rejected_steps << " rejected)";
    out << ", wall time = " << format_double(result.wall_seconds) << " s\n";
  }
  for (const auto& m : result.violations) out << "  forced past margin: " << m.label << "\n";
  for (const auto& w : result.warnings) out << "  warning: " << w << "\n";
  return out.str();
}

}  // namespace cqed
