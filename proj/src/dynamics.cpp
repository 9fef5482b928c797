#include "cqed/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

#include "cqed/errors.hpp"
#include "cqed/kernels.hpp"
#include "cqed/observables.hpp"

namespace cqed {

namespace {

using kernels::CompiledGenerator;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<CompiledGenerator::Component> expand_components(const HarmonicHamiltonian& h) {
  std::vector<CompiledGenerator::Component> out;
  for (const auto& term : h.terms()) {
    out.push_back({term.op.matrix(), term.amplitude, term.frequency});
    if (h.hermitian_closure() && !term.self_adjoint) {
      out.push_back({term.op.matrix().adjoint(), std::conj(term.amplitude), -term.frequency});
    }
  }
  return out;
}

std::vector<CompiledGenerator::Jump> jump_operators(const HilbertSpace& space, double gamma_f, double gamma_a) {
  std::vector<CompiledGenerator::Jump> out;
  for (int s = 0; s < space.num_factors(); ++s) {
    const Factor& f = space.factor(s);
    if (f.kind == FactorKind::Mode && gamma_f > 0.0) {
      out.push_back({embed(annihilation(f.dim), s, space).matrix(), gamma_f});
    } else if (f.kind == FactorKind::Atom && gamma_a > 0.0) {
      out.push_back({embed(sigma(Level::g, Level::e), s, space).matrix(), gamma_a});
    }
  }
  return out;
}

/// One Hamiltonian segment ready for RHS evaluation on either backend.
class SegmentRhs {
 public:
  SegmentRhs(const HarmonicHamiltonian& h, std::vector<CompiledGenerator::Jump> jumps, Backend backend)
      : dim_(h.space().total_dim()),
        backend_(backend),
        components_(expand_components(h)),
        jumps_(jumps),
        compiled_(dim_, components_, std::move(jumps)) {}

  bool empty() const { return compiled_.empty(); }

  void operator()(double t, const Vector& psi, Vector& dpsi) {
    if (backend_ == Backend::Compiled) {
      compiled_.schrodinger_rhs(t, psi, dpsi);
    } else {
      kernels::reference::schrodinger_rhs(kernels::reference::hamiltonian(components_, dim_, t), psi, dpsi);
    }
  }

  void operator()(double t, const Matrix& rho, Matrix& drho) {
    if (backend_ == Backend::Compiled) {
      compiled_.lindblad_rhs(t, rho, drho);
    } else {
      kernels::reference::lindblad_rhs(kernels::reference::hamiltonian(components_, dim_, t), jumps_, rho, drho);
    }
  }

 private:
  int dim_;
  Backend backend_;
  std::vector<CompiledGenerator::Component> components_;
  std::vector<CompiledGenerator::Jump> jumps_;
  CompiledGenerator compiled_;
};

struct Interval {
  double t0;
  double t1;
  int segment;  // -1 where the generator vanishes
  bool sample_at_end;
};

std::vector<Interval> build_intervals(const PiecewiseHamiltonian& h, const std::vector<double>& grid) {
  std::vector<double> points(grid.begin(), grid.end());
  const auto bps = h.breakpoints(grid.front(), grid.back());
  points.insert(points.end(), bps.begin(), bps.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const std::set<double> samples(grid.begin(), grid.end());

  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double mid = 0.5 * (points[i] + points[i + 1]);
    int seg = -1;
    if (const auto* s = h.active(mid)) seg = static_cast<int>(s - h.segments().data());
    out.push_back({points[i], points[i + 1], seg, samples.count(points[i + 1]) > 0});
  }
  return out;
}

/// Classic fixed-step RK4 on Vector or Matrix states.
template <class T>
class Rk4 {
 public:
  template <class Rhs>
  void step(Rhs& f, double t, double h, T& y) {
    f(t, y, k1_);
    tmp_ = y + (0.5 * h) * k1_;
    f(t + 0.5 * h, tmp_, k2_);
    tmp_ = y + (0.5 * h) * k2_;
    f(t + 0.5 * h, tmp_, k3_);
    tmp_ = y + h * k3_;
    f(t + h, tmp_, k4_);
    y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  T k1_, k2_, k3_, k4_, tmp_;
};

/// Dormand-Prince 5(4) with first-same-as-last reuse inside one interval.
template <class T>
class DormandPrince {
 public:
  struct Stats {
    long accepted = 0;
    long rejected = 0;
  };

  template <class Rhs>
  void integrate(Rhs& f, double t0, double t1, T& y, double& h, double h_max, double rtol, double atol, Stats& st) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    double t = t0;
    f(t, y, k1_);
    while (t < t1) {
      double step = std::min(h, h_max);
      const bool hits_end = t + step >= t1;
      if (hits_end) step = t1 - t;
      tmp_ = y + (step * a21) * k1_;
      f(t + c2 * step, tmp_, k2_);
      tmp_ = y + step * (a31 * k1_ + a32 * k2_);
      f(t + c3 * step, tmp_, k3_);
      tmp_ = y + step * (a41 * k1_ + a42 * k2_ + a43 * k3_);
      f(t + c4 * step, tmp_, k4_);
      tmp_ = y + step * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
      f(t + c5 * step, tmp_, k5_);
      tmp_ = y + step * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
      f(t + step, tmp_, k6_);
      ynew_ = y + step * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
      f(t + step, ynew_, k7_);
      err_ = step * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);

      double err = 0.0;
      for (Eigen::Index i = 0; i < err_.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y.data()[i]), std::abs(ynew_.data()[i]));
        err = std::max(err, std::abs(err_.data()[i]) / sc);
      }
      if (!std::isfinite(err)) throw NumericalFailure("adaptive integrator produced non-finite values");

      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        t = hits_end ? t1 : t + step;
        y.swap(ynew_);
        k1_.swap(k7_);
        ++st.accepted;
        // A step clipped to the interval end says nothing about the natural step size.
        if (!hits_end) h = std::min(step * fac, h_max);
      } else {
        ++st.rejected;
        h = step * fac;
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
          throw NumericalFailure("adaptive integrator step size underflow at t = " + std::to_string(t));
        }
      }
    }
  }

 private:
  T k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_, err_;
};

double tail_weight(const State& s, int levels) {
  double w = 0.0;
  for (const auto& f : s.space().factors()) {
    if (f.kind != FactorKind::Mode) continue;
    w = std::max(w, truncation_tail(s, f.label, std::min(levels, f.dim - 1)));
  }
  return w;
}

void validate_grid(const std::vector<double>& grid) {
  if (grid.size() < 2) throw ConfigurationError("integrator t_grid needs at least two times");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw ConfigurationError("integrator t_grid contains a non-finite time");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigurationError("integrator t_grid must be strictly increasing");
  }
}

/// Resolves and validates the RK4 step; appends a warning when a coarse dt is allowed through.
double resolve_step(const PiecewiseHamiltonian& h, const IntegratorConfig& cfg, std::vector<std::string>& warnings) {
  const double limit = default_dt(h);
  if (cfg.method == Method::Adaptive) {
    if (cfg.dt < 0.0 || cfg.dt_max < 0.0 || !(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) {
      throw ConfigurationError("adaptive integrator needs positive tolerances and non-negative dt, dt_max");
    }
    return cfg.dt;
  }
  if (cfg.dt < 0.0 || !std::isfinite(cfg.dt)) throw ConfigurationError("integrator dt must be positive");
  if (cfg.dt == 0.0) return limit;
  if (cfg.dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt = " << cfg.dt << " resolves the fastest frequency with fewer than 20 steps per cycle (limit "
        << limit << ")";
    if (!cfg.allow_coarse_dt) throw ConfigurationError(msg.str());
    warnings.push_back(msg.str());
  }
  return cfg.dt;
}

template <class T>
void renormalize(T& y) {
  if constexpr (std::is_same_v<T, Vector>) {
    y /= y.norm();
  } else {
    y /= y.trace().real();
  }
}

double suggested_dt(double dt, double drift, double limit) {
  const double factor = std::clamp(0.8 * std::pow(limit / drift, 0.25), 0.05, 0.5);
  return dt * factor;
}

/// Drives the chosen integrator across the interval list and calls `sample`
/// after every interval that ends on a grid time.
template <class T, class Sample>
void propagate(const PiecewiseHamiltonian& h, std::vector<std::unique_ptr<SegmentRhs>>& rhs, T y,
               const IntegratorConfig& cfg, double dt, Trajectory& traj, Sample&& sample) {
  const auto intervals = build_intervals(h, cfg.t_grid);
  Rk4<T> rk4;
  DormandPrince<T> dp;
  typename DormandPrince<T>::Stats stats;
  const double limit = default_dt(h);
  const double h_max = cfg.dt_max > 0.0 ? cfg.dt_max : limit;
  double h_adapt = dt > 0.0 ? dt : std::min(h_max, cfg.t_grid.back() - cfg.t_grid.front());

  sample(cfg.t_grid.front(), y);
  for (const auto& iv : intervals) {
    const std::size_t which = iv.segment >= 0 ? static_cast<std::size_t>(iv.segment) : rhs.size() - 1;
    if (!rhs[which]->empty()) {
      auto& f = *rhs[which];
      const double span = iv.t1 - iv.t0;
      if (cfg.method == Method::RK4) {
        const long n = std::max(1L, static_cast<long>(std::ceil(span / dt * (1.0 - 1e-12))));
        const double step = span / static_cast<double>(n);
        for (long k = 0; k < n; ++k) rk4.step(f, iv.t0 + static_cast<double>(k) * step, step, y);
        traj.steps += n;
      } else {
        h_adapt = std::min(h_adapt, h_max);
        dp.integrate(f, iv.t0, iv.t1, y, h_adapt, h_max, cfg.rel_tol, cfg.abs_tol, stats);
      }
      if (cfg.renormalize) renormalize(y);
    }
    if (iv.sample_at_end) sample(iv.t1, y);
  }
  traj.steps += stats.accepted;
  traj.rejected_steps += stats.rejected;
}

std::vector<std::unique_ptr<SegmentRhs>> compile_segments(const PiecewiseHamiltonian& h,
                                                          const std::vector<CompiledGenerator::Jump>& jumps,
                                                          Backend backend) {
  std::vector<std::unique_ptr<SegmentRhs>> out;
  for (const auto& s : h.segments()) out.push_back(std::make_unique<SegmentRhs>(s.h, jumps, backend));
  // Trailing entry: H = 0 between windows, where only the dissipators act.
  out.push_back(std::make_unique<SegmentRhs>(HarmonicHamiltonian(h.space()), jumps, backend));
  return out;
}

std::vector<bool> eigen_check_mask(std::size_t n, int checks) {
  std::vector<bool> mask(n, false);
  if (checks <= 0 || n == 0) return mask;
  if (n <= static_cast<std::size_t>(checks)) {
    mask.assign(n, true);
    return mask;
  }
  for (int k = 0; k < checks; ++k) {
    const double pos = static_cast<double>(k) * static_cast<double>(n - 1) / static_cast<double>(checks - 1);
    mask[static_cast<std::size_t>(std::llround(pos))] = true;
  }
  return mask;
}

}  // namespace

std::string to_string(Method method) { return method == Method::RK4 ? "rk4" : "adaptive"; }

Method parse_method(const std::string& text) {
  if (text == "rk4" || text == "RK4" || text == "rk4-fixed") return Method::RK4;
  if (text == "adaptive" || text == "rk-adaptive" || text == "dopri5") return Method::Adaptive;
  throw ConfigurationError("unknown integrator method '" + text + "'");
}

std::vector<double> IntegratorConfig::uniform_grid(double t0, double t1, int intervals) {
  if (intervals < 1 || !(t1 > t0)) throw ConfigurationError("uniform_grid needs t1 > t0 and at least one interval");
  std::vector<double> out(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) out[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / intervals;
  out.back() = t1;
  return out;
}

double fastest_frequency(const PiecewiseHamiltonian& h) {
  double f = 0.0;
  for (const auto& s : h.segments()) f = std::max(f, s.h.max_frequency() + s.h.norm_bound());
  return f;
}

double default_dt(const PiecewiseHamiltonian& h) {
  const double f = fastest_frequency(h);
  return f > 0.0 ? 2.0 * std::numbers::pi / (20.0 * f) : kInf;
}

std::string to_string(Frame frame) {
  switch (frame) {
    case Frame::Lab: return "lab";
    case Frame::Interaction: return "interaction";
    case Frame::Laser: return "laser";
    case Frame::DressedU1: return "dressed-u1";
    case Frame::DressedU2: return "dressed-u2";
    case Frame::Effective: return "effective";
  }
  return "unknown";
}

Frame parse_frame(const std::string& text) {
  for (Frame f : {Frame::Lab, Frame::Interaction, Frame::Laser, Frame::DressedU1, Frame::DressedU2, Frame::Effective}) {
    if (to_string(f) == text) return f;
  }
  throw ConfigurationError("unknown frame '" + text + "'");
}

std::string to_string(ObservableKind kind) {
  switch (kind) {
    case ObservableKind::PhotonNumber: return "photon_number";
    case ObservableKind::MinQuadratureVariance: return "min_quadrature_variance";
    case ObservableKind::FixedQuadratureVariance: return "fixed_quadrature_variance";
    case ObservableKind::FieldPurity: return "field_purity";
    case ObservableKind::AtomPopulation: return "atom_population";
  }
  return "unknown";
}

bool frame_insensitive(ObservableKind kind, Frame a, Frame b) {
  if (a == b) return true;
  // Frames that only rotate or re-dress the atom leave the field phase reference alone.
  auto atom_only = [](Frame f) {
    return f == Frame::Interaction || f == Frame::Laser || f == Frame::DressedU1 || f == Frame::DressedU2;
  };
  switch (kind) {
    case ObservableKind::PhotonNumber:
    case ObservableKind::MinQuadratureVariance:
    case ObservableKind::FieldPurity:
      return true;
    case ObservableKind::FixedQuadratureVariance:
      return atom_only(a) && atom_only(b);
    case ObservableKind::AtomPopulation:
      // Bare-basis populations survive only the diagonal lab <-> interaction rotation.
      return (a == Frame::Lab && b == Frame::Interaction) || (a == Frame::Interaction && b == Frame::Lab);
  }
  return false;
}

double Trajectory::max_norm_error() const {
  double m = 0.0;
  for (const auto& d : diagnostics) m = std::max(m, d.norm_error);
  return m;
}

double Trajectory::max_hermiticity_error() const {
  double m = 0.0;
  for (const auto& d : diagnostics) m = std::max(m, d.hermiticity_error);
  return m;
}

double Trajectory::min_eigenvalue() const {
  double m = kInf;
  for (const auto& d : diagnostics)
    if (!std::isnan(d.min_eigenvalue)) m = std::min(m, d.min_eigenvalue);
  return m;
}

Trajectory evolve_schrodinger(const PiecewiseHamiltonian& h, const State& psi0, const IntegratorConfig& cfg) {
  if (!psi0.is_pure()) throw ConfigurationError("evolve_schrodinger needs a pure state");
  require_same_space(h.space(), psi0.space(), "evolve_schrodinger");
  validate_grid(cfg.t_grid);

  Trajectory traj;
  const double dt = resolve_step(h, cfg, traj.warnings);
  auto rhs = compile_segments(h, {}, cfg.backend);
  const HilbertSpace space = psi0.space();

  propagate<Vector>(h, rhs, psi0.vector(), cfg, dt, traj, [&](double t, const Vector& y) {
    SampleDiagnostics d;
    d.norm_error = std::abs(y.squaredNorm() - 1.0);
    d.hermiticity_error = 0.0;
    d.min_eigenvalue = kNaN;
    State s = State::pure(space, y);
    d.tail_weight = tail_weight(s, cfg.tail_levels);
    if (cfg.enforce_limits && d.norm_error > cfg.norm_drift_limit) {
      std::ostringstream msg;
      msg << "norm drift " << d.norm_error << " exceeds " << cfg.norm_drift_limit << " at t = " << t;
      if (cfg.method == Method::RK4) {
        msg << "; suggested dt <= " << suggested_dt(dt, d.norm_error, cfg.norm_drift_limit);
      } else {
        msg << "; tighten rel_tol/abs_tol";
      }
      throw NumericalFailure(msg.str());
    }
    traj.times.push_back(t);
    traj.states.push_back(std::move(s));
    traj.diagnostics.push_back(d);
  });
  return traj;
}

Trajectory evolve_lindblad(const PiecewiseHamiltonian& h, const State& rho0, double gamma_f, double gamma_a,
                           const IntegratorConfig& cfg) {
  require_same_space(h.space(), rho0.space(), "evolve_lindblad");
  if (!(gamma_f >= 0.0) || !(gamma_a >= 0.0)) throw ConfigurationError("decay rates must be non-negative");
  validate_grid(cfg.t_grid);

  Trajectory traj;
  const double dt = resolve_step(h, cfg, traj.warnings);
  const auto jumps = jump_operators(h.space(), gamma_f, gamma_a);
  auto rhs = compile_segments(h, jumps, cfg.backend);
  const HilbertSpace space = rho0.space();
  const auto mask = eigen_check_mask(cfg.t_grid.size(), cfg.eigen_checks);
  std::size_t index = 0;

  propagate<Matrix>(h, rhs, rho0.density_matrix(), cfg, dt, traj, [&](double t, const Matrix& y) {
    SampleDiagnostics d;
    State s = State::mixed(space, y);
    d.norm_error = s.norm_error();
    d.hermiticity_error = s.hermiticity_error();
    d.min_eigenvalue = mask[index] ? s.min_eigenvalue() : kNaN;
    d.tail_weight = tail_weight(s, cfg.tail_levels);
    ++index;
    if (cfg.enforce_limits) {
      std::ostringstream msg;
      if (d.norm_error > cfg.trace_drift_limit) {
        msg << "trace drift " << d.norm_error << " exceeds " << cfg.trace_drift_limit;
      } else if (d.hermiticity_error > cfg.hermiticity_limit) {
        msg << "Hermiticity drift " << d.hermiticity_error << " exceeds " << cfg.hermiticity_limit;
      } else if (!std::isnan(d.min_eigenvalue) && d.min_eigenvalue < -cfg.positivity_limit) {
        msg << "minimum eigenvalue " << d.min_eigenvalue << " below " << -cfg.positivity_limit;
      }
      if (!msg.str().empty()) {
        msg << " at t = " << t;
        throw NumericalFailure(msg.str());
      }
    }
    traj.times.push_back(t);
    traj.states.push_back(std::move(s));
    traj.diagnostics.push_back(d);
  });
  return traj;
}

Trajectory align_frames(Trajectory traj, Frame frame) {
  traj.frame = frame;
  return traj;
}

void require_comparable(const Trajectory& a, const Trajectory& b, std::span<const ObservableKind> observables) {
  if (!a.frame || !b.frame) throw FrameMismatch("comparison needs both trajectories to declare their frame");
  for (auto kind : observables) {
    if (!frame_insensitive(kind, *a.frame, *b.frame)) {
      throw FrameMismatch("observable " + to_string(kind) + " differs between frames " + to_string(*a.frame) +
                          " and " + to_string(*b.frame));
    }
  }
}

}  // namespace cqed
