#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqed/effective.hpp"
#include "cqed/fock.hpp"

namespace cqed {

enum class Method { RK4, Adaptive };
/// Compiled: sparse OpenMP kernels. Reference: dense serial products (testing).
enum class Backend { Compiled, Reference };

std::string to_string(Method method);
Method parse_method(const std::string& text);

struct IntegratorConfig {
  Method method = Method::RK4;
  /// RK4 step; 0 picks 2 pi / (20 f_max). For Adaptive: initial step (0 = automatic).
  double dt = 0.0;
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  /// Adaptive step ceiling; 0 means 2 pi / (20 f_max).
  double dt_max = 0.0;
  /// Output sample times, strictly increasing; the first entry is the initial time.
  std::vector<double> t_grid;
  bool renormalize = false;
  /// Accept an RK4 dt coarser than 20 steps per fastest cycle (recorded as a warning).
  bool allow_coarse_dt = false;
  /// Raise NumericalFailure when the drift/positivity limits below are exceeded.
  bool enforce_limits = true;
  double norm_drift_limit = 1e-6;
  double trace_drift_limit = 1e-8;
  double hermiticity_limit = 1e-8;
  double positivity_limit = 1e-6;
  /// Number of samples that get a full eigenvalue check in Lindblad runs.
  int eigen_checks = 50;
  /// Top Fock levels summed into the tail-weight diagnostic.
  int tail_levels = 5;
  Backend backend = Backend::Compiled;

  static std::vector<double> uniform_grid(double t0, double t1, int intervals);
};

/// Fastest rate of the generator: largest |frequency| plus the operator-norm bound.
double fastest_frequency(const PiecewiseHamiltonian& h);
/// 2 pi / (20 f_max), capped at the span of the grid.
double default_dt(const PiecewiseHamiltonian& h);

enum class Frame { Lab, Interaction, Laser, DressedU1, DressedU2, Effective };
std::string to_string(Frame frame);
Frame parse_frame(const std::string& text);

enum class ObservableKind { PhotonNumber, MinQuadratureVariance, FixedQuadratureVariance, FieldPurity, AtomPopulation };
std::string to_string(ObservableKind kind);

/// True when `kind` takes the same value in frames a and b.
bool frame_insensitive(ObservableKind kind, Frame a, Frame b);

struct SampleDiagnostics {
  /// |norm - 1| (pure) or |Tr rho - 1| (mixed).
  double norm_error = 0.0;
  double hermiticity_error = 0.0;
  /// Smallest eigenvalue of rho; NaN when this sample was not eigen-checked.
  double min_eigenvalue = 0.0;
  /// Largest truncation tail over the modes.
  double tail_weight = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<SampleDiagnostics> diagnostics;
  std::optional<Frame> frame;
  std::vector<std::string> warnings;
  long steps = 0;
  long rejected_steps = 0;

  double max_norm_error() const;
  double max_hermiticity_error() const;
  /// Smallest checked eigenvalue (+inf if none were checked).
  double min_eigenvalue() const;
};

/// d psi / dt = -i H(t) psi sampled on cfg.t_grid.
Trajectory evolve_schrodinger(const PiecewiseHamiltonian& h, const State& psi0, const IntegratorConfig& cfg);

/// d rho / dt = -i [H, rho] + Gamma_f D[a] rho (+ D[b] if present) + Gamma_a D[sigma_-] rho.
Trajectory evolve_lindblad(const PiecewiseHamiltonian& h, const State& rho0, double gamma_f, double gamma_a,
                           const IntegratorConfig& cfg);

/// Annotates the frame the trajectory lives in.
Trajectory align_frames(Trajectory traj, Frame frame);

/// Throws FrameMismatch unless both trajectories carry frames and every
/// requested observable is comparable between them.
void require_comparable(const Trajectory& a, const Trajectory& b, std::span<const ObservableKind> observables);

}  // namespace cqed
