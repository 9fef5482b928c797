#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqed/fock.hpp"
#include "cqed/model.hpp"

namespace cqed {

enum class EffectiveKind { PDC, PUC, Squeeze };
/// Plus/Minus select the dressed state |+->; Up/Down select |up/down> of the
/// two-drive squeezing scheme (|up> = |e>, |down> = |g> at phi1 = phi2 = 0).
enum class Branch { Plus, Minus, Up, Down };

std::string to_string(EffectiveKind kind);
std::string to_string(Branch branch);
EffectiveKind parse_effective_kind(const std::string& text);
Branch parse_branch(const std::string& text);

struct EffectiveCoupling {
  EffectiveKind kind = EffectiveKind::PDC;
  Branch branch = Branch::Plus;
  std::optional<RegimeTag> regime;
  /// Lambda (PDC), Sigma (PUC) or the a^2 amplitude -+chi e^{-2i phi1} (Squeeze).
  Complex coupling{0.0, 0.0};
  /// Phi of the PUC term Sigma a b^dagger e^{i Phi t}.
  std::optional<double> residual_phase;
  /// delta_1 (PDC) or delta_a (Squeeze) that makes the engineered term resonant.
  std::optional<double> required_detuning;
  /// chi for the squeezing kind (|coupling|).
  std::optional<double> chi;
  std::vector<Margin> margins;
};

/// Two-mode down-conversion coupling Lambda and the delta_1 it requires.
/// Needs delta_a = -delta_b = delta > 0.
EffectiveCoupling pdc_coupling(const SystemParams& params, Branch branch, RegimeTag regime,
                               const BuildOptions& options = {});

/// Up-conversion coupling Sigma with its residual phase Phi (no detuning adjustment).
EffectiveCoupling puc_coupling(const SystemParams& params, Branch branch, RegimeTag regime,
                               const BuildOptions& options = {});

/// Degenerate parametric amplification from the two-drive scheme:
/// chi = |lambda_a|^2 / (4 |Omega_2|), coupling -+chi e^{-2i phi1} for up/down.
/// The required detuning cancels the dispersive shift 2 chi a^dagger a that
/// accompanies the a^2 term, i.e. delta_a = -+2 chi.
EffectiveCoupling squeeze_coupling(const SystemParams& params, Branch branch, const BuildOptions& options = {});

/// Field-only effective Hamiltonian; identity on the atom when the space has one.
HarmonicHamiltonian build_effective_hamiltonian(const EffectiveCoupling& coupling, const HilbertSpace& space);

/// -chi [2 a^dagger a + a^2 + a^dagger^2] (sigma_ee - sigma_gg); requires delta_a = phi1 = phi2 = 0.
HarmonicHamiltonian build_sss_hamiltonian(const SystemParams& params, const HilbertSpace& space);

/// Anti-Jaynes-Cummings coupling lambda_a a sigma_ge + h.c.
HarmonicHamiltonian build_ajc_hamiltonian(const SystemParams& params, const HilbertSpace& space,
                                          const BuildOptions& options = {});
/// Jaynes-Cummings coupling lambda_a a sigma_eg + h.c. (the partner window of the pulsed scheme).
HarmonicHamiltonian build_jc_hamiltonian(const SystemParams& params, const HilbertSpace& space);

enum class PulseKind { AJC, JC };

struct PulseWindow {
  double t_begin = 0.0;
  double t_end = 0.0;
  PulseKind kind = PulseKind::AJC;
};

/// Alternating pulses of length tau: cycle n holds AJC on [2n tau, (2n+1) tau)
/// and JC on [(2n+1) tau, (2n+2) tau).
struct PulseSchedule {
  double tau = 1.0;
  int n_cycles = 0;

  void validate() const;
  std::vector<PulseWindow> windows() const;
  double end_time() const { return 2.0 * n_cycles * tau; }
};

/// Time-dependent Hamiltonian made of harmonic pieces on half-open time
/// windows [t_begin, t_end); zero outside every window.
class PiecewiseHamiltonian {
 public:
  struct Segment {
    double t_begin;
    double t_end;
    HarmonicHamiltonian h;
  };

  PiecewiseHamiltonian() = default;
  explicit PiecewiseHamiltonian(HilbertSpace space) : space_(std::move(space)) {}
  /// A single harmonic Hamiltonian active at all times.
  PiecewiseHamiltonian(HarmonicHamiltonian h);  // NOLINT(google-explicit-constructor)

  void add_segment(double t_begin, double t_end, HarmonicHamiltonian h);

  const HilbertSpace& space() const { return space_; }
  const std::vector<Segment>& segments() const { return segments_; }
  /// Segment active at t, or nullptr where the generator vanishes.
  const Segment* active(double t) const;
  Matrix evaluate(double t) const;
  /// Finite segment edges inside (t0, t1), sorted.
  std::vector<double> breakpoints(double t0, double t1) const;

 private:
  HilbertSpace space_;
  std::vector<Segment> segments_;
};

PiecewiseHamiltonian build_pulsed_jc_ajc(const SystemParams& params, const PulseSchedule& schedule,
                                         const HilbertSpace& space, const BuildOptions& options = {});

struct EffectiveGeneratorOptions {
  double resonance_tol = 1e-9;
  /// Zero-frequency terms are passed through at first order instead of rejected.
  bool allow_static = false;
};

struct EffectiveGenerator {
  Operator generator;
  /// Largest entry of the discarded oscillating part over the sampled window.
  double residue_max = 0.0;
  int resonant_pairs = 0;
  /// Slowest non-resonant combination frequency |w_k + w_l|.
  double slowest_beat = 0.0;
};

/// Static part of -i V(t) \int^t V(t') dt' for a harmonic V: every pair of
/// components with w_k + w_l = 0 contributes -c_k c_l h_k h_l / w_l.
EffectiveGenerator derive_effective_numeric(const HarmonicHamiltonian& h, double window, int samples,
                                            const EffectiveGeneratorOptions& options = {});

}  // namespace cqed
