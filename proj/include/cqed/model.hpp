#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqed/fock.hpp"

namespace cqed {

/// Physical parameters of the driven two-level atom coupled to modes a and b.
/// Everything is in units of lambda_a; time in units of 1/lambda_a. Detunings
/// are stored directly (delta_x = omega0 - omega_x) so that small detunings on
/// top of omega0 ~ 1e5 keep full precision; absolute frequencies are derived.
struct SystemParams {
  double omega0 = 0.0;
  double delta_a = 0.0;
  double delta_b = 0.0;
  double delta_1 = 0.0;
  double delta_2 = 0.0;
  double lambda_a = 1.0;
  double lambda_b = 0.0;
  double Omega1 = 0.0;  // |Omega_1|
  double phi1 = 0.0;
  double Omega2 = 0.0;  // |Omega_2|
  double phi2 = 0.0;
  double Gamma_f = 0.0;
  double Gamma_a = 0.0;
  bool has_mode_b = false;
  bool has_drive2 = false;

  double omega_a() const { return omega0 - delta_a; }
  double omega_b() const { return omega0 - delta_b; }
  double omega1() const { return omega0 - delta_1; }
  double omega2() const { return omega0 - delta_2; }

  Complex Omega1_complex() const { return std::polar(Omega1, phi1); }
  Complex Omega2_complex() const { return std::polar(Omega2, phi2); }
  /// lambda_alpha e^{-i phi1}
  Complex lambda_tilde_a() const { return std::polar(lambda_a, -phi1); }
  Complex lambda_tilde_b() const { return std::polar(lambda_b, -phi1); }
  /// Omega_2 e^{-i phi1} / 2
  Complex Omega2_tilde() const { return 0.5 * std::polar(Omega2, phi2 - phi1); }

  /// Throws ConfigurationError on negative magnitudes or non-finite values.
  void validate() const;
};

/// Numeric reading of the "much greater than" and "similar to" relations.
struct Thresholds {
  double much_greater = 10.0;
  double similar = 3.0;
};

/// Collects regime/precondition margins. In forced mode failures are recorded
/// instead of thrown, so callers can annotate their output.
class Checks {
 public:
  explicit Checks(Thresholds thresholds = {}, bool force = false)
      : thresholds_(thresholds), force_(force) {}

  /// big >> small
  void much_greater(const std::string& label, double big, double small);
  /// x ~ y (ratio of larger to smaller within the similarity factor)
  void similar(const std::string& label, double x, double y);
  /// big >~ small (big at least small / similarity factor)
  void greater_or_similar(const std::string& label, double big, double small);
  void require(const std::string& label, bool condition);
  void add(Margin margin) { margins_.push_back(std::move(margin)); }

  const std::vector<Margin>& margins() const { return margins_; }
  std::vector<Margin> failures() const;
  bool ok() const;
  const Thresholds& thresholds() const { return thresholds_; }
  bool forced() const { return force_; }

  /// Throws RegimeValidityError listing failed margins unless forced.
  void finish(const std::string& context) const;

 private:
  Thresholds thresholds_;
  bool force_ = false;
  std::vector<Margin> margins_;
};

/// Options shared by every validating builder.
struct BuildOptions {
  Thresholds thresholds{};
  bool force = false;
  /// When forced, violated margins are appended here.
  std::vector<Margin>* violations = nullptr;
};

/// One harmonic component c * h * e^{i w t}. Unless `self_adjoint` is set the
/// owning Hamiltonian adds the conjugate c* h^dagger e^{-i w t}.
struct HarmonicTerm {
  Operator op;
  Complex amplitude{1.0, 0.0};
  double frequency = 0.0;
  bool self_adjoint = false;
};

class HarmonicHamiltonian {
 public:
  HarmonicHamiltonian() = default;
  explicit HarmonicHamiltonian(HilbertSpace space, bool hermitian_closure = true)
      : space_(std::move(space)), hermitian_closure_(hermitian_closure) {}

  void add(Operator op, Complex amplitude, double frequency);
  /// Static Hermitian piece (e.g. a bare energy); never conjugate-doubled.
  void add_hermitian(Operator op);

  const HilbertSpace& space() const { return space_; }
  const std::vector<HarmonicTerm>& terms() const { return terms_; }
  bool hermitian_closure() const { return hermitian_closure_; }

  Matrix evaluate(double t) const;
  Operator at(double t) const { return {space_, evaluate(t)}; }

  double max_frequency() const;
  /// Upper bound on ||H(t)|| (max absolute row sum) valid for all t.
  double norm_bound() const;

 private:
  HilbertSpace space_;
  std::vector<HarmonicTerm> terms_;
  bool hermitian_closure_ = true;
};

/// Space with mode a (and b) followed by the atom, in the fixed factor order.
HilbertSpace cavity_space(int cutoff_a, std::optional<int> cutoff_b = std::nullopt, bool with_atom = true);

HarmonicHamiltonian build_lab_hamiltonian(const SystemParams& params, const HilbertSpace& space);
HarmonicHamiltonian build_interaction_picture(const SystemParams& params, const HilbertSpace& space);
/// Single-drive Hamiltonian in the frame of the dressed states |+-> rotating at |Omega_1|.
HarmonicHamiltonian build_laser_frame(const SystemParams& params, const HilbertSpace& space,
                                      const BuildOptions& options = {});

/// Dressed kets |+-> = (e^{i phi1}|e> +- |g>)/sqrt(2).
Eigen::Vector2cd dressed_plus(double phi1);
Eigen::Vector2cd dressed_minus(double phi1);

enum class RegimeTag { Weak, Intermediate, Strong };
std::string to_string(RegimeTag tag);
RegimeTag parse_regime(const std::string& text);

struct Regime {
  RegimeTag tag = RegimeTag::Weak;
  std::vector<Margin> margins;
};

/// Margins of the amplification-regime hierarchy `tag` for these params.
std::vector<Margin> regime_margins(const SystemParams& params, RegimeTag tag, const Thresholds& thresholds = {});
Regime classify_regime(const SystemParams& params, const Thresholds& thresholds = {});

}  // namespace cqed
