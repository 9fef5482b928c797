#include "cqed/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cqed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_ratio(double num, double den) {
  num = std::abs(num);
  den = std::abs(den);
  if (den == 0.0) return num == 0.0 ? 1.0 : kInf;
  return num / den;
}

void check_finite_nonneg(const char* name, double v) {
  if (!std::isfinite(v)) throw ConfigurationError(std::string(name) + " is not finite");
  if (v < 0.0) throw ConfigurationError(std::string(name) + " must be >= 0, got " + std::to_string(v));
}

void check_finite(const char* name, double v) {
  if (!std::isfinite(v)) throw ConfigurationError(std::string(name) + " is not finite");
}

}  // namespace

void SystemParams::validate() const {
  check_finite("omega0", omega0);
  check_finite("delta_a", delta_a);
  check_finite("delta_b", delta_b);
  check_finite("delta_1", delta_1);
  check_finite("delta_2", delta_2);
  check_finite("phi1", phi1);
  check_finite("phi2", phi2);
  check_finite_nonneg("lambda_a", lambda_a);
  check_finite_nonneg("lambda_b", lambda_b);
  check_finite_nonneg("Omega1", Omega1);
  check_finite_nonneg("Omega2", Omega2);
  check_finite_nonneg("Gamma_f", Gamma_f);
  check_finite_nonneg("Gamma_a", Gamma_a);
}

// ---------------------------------------------------------------------------
// Checks

void Checks::much_greater(const std::string& label, double big, double small) {
  double r = safe_ratio(big, small);
  margins_.push_back({label, r, thresholds_.much_greater, r >= thresholds_.much_greater});
}

void Checks::similar(const std::string& label, double x, double y) {
  double r = std::max(safe_ratio(x, y), safe_ratio(y, x));
  margins_.push_back({label, r, thresholds_.similar, r <= thresholds_.similar});
}

void Checks::greater_or_similar(const std::string& label, double big, double small) {
  double r = safe_ratio(big, small);
  double need = 1.0 / thresholds_.similar;
  margins_.push_back({label, r, need, r >= need});
}

void Checks::require(const std::string& label, bool condition) {
  margins_.push_back({label, condition ? 1.0 : 0.0, 1.0, condition});
}

std::vector<Margin> Checks::failures() const {
  std::vector<Margin> out;
  std::copy_if(margins_.begin(), margins_.end(), std::back_inserter(out), [](const Margin& m) { return !m.passed; });
  return out;
}

bool Checks::ok() const {
  return std::all_of(margins_.begin(), margins_.end(), [](const Margin& m) { return m.passed; });
}

void Checks::finish(const std::string& context) const {
  if (ok() || force_) return;
  throw RegimeValidityError(context + ": preconditions violated", failures());
}

namespace {

void finish_checks(const Checks& checks, const BuildOptions& options, const std::string& context) {
  if (options.force && options.violations) {
    auto f = checks.failures();
    options.violations->insert(options.violations->end(), f.begin(), f.end());
  }
  checks.finish(context);
}

}  // namespace

// ---------------------------------------------------------------------------
// HarmonicHamiltonian

void HarmonicHamiltonian::add(Operator op, Complex amplitude, double frequency) {
  require_same_space(space_, op.space(), "HarmonicHamiltonian::add");
  if (!std::isfinite(frequency)) throw ConfigurationError("term frequency must be finite");
  terms_.push_back({std::move(op), amplitude, frequency, false});
}

void HarmonicHamiltonian::add_hermitian(Operator op) {
  require_same_space(space_, op.space(), "HarmonicHamiltonian::add_hermitian");
  terms_.push_back({std::move(op), Complex{1.0, 0.0}, 0.0, true});
}

Matrix HarmonicHamiltonian::evaluate(double t) const {
  const int d = space_.total_dim();
  Matrix h = Matrix::Zero(d, d);
  for (const auto& term : terms_) {
    Complex c = term.amplitude * std::exp(kI * (term.frequency * t));
    h += c * term.op.matrix();
    if (hermitian_closure_ && !term.self_adjoint) h += std::conj(c) * term.op.matrix().adjoint();
  }
  return h;
}

double HarmonicHamiltonian::max_frequency() const {
  double w = 0.0;
  for (const auto& term : terms_) w = std::max(w, std::abs(term.frequency));
  return w;
}

double HarmonicHamiltonian::norm_bound() const {
  const int d = space_.total_dim();
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(d);
  for (const auto& term : terms_) {
    double a = std::abs(term.amplitude);
    rows += a * term.op.matrix().cwiseAbs().rowwise().sum();
    if (hermitian_closure_ && !term.self_adjoint) rows += a * term.op.matrix().cwiseAbs().colwise().sum().transpose();
  }
  return d > 0 ? rows.maxCoeff() : 0.0;
}

// ---------------------------------------------------------------------------
// Builders

HilbertSpace cavity_space(int cutoff_a, std::optional<int> cutoff_b, bool with_atom) {
  std::vector<Factor> f{Factor::mode(cutoff_a, "a")};
  if (cutoff_b) f.push_back(Factor::mode(*cutoff_b, "b"));
  if (with_atom) f.push_back(Factor::atom());
  return HilbertSpace(std::move(f));
}

Eigen::Vector2cd dressed_plus(double phi1) {
  return (std::polar(1.0, phi1) * atom_ket(Level::e) + atom_ket(Level::g)) / std::sqrt(2.0);
}

Eigen::Vector2cd dressed_minus(double phi1) {
  return (std::polar(1.0, phi1) * atom_ket(Level::e) - atom_ket(Level::g)) / std::sqrt(2.0);
}

namespace {

struct CavityOps {
  Operator a, adag_a, sigma_eg, sigma_ee, sigma_gg;
  std::optional<Operator> b, bdag_b;
};

CavityOps cavity_ops(const SystemParams& params, const HilbertSpace& space) {
  params.validate();
  const int atom = space.atom_slot().value_or(-1);
  if (atom < 0) throw SpaceMismatch("cavity Hamiltonian needs an atom factor in " + space.describe());
  const int sa = space.slot("a");
  auto sb = space.find("b");
  if (params.has_mode_b && !sb) throw SpaceMismatch("params reference mode b but space is " + space.describe());

  CavityOps ops{
      embed(annihilation(space.factor(sa).dim), sa, space),
      embed(number(space.factor(sa).dim), sa, space),
      embed(sigma(Level::e, Level::g), atom, space),
      embed(sigma(Level::e, Level::e), atom, space),
      embed(sigma(Level::g, Level::g), atom, space),
      std::nullopt,
      std::nullopt,
  };
  if (sb) {
    ops.b = embed(annihilation(space.factor(*sb).dim), *sb, space);
    ops.bdag_b = embed(number(space.factor(*sb).dim), *sb, space);
  }
  return ops;
}

}  // namespace

HarmonicHamiltonian build_lab_hamiltonian(const SystemParams& params, const HilbertSpace& space) {
  auto ops = cavity_ops(params, space);
  HarmonicHamiltonian h(space);

  Operator h0 = params.omega_a() * ops.adag_a + (0.5 * params.omega0) * (ops.sigma_ee - ops.sigma_gg);
  if (ops.bdag_b) h0 += params.omega_b() * *ops.bdag_b;
  h.add_hermitian(std::move(h0));

  h.add(ops.a * ops.sigma_eg, params.lambda_a, 0.0);
  if (ops.b) h.add(*ops.b * ops.sigma_eg, params.lambda_b, 0.0);
  h.add(ops.sigma_eg, params.Omega1_complex(), -params.omega1());
  if (params.has_drive2) h.add(ops.sigma_eg, params.Omega2_complex(), -params.omega2());
  return h;
}

HarmonicHamiltonian build_interaction_picture(const SystemParams& params, const HilbertSpace& space) {
  auto ops = cavity_ops(params, space);
  HarmonicHamiltonian h(space);
  h.add(ops.a * ops.sigma_eg, params.lambda_a, params.delta_a);
  if (ops.b) h.add(*ops.b * ops.sigma_eg, params.lambda_b, params.delta_b);
  h.add(ops.sigma_eg, params.Omega1_complex(), params.delta_1);
  if (params.has_drive2) h.add(ops.sigma_eg, params.Omega2_complex(), params.delta_2);
  return h;
}

HarmonicHamiltonian build_laser_frame(const SystemParams& params, const HilbertSpace& space,
                                      const BuildOptions& options) {
  auto ops = cavity_ops(params, space);
  Checks checks(options.thresholds, options.force);
  checks.require("single drive (Omega_2 absent)", !params.has_drive2);
  checks.much_greater("|Omega_1| >> delta_1", params.Omega1, params.delta_1);
  checks.much_greater("|delta_a| >> delta_1", params.delta_a, params.delta_1);
  if (ops.b) checks.much_greater("|delta_b| >> delta_1", params.delta_b, params.delta_1);
  finish_checks(checks, options, "laser frame");

  const int atom = *space.atom_slot();
  const auto plus = dressed_plus(params.phi1);
  const auto minus = dressed_minus(params.phi1);
  const Operator s_pp = embed(atomic_outer(plus, plus), atom, space);
  const Operator s_mm = embed(atomic_outer(minus, minus), atom, space);
  const Operator s_pm = embed(atomic_outer(plus, minus), atom, space);
  const Operator s_mp = embed(atomic_outer(minus, plus), atom, space);
  const double two_omega = 2.0 * params.Omega1;

  HarmonicHamiltonian h(space);
  auto add_mode = [&](const Operator& mode_op, Complex lambda_tilde, double delta) {
    const double w = delta - params.delta_1;
    h.add(mode_op * (s_pp - s_mm), 0.5 * lambda_tilde, w);
    h.add(mode_op * s_pm, -0.5 * lambda_tilde, w + two_omega);
    h.add(mode_op * s_mp, 0.5 * lambda_tilde, w - two_omega);
  };
  add_mode(ops.a, params.lambda_tilde_a(), params.delta_a);
  if (ops.b) add_mode(*ops.b, params.lambda_tilde_b(), params.delta_b);
  return h;
}

// ---------------------------------------------------------------------------
// Regimes

std::string to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::Weak: return "weak";
    case RegimeTag::Intermediate: return "intermediate";
    case RegimeTag::Strong: return "strong";
  }
  return "?";
}

RegimeTag parse_regime(const std::string& text) {
  if (text == "weak" || text == "W") return RegimeTag::Weak;
  if (text == "intermediate" || text == "I") return RegimeTag::Intermediate;
  if (text == "strong" || text == "S") return RegimeTag::Strong;
  throw ConfigurationError("unknown regime '" + text + "' (expected weak|intermediate|strong)");
}

std::vector<Margin> regime_margins(const SystemParams& params, RegimeTag tag, const Thresholds& thresholds) {
  if (params.has_drive2) throw ConfigurationError("regime classification needs a single-drive configuration");
  Checks c(thresholds, true);
  const bool b = params.has_mode_b;
  const double om = params.Omega1;
  const double la = params.lambda_a;
  const double lb = params.lambda_b;
  const double lmax = b ? std::max(la, lb) : la;

  if (b) c.similar("|delta_a| ~ |delta_b|", params.delta_a, params.delta_b);
  if (b && lb > 0.0) c.similar("|lambda_a| ~ |lambda_b|", la, lb);

  switch (tag) {
    case RegimeTag::Weak:
      c.much_greater("|delta_a| >> |Omega_1|", params.delta_a, om);
      if (b) c.much_greater("|delta_b| >> |Omega_1|", params.delta_b, om);
      c.greater_or_similar("|Omega_1| >~ |lambda|", om, lmax);
      break;
    case RegimeTag::Intermediate:
      c.similar("|Omega_1| ~ |delta_a|", om, params.delta_a);
      if (b) c.similar("|Omega_1| ~ |delta_b|", om, params.delta_b);
      c.much_greater("|Omega_1| >> |lambda|", om, lmax);
      c.much_greater("|delta_a| >> |lambda|", params.delta_a, lmax);
      if (b) c.much_greater("|delta_b| >> |lambda|", params.delta_b, lmax);
      break;
    case RegimeTag::Strong:
      c.much_greater("|Omega_1| >> |delta_a|", om, params.delta_a);
      if (b) c.much_greater("|Omega_1| >> |delta_b|", om, params.delta_b);
      c.much_greater("|delta_a| >> |lambda|", params.delta_a, lmax);
      if (b) c.much_greater("|delta_b| >> |lambda|", params.delta_b, lmax);
      break;
  }

  // No transitions between the dressed states |+> and |->.
  auto no_transition = [&](const char* mode, double delta, double lambda) {
    for (int sign : {+1, -1}) {
      std::ostringstream label;
      label << "|2 Omega_1 " << (sign > 0 ? '+' : '-') << " (delta_" << mode << " - delta_1)| >> |lambda_" << mode
            << "|";
      c.much_greater(label.str(), 2.0 * om + sign * (delta - params.delta_1), lambda);
    }
  };
  no_transition("a", params.delta_a, la);
  if (b) no_transition("b", params.delta_b, lb);
  return c.margins();
}

Regime classify_regime(const SystemParams& params, const Thresholds& thresholds) {
  std::vector<Margin> all;
  for (RegimeTag tag : {RegimeTag::Strong, RegimeTag::Intermediate, RegimeTag::Weak}) {
    auto m = regime_margins(params, tag, thresholds);
    if (std::all_of(m.begin(), m.end(), [](const Margin& x) { return x.passed; })) return {tag, std::move(m)};
    for (auto& x : m) {
      x.label = to_string(tag) + ": " + x.label;
      all.push_back(std::move(x));
    }
  }
  throw UnclassifiableRegime("no amplification regime matches", std::move(all));
}

}  // namespace cqed
