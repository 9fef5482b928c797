#include "cqed/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cqed {

namespace {

constexpr double kRelTol = 1e-9;

bool nearly_equal(double x, double y, double rel = kRelTol) {
  return std::abs(x - y) <= rel * std::max({1.0, std::abs(x), std::abs(y)});
}

double dressed_sign(Branch branch) {
  switch (branch) {
    case Branch::Plus: return +1.0;
    case Branch::Minus: return -1.0;
    default: throw ConfigurationError("bilinear couplings need branch + or -, got " + to_string(branch));
  }
}

void record(const Checks& checks, const BuildOptions& options, const std::string& context) {
  if (options.force && options.violations) {
    auto f = checks.failures();
    options.violations->insert(options.violations->end(), f.begin(), f.end());
  }
  checks.finish(context);
}

}  // namespace

std::string to_string(EffectiveKind kind) {
  switch (kind) {
    case EffectiveKind::PDC: return "pdc";
    case EffectiveKind::PUC: return "puc";
    case EffectiveKind::Squeeze: return "squeeze";
  }
  return "?";
}

std::string to_string(Branch branch) {
  switch (branch) {
    case Branch::Plus: return "+";
    case Branch::Minus: return "-";
    case Branch::Up: return "up";
    case Branch::Down: return "down";
  }
  return "?";
}

EffectiveKind parse_effective_kind(const std::string& text) {
  if (text == "pdc") return EffectiveKind::PDC;
  if (text == "puc") return EffectiveKind::PUC;
  if (text == "squeeze") return EffectiveKind::Squeeze;
  throw ConfigurationError("unknown effective kind '" + text + "' (expected pdc|puc|squeeze)");
}

Branch parse_branch(const std::string& text) {
  if (text == "+" || text == "plus") return Branch::Plus;
  if (text == "-" || text == "minus") return Branch::Minus;
  if (text == "up") return Branch::Up;
  if (text == "down") return Branch::Down;
  throw ConfigurationError("unknown branch '" + text + "' (expected +|-|up|down)");
}

// ---------------------------------------------------------------------------
// Closed-form couplings

EffectiveCoupling pdc_coupling(const SystemParams& params, Branch branch, RegimeTag regime,
                               const BuildOptions& options) {
  params.validate();
  const double s = dressed_sign(branch);
  if (!params.has_mode_b) throw ConfigurationError("PDC needs mode b");
  if (!(params.delta_a > 0.0) || !nearly_equal(params.delta_a, -params.delta_b))
    throw ConfigurationError("PDC needs delta_a = -delta_b = delta > 0 (got delta_a = " +
                             std::to_string(params.delta_a) + ", delta_b = " + std::to_string(params.delta_b) + ")");

  Checks checks(options.thresholds, options.force);
  for (auto m : regime_margins(params, regime, options.thresholds)) {
    m.label = to_string(regime) + ": " + m.label;
    checks.add(std::move(m));
  }
  record(checks, options, "PDC coupling");

  const double delta = params.delta_a;
  const double om = params.Omega1;
  const Complex ll = params.lambda_tilde_a() * params.lambda_tilde_b();
  const double l2 = std::norm(params.lambda_tilde_a()) + std::norm(params.lambda_tilde_b());

  EffectiveCoupling out;
  out.kind = EffectiveKind::PDC;
  out.branch = branch;
  out.regime = regime;
  out.margins = checks.margins();
  switch (regime) {
    case RegimeTag::Weak:
      out.coupling = s * ll * om / (delta * delta);
      out.required_detuning = s * l2 * om / (delta * delta);
      break;
    case RegimeTag::Intermediate: {
      if (nearly_equal(om, std::abs(delta)))
        throw SingularCoupling("intermediate PDC is singular at |Omega_1| = |delta|");
      const double den = delta * delta - 4.0 * om * om;
      if (nearly_equal(delta * delta, 4.0 * om * om))
        throw SingularCoupling("intermediate PDC is singular at delta^2 = 4|Omega_1|^2");
      out.coupling = s * ll * om / den;
      out.required_detuning = -s * l2 * om / den;
      break;
    }
    case RegimeTag::Strong:
      if (om == 0.0) throw SingularCoupling("strong PDC needs Omega_1 > 0");
      out.coupling = -s * ll / (4.0 * om);
      out.required_detuning = s * l2 / (4.0 * om);
      break;
  }
  return out;
}

EffectiveCoupling puc_coupling(const SystemParams& params, Branch branch, RegimeTag regime,
                               const BuildOptions& options) {
  params.validate();
  const double s = dressed_sign(branch);
  if (!params.has_mode_b) throw ConfigurationError("PUC needs mode b");
  const double da = params.delta_a;
  const double db = params.delta_b;
  const double om = params.Omega1;
  if (da * db == 0.0) throw SingularCoupling("PUC needs delta_a * delta_b != 0");

  Checks checks(options.thresholds, options.force);
  checks.similar("|delta_a| ~ |delta_b|", da, db);
  checks.require("delta_a and delta_b share a sign", da * db > 0.0);
  record(checks, options, "PUC coupling");

  const double four_om2 = 4.0 * om * om;
  if (nearly_equal(four_om2, da * da) || nearly_equal(four_om2, db * db))
    throw SingularCoupling("PUC phase is singular at 4|Omega_1|^2 = delta^2");

  const Complex ll = params.lambda_tilde_a() * std::conj(params.lambda_tilde_b());
  EffectiveCoupling out;
  out.kind = EffectiveKind::PUC;
  out.branch = branch;
  out.regime = regime;
  out.margins = checks.margins();
  switch (regime) {
    case RegimeTag::Weak:
      out.coupling = ll * (da - db) / (2.0 * da * db);
      break;
    case RegimeTag::Intermediate:
      if (nearly_equal(four_om2, da * db))
        throw SingularCoupling("intermediate PUC is singular at 4|Omega_1|^2 = delta_a delta_b");
      out.coupling = s * ll * om / (four_om2 - da * db);
      break;
    case RegimeTag::Strong:
      if (om == 0.0) throw SingularCoupling("strong PUC needs Omega_1 > 0");
      out.coupling = s * ll / (4.0 * om);
      break;
  }
  const double la2 = std::norm(params.lambda_tilde_a());
  const double lb2 = std::norm(params.lambda_tilde_b());
  out.residual_phase = s * om * (lb2 / (four_om2 - db * db) - la2 / (four_om2 - da * da)) + da - db;
  return out;
}

EffectiveCoupling squeeze_coupling(const SystemParams& params, Branch branch, const BuildOptions& options) {
  params.validate();
  double s = 0.0;
  if (branch == Branch::Up) s = -1.0;
  else if (branch == Branch::Down) s = +1.0;
  else throw ConfigurationError("squeezing needs branch up or down, got " + to_string(branch));

  if (!params.has_drive2) throw ConfigurationError("squeezing needs the second drive (Omega_2)");
  if (params.delta_1 != 0.0) throw ConfigurationError("squeezing needs delta_1 = 0");
  if (!(params.delta_2 < 0.0)) throw ConfigurationError("squeezing needs delta_2 < 0");
  if (!nearly_equal(params.Omega1, -0.5 * params.delta_2, 1e-6))
    throw ConfigurationError("squeezing needs |Omega_1| = -delta_2/2 (got Omega_1 = " + std::to_string(params.Omega1) +
                             ", delta_2 = " + std::to_string(params.delta_2) + ")");
  if (params.Omega2 == 0.0) throw SingularCoupling("squeezing needs Omega_2 > 0");

  const double la = std::abs(params.lambda_tilde_a());
  Checks checks(options.thresholds, options.force);
  checks.much_greater("|Omega_1| >> |lambda_a|", params.Omega1, la);
  checks.much_greater("|Omega_1| >> |Omega_2|", params.Omega1, params.Omega2);
  checks.much_greater("|Omega_1| >> |delta_a|", params.Omega1, params.delta_a);
  checks.much_greater("|Omega_2| >> |delta_a|", params.Omega2, params.delta_a);
  record(checks, options, "squeezing coupling");

  const double chi = la * la / (4.0 * params.Omega2);
  EffectiveCoupling out;
  out.kind = EffectiveKind::Squeeze;
  out.branch = branch;
  out.coupling = s * chi * std::polar(1.0, -2.0 * params.phi1);
  out.required_detuning = s * 2.0 * chi;
  out.chi = chi;
  out.margins = checks.margins();
  return out;
}

// ---------------------------------------------------------------------------
// Hamiltonian builders

HarmonicHamiltonian build_effective_hamiltonian(const EffectiveCoupling& coupling, const HilbertSpace& space) {
  const int sa = space.slot("a");
  const Operator a = embed(annihilation(space.factor(sa).dim), sa, space);
  HarmonicHamiltonian h(space);
  switch (coupling.kind) {
    case EffectiveKind::PDC: {
      const int sb = space.slot("b");
      const Operator b = embed(annihilation(space.factor(sb).dim), sb, space);
      h.add(a * b, coupling.coupling, 0.0);
      break;
    }
    case EffectiveKind::PUC: {
      const int sb = space.slot("b");
      const Operator b = embed(annihilation(space.factor(sb).dim), sb, space);
      h.add(a * b.dagger(), coupling.coupling, coupling.residual_phase.value_or(0.0));
      break;
    }
    case EffectiveKind::Squeeze:
      h.add(a * a, coupling.coupling, 0.0);
      break;
  }
  return h;
}

HarmonicHamiltonian build_sss_hamiltonian(const SystemParams& params, const HilbertSpace& space) {
  params.validate();
  if (params.delta_a != 0.0 || params.phi1 != 0.0 || params.phi2 != 0.0)
    throw ConfigurationError("squeezed-superposition Hamiltonian needs delta_a = phi1 = phi2 = 0");
  if (params.Omega2 == 0.0) throw SingularCoupling("squeezed-superposition Hamiltonian needs Omega_2 > 0");
  const double chi = params.lambda_a * params.lambda_a / (4.0 * params.Omega2);
  const int sa = space.slot("a");
  const auto atom = space.atom_slot();
  if (!atom) throw SpaceMismatch("squeezed-superposition Hamiltonian needs an atom factor");
  const int n = space.factor(sa).dim;
  const Operator a = annihilation(n);
  const Operator field = 2.0 * number(n) + a * a + a.dagger() * a.dagger();
  const Operator sz = sigma(Level::e, Level::e) - sigma(Level::g, Level::g);
  HarmonicHamiltonian h(space);
  h.add_hermitian(-chi * (embed(field, sa, space) * embed(sz, *atom, space)));
  return h;
}

namespace {

void check_ajc_conditions(const SystemParams& params, const BuildOptions& options, const std::string& context) {
  params.validate();
  Checks checks(options.thresholds, options.force);
  checks.require("phi1 = 0", params.phi1 == 0.0);
  checks.require("phi2 = 0", params.phi2 == 0.0);
  checks.require("delta_a = -|Omega_2|", nearly_equal(params.delta_a, -params.Omega2));
  // Printed as |Omega_2| >> |lambda_a|^2; checked dimensionally consistent.
  checks.much_greater("|Omega_2| >> |lambda_a|", params.Omega2, params.lambda_a);
  record(checks, options, context);
}

HarmonicHamiltonian coupling_hamiltonian(const SystemParams& params, const HilbertSpace& space, Level to,
                                         Level from) {
  const int sa = space.slot("a");
  const auto atom = space.atom_slot();
  if (!atom) throw SpaceMismatch("atom-field coupling needs an atom factor");
  const Operator a = embed(annihilation(space.factor(sa).dim), sa, space);
  HarmonicHamiltonian h(space);
  h.add(a * embed(sigma(to, from), *atom, space), params.lambda_tilde_a(), 0.0);
  return h;
}

}  // namespace

HarmonicHamiltonian build_ajc_hamiltonian(const SystemParams& params, const HilbertSpace& space,
                                          const BuildOptions& options) {
  check_ajc_conditions(params, options, "AJC Hamiltonian");
  return coupling_hamiltonian(params, space, Level::g, Level::e);
}

HarmonicHamiltonian build_jc_hamiltonian(const SystemParams& params, const HilbertSpace& space) {
  return coupling_hamiltonian(params, space, Level::e, Level::g);
}

// ---------------------------------------------------------------------------
// Pulsed JC/AJC

void PulseSchedule::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigurationError("pulse duration tau must be > 0");
  if (n_cycles < 0) throw ConfigurationError("pulse schedule needs n_cycles >= 0");
}

std::vector<PulseWindow> PulseSchedule::windows() const {
  validate();
  std::vector<PulseWindow> out;
  out.reserve(static_cast<std::size_t>(2 * n_cycles));
  for (int n = 0; n < n_cycles; ++n) {
    out.push_back({2.0 * n * tau, (2.0 * n + 1.0) * tau, PulseKind::AJC});
    out.push_back({(2.0 * n + 1.0) * tau, (2.0 * n + 2.0) * tau, PulseKind::JC});
  }
  return out;
}

PiecewiseHamiltonian::PiecewiseHamiltonian(HarmonicHamiltonian h) : space_(h.space()) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  segments_.push_back({-inf, inf, std::move(h)});
}

void PiecewiseHamiltonian::add_segment(double t_begin, double t_end, HarmonicHamiltonian h) {
  require_same_space(space_, h.space(), "PiecewiseHamiltonian::add_segment");
  if (!(t_end > t_begin)) throw ConfigurationError("segment must have t_end > t_begin");
  for (const auto& s : segments_)
    if (t_begin < s.t_end && s.t_begin < t_end) throw ConfigurationError("overlapping Hamiltonian segments");
  segments_.push_back({t_begin, t_end, std::move(h)});
  std::sort(segments_.begin(), segments_.end(),
            [](const Segment& x, const Segment& y) { return x.t_begin < y.t_begin; });
}

const PiecewiseHamiltonian::Segment* PiecewiseHamiltonian::active(double t) const {
  for (const auto& s : segments_)
    if (t >= s.t_begin && t < s.t_end) return &s;
  return nullptr;
}

Matrix PiecewiseHamiltonian::evaluate(double t) const {
  if (const auto* s = active(t)) return s->h.evaluate(t);
  return Matrix::Zero(space_.total_dim(), space_.total_dim());
}

std::vector<double> PiecewiseHamiltonian::breakpoints(double t0, double t1) const {
  std::vector<double> out;
  for (const auto& s : segments_) {
    for (double edge : {s.t_begin, s.t_end})
      if (std::isfinite(edge) && edge > t0 && edge < t1) out.push_back(edge);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PiecewiseHamiltonian build_pulsed_jc_ajc(const SystemParams& params, const PulseSchedule& schedule,
                                         const HilbertSpace& space, const BuildOptions& options) {
  schedule.validate();
  check_ajc_conditions(params, options, "pulsed JC/AJC Hamiltonian");
  const auto ajc = coupling_hamiltonian(params, space, Level::g, Level::e);
  const auto jc = coupling_hamiltonian(params, space, Level::e, Level::g);
  PiecewiseHamiltonian h(space);
  for (const auto& w : schedule.windows()) h.add_segment(w.t_begin, w.t_end, w.kind == PulseKind::AJC ? ajc : jc);
  return h;
}

// ---------------------------------------------------------------------------
// Second-order effective generator

EffectiveGenerator derive_effective_numeric(const HarmonicHamiltonian& h, double window, int samples,
                                            const EffectiveGeneratorOptions& options) {
  if (!(window > 0.0)) throw ConfigurationError("averaging window must be > 0");
  if (samples < 1) throw ConfigurationError("need at least one residue sample");
  const HilbertSpace& space = h.space();
  const int d = space.total_dim();

  struct Component {
    Matrix m;
    double w;
  };
  std::vector<Component> comps;
  Matrix first_order = Matrix::Zero(d, d);
  for (const auto& term : h.terms()) {
    const bool is_static = std::abs(term.frequency) <= options.resonance_tol;
    if (is_static && !options.allow_static) {
      bool zero_amplitude = term.amplitude == Complex{0.0, 0.0} || term.op.matrix().isZero(0.0);
      if (zero_amplitude) continue;
      throw AmbiguousResonance("term at zero frequency cannot enter the second-order generator "
                               "(set allow_static to pass it through at first order)");
    }
    Matrix m = term.amplitude * term.op.matrix();
    if (is_static) {
      first_order += m;
      if (h.hermitian_closure() && !term.self_adjoint) first_order += m.adjoint();
      continue;
    }
    comps.push_back({m, term.frequency});
    if (h.hermitian_closure() && !term.self_adjoint) comps.push_back({m.adjoint(), -term.frequency});
  }

  EffectiveGenerator out{Operator(space, first_order), 0.0, 0, std::numeric_limits<double>::infinity()};
  const double beat_floor = 10.0 / window;

  struct Beat {
    Matrix m;
    double w;
  };
  std::vector<Beat> beats;
  Matrix static_part = Matrix::Zero(d, d);
  for (const auto& k : comps) {
    for (const auto& l : comps) {
      const double s = k.w + l.w;
      Matrix prod = -(k.m * l.m) / l.w;
      if (std::abs(s) <= options.resonance_tol) {
        static_part += prod;
        ++out.resonant_pairs;
        continue;
      }
      if (prod.isZero(0.0)) continue;
      if (std::abs(s) < beat_floor)
        throw AmbiguousResonance("components at " + std::to_string(k.w) + " and " + std::to_string(l.w) +
                                 " beat at " + std::to_string(s) + ", too slow to average over window " +
                                 std::to_string(window) + "; widen the window or reclassify the pair");
      out.slowest_beat = std::min(out.slowest_beat, std::abs(s));
      beats.push_back({std::move(prod), s});
    }
  }
  out.generator = Operator(space, first_order + static_part);

  for (int j = 0; j <= samples; ++j) {
    const double t = window * j / samples;
    Matrix r = Matrix::Zero(d, d);
    for (const auto& b : beats) r += std::exp(kI * (b.w * t)) * b.m;
    if (d > 0) out.residue_max = std::max(out.residue_max, r.cwiseAbs().maxCoeff());
  }
  return out;
}

}  // namespace cqed
