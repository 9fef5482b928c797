#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cqed/dynamics.hpp"
#include "cqed/effective.hpp"
#include "cqed/observables.hpp"

using namespace cqed;

namespace {

constexpr double kPi = std::numbers::pi;

SystemParams pdc_params(double omega1, double delta) {
  SystemParams p;
  p.lambda_a = p.lambda_b = 1.0;
  p.Omega1 = omega1;
  p.delta_a = delta;
  p.delta_b = -delta;
  p.has_mode_b = true;
  return p;
}

SystemParams squeeze_params() {
  SystemParams p;
  p.lambda_a = 1.0;
  p.Omega1 = 400.0;
  p.Omega2 = 20.0;
  p.delta_2 = -800.0;
  p.has_drive2 = true;
  return p;
}

State fock_product(const HilbertSpace& space, std::initializer_list<int> levels) {
  std::vector<Vector> kets;
  auto it = levels.begin();
  for (const auto& f : space.factors()) {
    const int n = *it++;
    kets.push_back(f.kind == FactorKind::Atom ? Vector(atom_ket(static_cast<Level>(n))) : fock_ket(f.dim, n));
  }
  return product_state(space, kets);
}

double population(const State& s, int index) { return std::norm(s.vector()(index)); }

IntegratorConfig rk4(double dt, double t_end, int samples) {
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.t_grid = IntegratorConfig::uniform_grid(0.0, t_end, samples);
  return cfg;
}

}  // namespace

TEST(Pdc, IntermediateWitness) {
  const auto c = pdc_coupling(pdc_params(10.0, 30.0), Branch::Plus, RegimeTag::Intermediate);
  EXPECT_NEAR(c.coupling.real(), 0.02, 1e-15);
  EXPECT_NEAR(c.coupling.imag(), 0.0, 1e-15);
  EXPECT_NEAR(*c.required_detuning, -0.04, 1e-15);
}

TEST(Pdc, StrongWitness) {
  const auto c = pdc_coupling(pdc_params(100.0, 10.0), Branch::Plus, RegimeTag::Strong);
  EXPECT_NEAR(c.coupling.real(), -0.0025, 1e-15);
}

TEST(Pdc, WeakFormula) {
  const auto c = pdc_coupling(pdc_params(10.0, 120.0), Branch::Plus, RegimeTag::Weak);
  EXPECT_NEAR(c.coupling.real(), 10.0 / (120.0 * 120.0), 1e-15);
}

TEST(Pdc, MinusBranchNegatesCouplingAndDetuning) {
  const struct {
    double omega1, delta;
    RegimeTag tag;
  } cases[] = {{10.0, 120.0, RegimeTag::Weak}, {10.0, 30.0, RegimeTag::Intermediate}, {100.0, 10.0, RegimeTag::Strong}};
  for (const auto& k : cases) {
    const auto p = pdc_params(k.omega1, k.delta);
    const auto up = pdc_coupling(p, Branch::Plus, k.tag);
    const auto dn = pdc_coupling(p, Branch::Minus, k.tag);
    EXPECT_EQ(dn.coupling, -up.coupling);
    EXPECT_EQ(*dn.required_detuning, -*up.required_detuning);
  }
}

TEST(Pdc, SingularIntermediate) {
  EXPECT_THROW(pdc_coupling(pdc_params(10.0, 10.0), Branch::Plus, RegimeTag::Intermediate, {{}, true, nullptr}),
               SingularCoupling);
}

TEST(Pdc, RegimeViolation) {
  EXPECT_THROW(pdc_coupling(pdc_params(10.0, 30.0), Branch::Plus, RegimeTag::Strong), RegimeValidityError);
}

TEST(Pdc, NeedsOppositeDetunings) {
  auto p = pdc_params(10.0, 30.0);
  p.delta_b = 30.0;
  EXPECT_THROW(pdc_coupling(p, Branch::Plus, RegimeTag::Intermediate), ConfigurationError);
}

TEST(Puc, IntermediateWitness) {
  auto p = pdc_params(10.0, 8.0);
  p.delta_b = 12.0;
  const auto c = puc_coupling(p, Branch::Plus, RegimeTag::Intermediate, {{}, true, nullptr});
  EXPECT_NEAR(c.coupling.real(), 10.0 / 304.0, 1e-15);
  // Phi = |Omega1| (1/(4 Omega1^2 - db^2) - 1/(4 Omega1^2 - da^2)) + da - db
  const double phi = 10.0 * (1.0 / (400.0 - 144.0) - 1.0 / (400.0 - 64.0)) + (8.0 - 12.0);
  EXPECT_NEAR(*c.residual_phase, phi, 1e-13);
  EXPECT_NEAR(*c.residual_phase, -3.99070, 1e-5);
}

TEST(Puc, SymmetricCavitiesHaveNoResidualPhase) {
  auto p = pdc_params(10.0, 10.0);
  p.delta_b = 10.0;
  for (Branch b : {Branch::Plus, Branch::Minus}) {
    EXPECT_EQ(*puc_coupling(p, b, RegimeTag::Intermediate, {{}, true, nullptr}).residual_phase, 0.0);
  }
}

TEST(Squeeze, RateFromFig3Parameters) {
  const auto c = squeeze_coupling(squeeze_params(), Branch::Down);
  EXPECT_DOUBLE_EQ(*c.chi, 0.0125);
  EXPECT_NEAR(c.coupling.real(), 0.0125, 1e-16);
  EXPECT_NEAR(*c.required_detuning, 0.025, 1e-16);
  EXPECT_NEAR(squeeze_coupling(squeeze_params(), Branch::Up).coupling.real(), -0.0125, 1e-16);
}

TEST(Squeeze, PhaseRotatesAxis) {
  auto p = squeeze_params();
  p.phi1 = kPi / 2.0;
  const auto c = squeeze_coupling(p, Branch::Down);
  EXPECT_NEAR(c.coupling.real(), -0.0125, 1e-15);
  EXPECT_NEAR(std::abs(c.coupling), 0.0125, 1e-16);
}

TEST(Squeeze, MismatchedDriveRejected) {
  auto p = squeeze_params();
  p.Omega1 = 300.0;
  EXPECT_THROW(squeeze_coupling(p, Branch::Down), ConfigurationError);
}

TEST(EffectiveDynamics, PdcTwoModeSqueezedVacuum) {
  const HilbertSpace space = cavity_space(30, 30, false);
  EffectiveCoupling c;
  c.kind = EffectiveKind::PDC;
  c.coupling = 0.02;
  const auto traj = evolve_schrodinger(build_effective_hamiltonian(c, space), fock_product(space, {0, 0}),
                                       rk4(0.05, 50.0, 10));
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double s = std::sinh(0.02 * traj.times[i]);
    EXPECT_NEAR(photon_number(traj.states[i], "a"), s * s, 1e-6);
    EXPECT_NEAR(photon_number(traj.states[i], "b"), s * s, 1e-6);
  }
}

TEST(EffectiveDynamics, PucBeamSplitter) {
  const HilbertSpace space = cavity_space(3, 3, false);
  EffectiveCoupling c;
  c.kind = EffectiveKind::PUC;
  c.coupling = 0.1;
  c.residual_phase = 0.0;
  const double t_swap = kPi / 2.0 / 0.1;
  const auto traj = evolve_schrodinger(build_effective_hamiltonian(c, space), fock_product(space, {1, 0}),
                                       rk4(0.01, t_swap, 8));
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double s = std::sin(0.1 * traj.times[i]);
    EXPECT_NEAR(population(traj.states[i], 0 * 3 + 1), s * s, 1e-8);
  }
  EXPECT_NEAR(population(traj.states.back(), 1), 1.0, 1e-8);
}

TEST(EffectiveDynamics, SqueezedVacuumAtUnitSqueezing) {
  const HilbertSpace space = cavity_space(60, std::nullopt, false);
  const auto c = squeeze_coupling(squeeze_params(), Branch::Down);
  const auto traj = evolve_schrodinger(build_effective_hamiltonian(c, space), fock_product(space, {0}),
                                       rk4(0.01, 40.0, 4));
  EXPECT_NEAR(min_quadrature_variance(traj.states.back(), "a").var_min, std::exp(-2.0) / 4.0, 1e-6);
}

TEST(Sss, VacuumDiagonalVanishes) {
  auto p = squeeze_params();
  const HilbertSpace space = cavity_space(6);
  const Matrix h = build_sss_hamiltonian(p, space).evaluate(0.0);
  EXPECT_EQ(h(0, 0), Complex(0.0));  // |0,g>
  EXPECT_EQ(h(1, 1), Complex(0.0));  // |0,e>
}

TEST(Sss, ConditionalGeneratorsAreOpposite) {
  const HilbertSpace space = cavity_space(6);
  const Matrix h = build_sss_hamiltonian(squeeze_params(), space).evaluate(0.0);
  Eigen::MatrixXcd he(6, 6), hg(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      he(i, j) = h(2 * i + 1, 2 * j + 1);
      hg(i, j) = h(2 * i, 2 * j);
    }
  EXPECT_TRUE(he.isApprox(-hg, 1e-15));
  EXPECT_GT(he.norm(), 0.0);
}

TEST(Sss, EntanglesFieldWithAtom) {
  const auto p = squeeze_params();
  const HilbertSpace space = cavity_space(30);
  std::vector<Vector> kets = {coherent_ket(30, 1.0).normalized(), dressed_plus(0.0)};
  const State psi0 = product_state(space, kets);
  const double chi = 0.0125;
  const auto traj = evolve_schrodinger(build_sss_hamiltonian(p, space), psi0, rk4(0.01, 0.2 / chi, 1));
  const std::string field[] = {"a"};
  EXPECT_LT(purity(traj.states.back(), field), 0.999);
}

TEST(Ajc, RabiOscillation) {
  SystemParams p;
  p.lambda_a = 1.0;
  p.Omega2 = 20.0;
  p.delta_a = -20.0;
  const HilbertSpace space = cavity_space(4);
  const auto traj =
      evolve_schrodinger(build_ajc_hamiltonian(p, space), fock_product(space, {0, 0}), rk4(1e-3, kPi / 2.0, 4));
  const int e1 = 1 * 2 + 1;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double s = std::sin(traj.times[i]);
    EXPECT_NEAR(population(traj.states[i], e1), s * s, 1e-8);
  }
  EXPECT_NEAR(population(traj.states[2], e1), 0.5, 1e-8);
}

TEST(Ajc, ExcitationChangesInPairs) {
  SystemParams p;
  p.lambda_a = 1.0;
  p.Omega2 = 20.0;
  p.delta_a = -20.0;
  const HilbertSpace space = cavity_space(4);
  const auto traj =
      evolve_schrodinger(build_ajc_hamiltonian(p, space), fock_product(space, {0, 0}), rk4(1e-3, kPi, 8));
  for (const auto& s : traj.states) {
    const auto pops = populations(s);
    for (std::size_t i = 0; i < pops.size(); ++i) {
      const int n = static_cast<int>(i) / 2, e = static_cast<int>(i) % 2;
      if ((n + e) % 2 == 1) EXPECT_LT(pops[i], 1e-20);
      if (n + e > 2) EXPECT_LT(pops[i], 1e-20);
    }
  }
}

TEST(PulsedJcAjc, ReachesTwoPhotonState) {
  SystemParams p;
  p.lambda_a = 1.0;
  p.Omega2 = 20.0;
  p.delta_a = -20.0;
  const HilbertSpace space = cavity_space(5);
  const double tau = kPi / 2.0;
  const auto h = build_pulsed_jc_ajc(p, {tau, 1}, space);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  const double t_star = tau + kPi / (2.0 * std::sqrt(2.0));
  cfg.t_grid = {0.0, tau, t_star};
  const auto traj = evolve_schrodinger(h, fock_product(space, {0, 0}), cfg);
  EXPECT_NEAR(population(traj.states[1], 1 * 2 + 1), 1.0, 1e-8);
  EXPECT_NEAR(population(traj.states[2], 2 * 2 + 0), 1.0, 1e-6);
}

TEST(PulsedJcAjc, JcWindowConservesExcitations) {
  SystemParams p;
  p.lambda_a = 1.0;
  p.Omega2 = 20.0;
  p.delta_a = -20.0;
  const HilbertSpace space = cavity_space(5);
  const double tau = kPi / 3.0;
  const auto h = build_pulsed_jc_ajc(p, {tau, 1}, space);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_grid = IntegratorConfig::uniform_grid(0.0, 2.0 * tau, 8);
  const auto traj = evolve_schrodinger(h, fock_product(space, {0, 0}), cfg);
  const Operator nexc = embed(number(5), 0, space) + embed(sigma(Level::e, Level::e), 1, space);
  const double ref = expectation(traj.states[4], nexc).real();
  for (int i = 5; i <= 8; ++i) EXPECT_NEAR(expectation(traj.states[i], nexc).real(), ref, 1e-9);
}

TEST(PulsedJcAjc, NoCyclesMeansNoEvolution) {
  SystemParams p;
  p.lambda_a = 1.0;
  p.Omega2 = 20.0;
  p.delta_a = -20.0;
  const HilbertSpace space = cavity_space(4);
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_grid = {0.0, 1.0};
  const State psi0 = fock_product(space, {1, 1});
  const auto traj = evolve_schrodinger(build_pulsed_jc_ajc(p, {1.0, 0}, space), psi0, cfg);
  EXPECT_EQ(traj.states.back().vector(), psi0.vector());
}

TEST(PulseSchedule, Windows) {
  const auto w = PulseSchedule{0.5, 2}.windows();
  ASSERT_EQ(w.size(), 4u);
  EXPECT_EQ(w[0].kind, PulseKind::AJC);
  EXPECT_EQ(w[1].kind, PulseKind::JC);
  EXPECT_DOUBLE_EQ(w[3].t_begin, 1.5);
  EXPECT_DOUBLE_EQ(w[3].t_end, 2.0);
}

TEST(DeriveNumeric, DispersiveJaynesCummings) {
  const double g = 0.05, delta = 1.0;
  const HilbertSpace space = cavity_space(4);
  HarmonicHamiltonian v(space);
  v.add(embed(annihilation(4), 0, space) * embed(sigma(Level::e, Level::g), 1, space), g, delta);
  const auto gen = derive_effective_numeric(v, 200.0, 4000);
  const Matrix& m = gen.generator.matrix();
  const double s = g * g / delta;
  for (int n = 0; n < 3; ++n) {
    EXPECT_NEAR(m(2 * n + 1, 2 * n + 1).real(), s * (n + 1), 1e-14);  // (a^dagger a + 1) sigma_ee
    EXPECT_NEAR(m(2 * n, 2 * n).real(), -s * n, 1e-14);              // -a^dagger a sigma_gg
  }
  EXPECT_NEAR(m(1, 1).real(), 0.0025, 0.02 * 0.0025);
}

TEST(DeriveNumeric, BruteForceTimeAverage) {
  // Independent oracle: average -i V(t) \int_0^t V over a long window, minus the
  // oscillating remainder that averages out.
  const double g = 0.05, delta = 1.0;
  const HilbertSpace space = cavity_space(3);
  HarmonicHamiltonian v(space);
  v.add(embed(annihilation(3), 0, space) * embed(sigma(Level::e, Level::g), 1, space), g, delta);
  const auto gen = derive_effective_numeric(v, 200.0, 2000);

  const int steps = 400000;
  const double window = 200.0, dt = window / steps;
  Matrix integral = Matrix::Zero(6, 6), acc = Matrix::Zero(6, 6);
  Matrix prev = v.evaluate(0.0);
  for (int k = 1; k <= steps; ++k) {
    const Matrix cur = v.evaluate(k * dt);
    const Matrix next_integral = integral + 0.5 * dt * (prev + cur);
    acc += 0.5 * dt * (-kI * prev * integral - kI * cur * next_integral);
    integral = next_integral;
    prev = cur;
  }
  acc /= window;
  // The constant of integration contributes -i V(t) C, which averages to zero;
  // the residual is O(1/window).
  const Matrix hermitian = 0.5 * (acc + acc.adjoint());
  EXPECT_NEAR(hermitian(1, 1).real(), gen.generator(1, 1).real(), 0.02 * 0.0025);
  EXPECT_NEAR(hermitian(3, 3).real(), gen.generator(3, 3).real(), 0.02 * 0.005);
}

TEST(DeriveNumeric, LaserFramePdcCoefficient) {
  const auto p = pdc_params(10.0, 30.0);
  const HilbertSpace space = cavity_space(3, 3);
  const auto gen = derive_effective_numeric(build_laser_frame(p, space), 200.0, 2000);
  std::vector<Vector> k00 = {fock_ket(3, 0), fock_ket(3, 0), dressed_plus(0.0)};
  std::vector<Vector> k11 = {fock_ket(3, 1), fock_ket(3, 1), dressed_plus(0.0)};
  const Complex ab = product_state(space, k00).vector().dot(gen.generator.matrix() * product_state(space, k11).vector());
  EXPECT_NEAR(std::abs(ab - 0.02), 0.0, 0.05 * 0.02);
}

TEST(DeriveNumeric, ZeroInputGivesZero) {
  const HilbertSpace space = cavity_space(3);
  const auto gen = derive_effective_numeric(HarmonicHamiltonian(space), 200.0, 100);
  EXPECT_EQ(gen.generator.matrix().norm(), 0.0);
}

TEST(DeriveNumeric, NearDegeneratePairIsAmbiguous) {
  const HilbertSpace space = cavity_space(3);
  HarmonicHamiltonian v(space);
  const Operator op = embed(annihilation(3), 0, space) * embed(sigma(Level::e, Level::g), 1, space);
  v.add(op, 0.05, 1.0);
  v.add(op.dagger(), 0.05, -1.0 + 1e-4);
  EXPECT_THROW(derive_effective_numeric(v, 200.0, 100), AmbiguousResonance);
}
