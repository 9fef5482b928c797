// Compiled (CSR + OpenMP) against dense serial reference right-hand sides on
// the fig3 interaction-picture generator.

#include <benchmark/benchmark.h>

#include "cqed/kernels.hpp"
#include "cqed/model.hpp"

using namespace cqed;
using namespace cqed::kernels;

namespace {

struct Fixture {
  int dim;
  std::vector<CompiledGenerator::Component> components;
  std::vector<CompiledGenerator::Jump> jumps;
};

Fixture fig3(int cutoff) {
  SystemParams p;
  p.lambda_a = 1.0;
  p.Omega1 = 400.0;
  p.Omega2 = 20.0;
  p.delta_2 = -800.0;
  p.delta_a = 0.025;
  p.has_drive2 = true;
  const HilbertSpace space = cavity_space(cutoff);
  const auto h = build_interaction_picture(p, space);
  Fixture f{space.total_dim(), {}, {}};
  for (const auto& t : h.terms()) {
    f.components.push_back({t.op.matrix(), t.amplitude, t.frequency});
    f.components.push_back({t.op.matrix().adjoint(), std::conj(t.amplitude), -t.frequency});
  }
  f.jumps.push_back({embed(annihilation(cutoff), 0, space).matrix(), 3e-3});
  f.jumps.push_back({embed(sigma(Level::g, Level::e), 1, space).matrix(), 1e-4});
  return f;
}

Vector start_vector(int dim) {
  Vector v = Vector::Ones(dim);
  return v.normalized();
}

void BM_SchrodingerCompiled(benchmark::State& state) {
  auto f = fig3(static_cast<int>(state.range(0)));
  CompiledGenerator gen(f.dim, f.components);
  const Vector psi = start_vector(f.dim);
  Vector d(f.dim);
  double t = 0.0;
  for (auto _ : state) {
    gen.schrodinger_rhs(t, psi, d);
    t += 1e-5;
    benchmark::DoNotOptimize(d.data());
  }
}

void BM_SchrodingerReference(benchmark::State& state) {
  auto f = fig3(static_cast<int>(state.range(0)));
  const Vector psi = start_vector(f.dim);
  Vector d(f.dim);
  double t = 0.0;
  for (auto _ : state) {
    reference::schrodinger_rhs(reference::hamiltonian(f.components, f.dim, t), psi, d);
    t += 1e-5;
    benchmark::DoNotOptimize(d.data());
  }
}

void BM_LindbladCompiled(benchmark::State& state) {
  auto f = fig3(static_cast<int>(state.range(0)));
  CompiledGenerator gen(f.dim, f.components, f.jumps);
  const Vector v = start_vector(f.dim);
  const Matrix rho = v * v.adjoint();
  Matrix d(f.dim, f.dim);
  double t = 0.0;
  for (auto _ : state) {
    gen.lindblad_rhs(t, rho, d);
    t += 1e-5;
    benchmark::DoNotOptimize(d.data());
  }
}

void BM_LindbladReference(benchmark::State& state) {
  auto f = fig3(static_cast<int>(state.range(0)));
  const Vector v = start_vector(f.dim);
  const Matrix rho = v * v.adjoint();
  Matrix d(f.dim, f.dim);
  double t = 0.0;
  for (auto _ : state) {
    reference::lindblad_rhs(reference::hamiltonian(f.components, f.dim, t), f.jumps, rho, d);
    t += 1e-5;
    benchmark::DoNotOptimize(d.data());
  }
}

}  // namespace

BENCHMARK(BM_SchrodingerCompiled)->Arg(20)->Arg(40)->Arg(80);
BENCHMARK(BM_SchrodingerReference)->Arg(20)->Arg(40)->Arg(80);
BENCHMARK(BM_LindbladCompiled)->Arg(20)->Arg(40);
BENCHMARK(BM_LindbladReference)->Arg(20)->Arg(40);

BENCHMARK_MAIN();
