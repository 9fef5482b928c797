#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqed/fock.hpp"

namespace cqed {

/// Quadrature statistics of one mode under X_theta = (a e^{-i theta} + a^dagger e^{i theta}) / 2.
/// var(theta) = (2 n~ + 1 + 2 Re(m2 e^{-2 i theta})) / 4 with n~ = <a^dagger a> - |<a>|^2
/// and m2 = <a^2> - <a>^2; the commutator is taken as the untruncated [a, a^dagger] = 1.
struct QuadratureResult {
  double theta_min = 0.0;
  double var_min = 0.25;
  double squeezing_degree = 0.0;
  Complex mean_a{0.0, 0.0};
  Complex mean_a2{0.0, 0.0};
  double mean_n = 0.0;

  double var_at(double theta) const;
};

/// Reduced density matrix of a single factor.
Matrix reduced_density(const State& state, std::string_view label);

double quadrature_variance(const State& state, std::string_view mode, double theta);
QuadratureResult min_quadrature_variance(const State& state, std::string_view mode);
/// Same, from an already reduced single-mode density matrix.
QuadratureResult quadrature_from_reduced(const Matrix& rho_mode);

double squeezing_degree(double variance);

double photon_number(const State& state, std::string_view mode);
/// |psi_i|^2 or rho_ii in the product basis.
std::vector<double> populations(const State& state);
/// Excited-state population of the atom factor.
double excited_population(const State& state);
/// Tr(rho^2), after tracing down to `subsystem` labels when given.
double purity(const State& state, std::span<const std::string> subsystem = {});
/// |<psi|phi>|^2 for two pure states, <psi|rho|psi> when one side is mixed,
/// and Tr(rho sigma) for two mixed states.
double fidelity(const State& a, const State& b);
/// Population in the top k Fock levels of `mode`; requires 0 <= k < cutoff.
double truncation_tail(const State& state, std::string_view mode, int k);

}  // namespace cqed
