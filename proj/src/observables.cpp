#include "cqed/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cqed/errors.hpp"

namespace cqed {

namespace {

const Factor& mode_factor(const HilbertSpace& space, std::string_view label) {
  const Factor& f = space.factor(space.slot(label));
  if (f.kind != FactorKind::Mode) throw SpaceMismatch("factor '" + std::string(label) + "' is not a field mode");
  return f;
}

}  // namespace

double QuadratureResult::var_at(double theta) const {
  const Complex m2 = mean_a2 - mean_a * mean_a;
  const double n_tilde = mean_n - std::norm(mean_a);
  return (2.0 * n_tilde + 1.0 + 2.0 * std::real(m2 * std::polar(1.0, -2.0 * theta))) / 4.0;
}

Matrix reduced_density(const State& state, std::string_view label) {
  const int slot = state.space().slot(label);
  if (state.space().num_factors() == 1) return state.density_matrix();
  const int keep[] = {slot};
  return partial_trace(state, keep).density();
}

QuadratureResult quadrature_from_reduced(const Matrix& rho) {
  const int n = static_cast<int>(rho.rows());
  QuadratureResult out;
  // Tr(rho a) = sum_k sqrt(k) rho(k, k-1), Tr(rho a^2) = sum_k sqrt(k (k-1)) rho(k, k-2).
  Complex a1{0.0, 0.0};
  Complex a2{0.0, 0.0};
  double nn = 0.0;
  for (int k = 1; k < n; ++k) {
    a1 += std::sqrt(static_cast<double>(k)) * rho(k, k - 1);
    nn += k * std::real(rho(k, k));
  }
  for (int k = 2; k < n; ++k) a2 += std::sqrt(static_cast<double>(k) * (k - 1)) * rho(k, k - 2);
  out.mean_a = a1;
  out.mean_a2 = a2;
  out.mean_n = nn;

  const Complex m2 = a2 - a1 * a1;
  const double n_tilde = nn - std::norm(a1);
  const double mag = std::abs(m2);
  out.var_min = (2.0 * n_tilde + 1.0 - 2.0 * mag) / 4.0;
  if (mag == 0.0) {
    out.theta_min = 0.0;
  } else {
    double theta = (std::arg(m2) + std::numbers::pi) / 2.0;
    theta = std::fmod(theta, std::numbers::pi);
    if (theta < 0.0) theta += std::numbers::pi;
    out.theta_min = theta;
  }
  out.squeezing_degree = squeezing_degree(out.var_min);
  return out;
}

double quadrature_variance(const State& state, std::string_view mode, double theta) {
  mode_factor(state.space(), mode);
  return quadrature_from_reduced(reduced_density(state, mode)).var_at(theta);
}

QuadratureResult min_quadrature_variance(const State& state, std::string_view mode) {
  mode_factor(state.space(), mode);
  return quadrature_from_reduced(reduced_density(state, mode));
}

double squeezing_degree(double variance) { return 100.0 * (1.0 - variance / 0.25); }

double photon_number(const State& state, std::string_view mode) {
  mode_factor(state.space(), mode);
  const Matrix rho = reduced_density(state, mode);
  double nn = 0.0;
  for (int k = 1; k < rho.rows(); ++k) nn += k * std::real(rho(k, k));
  return nn;
}

std::vector<double> populations(const State& state) {
  std::vector<double> out;
  if (state.is_pure()) {
    const auto& v = state.vector();
    out.reserve(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(std::norm(v(i)));
  } else {
    const auto& rho = state.density();
    out.reserve(static_cast<std::size_t>(rho.rows()));
    for (Eigen::Index i = 0; i < rho.rows(); ++i) out.push_back(std::real(rho(i, i)));
  }
  return out;
}

double excited_population(const State& state) {
  const auto slot = state.space().atom_slot();
  if (!slot) throw SpaceMismatch("excited_population: space has no atom");
  const Matrix rho = reduced_density(state, state.space().factor(*slot).label);
  return std::real(rho(static_cast<int>(Level::e), static_cast<int>(Level::e)));
}

double purity(const State& state, std::span<const std::string> subsystem) {
  if (subsystem.empty()) {
    if (state.is_pure()) {
      const double n = state.vector().squaredNorm();
      return n * n;
    }
    const auto& rho = state.density();
    return std::real((rho.transpose().cwiseProduct(rho)).sum());
  }
  std::vector<int> keep;
  for (const auto& label : subsystem) keep.push_back(state.space().slot(label));
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  const Matrix rho = partial_trace(state, keep).density();
  return std::real((rho.transpose().cwiseProduct(rho)).sum());
}

double fidelity(const State& a, const State& b) {
  require_same_space(a.space(), b.space(), "fidelity");
  if (a.is_pure() && b.is_pure()) return std::norm(a.vector().dot(b.vector()));
  if (a.is_pure()) return std::real(a.vector().dot(b.density() * a.vector()));
  if (b.is_pure()) return std::real(b.vector().dot(a.density() * b.vector()));
  return std::real((a.density().transpose().cwiseProduct(b.density())).sum());
}

double truncation_tail(const State& state, std::string_view mode, int k) {
  const Factor& f = mode_factor(state.space(), mode);
  if (k < 0 || k >= f.dim) {
    throw ConfigurationError("truncation_tail: k must lie in [0, cutoff), got " + std::to_string(k));
  }
  const Matrix rho = reduced_density(state, mode);
  double tail = 0.0;
  for (int n = f.dim - k; n < f.dim; ++n) tail += std::real(rho(n, n));
  return tail;
}

}  // namespace cqed
