#pragma once

// Truncated Fock-space and two-level operator algebra.
//
// Composite spaces are ordered tensor products of factors. Basis index of a
// product state |i0, i1, ..., ik> is ((i0 * d1 + i1) * d2 + ...) * dk + ik,
// i.e. factor 0 is the most significant digit (factor 0 (x) factor 1 (x) ...).
// Scenario spaces always use the order: mode a, mode b (if present), atom.
// Atom basis: index 0 = |g>, index 1 = |e>.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cqed/errors.hpp"

namespace cqed {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

enum class FactorKind { Mode, Atom };

struct Factor {
  FactorKind kind = FactorKind::Mode;
  int dim = 2;
  std::string label;

  static Factor mode(int cutoff, std::string label = "a") {
    return {FactorKind::Mode, cutoff, std::move(label)};
  }
  static Factor atom(std::string label = "atom") { return {FactorKind::Atom, 2, std::move(label)}; }

  bool operator==(const Factor&) const = default;
};

class HilbertSpace {
 public:
  HilbertSpace() = default;
  explicit HilbertSpace(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  const Factor& factor(int slot) const;
  int num_factors() const { return static_cast<int>(factors_.size()); }
  int total_dim() const { return total_dim_; }

  std::optional<int> find(std::string_view label) const;
  /// Slot of the factor with the given label; throws SpaceMismatch if absent.
  int slot(std::string_view label) const;
  /// Slot of the (single) atom factor, if any.
  std::optional<int> atom_slot() const;

  std::string describe() const;

  bool operator==(const HilbertSpace& other) const { return factors_ == other.factors_; }

 private:
  std::vector<Factor> factors_;
  int total_dim_ = 0;
};

class Operator {
 public:
  Operator() = default;
  Operator(HilbertSpace space, Matrix matrix);

  static Operator zero(const HilbertSpace& space);
  static Operator identity(const HilbertSpace& space);

  const HilbertSpace& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  Complex operator()(int row, int col) const { return matrix_(row, col); }

  Operator dagger() const { return {space_, matrix_.adjoint()}; }
  bool is_hermitian(double tol = 1e-12) const;

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  Operator& operator*=(Complex s);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Complex s, Operator op) { return op *= s; }
  friend Operator operator*(Operator op, Complex s) { return op *= s; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);

 private:
  HilbertSpace space_;
  Matrix matrix_;
};

Operator commutator(const Operator& a, const Operator& b);
void require_same_space(const HilbertSpace& a, const HilbertSpace& b, std::string_view context);

/// Truncated bosonic annihilation operator on a single mode of `dim` levels.
Operator annihilation(int dim);
Operator creation(int dim);
Operator number(int dim);

enum class Level { g = 0, e = 1 };

/// |to><from| on a single two-level factor.
Operator atomic_projector(Level from, Level to);
/// Notation helper: sigma(e, g) is sigma_eg = |e><g|.
inline Operator sigma(Level to, Level from) { return atomic_projector(from, to); }
/// |x><y| for arbitrary atomic kets (used for dressed bases).
Operator atomic_outer(const Eigen::Vector2cd& x, const Eigen::Vector2cd& y);

Matrix kron(const Matrix& a, const Matrix& b);

/// Places a single-factor operator at `slot`, identity on every other factor.
Operator embed(const Operator& op, int slot, const HilbertSpace& space);
Operator embed(const Operator& op, std::string_view label, const HilbertSpace& space);

class State {
 public:
  State() = default;
  static State pure(HilbertSpace space, Vector amplitudes);
  static State mixed(HilbertSpace space, Matrix rho);

  const HilbertSpace& space() const { return space_; }
  bool is_pure() const { return std::holds_alternative<Vector>(data_); }
  const Vector& vector() const;
  const Matrix& density() const;
  /// Density matrix, forming |psi><psi| for pure states.
  Matrix density_matrix() const;
  State to_mixed() const { return mixed(space_, density_matrix()); }

  /// |<psi|psi> - 1| for pure, |Tr rho - 1| for mixed.
  double norm_error() const;
  /// max |rho - rho^dagger| (zero for pure states).
  double hermiticity_error() const;
  /// Smallest eigenvalue of the (Hermitian part of the) density matrix.
  double min_eigenvalue() const;

  /// Throws NumericalFailure if the state violates the given bounds.
  void validate(double norm_tol = 1e-6, double hermiticity_tol = 1e-8,
                double positivity_tol = 1e-6) const;

 private:
  HilbertSpace space_;
  std::variant<Vector, Matrix> data_;
};

/// Single-factor kets.
Vector fock_ket(int dim, int n);
/// Explicit Fock series of |alpha> truncated at `dim` levels (not renormalized).
Vector coherent_ket(int dim, Complex alpha);
Eigen::Vector2cd atom_ket(Level level);

/// Pure product state; `kets` ordered like the factors of `space`.
State product_state(const HilbertSpace& space, std::span<const Vector> kets);

Complex expectation(const State& state, const Operator& op);

/// Reduced state on the factors listed in `keep` (in their original order).
State partial_trace(const State& state, std::span<const int> keep);

}  // namespace cqed
