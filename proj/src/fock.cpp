#include "cqed/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace cqed {

std::string format_margins(const std::vector<Margin>& margins) {
  std::ostringstream os;
  for (const auto& m : margins) {
    os << "  [" << (m.passed ? "ok" : "FAIL") << "] " << m.label << ": ratio " << m.ratio
       << " (required " << m.required << ")\n";
  }
  return os.str();
}

HilbertSpace::HilbertSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw InvalidDimension("Hilbert space needs at least one factor");
  total_dim_ = 1;
  for (const auto& f : factors_) {
    if (f.kind == FactorKind::Atom && f.dim != 2)
      throw InvalidDimension("atom factor '" + f.label + "' must have dimension 2");
    if (f.kind == FactorKind::Mode && f.dim < 2)
      throw InvalidDimension("mode factor '" + f.label + "' needs cutoff >= 2, got " +
                             std::to_string(f.dim));
    total_dim_ *= f.dim;
  }
}

const Factor& HilbertSpace::factor(int slot) const {
  if (slot < 0 || slot >= num_factors())
    throw SpaceMismatch("factor slot " + std::to_string(slot) + " out of range for " + describe());
  return factors_[static_cast<std::size_t>(slot)];
}

std::optional<int> HilbertSpace::find(std::string_view label) const {
  for (int i = 0; i < num_factors(); ++i)
    if (factors_[static_cast<std::size_t>(i)].label == label) return i;
  return std::nullopt;
}

int HilbertSpace::slot(std::string_view label) const {
  if (auto s = find(label)) return *s;
  throw SpaceMismatch("no factor '" + std::string(label) + "' in " + describe());
}

std::optional<int> HilbertSpace::atom_slot() const {
  for (int i = 0; i < num_factors(); ++i)
    if (factors_[static_cast<std::size_t>(i)].kind == FactorKind::Atom) return i;
  return std::nullopt;
}

std::string HilbertSpace::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) os << " x ";
    os << factors_[i].label << "(" << factors_[i].dim << ")";
  }
  return os.str();
}

void require_same_space(const HilbertSpace& a, const HilbertSpace& b, std::string_view context) {
  if (!(a == b))
    throw SpaceMismatch(std::string(context) + ": " + a.describe() + " vs " + b.describe());
}

Operator::Operator(HilbertSpace space, Matrix matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.total_dim() || matrix_.cols() != space_.total_dim())
    throw InvalidDimension("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                           std::to_string(matrix_.cols()) + " but space " + space_.describe() +
                           " has dimension " + std::to_string(space_.total_dim()));
}

Operator Operator::zero(const HilbertSpace& space) {
  return {space, Matrix::Zero(space.total_dim(), space.total_dim())};
}

Operator Operator::identity(const HilbertSpace& space) {
  return {space, Matrix::Identity(space.total_dim(), space.total_dim())};
}

bool Operator::is_hermitian(double tol) const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator& Operator::operator+=(const Operator& rhs) {
  require_same_space(space_, rhs.space_, "operator addition");
  matrix_ += rhs.matrix_;
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  require_same_space(space_, rhs.space_, "operator subtraction");
  matrix_ -= rhs.matrix_;
  return *this;
}

Operator& Operator::operator*=(Complex s) {
  matrix_ *= s;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  require_same_space(lhs.space_, rhs.space_, "operator product");
  return {lhs.space_, lhs.matrix_ * rhs.matrix_};
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator annihilation(int dim) {
  if (dim < 2) throw InvalidDimension("annihilation operator needs dim >= 2, got " + std::to_string(dim));
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return {HilbertSpace({Factor::mode(dim, "mode")}), std::move(m)};
}

Operator creation(int dim) { return annihilation(dim).dagger(); }

Operator number(int dim) {
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) m(n, n) = static_cast<double>(n);
  return {HilbertSpace({Factor::mode(dim, "mode")}), std::move(m)};
}

Eigen::Vector2cd atom_ket(Level level) {
  Eigen::Vector2cd v = Eigen::Vector2cd::Zero();
  v(static_cast<int>(level)) = 1.0;
  return v;
}

Operator atomic_outer(const Eigen::Vector2cd& x, const Eigen::Vector2cd& y) {
  return {HilbertSpace({Factor::atom()}), x * y.adjoint()};
}

Operator atomic_projector(Level from, Level to) { return atomic_outer(atom_ket(to), atom_ket(from)); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Operator embed(const Operator& op, int slot, const HilbertSpace& space) {
  const Factor& target = space.factor(slot);
  if (op.dim() != target.dim)
    throw SpaceMismatch("cannot embed a " + std::to_string(op.dim()) + "-dimensional operator into factor '" +
                        target.label + "' of dimension " + std::to_string(target.dim));
  int left = 1;
  int right = 1;
  for (int i = 0; i < slot; ++i) left *= space.factor(i).dim;
  for (int i = slot + 1; i < space.num_factors(); ++i) right *= space.factor(i).dim;
  Matrix m = kron(kron(Matrix::Identity(left, left), op.matrix()), Matrix::Identity(right, right));
  return {space, std::move(m)};
}

Operator embed(const Operator& op, std::string_view label, const HilbertSpace& space) {
  return embed(op, space.slot(label), space);
}

State State::pure(HilbertSpace space, Vector amplitudes) {
  if (amplitudes.size() != space.total_dim())
    throw InvalidDimension("state vector length " + std::to_string(amplitudes.size()) +
                           " does not match space " + space.describe());
  State s;
  s.space_ = std::move(space);
  s.data_ = std::move(amplitudes);
  return s;
}

State State::mixed(HilbertSpace space, Matrix rho) {
  if (rho.rows() != space.total_dim() || rho.cols() != space.total_dim())
    throw InvalidDimension("density matrix does not match space " + space.describe());
  State s;
  s.space_ = std::move(space);
  s.data_ = std::move(rho);
  return s;
}

const Vector& State::vector() const {
  if (!is_pure()) throw SpaceMismatch("state is mixed; no state vector available");
  return std::get<Vector>(data_);
}

const Matrix& State::density() const {
  if (is_pure()) throw SpaceMismatch("state is pure; use density_matrix()");
  return std::get<Matrix>(data_);
}

Matrix State::density_matrix() const {
  if (is_pure()) {
    const auto& v = std::get<Vector>(data_);
    return v * v.adjoint();
  }
  return std::get<Matrix>(data_);
}

double State::norm_error() const {
  if (is_pure()) return std::abs(std::get<Vector>(data_).squaredNorm() - 1.0);
  return std::abs(std::get<Matrix>(data_).trace() - 1.0);
}

double State::hermiticity_error() const {
  if (is_pure()) return 0.0;
  const auto& rho = std::get<Matrix>(data_);
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double State::min_eigenvalue() const {
  if (is_pure()) return 0.0;
  const auto& rho = std::get<Matrix>(data_);
  Matrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void State::validate(double norm_tol, double hermiticity_tol, double positivity_tol) const {
  if (double e = norm_error(); e > norm_tol)
    throw NumericalFailure("state normalization off by " + std::to_string(e));
  if (!is_pure()) {
    if (double h = hermiticity_error(); h > hermiticity_tol)
      throw NumericalFailure("density matrix non-Hermitian by " + std::to_string(h));
    if (double l = min_eigenvalue(); l < -positivity_tol)
      throw NumericalFailure("density matrix eigenvalue " + std::to_string(l) + " below zero");
  }
}

Vector fock_ket(int dim, int n) {
  if (n < 0 || n >= dim)
    throw InvalidDimension("Fock level " + std::to_string(n) + " outside cutoff " + std::to_string(dim));
  Vector v = Vector::Zero(dim);
  v(n) = 1.0;
  return v;
}

Vector coherent_ket(int dim, Complex alpha) {
  Vector v(dim);
  // c_n = e^{-|a|^2/2} a^n / sqrt(n!), built recursively.
  Complex c = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < dim; ++n) {
    v(n) = c;
    c *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return v;
}

State product_state(const HilbertSpace& space, std::span<const Vector> kets) {
  if (static_cast<int>(kets.size()) != space.num_factors())
    throw SpaceMismatch("product state needs one ket per factor of " + space.describe());
  Matrix acc = Matrix::Ones(1, 1);
  for (int i = 0; i < space.num_factors(); ++i) {
    const auto& k = kets[static_cast<std::size_t>(i)];
    if (k.size() != space.factor(i).dim)
      throw SpaceMismatch("ket for factor '" + space.factor(i).label + "' has wrong length");
    acc = kron(acc, Matrix(k));
  }
  return State::pure(space, acc.col(0));
}

Complex expectation(const State& state, const Operator& op) {
  require_same_space(state.space(), op.space(), "expectation");
  if (state.is_pure()) {
    const auto& v = state.vector();
    return v.dot(op.matrix() * v);
  }
  // Tr(rho A) without forming the product.
  return (state.density().transpose().cwiseProduct(op.matrix())).sum();
}

State partial_trace(const State& state, std::span<const int> keep) {
  const HilbertSpace& space = state.space();
  if (keep.empty()) throw SpaceMismatch("partial_trace: keep list is empty");
  std::vector<int> kept(keep.begin(), keep.end());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] < 0 || kept[i] >= space.num_factors())
      throw SpaceMismatch("partial_trace: invalid factor index " + std::to_string(kept[i]));
    if (i > 0 && kept[i] <= kept[i - 1])
      throw SpaceMismatch("partial_trace: keep indices must be strictly increasing");
  }
  std::vector<Factor> kept_factors;
  std::vector<int> traced;
  for (int s = 0; s < space.num_factors(); ++s) {
    if (std::find(kept.begin(), kept.end(), s) != kept.end())
      kept_factors.push_back(space.factor(s));
    else
      traced.push_back(s);
  }
  HilbertSpace reduced(kept_factors);
  const int nf = space.num_factors();

  // Strides of each factor in the full index.
  std::vector<int> stride(static_cast<std::size_t>(nf));
  int acc = 1;
  for (int s = nf - 1; s >= 0; --s) {
    stride[static_cast<std::size_t>(s)] = acc;
    acc *= space.factor(s).dim;
  }
  auto offsets = [&](const std::vector<int>& slots) {
    int count = 1;
    for (int s : slots) count *= space.factor(s).dim;
    std::vector<int> off(static_cast<std::size_t>(count), 0);
    for (int idx = 0; idx < count; ++idx) {
      int rem = idx;
      int o = 0;
      for (auto it = slots.rbegin(); it != slots.rend(); ++it) {
        int d = space.factor(*it).dim;
        o += (rem % d) * stride[static_cast<std::size_t>(*it)];
        rem /= d;
      }
      off[static_cast<std::size_t>(idx)] = o;
    }
    return off;
  };
  const auto keep_off = offsets(kept);
  const auto trace_off = offsets(traced);
  const int dk = reduced.total_dim();

  Matrix out = Matrix::Zero(dk, dk);
  if (state.is_pure()) {
    const auto& v = state.vector();
    for (int i = 0; i < dk; ++i)
      for (int j = 0; j < dk; ++j) {
        Complex s = 0.0;
        for (int t : trace_off)
          s += v(keep_off[static_cast<std::size_t>(i)] + t) *
               std::conj(v(keep_off[static_cast<std::size_t>(j)] + t));
        out(i, j) = s;
      }
  } else {
    const auto& rho = state.density();
    for (int i = 0; i < dk; ++i)
      for (int j = 0; j < dk; ++j) {
        Complex s = 0.0;
        for (int t : trace_off)
          s += rho(keep_off[static_cast<std::size_t>(i)] + t, keep_off[static_cast<std::size_t>(j)] + t);
        out(i, j) = s;
      }
  }
  return State::mixed(std::move(reduced), std::move(out));
}

}  // namespace cqed
