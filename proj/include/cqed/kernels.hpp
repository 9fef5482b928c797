#pragma once

// Right-hand-side kernels for Schrodinger and Lindblad propagation.
//
// Two implementations are kept side by side:
//   * compiled: each harmonic component is stored once in compressed-row form
//     on the union sparsity pattern of all components; per evaluation the
//     time-dependent coefficients are folded into one matrix and applied with
//     OpenMP-parallel sparse x dense products.
//   * reference: dense evaluation of H(t) followed by plain Eigen products,
//     serial. Used as the oracle in tests and as the benchmark baseline.
// Every output entry is produced by exactly one thread in a fixed summation
// order, so results do not depend on the thread count.

#include <span>
#include <vector>

#include "cqed/fock.hpp"

namespace cqed::kernels {

struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<Complex> val;

  static CsrMatrix from_dense(const Matrix& m);
  int nnz() const { return static_cast<int>(val.size()); }
  Matrix to_dense() const;
};

/// y = alpha * A x
void spmv(const CsrMatrix& a, const Complex* x, Complex* y, Complex alpha = 1.0);
/// Y = alpha * A X   (X, Y column-major, square)
void spmm(const CsrMatrix& a, const Matrix& x, Matrix& y, Complex alpha = 1.0);
/// W += scale * L X L^dagger, using `scratch` for L X.
void sandwich_add(const CsrMatrix& l, const Matrix& x, double scale, Matrix& scratch, Matrix& w);

/// Linear combination sum_k c_k M_k of fixed matrices on their union pattern.
class TermSum {
 public:
  TermSum() = default;
  explicit TermSum(std::span<const Matrix> terms);

  /// Overwrites matrix() values with sum_k coefficients[k] * M_k.
  void assemble(std::span<const Complex> coefficients);
  const CsrMatrix& matrix() const { return merged_; }
  int num_terms() const { return num_terms_; }

 private:
  CsrMatrix merged_;
  std::vector<int> contrib_ptr_;
  std::vector<int> contrib_term_;
  std::vector<Complex> contrib_val_;
  int num_terms_ = 0;
};

/// Generator of one Hamiltonian segment, prepared for fast RHS evaluation:
/// K(t) = -i sum_k c_k e^{i w_k t} M_k  -  1/2 sum_j Gamma_j L_j^dagger L_j.
class CompiledGenerator {
 public:
  struct Component {
    Matrix op;
    Complex amplitude;
    double frequency;
  };
  struct Jump {
    Matrix op;
    double rate;
  };

  CompiledGenerator(int dim, std::vector<Component> components, std::vector<Jump> jumps = {});

  int dim() const { return dim_; }
  bool empty() const { return components_.empty() && jumps_.empty(); }

  /// dpsi = -i H(t) psi
  void schrodinger_rhs(double t, const Vector& psi, Vector& dpsi);
  /// drho = G + G^dagger with G = K(t) rho + 1/2 sum_j Gamma_j L_j rho L_j^dagger
  void lindblad_rhs(double t, const Matrix& rho, Matrix& drho);

 private:
  void assemble(double t);

  int dim_;
  std::vector<Component> components_;
  std::vector<Jump> jumps_;
  std::vector<CsrMatrix> jump_csr_;
  TermSum sum_;
  std::vector<Complex> coef_;
  Matrix g_;
  Matrix scratch_;
};

namespace reference {

/// Dense H(t) from harmonic components (closure already expanded).
Matrix hamiltonian(std::span<const CompiledGenerator::Component> components, int dim, double t);
void schrodinger_rhs(const Matrix& h, const Vector& psi, Vector& dpsi);
void lindblad_rhs(const Matrix& h, std::span<const CompiledGenerator::Jump> jumps, const Matrix& rho, Matrix& drho);

}  // namespace reference

}  // namespace cqed::kernels
