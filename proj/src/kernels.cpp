#include "cqed/kernels.hpp"

#include <algorithm>
#include <map>

#include "cqed/errors.hpp"

namespace cqed::kernels {

CsrMatrix CsrMatrix::from_dense(const Matrix& m) {
  CsrMatrix out;
  out.rows = static_cast<int>(m.rows());
  out.cols = static_cast<int>(m.cols());
  out.row_ptr.assign(out.rows + 1, 0);
  for (int i = 0; i < out.rows; ++i) {
    for (int j = 0; j < out.cols; ++j) {
      if (m(i, j) != Complex{0.0, 0.0}) {
        out.col.push_back(j);
        out.val.push_back(m(i, j));
      }
    }
    out.row_ptr[i + 1] = static_cast<int>(out.col.size());
  }
  return out;
}

Matrix CsrMatrix::to_dense() const {
  Matrix m = Matrix::Zero(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) m(i, col[p]) = val[p];
  }
  return m;
}

void spmv(const CsrMatrix& a, const Complex* x, Complex* y, Complex alpha) {
  const int n = a.rows;
#pragma omp parallel for schedule(static) if (n >= 256)
  for (int i = 0; i < n; ++i) {
    Complex acc{0.0, 0.0};
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) acc += a.val[p] * x[a.col[p]];
    y[i] = alpha * acc;
  }
}

void spmm(const CsrMatrix& a, const Matrix& x, Matrix& y, Complex alpha) {
  const int n = a.rows;
  const int m = static_cast<int>(x.cols());
  y.resize(n, m);
#pragma omp parallel for schedule(static) if (n * m >= 4096)
  for (int j = 0; j < m; ++j) {
    const Complex* xc = x.col(j).data();
    Complex* yc = y.col(j).data();
    for (int i = 0; i < n; ++i) {
      Complex acc{0.0, 0.0};
      for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) acc += a.val[p] * xc[a.col[p]];
      yc[i] = alpha * acc;
    }
  }
}

void sandwich_add(const CsrMatrix& l, const Matrix& x, double scale, Matrix& scratch, Matrix& w) {
  // scratch = L X, then W += scale * scratch L^dagger computed row-wise:
  // (scratch L^dagger)(i, k) = sum_j scratch(i, j) conj(L(k, j)).
  spmm(l, x, scratch);
  const int n = l.rows;
  const int m = static_cast<int>(scratch.rows());
#pragma omp parallel for schedule(static) if (n * m >= 4096)
  for (int k = 0; k < n; ++k) {
    Complex* wc = w.col(k).data();
    for (int p = l.row_ptr[k]; p < l.row_ptr[k + 1]; ++p) {
      const Complex c = scale * std::conj(l.val[p]);
      const Complex* sc = scratch.col(l.col[p]).data();
      for (int i = 0; i < m; ++i) wc[i] += c * sc[i];
    }
  }
}

TermSum::TermSum(std::span<const Matrix> terms) : num_terms_(static_cast<int>(terms.size())) {
  if (terms.empty()) return;
  const int n = static_cast<int>(terms.front().rows());
  for (const auto& t : terms) {
    if (t.rows() != n || t.cols() != n) throw InvalidDimension("TermSum: terms must share one square shape");
  }
  merged_.rows = n;
  merged_.cols = n;
  merged_.row_ptr.assign(n + 1, 0);
  contrib_ptr_.push_back(0);
  std::map<int, std::vector<std::pair<int, Complex>>> row;
  for (int i = 0; i < n; ++i) {
    row.clear();
    for (int k = 0; k < num_terms_; ++k) {
      for (int j = 0; j < n; ++j) {
        const Complex v = terms[k](i, j);
        if (v != Complex{0.0, 0.0}) row[j].emplace_back(k, v);
      }
    }
    for (const auto& [j, contribs] : row) {
      merged_.col.push_back(j);
      merged_.val.emplace_back(0.0, 0.0);
      for (const auto& [k, v] : contribs) {
        contrib_term_.push_back(k);
        contrib_val_.push_back(v);
      }
      contrib_ptr_.push_back(static_cast<int>(contrib_term_.size()));
    }
    merged_.row_ptr[i + 1] = static_cast<int>(merged_.col.size());
  }
}

void TermSum::assemble(std::span<const Complex> coefficients) {
  if (static_cast<int>(coefficients.size()) != num_terms_) {
    throw InvalidDimension("TermSum: coefficient count does not match term count");
  }
  const int nnz = merged_.nnz();
  for (int p = 0; p < nnz; ++p) {
    Complex acc{0.0, 0.0};
    for (int q = contrib_ptr_[p]; q < contrib_ptr_[p + 1]; ++q) acc += coefficients[contrib_term_[q]] * contrib_val_[q];
    merged_.val[p] = acc;
  }
}

CompiledGenerator::CompiledGenerator(int dim, std::vector<Component> components, std::vector<Jump> jumps)
    : dim_(dim), components_(std::move(components)), jumps_(std::move(jumps)) {
  std::vector<Matrix> terms;
  terms.reserve(components_.size() + 1);
  for (const auto& c : components_) {
    if (c.op.rows() != dim_ || c.op.cols() != dim_) throw InvalidDimension("CompiledGenerator: component shape");
    terms.push_back(c.op);
  }
  if (!jumps_.empty()) {
    Matrix decay = Matrix::Zero(dim_, dim_);
    for (const auto& j : jumps_) {
      if (j.op.rows() != dim_ || j.op.cols() != dim_) throw InvalidDimension("CompiledGenerator: jump shape");
      if (j.rate < 0.0) throw ConfigurationError("CompiledGenerator: negative jump rate");
      decay += j.rate * (j.op.adjoint() * j.op);
      jump_csr_.push_back(CsrMatrix::from_dense(j.op));
    }
    terms.push_back(decay);
  }
  sum_ = TermSum(terms);
  coef_.assign(terms.size(), Complex{0.0, 0.0});
  if (!jumps_.empty()) coef_.back() = Complex{-0.5, 0.0};
}

void CompiledGenerator::assemble(double t) {
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    coef_[k] = -kI * c.amplitude * std::polar(1.0, c.frequency * t);
  }
  sum_.assemble(coef_);
}

void CompiledGenerator::schrodinger_rhs(double t, const Vector& psi, Vector& dpsi) {
  dpsi.resize(dim_);
  if (components_.empty()) {
    dpsi.setZero();
    return;
  }
  assemble(t);
  spmv(sum_.matrix(), psi.data(), dpsi.data());
}

void CompiledGenerator::lindblad_rhs(double t, const Matrix& rho, Matrix& drho) {
  if (sum_.num_terms() == 0) {
    drho = Matrix::Zero(dim_, dim_);
    return;
  }
  assemble(t);
  spmm(sum_.matrix(), rho, g_);
  for (std::size_t j = 0; j < jumps_.size(); ++j) {
    sandwich_add(jump_csr_[j], rho, 0.5 * jumps_[j].rate, scratch_, g_);
  }
  drho.resize(dim_, dim_);
  const int n = dim_;
#pragma omp parallel for schedule(static) if (n >= 64)
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) drho(i, j) = g_(i, j) + std::conj(g_(j, i));
  }
}

namespace reference {

Matrix hamiltonian(std::span<const CompiledGenerator::Component> components, int dim, double t) {
  Matrix h = Matrix::Zero(dim, dim);
  for (const auto& c : components) h += (c.amplitude * std::polar(1.0, c.frequency * t)) * c.op;
  return h;
}

void schrodinger_rhs(const Matrix& h, const Vector& psi, Vector& dpsi) { dpsi.noalias() = -kI * (h * psi); }

void lindblad_rhs(const Matrix& h, std::span<const CompiledGenerator::Jump> jumps, const Matrix& rho, Matrix& drho) {
  drho.noalias() = -kI * (h * rho - rho * h);
  for (const auto& j : jumps) {
    const Matrix ldl = j.op.adjoint() * j.op;
    drho.noalias() += j.rate * (j.op * rho * j.op.adjoint());
    drho.noalias() -= (0.5 * j.rate) * (ldl * rho + rho * ldl);
  }
}

}  // namespace reference

}  // namespace cqed::kernels
