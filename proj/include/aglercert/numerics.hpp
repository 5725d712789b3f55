#pragma once
// Self-contained dense complex linear algebra and scalar root finding:
// Hermitian matrices, a Jacobi eigensolver (serial reference + parallel
// round-robin kernel), PSD projection/factorization, exact binomial
// coefficients, and an Aberth-Ehrlich polynomial root finder.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace agler {

using cplx = std::complex<double>;

// Exact binomial coefficient; valid for all n where the result fits in
// 64 bits (far beyond the d <= 14 used here). Throws on invalid input.
std::int64_t binomial(int n, int k);

class NumericsError : public std::runtime_error {
 public:
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

class NotPsdError : public NumericsError {
 public:
  NotPsdError(double min_eigenvalue, const std::string& what)
      : NumericsError(what), min_eigenvalue(min_eigenvalue) {}
  double min_eigenvalue;
};

// General dense complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

  static ComplexMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  cplx& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  const cplx& operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  cplx* row(int r) { return a_.data() + static_cast<std::size_t>(r) * cols_; }
  const cplx* row(int r) const { return a_.data() + static_cast<std::size_t>(r) * cols_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix operator*(const ComplexMatrix& rhs) const;
  double frobenius_norm() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cplx> a_;
};

// Dense Hermitian matrix, row-major. set() writes both (j,k) and its
// conjugate mirror so stored data is Hermitian by construction.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}

  static HermitianMatrix identity(int n);

  int size() const { return n_; }
  const cplx& operator()(int j, int k) const { return a_[static_cast<std::size_t>(j) * n_ + k]; }
  void set(int j, int k, cplx v);
  cplx* row(int j) { return a_.data() + static_cast<std::size_t>(j) * n_; }
  const cplx* row(int j) const { return a_.data() + static_cast<std::size_t>(j) * n_; }

  double frobenius_norm() const;
  double off_diagonal_norm() const;
  bool is_hermitian(double tol) const;
  ComplexMatrix to_complex() const;

 private:
  int n_ = 0;
  std::vector<cplx> a_;
};

struct EigenResult {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column k is the eigenvector for values[k]; empty when skipped
};

struct EigenOptions {
  int max_sweeps = 100;
  double tol = 1e-13;          // relative off-diagonal Frobenius threshold
  bool want_vectors = true;
  bool parallel = true;        // round-robin kernel (OpenMP when available)
};

// Jacobi eigensolver. The default path uses a round-robin tournament
// ordering whose rounds consist of disjoint rotations and parallelize
// cleanly; hermitian_eigen_serial is the classic row-cyclic reference.
EigenResult hermitian_eigen(const HermitianMatrix& m, const EigenOptions& opts = {});
EigenResult hermitian_eigen_serial(const HermitianMatrix& m, const EigenOptions& opts = {});

struct PsdFactor {
  ComplexMatrix y;      // r x n with y^* y = clipped input
  int rank = 0;
  double min_eigenvalue = 0.0;
};

// Eigenvalue-based PSD factorization: eigenvalues below -tol*max(1,||m||_2)
// raise NotPsdError, eigenvalues within the band are clipped to zero.
PsdFactor psd_factor(const HermitianMatrix& m, double tol);

// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
HermitianMatrix psd_project(const HermitianMatrix& m);

// All roots (with multiplicity) of sum_j coeffs[j] z^j by Aberth-Ehrlich
// simultaneous iteration. Trailing zero coefficients are trimmed first;
// degree 0 after trimming is an error.
std::vector<cplx> poly_roots(const std::vector<cplx>& coeffs);

}  // namespace agler
