#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace lsep::numerics {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

// Dense row-major complex matrix. Sized for the 2x2..8x8 systems that appear
// in the Bloch and aggregate models; nothing here is tuned for large n.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const cplx> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const cplx> entries() const { return data_; }

  CVector column(std::size_t c) const;
  CVector operator*(std::span<const cplx> x) const;
  ComplexMatrix operator*(const ComplexMatrix& other) const;
  ComplexMatrix operator-(const ComplexMatrix& other) const;
  ComplexMatrix adjoint() const;

  // Frobenius norm.
  double norm() const;
  bool finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

double norm2(std::span<const cplx> v);

// Gaussian elimination with partial pivoting. Throws SingularMatrix when a
// pivot falls below `pivot_tol` times the largest entry of A.
CVector solve_linear(const ComplexMatrix& a, std::span<const cplx> b, double pivot_tol = 1e-14);

// Inverse via repeated solves; shares solve_linear's failure mode.
ComplexMatrix inverse(const ComplexMatrix& a);

struct EigenDecomposition {
  CVector values;
  ComplexMatrix vectors;  // unit-norm eigenvectors in columns
};

// Complex Schur decomposition (Householder Hessenberg reduction, then
// Wilkinson-shifted QR) followed by triangular back-substitution for the
// eigenvectors. Throws NotConverged past the iteration cap and
// DefectiveMatrix when the eigenvector basis is numerically rank-deficient.
EigenDecomposition eig(const ComplexMatrix& a);

// Matrix exponential by scaling and squaring of a truncated Taylor series.
ComplexMatrix expm(const ComplexMatrix& a);

}  // namespace lsep::numerics
