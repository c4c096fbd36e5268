#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace sslab::linalg {

using cplx = std::complex<double>;

// Small row-major complex matrix for projected (Rayleigh-Ritz) problems and
// the 8x8 mode system. Not meant for anything larger than a few hundred rows.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> a_;
};

struct SmallEig {
  std::vector<cplx> values;
  std::vector<std::vector<cplx>> vectors;  // unit 2-norm, one per value
};

// Eigen-decomposition of a general complex square matrix by Householder
// reduction to Hessenberg form followed by shifted complex QR.
SmallEig eig_small(DenseMatrix a);

// Solves a x = b by Gaussian elimination with partial pivoting; returns
// false on an exactly zero pivot.
bool dense_solve(DenseMatrix a, std::vector<cplx>& b);

// 1-norm condition number, inverse formed column by column.
double condition_number_1(const DenseMatrix& a);

}  // namespace sslab::linalg
