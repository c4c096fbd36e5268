#pragma once

// Dense reference computations for the oracle tests, built on Eigen.

#include <Eigen/Dense>
#include <complex>

#include "sslab/linalg/banded.hpp"

namespace oracle {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;

template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> dense(const sslab::linalg::BandedMatrix<T>& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return m;
}

// Smallest singular value of T in the W-norm: sigma_min(L^T T L^{-T}) with W = L L^T.
inline double weighted_sigma_min(const MatC& t, const MatR& w) {
  Eigen::LLT<MatR> llt(w);
  const MatR l = llt.matrixL();
  const MatC lc = l.cast<cplx>();
  const MatC linv = lc.inverse();
  const MatC b = lc.transpose() * t * linv.transpose();
  Eigen::JacobiSVD<MatC> svd(b);
  return svd.singularValues().minCoeff();
}

}  // namespace oracle
