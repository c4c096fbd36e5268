#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "sslab/linalg/banded.hpp"
#include "sslab/linalg/weighted.hpp"

namespace sslab::linalg {

struct EigenPair {
  cplx value;
  double residual = 0.0;      // ||A x - lambda x||_W / ||x||_W
  std::vector<cplx> vector;   // W-normalized
};

struct EigsOptions {
  std::size_t krylov_dim = 0;  // 0 -> max(2k + 10, 30), capped at the dimension
  int refine_steps = 8;        // inverse-iteration polish per Ritz pair
  std::uint64_t seed = 0;      // 0 -> derived from the shift
  double ritz_tol = 1e-10;     // Arnoldi residual of the inverse, relative to the Ritz value
  int max_restarts = 30;       // explicit restarts from the sum of the wanted Ritz vectors
  double operator_norm = 0.0;  // ||A||_W; 0 -> operator_norm_estimate
};

// The k eigenvalues of the real banded operator A closest to `shift`, each with
// residual ||A x - lambda x||_W <= tol * max(1, ||A||_W) ||x||_W.
// Arnoldi on (A - shift)^{-1} in the W inner product, explicitly restarted
// until the wanted Ritz pairs converge; each is then polished by Rayleigh
// quotient iteration. A polish that lands on an eigenvalue already found, or
// drifts away from its Ritz value, is discarded in favour of the next Ritz pair.
std::vector<EigenPair> shift_invert_eigs(const BandedMatrix<double>& a, const WeightMatrix& w,
                                         cplx shift, std::size_t k, double tol,
                                         const EigsOptions& options = {});

// Residual ||A x - lambda x||_W / ||x||_W.
double eigen_residual(const BandedMatrix<double>& a, const WeightMatrix& w, cplx lambda,
                      std::span<const cplx> x);

}  // namespace sslab::linalg
