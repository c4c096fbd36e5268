#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "sslab/linalg/banded.hpp"

namespace sslab::linalg {

// A symmetric positive definite banded weight W defining the inner product
// <x, y>_W = y^H W x. Factored once so that W^{-1} is available for adjoints.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(BandedMatrix<double> w) : w_(std::move(w)), lu_(lu_factor(w_)) {}

  static WeightMatrix identity(std::size_t n) {
    BandedMatrix<double> w(n, 0, 0);
    for (std::size_t i = 0; i < n; ++i) w.at(i, i) = 1.0;
    return WeightMatrix(std::move(w));
  }

  std::size_t size() const { return w_.size(); }
  const BandedMatrix<double>& matrix() const { return w_; }

  template <class U>
  void apply(std::span<const U> x, std::span<U> y) const {
    w_.multiply<U>(x, y);
  }
  template <class U>
  void solve_in_place(std::span<U> x) const {
    lu_.solve_in_place<U>(x);
  }

  double inner(std::span<const double> x, std::span<const double> y) const;
  cplx inner(std::span<const cplx> x, std::span<const cplx> y) const;  // y^H W x
  double norm(std::span<const double> x) const;
  double norm(std::span<const cplx> x) const;

 private:
  BandedMatrix<double> w_;
  LUFactors<double> lu_;
};

// Deterministic start vectors: every iterative routine seeds from problem
// data so results never depend on call order or thread scheduling.
std::uint64_t seed_from(double value, std::uint64_t salt = 0);
std::vector<cplx> random_complex_vector(std::size_t n, std::uint64_t seed);

// Estimate of ||A||_W from `iterations` steps of power iteration on A^* A,
// where A^* = W^{-1} A^T W is the W-adjoint. A lower bound that is typically
// within a few percent.
double operator_norm_estimate(const BandedMatrix<double>& a, const WeightMatrix& w, int iterations = 30,
                              std::uint64_t seed = 7);

struct SingularValueEstimate {
  double sigma_min = 0.0;
  int iterations = 0;
};

// Smallest singular value of the factored operator T in the W-norm,
// sigma_min = 1 / ||T^{-1}||_W. The largest eigenvalue of the W-self-adjoint
// operator H = W^{-1} T^{-H} W T^{-1} is found by Lanczos iteration with full
// reorthogonalization (a Krylov-accelerated inverse power iteration), restarted
// from the current Ritz vector every `krylov_dim` steps. Converged when the
// Ritz residual is below `tol` times the Ritz value; `max_iter` caps the
// number of applications of H.
SingularValueEstimate smallest_singular_value(const LUFactors<cplx>& shifted, const WeightMatrix& w,
                                              double tol = 1e-8, int max_iter = 500,
                                              std::uint64_t seed = 1, std::size_t krylov_dim = 40);

}  // namespace sslab::linalg
