#include "sslab/linalg/weighted.hpp"

#include <bit>
#include <cmath>
#include <random>

#include "sslab/linalg/dense.hpp"

namespace sslab::linalg {

double WeightMatrix::inner(std::span<const double> x, std::span<const double> y) const {
  std::vector<double> wx(x.size());
  apply<double>(x, wx);
  double s = 0.0;
  for (std::size_t i = 0; i < wx.size(); ++i) s += y[i] * wx[i];
  return s;
}

cplx WeightMatrix::inner(std::span<const cplx> x, std::span<const cplx> y) const {
  std::vector<cplx> wx(x.size());
  apply<cplx>(x, wx);
  cplx s = 0.0;
  for (std::size_t i = 0; i < wx.size(); ++i) s += std::conj(y[i]) * wx[i];
  return s;
}

double WeightMatrix::norm(std::span<const double> x) const { return std::sqrt(std::max(0.0, inner(x, x))); }

double WeightMatrix::norm(std::span<const cplx> x) const {
  return std::sqrt(std::max(0.0, inner(x, x).real()));
}

std::uint64_t seed_from(double value, std::uint64_t salt) {
  std::uint64_t z = std::bit_cast<std::uint64_t>(value) ^ (salt * 0x9E3779B97F4A7C15ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<cplx> random_complex_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (cplx& x : v) {
    const double re = u(rng);
    const double im = u(rng);
    x = cplx(re, im);
  }
  return v;
}

double operator_norm_estimate(const BandedMatrix<double>& a, const WeightMatrix& w, int iterations,
                              std::uint64_t seed) {
  const std::size_t n = a.size();
  if (w.size() != n) throw DimensionMismatch("operator_norm_estimate: weight size");
  if (n == 0) return 0.0;
  std::vector<cplx> x = random_complex_vector(n, seed), ax(n), wax(n);
  double est = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const double nx = w.norm(std::span<const cplx>(x));
    if (!(nx > 0.0)) return est;
    for (cplx& c : x) c /= nx;
    a.multiply<cplx>(x, ax);
    est = std::max(est, w.norm(std::span<const cplx>(ax)));
    w.apply<cplx>(std::span<const cplx>(ax), std::span<cplx>(wax));
    a.multiply_transpose<cplx>(wax, x);
    w.solve_in_place<cplx>(x);
  }
  return est;
}

SingularValueEstimate smallest_singular_value(const LUFactors<cplx>& shifted, const WeightMatrix& w,
                                              double tol, int max_iter, std::uint64_t seed,
                                              std::size_t krylov_dim) {
  const std::size_t n = shifted.size();
  if (w.size() != n) throw DimensionMismatch("smallest_singular_value: weight size");
  if (n == 0) throw PreconditionViolation("smallest_singular_value: empty operator");
  const std::size_t m = std::max<std::size_t>(2, std::min(krylov_dim, n));

  std::vector<cplx> x = random_complex_vector(n, seed);
  std::vector<cplx> wx(n);
  auto normalize = [&](std::vector<cplx>& v) {
    const double nv = w.norm(std::span<const cplx>(v));
    if (!(nv > 0.0) || !std::isfinite(nv)) return false;
    for (cplx& c : v) c /= nv;
    return true;
  };
  auto apply_h = [&](const std::vector<cplx>& v, std::vector<cplx>& out) {
    out = v;
    shifted.solve_in_place<cplx>(out);
    w.apply<cplx>(std::span<const cplx>(out), std::span<cplx>(wx));
    shifted.solve_adjoint_in_place<cplx>(wx);
    w.solve_in_place<cplx>(wx);
    out.swap(wx);
  };
  if (!normalize(x)) throw NoConvergence("smallest_singular_value: zero start vector");

  SingularValueEstimate est;
  std::vector<std::vector<cplx>> basis, wbasis;  // Krylov vectors and W times them
  std::vector<double> alpha, beta;
  auto push_basis = [&](const std::vector<cplx>& v) {
    basis.push_back(v);
    wbasis.emplace_back(n);
    w.apply<cplx>(std::span<const cplx>(v), std::span<cplx>(wbasis.back()));
  };
  auto dot = [](const std::vector<cplx>& a, const std::vector<cplx>& wb) {
    cplx s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) s += std::conj(wb[t]) * a[t];
    return s;
  };
  std::vector<cplx> z;
  int applications = 0;
  double theta = 0.0;
  while (applications < max_iter) {
    basis.clear();
    wbasis.clear();
    push_basis(x);
    alpha.clear();
    beta.clear();
    std::vector<cplx> ritz;
    for (std::size_t j = 0; j < m && applications < max_iter; ++j) {
      apply_h(basis[j], z);
      ++applications;
      const double a = dot(z, wbasis[j]).real();
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t b = 0; b < basis.size(); ++b) {
          const cplx c = dot(z, wbasis[b]);
          for (std::size_t t = 0; t < n; ++t) z[t] -= c * basis[b][t];
        }
      }
      const double bnorm = w.norm(std::span<const cplx>(z));
      // Ritz values of the projected tridiagonal matrix
      const std::size_t k = alpha.size();
      DenseMatrix tri(k, k);
      for (std::size_t i = 0; i < k; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
      }
      const SmallEig e = eig_small(tri);
      std::size_t top = 0;
      for (std::size_t i = 1; i < k; ++i)
        if (e.values[i].real() > e.values[top].real()) top = i;
      theta = e.values[top].real();
      ritz = e.vectors[top];
      const double resid = bnorm * std::abs(ritz[k - 1]);
      if (!std::isfinite(theta) || !(theta > 0.0)) throw NoConvergence("smallest_singular_value: non-finite iterate");
      if (resid <= tol * theta || bnorm <= 1e-14 * theta) {
        est.sigma_min = 1.0 / std::sqrt(theta);
        est.iterations = applications;
        return est;
      }
      beta.push_back(bnorm);
      for (cplx& c : z) c /= bnorm;
      push_basis(z);
    }
    // restart from the current Ritz vector
    std::fill(x.begin(), x.end(), cplx(0.0));
    for (std::size_t j = 0; j < ritz.size(); ++j)
      for (std::size_t t = 0; t < n; ++t) x[t] += ritz[j] * basis[j][t];
    if (!normalize(x)) throw NoConvergence("smallest_singular_value: iterate vanished");
  }
  throw NoConvergence("smallest_singular_value: no convergence in " + std::to_string(max_iter) +
                      " operator applications");
}

}  // namespace sslab::linalg
