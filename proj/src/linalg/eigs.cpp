#include "sslab/linalg/eigs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sslab/linalg/dense.hpp"

namespace sslab::linalg {

namespace {

BandedMatrix<cplx> shifted_copy(const BandedMatrix<double>& a, cplx shift) {
  BandedMatrix<cplx> b = a.cast<cplx>();
  for (std::size_t i = 0; i < b.size(); ++i) b.at(i, i) -= shift;
  return b;
}

cplx rayleigh(const BandedMatrix<double>& a, const WeightMatrix& w, std::span<const cplx> x) {
  const std::vector<cplx> ax = a.multiply<cplx>(x);
  return w.inner(std::span<const cplx>(ax), x) / w.inner(x, x);
}

bool polish(const BandedMatrix<double>& a, const WeightMatrix& w, cplx& lambda,
            std::vector<cplx>& x, double tol, int steps, double& residual) {
  auto target = [&] { return tol; };
  residual = eigen_residual(a, w, lambda, x);
  for (int s = 0; s < steps && !(residual <= target()); ++s) {
    const double scale = std::max(1.0, std::abs(lambda));
    const cplx mu = lambda + cplx(1.0, 1.0) * (1e-11 * scale);
    try {
      const LUFactors<cplx> lu = lu_factor(shifted_copy(a, mu));
      lu.solve_in_place<cplx>(x);
    } catch (const SingularMatrix&) {
      break;
    }
    const double nx = w.norm(std::span<const cplx>(x));
    if (!(nx > 0.0) || !std::isfinite(nx)) return false;
    for (cplx& v : x) v /= nx;
    lambda = rayleigh(a, w, x);
    residual = eigen_residual(a, w, lambda, x);
  }
  return residual <= target();
}

}  // namespace

double eigen_residual(const BandedMatrix<double>& a, const WeightMatrix& w, cplx lambda,
                      std::span<const cplx> x) {
  std::vector<cplx> r = a.multiply<cplx>(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= lambda * x[i];
  const double nx = w.norm(x);
  return w.norm(std::span<const cplx>(r)) / nx;
}

std::vector<EigenPair> shift_invert_eigs(const BandedMatrix<double>& a, const WeightMatrix& w,
                                         cplx shift, std::size_t k, double tol,
                                         const EigsOptions& options) {
  const std::size_t n = a.size();
  if (w.size() != n) throw DimensionMismatch("shift_invert_eigs: weight size");
  if (k == 0) return {};
  if (k > n) throw PreconditionViolation("shift_invert_eigs: k exceeds dimension");

  LUFactors<cplx> inv;
  try {
    inv = lu_factor(shifted_copy(a, shift));
  } catch (const SingularMatrix&) {
    throw NearSingularShift("shift is an eigenvalue to working precision");
  }

  const std::uint64_t seed =
      options.seed != 0 ? options.seed : seed_from(shift.real(), seed_from(shift.imag()));
  std::size_t m = options.krylov_dim != 0 ? options.krylov_dim : std::max<std::size_t>(2 * k + 10, 30);
  m = std::min(m, n);

  // Residuals are judged as normwise backward errors: evaluating A x alone
  // costs about eps ||A|| in rounding.
  const double anorm = options.operator_norm > 0.0 ? options.operator_norm : operator_norm_estimate(a, w);
  const double abs_tol = tol * std::max(1.0, anorm);

  std::vector<cplx> start = random_complex_vector(n, seed);
  std::vector<cplx> wv(n);
  std::vector<EigenPair> accepted;
  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    const double ns = w.norm(std::span<const cplx>(start));
    if (!(ns > 0.0) || !std::isfinite(ns)) throw NoConvergence("shift_invert_eigs: start vector vanished");
    for (cplx& c : start) c /= ns;
    std::vector<std::vector<cplx>> v;
    v.reserve(m + 1);
    v.push_back(start);
    DenseMatrix h(m + 1, m);
    std::size_t dim = m;
    double last_beta = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<cplx> z = v[j];
      inv.solve_in_place<cplx>(z);
      for (int pass = 0; pass < 2; ++pass) {
        w.apply<cplx>(z, wv);
        for (std::size_t i = 0; i <= j; ++i) {
          cplx hij = 0.0;
          for (std::size_t t = 0; t < n; ++t) hij += std::conj(v[i][t]) * wv[t];
          for (std::size_t t = 0; t < n; ++t) z[t] -= hij * v[i][t];
          h(i, j) += hij;
        }
      }
      const double beta = w.norm(std::span<const cplx>(z));
      double colnorm = 0.0;
      for (std::size_t i = 0; i <= j; ++i) colnorm += std::norm(h(i, j));
      h(j + 1, j) = beta;
      if (!(beta > 1e-13 * std::sqrt(colnorm)) || j + 1 == n) {
        dim = j + 1;
        last_beta = 0.0;
        break;
      }
      last_beta = beta;
      if (j + 1 == m) break;
      for (cplx& c : z) c /= beta;
      v.push_back(std::move(z));
    }

    DenseMatrix hm(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) hm(i, j) = h(i, j);
    const SmallEig ritz = eig_small(hm);
    std::vector<std::size_t> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) {
      return std::abs(ritz.values[p]) > std::abs(ritz.values[q]);
    });
    auto ritz_vector = [&](std::size_t idx) {
      std::vector<cplx> x(n, 0.0);
      for (std::size_t j = 0; j < dim; ++j) {
        const cplx s = ritz.vectors[idx][j];
        for (std::size_t t = 0; t < n; ++t) x[t] += s * v[j][t];
      }
      const double nx = w.norm(std::span<const cplx>(x));
      for (cplx& c : x) c /= nx;
      return x;
    };
    // Arnoldi residual of each wanted Ritz pair of the inverse, relative to |theta|.
    const std::size_t want = std::min(k, dim);
    bool converged = true;
    for (std::size_t r = 0; r < want; ++r) {
      const std::size_t idx = order[r];
      const double est = last_beta * std::abs(ritz.vectors[idx][dim - 1]) / std::abs(ritz.values[idx]);
      if (!(est <= options.ritz_tol)) converged = false;
    }
    const bool final_round = restart == options.max_restarts || dim == n || last_beta == 0.0;
    if (!converged && !final_round) {
      std::fill(start.begin(), start.end(), cplx(0.0));
      for (std::size_t r = 0; r < want; ++r) {
        const std::vector<cplx> x = ritz_vector(order[r]);
        for (std::size_t t = 0; t < n; ++t) start[t] += x[t];
      }
      continue;
    }

    accepted.clear();
    for (std::size_t idx : order) {
      if (accepted.size() == k) break;
      const cplx theta = ritz.values[idx];
      if (std::abs(theta) == 0.0) continue;
      const cplx ritz_lambda = shift + 1.0 / theta;
      cplx lambda = ritz_lambda;
      std::vector<cplx> x = ritz_vector(idx);
      double residual = 0.0;
      if (!polish(a, w, lambda, x, abs_tol, options.refine_steps, residual)) continue;
      // a polish that wandered off to another eigenvalue is not trusted
      if (std::abs(lambda - ritz_lambda) > 0.1 * std::abs(ritz_lambda - shift)) continue;
      const bool duplicate = std::any_of(accepted.begin(), accepted.end(), [&](const EigenPair& e) {
        return std::abs(e.value - lambda) < 1e-8 * std::max(1.0, std::abs(lambda));
      });
      if (duplicate) continue;
      accepted.push_back(EigenPair{lambda, residual, std::move(x)});
    }
    if (accepted.size() == k || final_round) break;
  }
  if (accepted.size() < k) {
    throw NoConvergence("shift_invert_eigs: found " + std::to_string(accepted.size()) + " of " +
                        std::to_string(k) + " eigenpairs near shift");
  }
  // Polished pairs may differ from the Ritz ordering; report nearest first.
  std::stable_sort(accepted.begin(), accepted.end(), [&](const EigenPair& p, const EigenPair& q) {
    return std::abs(p.value - shift) < std::abs(q.value - shift);
  });
  return accepted;
}

}  // namespace sslab::linalg
