#include "sslab/linalg/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sslab/errors.hpp"

namespace sslab::linalg {

namespace {

void hessenberg_reduce(DenseMatrix& a, DenseMatrix& z) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(a(i, k));
    xnorm = std::sqrt(xnorm);
    if (xnorm == 0.0) continue;
    const cplx x0 = a(k + 1, k);
    const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx(1.0);
    const cplx alpha = -phase * xnorm;
    std::vector<cplx> v(n, 0.0);
    for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
    v[k + 1] -= alpha;
    double vnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm += std::norm(v[i]);
    vnorm = std::sqrt(vnorm);
    if (vnorm == 0.0) continue;
    for (std::size_t i = k + 1; i < n; ++i) v[i] /= vnorm;
    // a <- (I - 2 v v^H) a
    for (std::size_t j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * a(i, j);
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= 2.0 * v[i] * s;
    }
    // a <- a (I - 2 v v^H), z <- z (I - 2 v v^H)
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = 0.0, t = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) {
        s += a(i, j) * v[j];
        t += z(i, j) * v[j];
      }
      for (std::size_t j = k + 1; j < n; ++j) {
        a(i, j) -= 2.0 * s * std::conj(v[j]);
        z(i, j) -= 2.0 * t * std::conj(v[j]);
      }
    }
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Schur form by single-shift complex QR on a Hessenberg matrix; z accumulates
// the unitary similarity.
void schur_qr(DenseMatrix& h, DenseMatrix& z) {
  const std::size_t n = h.rows();
  if (n < 2) return;
  const double eps = std::numeric_limits<double>::epsilon();
  std::size_t hi = n - 1;
  int iter = 0;
  int total = 0;
  const int max_total = 100 * static_cast<int>(n);
  while (hi > 0) {
    std::size_t lo = hi;
    while (lo > 0) {
      const double scale = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
      if (std::abs(h(lo, lo - 1)) <= eps * (scale > 0.0 ? scale : 1.0)) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      --hi;
      iter = 0;
      continue;
    }
    if (++total > max_total) throw NoConvergence("small eigenproblem QR did not converge");
    ++iter;
    cplx mu;
    if (iter % 11 == 0) {
      mu = h(hi, hi) + std::abs(h(hi, hi - 1)) * cplx(0.75, 0.5);
    } else {
      const cplx a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
      const cplx half = 0.5 * (a - d);
      const cplx disc = std::sqrt(half * half + b * c);
      const cplx m1 = 0.5 * (a + d) + disc;
      const cplx m2 = 0.5 * (a + d) - disc;
      mu = std::abs(m1 - d) < std::abs(m2 - d) ? m1 : m2;
    }
    for (std::size_t k = lo; k < hi; ++k) {
      cplx x, y;
      if (k == lo) {
        x = h(lo, lo) - mu;
        y = h(lo + 1, lo);
      } else {
        x = h(k, k - 1);
        y = h(k + 1, k - 1);
      }
      const double r = std::hypot(std::abs(x), std::abs(y));
      if (r == 0.0) continue;
      double c;
      cplx s;
      if (std::abs(x) == 0.0) {
        c = 0.0;
        s = std::conj(y) / r;
      } else {
        c = std::abs(x) / r;
        s = (x / std::abs(x)) * std::conj(y) / r;
      }
      const std::size_t j0 = k == lo ? lo : k - 1;
      for (std::size_t j = j0; j < n; ++j) {
        const cplx hk = h(k, j), hk1 = h(k + 1, j);
        h(k, j) = c * hk + s * hk1;
        h(k + 1, j) = -std::conj(s) * hk + c * hk1;
      }
      if (k != lo) h(k + 1, k - 1) = 0.0;
      const std::size_t i1 = std::min(hi, k + 2);
      for (std::size_t i = 0; i <= i1; ++i) {
        const cplx hk = h(i, k), hk1 = h(i, k + 1);
        h(i, k) = hk * c + hk1 * std::conj(s);
        h(i, k + 1) = -hk * s + hk1 * c;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const cplx zk = z(i, k), zk1 = z(i, k + 1);
        z(i, k) = zk * c + zk1 * std::conj(s);
        z(i, k + 1) = -zk * s + zk1 * c;
      }
    }
  }
}

}  // namespace

SmallEig eig_small(DenseMatrix a) {
  const std::size_t n = a.rows();
  DenseMatrix z(n, n);
  for (std::size_t i = 0; i < n; ++i) z(i, i) = 1.0;
  hessenberg_reduce(a, z);
  schur_qr(a, z);

  double tnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) tnorm = std::max(tnorm, std::abs(a(i, j)));
  const double small = std::numeric_limits<double>::epsilon() * (tnorm > 0.0 ? tnorm : 1.0);

  SmallEig out;
  out.values.resize(n);
  out.vectors.assign(n, std::vector<cplx>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const cplx lambda = a(k, k);
    out.values[k] = lambda;
    std::vector<cplx> y(n, 0.0);
    y[k] = 1.0;
    for (std::size_t jj = k; jj-- > 0;) {
      cplx s = 0.0;
      for (std::size_t l = jj + 1; l <= k; ++l) s += a(jj, l) * y[l];
      cplx denom = a(jj, jj) - lambda;
      if (std::abs(denom) < small) denom = small;
      y[jj] = -s / denom;
    }
    std::vector<cplx>& x = out.vectors[k];
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = 0.0;
      for (std::size_t l = 0; l <= k; ++l) s += z(i, l) * y[l];
      x[i] = s;
      nrm += std::norm(s);
    }
    nrm = std::sqrt(nrm);
    for (cplx& v : x) v /= nrm;
  }
  return out;
}

bool dense_solve(DenseMatrix a, std::vector<cplx>& b) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    if (std::abs(a(p, k)) == 0.0) return false;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx m = a(i, k) / a(k, k);
      if (m == cplx(0.0)) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= m * a(k, j);
      b[i] -= m * b[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    cplx s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * b[j];
    b[k] = s / a(k, k);
  }
  return true;
}

double condition_number_1(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  double anorm = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(a(i, j));
    anorm = std::max(anorm, s);
  }
  double inorm = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<cplx> e(n, 0.0);
    e[j] = 1.0;
    if (!dense_solve(a, e)) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (const cplx& v : e) s += std::abs(v);
    inorm = std::max(inorm, s);
  }
  return anorm * inorm;
}

}  // namespace sslab::linalg
