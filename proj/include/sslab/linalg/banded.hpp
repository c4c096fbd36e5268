#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "sslab/errors.hpp"

namespace sslab::linalg {

using cplx = std::complex<double>;

namespace detail {
inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const cplx& v) { return std::abs(v); }
// Monotone in the magnitude and cheaper; for comparisons only.
inline double magnitude2(double v) { return v * v; }
inline double magnitude2(const cplx& v) { return std::norm(v); }
inline double conj(double v) { return v; }
inline cplx conj(const cplx& v) { return std::conj(v); }
}  // namespace detail

// Square band matrix with `kl` sub- and `ku` super-diagonals, stored by
// diagonals column-major (LAPACK "AB" layout without the pivoting rows):
// element (i, j) lives at data[(ku + i - j) + j * (kl + ku + 1)].
template <class T>
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
      : n_(n),
        kl_(n == 0 ? 0 : std::min(kl, n - 1)),
        ku_(n == 0 ? 0 : std::min(ku, n - 1)),
        data_((kl_ + ku_ + 1) * n, T{}) {}

  std::size_t size() const { return n_; }
  std::size_t kl() const { return kl_; }
  std::size_t ku() const { return ku_; }
  std::size_t bands() const { return kl_ + ku_ + 1; }
  std::span<const T> storage() const { return data_; }

  bool in_band(std::size_t i, std::size_t j) const {
    return i < n_ && j < n_ && i <= j + kl_ && j <= i + ku_;
  }

  T operator()(std::size_t i, std::size_t j) const {
    return in_band(i, j) ? data_[index(i, j)] : T{};
  }

  T& at(std::size_t i, std::size_t j) {
    if (!in_band(i, j)) {
      throw DimensionMismatch("band entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") outside bandwidth");
    }
    return data_[index(i, j)];
  }

  void add(std::size_t i, std::size_t j, T v) { at(i, j) += v; }

  // y = A x; x may be of a wider scalar type than T (real matrix, complex vector).
  template <class U>
  void multiply(std::span<const U> x, std::span<U> y) const {
    if (x.size() != n_ || y.size() != n_) throw DimensionMismatch("banded multiply");
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j0 = i > kl_ ? i - kl_ : 0;
      const std::size_t j1 = std::min(n_ - 1, i + ku_);
      U acc{};
      for (std::size_t j = j0; j <= j1; ++j) acc += data_[index(i, j)] * x[j];
      y[i] = acc;
    }
  }

  // y = A^T x (plain transpose).
  template <class U>
  void multiply_transpose(std::span<const U> x, std::span<U> y) const {
    if (x.size() != n_ || y.size() != n_) throw DimensionMismatch("banded multiply_transpose");
    std::fill(y.begin(), y.end(), U{});
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j0 = i > kl_ ? i - kl_ : 0;
      const std::size_t j1 = std::min(n_ - 1, i + ku_);
      for (std::size_t j = j0; j <= j1; ++j) y[j] += data_[index(i, j)] * x[i];
    }
  }

  template <class U>
  std::vector<U> multiply(std::span<const U> x) const {
    std::vector<U> y(n_);
    multiply<U>(x, y);
    return y;
  }

  template <class U>
  BandedMatrix<U> cast() const {
    BandedMatrix<U> out(n_, kl_, ku_);
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t i0 = j > ku_ ? j - ku_ : 0;
      const std::size_t i1 = std::min(n_ - 1, j + kl_);
      for (std::size_t i = i0; i <= i1; ++i) out.at(i, j) = U((*this)(i, j));
    }
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (const T& v : data_) m = std::max(m, detail::magnitude2(v));
    return std::sqrt(m);
  }

 private:
  std::size_t index(std::size_t i, std::size_t j) const { return (ku_ + i - j) + j * (kl_ + ku_ + 1); }

  std::size_t n_ = 0;
  std::size_t kl_ = 0;
  std::size_t ku_ = 0;
  std::vector<T> data_;
};

// Partial-pivoted band LU factors. The upper factor carries kl + ku
// super-diagonals after fill-in; row interchanges are recorded LAPACK-style.
template <class T>
class LUFactors {
 public:
  std::size_t size() const { return n_; }
  std::size_t kl() const { return kl_; }
  std::size_t ku() const { return ku_; }
  double growth_factor() const { return growth_; }
  std::span<const std::size_t> pivots() const { return ipiv_; }

  // b <- A^{-1} b
  template <class U>
  void solve_in_place(std::span<U> b) const;

  // b <- A^{-H} b (conjugate transpose; plain transpose for real factors)
  template <class U>
  void solve_adjoint_in_place(std::span<U> b) const;

  // x <- A x evaluated through the factors (P L U x); used to check factorizations.
  template <class U>
  void reconstruct_in_place(std::span<U> x) const;

 private:
  template <class V>
  friend LUFactors<V> lu_factor(const BandedMatrix<V>& a);

  std::size_t ldab() const { return 2 * kl_ + ku_ + 1; }
  // Factor entry (i, j) with i - j in [-(kl+ku), kl].
  const T& f(std::size_t i, std::size_t j) const { return ab_[(kl_ + ku_ + i - j) + j * ldab()]; }
  T& f(std::size_t i, std::size_t j) { return ab_[(kl_ + ku_ + i - j) + j * ldab()]; }

  std::size_t n_ = 0;
  std::size_t kl_ = 0;
  std::size_t ku_ = 0;
  std::vector<T> ab_;
  std::vector<std::size_t> ipiv_;
  double growth_ = 1.0;
};

inline constexpr double kSingularPivot = 1e-300;

template <class T>
LUFactors<T> lu_factor(const BandedMatrix<T>& a) {
  LUFactors<T> lu;
  const std::size_t n = a.size();
  const std::size_t kl = a.kl();
  const std::size_t ku = a.ku();
  lu.n_ = n;
  lu.kl_ = kl;
  lu.ku_ = ku;
  lu.ab_.assign(lu.ldab() * n, T{});
  lu.ipiv_.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i0 = j > ku ? j - ku : 0;
    const std::size_t i1 = std::min(n - 1, j + kl);
    for (std::size_t i = i0; i <= i1; ++i) lu.f(i, j) = a(i, j);
  }
  const double amax = a.max_abs();
  double umax = 0.0;
  std::size_t ju = 0;  // last column touched by fill-in so far
  const std::size_t kv = kl + ku;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t km = std::min(kl, n - 1 - j);
    std::size_t jp = 0;
    double best = detail::magnitude2(lu.f(j, j));
    for (std::size_t r = 1; r <= km; ++r) {
      const double m = detail::magnitude2(lu.f(j + r, j));
      if (m > best) {
        best = m;
        jp = r;
      }
    }
    lu.ipiv_[j] = j + jp;
    best = detail::magnitude(lu.f(j + jp, j));
    if (!(best >= kSingularPivot)) {
      throw SingularMatrix("zero pivot in column " + std::to_string(j));
    }
    ju = std::max(ju, std::min(j + ku + jp, n - 1));
    if (jp != 0) {
      for (std::size_t c = j; c <= ju; ++c) std::swap(lu.f(j, c), lu.f(j + jp, c));
    }
    const T pivot = lu.f(j, j);
    for (std::size_t r = 1; r <= km; ++r) lu.f(j + r, j) /= pivot;
    for (std::size_t c = j + 1; c <= ju; ++c) {
      const T ujc = lu.f(j, c);
      if (ujc == T{}) continue;
      for (std::size_t r = 1; r <= km; ++r) lu.f(j + r, c) -= lu.f(j + r, j) * ujc;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i0 = j > kv ? j - kv : 0;
    for (std::size_t i = i0; i <= j; ++i) umax = std::max(umax, detail::magnitude2(lu.f(i, j)));
  }
  umax = std::sqrt(umax);
  lu.growth_ = amax > 0.0 ? umax / amax : 1.0;
  return lu;
}

template <class T>
template <class U>
void LUFactors<T>::solve_in_place(std::span<U> b) const {
  if (b.size() != n_) throw DimensionMismatch("lu_solve: rhs length " + std::to_string(b.size()));
  const std::size_t kv = kl_ + ku_;
  for (std::size_t j = 0; j + 1 < n_; ++j) {
    const std::size_t km = std::min(kl_, n_ - 1 - j);
    if (ipiv_[j] != j) std::swap(b[j], b[ipiv_[j]]);
    const U bj = b[j];
    for (std::size_t r = 1; r <= km; ++r) b[j + r] -= f(j + r, j) * bj;
  }
  for (std::size_t jj = n_; jj-- > 0;) {
    b[jj] /= f(jj, jj);
    const U bj = b[jj];
    const std::size_t i0 = jj > kv ? jj - kv : 0;
    for (std::size_t i = i0; i < jj; ++i) b[i] -= f(i, jj) * bj;
  }
}

template <class T>
template <class U>
void LUFactors<T>::solve_adjoint_in_place(std::span<U> b) const {
  if (b.size() != n_) throw DimensionMismatch("lu_solve (adjoint): rhs length");
  if (n_ == 0) return;
  const std::size_t kv = kl_ + ku_;
  for (std::size_t j = 0; j < n_; ++j) {
    U acc = b[j];
    const std::size_t i0 = j > kv ? j - kv : 0;
    for (std::size_t i = i0; i < j; ++i) acc -= detail::conj(f(i, j)) * b[i];
    b[j] = acc / detail::conj(f(j, j));
  }
  for (std::size_t jj = n_ - 1; jj-- > 0;) {
    const std::size_t km = std::min(kl_, n_ - 1 - jj);
    U acc = b[jj];
    for (std::size_t r = 1; r <= km; ++r) acc -= detail::conj(f(jj + r, jj)) * b[jj + r];
    b[jj] = acc;
    if (ipiv_[jj] != jj) std::swap(b[jj], b[ipiv_[jj]]);
  }
}

template <class T>
template <class U>
void LUFactors<T>::reconstruct_in_place(std::span<U> x) const {
  if (x.size() != n_) throw DimensionMismatch("lu reconstruct");
  if (n_ == 0) return;
  const std::size_t kv = kl_ + ku_;
  for (std::size_t i = 0; i < n_; ++i) {
    U acc{};
    const std::size_t j1 = std::min(n_ - 1, i + kv);
    for (std::size_t j = i; j <= j1; ++j) acc += f(i, j) * x[j];
    x[i] = acc;
  }
  for (std::size_t jj = n_ - 1; jj-- > 0;) {
    const std::size_t km = std::min(kl_, n_ - 1 - jj);
    const U xj = x[jj];
    for (std::size_t r = 1; r <= km; ++r) x[jj + r] += f(jj + r, jj) * xj;
    if (ipiv_[jj] != jj) std::swap(x[jj], x[ipiv_[jj]]);
  }
}

template <class T, class U>
std::vector<U> lu_solve(const LUFactors<T>& lu, std::span<const U> b) {
  std::vector<U> x(b.begin(), b.end());
  lu.template solve_in_place<U>(x);
  return x;
}

}  // namespace sslab::linalg
