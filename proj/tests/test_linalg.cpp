#include <Eigen/Dense>
#include <random>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "sslab/linalg/banded.hpp"
#include "sslab/linalg/dense.hpp"
#include "sslab/linalg/eigs.hpp"
#include "sslab/linalg/fit.hpp"
#include "sslab/linalg/weighted.hpp"

using namespace sslab;
using namespace sslab::linalg;

namespace {

template <class T>
BandedMatrix<T> random_banded(std::size_t n, std::size_t kl, std::size_t ku, unsigned seed, double diag_boost = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BandedMatrix<T> a(n, kl, ku);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (a.in_band(i, j)) {
        if constexpr (std::is_same_v<T, cplx>) a.at(i, j) = cplx(u(rng), u(rng));
        else a.at(i, j) = u(rng);
        if (i == j) a.at(i, j) += diag_boost;
      }
  return a;
}

BandedMatrix<double> diagonal(std::initializer_list<double> d) {
  BandedMatrix<double> a(d.size(), 0, 0);
  std::size_t i = 0;
  for (double v : d) a.at(i, i) = v, ++i;
  return a;
}

template <class T>
double reconstruction_error(const BandedMatrix<T>& a) {
  const auto lu = lu_factor(a);
  const auto dense = oracle::dense(a);
  const std::size_t n = a.size();
  double err = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<T> e(n, T{});
    e[j] = T(1.0);
    lu.template reconstruct_in_place<T>(e);
    for (std::size_t i = 0; i < n; ++i)
      err = std::max(err, std::abs(e[i] - dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
  }
  return err / dense.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("band storage layout and bounds") {
  BandedMatrix<double> a(5, 1, 2);
  CHECK(a.bands() == 4);
  CHECK(a.storage().size() == 20);
  a.at(2, 4) = 3.0;
  a.at(3, 2) = -1.0;
  CHECK(a(2, 4) == 3.0);
  CHECK(a(3, 2) == -1.0);
  CHECK(a(4, 0) == 0.0);
  CHECK_THROWS_AS(a.at(4, 0), DimensionMismatch);
  // bandwidths clamp below the dimension
  BandedMatrix<double> b(3, 7, 7);
  CHECK(b.kl() == 2);
  CHECK(b.ku() == 2);
}

TEST_CASE("identity factors and solves to itself") {
  const auto id = diagonal({1, 1, 1, 1});
  const auto lu = lu_factor(id);
  std::vector<double> b = {1.5, -2.0, 3.0, 0.25};
  const auto x = lu_solve<double, double>(lu, b);
  for (std::size_t i = 0; i < 4; ++i) CHECK(x[i] == b[i]);
  CHECK(reconstruction_error(id) == 0.0);
}

TEST_CASE("diag(2,4) solve") {
  const auto lu = lu_factor(diagonal({2, 4}));
  std::vector<double> b = {2, 4};
  const auto x = lu_solve<double, double>(lu, b);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("subnormal pivot is rejected") {
  CHECK_THROWS_AS(lu_factor(diagonal({1e-320, 1.0})), SingularMatrix);
}

TEST_CASE("rhs length mismatch") {
  const auto lu = lu_factor(diagonal({1, 2, 3}));
  std::vector<double> b(2, 1.0);
  CHECK_THROWS_AS(lu.solve_in_place<double>(b), DimensionMismatch);
}

TEST_CASE("random banded 200x200 reconstruction, real and complex") {
  CHECK(reconstruction_error(random_banded<double>(200, 3, 5, 11)) < 1e-12);
  CHECK(reconstruction_error(random_banded<cplx>(200, 4, 2, 12)) < 1e-12);
  CHECK(reconstruction_error(random_banded<double>(50, 0, 6, 13)) < 1e-12);
  CHECK(reconstruction_error(random_banded<cplx>(50, 6, 0, 14)) < 1e-12);
}

TEST_CASE("solve residual contract over random banded systems") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const std::size_t n = 20 + 9 * seed;
    const std::size_t kl = seed % 5, ku = (seed * 3) % 7;
    const auto a = random_banded<cplx>(n, kl, ku, 100 + seed, 0.5);
    const auto lu = lu_factor(a);
    const auto b = random_complex_vector(n, seed);
    const auto x = lu_solve<cplx, cplx>(lu, b);
    const auto ax = a.multiply<cplx>(x);
    const auto dense = oracle::dense(a);
    double r = 0.0, bn = 0.0, xn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r = std::max(r, std::abs(ax[i] - b[i]));
      bn = std::max(bn, std::abs(b[i]));
      xn = std::max(xn, std::abs(x[i]));
    }
    const double an = dense.cwiseAbs().rowwise().sum().maxCoeff();
    CHECK(r / (an * xn + bn) < 1e-11);

    // adjoint solve against the dense conjugate transpose
    auto y = b;
    lu.solve_adjoint_in_place<cplx>(y);
    Eigen::VectorXcd yv = Eigen::Map<const Eigen::VectorXcd>(y.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXcd bv = Eigen::Map<const Eigen::VectorXcd>(b.data(), static_cast<Eigen::Index>(n));
    CHECK((dense.adjoint() * yv - bv).norm() / (an * yv.norm() + bv.norm()) < 1e-11);
  }
}

TEST_CASE("real factors with complex right-hand sides") {
  const auto a = random_banded<double>(60, 2, 3, 77, 1.0);
  const auto lu = lu_factor(a);
  const auto b = random_complex_vector(60, 3);
  const auto x = lu_solve<double, cplx>(lu, b);
  const auto ax = a.multiply<cplx>(x);
  for (std::size_t i = 0; i < 60; ++i) CHECK(std::abs(ax[i] - b[i]) < 1e-11);
}

TEST_CASE("smallest singular value of diagonal operators") {
  auto sv = [](std::initializer_list<double> d) {
    const auto lu = lu_factor(diagonal(d).cast<cplx>());
    return smallest_singular_value(lu, WeightMatrix::identity(d.size()), 1e-12, 500);
  };
  CHECK(sv({1, 2, 3}).sigma_min == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(sv({1e-6, 1}).sigma_min - 1e-6) < 1e-12);
}

TEST_CASE("smallest singular value matches dense SVD, random 40x40 complex") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const std::size_t n = 40;
    const auto a = random_banded<cplx>(n, n - 1, n - 1, 300 + seed);
    const auto lu = lu_factor(a);
    const auto est = smallest_singular_value(lu, WeightMatrix::identity(n), 1e-12, 5000, seed + 1);
    Eigen::JacobiSVD<oracle::MatC> svd(oracle::dense(a));
    CHECK(est.sigma_min == doctest::Approx(svd.singularValues().minCoeff()).epsilon(1e-6));
  }
}

TEST_CASE("smallest singular value in a non-identity weight") {
  const std::size_t n = 30;
  auto wb = random_banded<double>(n, 2, 2, 5);
  // symmetrize and make diagonally dominant
  BandedMatrix<double> w(n, 2, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (w.in_band(i, j)) w.at(i, j) = 0.5 * (wb(i, j) + wb(j, i)) + (i == j ? 6.0 : 0.0);
  const WeightMatrix wm(w);
  const auto t = random_banded<cplx>(n, 3, 3, 9, 0.3);
  const auto est = smallest_singular_value(lu_factor(t), wm, 1e-12, 5000);
  const double ref = oracle::weighted_sigma_min(oracle::dense(t), oracle::dense(w));
  CHECK(est.sigma_min == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("shift-invert on diag(-1,-2)") {
  const auto a = diagonal({-1, -2});
  const auto w = WeightMatrix::identity(2);
  const auto one = shift_invert_eigs(a, w, cplx(-0.9, 0.0), 1, 1e-12);
  REQUIRE(one.size() == 1);
  CHECK(std::abs(one[0].value - cplx(-1.0)) < 1e-12);
  CHECK(one[0].residual < 1e-12);
  const auto two = shift_invert_eigs(a, w, cplx(-1.6, 0.0), 2, 1e-12);
  REQUIRE(two.size() == 2);
  CHECK(std::abs(two[0].value - cplx(-2.0)) < 1e-12);
  CHECK(std::abs(two[1].value - cplx(-1.0)) < 1e-12);
}

TEST_CASE("shift on an eigenvalue is reported") {
  CHECK_THROWS_AS(shift_invert_eigs(diagonal({-1, -2}), WeightMatrix::identity(2), cplx(-1.0), 1, 1e-10),
                  NearSingularShift);
}

TEST_CASE("shift-invert matches dense eigendecomposition, random dissipative 40x40") {
  const std::size_t n = 40;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  // A = K - D with K skew and D positive semidefinite diagonal
  BandedMatrix<double> a(n, n - 1, n - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = nd(rng);
      a.at(i, j) = v;
      a.at(j, i) = -v;
    }
  for (std::size_t i = 0; i < n; ++i) a.at(i, i) = -std::abs(nd(rng)) * 0.3;
  Eigen::ComplexEigenSolver<oracle::MatC> es(oracle::dense(a).cast<cplx>());
  const auto evs = es.eigenvalues();
  for (const cplx shift : {cplx(0.0, 1.0), cplx(-0.1, 3.0), cplx(0.0, -2.0)}) {
    const std::size_t k = 4;
    const auto got = shift_invert_eigs(a, WeightMatrix::identity(n), shift, k, 1e-10);
    std::vector<cplx> ref(evs.data(), evs.data() + n);
    std::sort(ref.begin(), ref.end(), [&](cplx p, cplx q) { return std::abs(p - shift) < std::abs(q - shift); });
    REQUIRE(got.size() == k);
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(std::abs(got[i].value - ref[i]) < 1e-6 * std::abs(ref[i]));
      CHECK(got[i].residual < 1e-10);
    }
  }
}

TEST_CASE("small dense eigensolver on a companion matrix") {
  // roots 1, 2, 3, -1
  DenseMatrix c(4, 4);
  const double coef[] = {-6, 5, 5, -5};  // x^4 - 5x^3 + 5x^2 + 5x - 6
  for (std::size_t i = 1; i < 4; ++i) c(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < 4; ++i) c(i, 3) = -coef[i];
  auto e = eig_small(c);
  std::vector<double> re;
  for (auto v : e.values) {
    CHECK(std::abs(v.imag()) < 1e-10);
    re.push_back(v.real());
  }
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-1));
  CHECK(re[1] == doctest::Approx(1));
  CHECK(re[2] == doctest::Approx(2));
  CHECK(re[3] == doctest::Approx(3));
}

TEST_CASE("dense solve and condition number") {
  DenseMatrix a(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1e-6;
  std::vector<cplx> b = {1.0, 1.0};
  REQUIRE(dense_solve(a, b));
  CHECK(std::abs(b[1] - cplx(1e6)) < 1e-6);
  CHECK(condition_number_1(a) == doctest::Approx(1e6));
}

TEST_CASE("fit_line on exact, constant and noisy data") {
  std::vector<double> x = {0, 1, 2, 3, 4}, y;
  for (double v : x) y.push_back(3 * v + 1);
  auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(3.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r_squared == doctest::Approx(1.0));

  std::vector<double> c(5, 2.5);
  CHECK(fit_line(x, c).slope == 0.0);

  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, 0.5);
  std::vector<double> xs, ys;
  for (int i = 0; i < 1000; ++i) {
    xs.push_back(i * 0.01);
    ys.push_back(-1.7 * xs.back() + 0.3 + noise(rng));
  }
  const auto nf = fit_line(xs, ys);
  CHECK(std::abs(nf.slope + 1.7) < 3 * nf.slope_stderr);

  std::vector<double> one = {1.0};
  CHECK_THROWS_AS(fit_line(one, one), DegenerateData);
  std::vector<double> same = {2.0, 2.0, 2.0};
  const std::vector<double> ramp = {1, 2, 3};
  CHECK_THROWS_AS(fit_line(same, ramp), DegenerateData);
}

TEST_CASE("seeded vectors are reproducible") {
  CHECK(random_complex_vector(8, 42) == random_complex_vector(8, 42));
  CHECK(seed_from(1.0) != seed_from(2.0));
  CHECK(seed_from(1.0, 3) == seed_from(1.0, 3));
}
