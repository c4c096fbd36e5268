#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "root_oracle.hpp"
#include "sslab/analytic.hpp"
#include "sslab/spectral.hpp"

using namespace sslab;
using std::numbers::pi;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

MaterialParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  MaterialParams p;
  for (std::size_t k = 0; k < 12; ++k) p.field(k) = u(rng);
  return p;
}

}  // namespace

TEST_CASE("cardano on known cubics") {
  auto sorted_real = [](std::array<cplx, 3> s) {
    std::array<double, 3> r;
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(s[k].imag()) < 1e-7);
      r[k] = s[k].real();
    }
    std::sort(r.begin(), r.end());
    return r;
  };
  const auto z = cubic_roots_cardano(0.0, 0.0);
  for (const auto& s : z) CHECK(std::abs(s) == 0.0);

  const auto a = sorted_real(cubic_roots_cardano(-1.0, 0.0));
  CHECK(a[0] == doctest::Approx(-1.0));
  CHECK(std::abs(a[1]) < 1e-14);
  CHECK(a[2] == doctest::Approx(1.0));

  // (s - 1)^2 (s + 2): the double root is only accurate to sqrt(eps)
  const auto b = sorted_real(cubic_roots_cardano(-3.0, 2.0));
  CHECK(b[0] == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(b[1] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(b[2] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("cardano satisfies vieta for random complex cubics") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 200; ++t) {
    const double scale = std::pow(10.0, 3.0 * nd(rng));
    const cplx p(scale * nd(rng), scale * nd(rng));
    const cplx q(scale * nd(rng), scale * nd(rng));
    const auto s = cubic_roots_cardano(p, q);
    const double m = std::max({1.0, std::abs(p), std::abs(q)});
    const double bound = 1e-12 * std::pow(m, 1.5);
    for (const auto& r : s) CHECK(std::abs(r * r * r + p * r + q) < 50.0 * bound * std::max(1.0, std::abs(r)));
    const double e1 = std::pow(m, 0.5), e2 = m, e3 = std::pow(m, 1.5);
    CHECK(std::abs(s[0] + s[1] + s[2]) < 1e-10 * e1);
    CHECK(std::abs(s[0] * s[1] + s[0] * s[2] + s[1] * s[2] - p) < 1e-10 * e2);
    CHECK(std::abs(s[0] * s[1] * s[2] + q) < 1e-10 * e3);
  }
}

TEST_CASE("characteristic roots match the companion matrix") {
  std::mt19937_64 rng(5);
  std::vector<MaterialParams> draws = {MaterialParams{}};
  for (int k = 0; k < 6; ++k) draws.push_back(random_params(rng));
  for (const auto& mp : draws) {
    const auto cc = characteristic_coefficients(validate_params(mp));
    for (double w : {1.0, 1e2, 1e3, 1e4}) {
      const auto r = characteristic_roots(cc, w);
      const Eigen::VectorXcd ev = oracle::sextic_companion_roots(cc, w);
      for (int k = 0; k < 3; ++k) {
        for (cplx z : {r.z[k], -r.z[k]}) {
          double best = INFINITY;
          for (int j = 0; j < 6; ++j) best = std::min(best, std::abs(ev[j] - z) / std::abs(z));
          CHECK(best < 1e-8);
          CHECK(sextic_residual(cc, w, z) < 1e-8);
        }
        CHECK(std::abs(r.x[k] - r.z[k] * r.z[k]) <= 1e-12 * std::abs(r.x[k]));
      }
      // Vieta on the cubic in X = z^2
      const cplx i(0.0, 1.0);
      const cplx L = cc.L(w);
      const cplx sum = i * w * L * cc.b / cc.a;
      const cplx prod = -i * w * w * w * L / cc.a;
      CHECK(rel(r.x[0] + r.x[1] + r.x[2], sum) < 1e-8);
      CHECK(std::abs(r.x[0] * r.x[1] * r.x[2] - prod) < 1e-8 * std::abs(prod));
      CHECK(std::abs(cyclic_root_factor(r)) > 0.0);
      // branch choices
      CHECK(r.z[0].real() >= 0.0);
      CHECK(r.z[1].imag() >= 0.0);
      CHECK(r.z[2].imag() >= 0.0);
    }
  }
}

TEST_CASE("characteristic coefficients") {
  const auto cc = characteristic_coefficients(validate_params(MaterialParams{}));
  CHECK(cc.a == 1.0);
  CHECK(cc.b == 2.0);
  CHECK(cc.c == 1.0);
  CHECK(cc.M * cc.M == doctest::Approx(2.0 * cc.m / cc.a));
  CHECK(cc.L(3.0) == cplx(1.0, 3.0));
}

TEST_CASE("root asymptotics") {
  const auto cc = characteristic_coefficients(validate_params(MaterialParams{}));
  const auto a = verify_root_asymptotics(cc, {1e2, 1e3, 1e4});
  CHECK(a.monotone);
  CHECK(a.final_max < 1e-2);
  CHECK(a.rows[2].deviation[1] < a.rows[0].deviation[1]);

  const auto r = characteristic_roots(cc, 1e4);
  const double k3 = std::sqrt(cc.b * cc.tau2 / cc.a);
  CHECK(std::abs(r.z[0] / std::sqrt(1e4) - std::pow(cc.b, -0.25)) < 1e-2 * std::pow(cc.b, -0.25));
  CHECK(std::abs(r.z[2] / cplx(0.0, 1e4) - k3) < 1e-2 * k3);
  // i k3 w (1 - i / (2 tau2 w)) has real part k3 / (2 tau2)
  CHECK(r.z[2].real() == doctest::Approx(k3 / (2.0 * cc.tau2)).epsilon(1e-2));

  CHECK_THROWS_AS(verify_root_asymptotics(cc, {10.0, 50.0, 100.0 - 1e-9}), PreconditionViolation);
  CHECK_THROWS_AS(verify_root_asymptotics(cc, {1e2, 1e4}), PreconditionViolation);
  CHECK_THROWS_AS(verify_root_asymptotics(cc, {1e2, 1e1, 1e4}), PreconditionViolation);
  CHECK_THROWS_AS(characteristic_roots(cc, 0.0), PreconditionViolation);
}

TEST_CASE("dirichlet sequences") {
  SUBCASE("sqrt 2") {
    const auto d = dirichlet_sequence(std::sqrt(2.0), 8);
    REQUIRE(d.pairs.size() == 8);
    const std::vector<std::pair<long long, long long>> head = {{1, 1}, {3, 2}, {7, 5}, {17, 12}, {41, 29}};
    for (std::size_t k = 0; k < head.size(); ++k) CHECK(d.pairs[k] == head[k]);
    CHECK_FALSE(d.rational);
    CHECK(std::abs(std::sqrt(2.0) - 7.0 / 5.0) == doctest::Approx(0.01421).epsilon(1e-3));
    for (const auto& [p, q] : d.pairs) CHECK(std::abs(std::sqrt(2.0) - double(p) / q) < 1.0 / (double(q) * q));
  }
  SUBCASE("rational input") {
    const auto d = dirichlet_sequence(0.5, 5);
    REQUIRE(d.pairs.size() == 1);
    CHECK(d.pairs[0] == std::pair<long long, long long>{1, 2});
    CHECK(d.rational);
    CHECK(dirichlet_sequence(1.0, 3).rational);
  }
  SUBCASE("golden ratio gives Fibonacci ratios") {
    const auto d = dirichlet_sequence((1.0 + std::sqrt(5.0)) / 2.0, 12);
    REQUIRE(d.pairs.size() == 12);
    for (std::size_t k = 2; k < d.pairs.size(); ++k) {
      CHECK(d.pairs[k].first == d.pairs[k - 1].first + d.pairs[k - 2].first);
      CHECK(d.pairs[k].second == d.pairs[k - 1].second + d.pairs[k - 2].second);
    }
  }
  SUBCASE("denominators increase strictly") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int t = 0; t < 50; ++t) {
      const double x = u(rng);
      const auto d = dirichlet_sequence(x, 8);
      for (std::size_t k = 1; k < d.pairs.size(); ++k) CHECK(d.pairs[k].second > d.pairs[k - 1].second);
      for (const auto& [p, q] : d.pairs) CHECK(std::abs(x - double(p) / q) < 1.0 / (double(q) * q));
    }
  }
  CHECK_THROWS_AS(dirichlet_sequence(-1.0, 3), PreconditionViolation);
  CHECK_THROWS_AS(dirichlet_sequence(2.0, 0), PreconditionViolation);
}

TEST_CASE("sequence frequencies") {
  // alpha1 = 2 and b = alpha2 + delta2 beta2 = 1; 2^{1/4} = [1; 5, 3, ...]
  MaterialParams mp;
  mp.alpha1 = 2.0;
  mp.alpha2 = 0.5;
  mp.delta2 = 0.5;
  const auto seq = resonant_frequencies(validate_params(mp), 6);
  REQUIRE(seq.w.size() == 6);
  const auto it = std::find(seq.q.begin(), seq.q.end(), 5LL);
  REQUIRE(it != seq.q.end());
  const std::size_t k = static_cast<std::size_t>(it - seq.q.begin());
  const double alpha = std::pow(2.0, 0.25) / 4.0;
  const double root = 5.0 + alpha / 25.0;
  CHECK(seq.shift == doctest::Approx(alpha));
  CHECK(seq.gamma[k] == doctest::Approx(root * root).epsilon(1e-14));
  CHECK(seq.w[k] == doctest::Approx(std::sqrt(2.0) * root * root).epsilon(1e-14));
  for (std::size_t j = 1; j < seq.w.size(); ++j) CHECK(seq.w[j] > seq.w[j - 1]);

  const auto tc = resonant_frequencies(validate_params(mp), 6, ShiftRule::TangentCorrected);
  CHECK(tc.shift == doctest::Approx(alpha / pi));
  CHECK(tc.q == seq.q);

  // alpha1 = b: the target is 1 and the multiples of (1, 1) are used
  MaterialParams r;
  r.alpha1 = 2.0;
  const auto rs = resonant_frequencies(validate_params(r), 4);
  CHECK(rs.rational_target);
  CHECK(rs.q == std::vector<long long>{1, 2, 3, 4});
}

TEST_CASE("mode system away from the sequence") {
  const auto v = validate_params(MaterialParams{});
  for (double w : {0.7, 5.3, 17.9}) {
    const auto m = mode_coefficients(v, w);
    CHECK(m.system_residual < 1e-8);
    CHECK(m.conditions_residual < 1e-8);
    CHECK(m.ode_residual < 1e-6);
    const double gamma = w;  // alpha1 = 1
    CHECK(m.gamma == doctest::Approx(gamma));

    // Boundary and interface conditions from the field accessors.
    const double scale = std::abs(m.u1(0.5)) + std::abs(m.u2(0.5)) + 1.0;
    CHECK(std::abs(m.u1(pi)) < 1e-8 * scale);
    CHECK(std::abs(m.u2(pi)) < 1e-8 * scale);
    CHECK(std::abs(m.u2(pi, 2)) < 1e-7 * scale * w);
    CHECK(std::abs(m.u2(0.0, 1)) < 1e-8 * scale * std::sqrt(w));
    CHECK(std::abs(m.u1(0.0) - m.u2(0.0)) < 1e-8 * scale);
    CHECK(std::abs(m.theta2(0.0)) < 1e-8 * scale * w);
    CHECK(std::abs(m.theta2(pi)) < 1e-8 * scale * w);

    // u1'' + gamma^2 u1 = sin(gamma x), second derivative by central differences
    const double hx = 1e-4;
    for (double x : {0.3, 1.1, 2.6}) {
      const cplx d2 = (m.u1(x + hx) - 2.0 * m.u1(x) + m.u1(x - hx)) / (hx * hx);
      const cplx lhs = d2 + gamma * gamma * m.u1(x);
      CHECK(std::abs(lhs - std::sin(gamma * x)) < 1e-4 * (1.0 + gamma * gamma * std::abs(m.u1(x))));
    }
  }
  MaterialParams bad;
  bad.ell1 = 1.0;
  CHECK_THROWS_AS(mode_coefficients(validate_params(bad), 2.0), PreconditionViolation);
}

TEST_CASE("mode gain agrees with the discrete probe") {
  const auto v = validate_params(MaterialParams{});
  const auto seq = resonant_frequencies(v, 2);
  for (double w : {seq.w[0], 3.7, seq.w[1]}) {
    const double analytic = mode_energy_gain(v, mode_coefficients(v, w));
    const double discrete = resolved_probe_gain(v, w, 0.05).gain;
    CHECK(discrete == doctest::Approx(analytic).epsilon(0.10));
  }
}

TEST_CASE("zero resolvent closed form") {
  const auto v = validate_params(MaterialParams{});
  SUBCASE("zero data") {
    const auto s = zero_resolvent_s1(v, ZeroResolventData{});
    for (double x : {0.0, 0.7, 2.0}) {
      CHECK(s.u1(x) == 0.0);
      CHECK(s.u2(x) == 0.0);
      CHECK(s.theta1(x) == 0.0);
      CHECK(s.q1(x) == 0.0);
    }
  }
  SUBCASE("uniform beam load is a quartic") {
    MaterialParams mp;
    mp.ell1 = mp.ell2 = 1.0;
    ZeroResolventData f;
    f.g2 = [](double) { return 1.0; };
    const auto s = zero_resolvent_s1(validate_params(mp), f);
    // u2 = -x^4/24 + A x^3 + B x^2 + C x + D, u1 = E (1 - x). Conditions
    // u2'(0) = 0, u2(1) = 0, u2''(1) = 0, u1(0) = u2(0) and
    // u2'''(0) = u1'(0) give a linear system for (A, B, C, D, E).
    Eigen::Matrix<double, 5, 5> m;
    Eigen::Matrix<double, 5, 1> rhs;
    m << 0, 0, 1, 0, 0,  //
        1, 1, 1, 1, 0,   //
        6, 2, 0, 0, 0,   //
        0, 0, 0, 1, -1,  //
        6, 0, 0, 0, 1;
    rhs << 0, 1.0 / 24.0, 0.5, 0, 0;
    const Eigen::Matrix<double, 5, 1> c = m.fullPivLu().solve(rhs);
    auto quartic = [&](double x) { return -x * x * x * x / 24.0 + c[0] * x * x * x + c[1] * x * x + c[2] * x + c[3]; };
    for (double x : {0.0, 0.25, 0.5, 0.9, 1.0}) {
      CHECK(s.u2(x) == doctest::Approx(quartic(x)).epsilon(1e-10));
      CHECK(s.u1(x) == doctest::Approx(c[4] * (1.0 - x)).epsilon(1e-10));
      CHECK(s.theta1(x) == 0.0);
    }
    // fourth derivative from the third by differences
    const double hx = 1e-3;
    CHECK(-(s.u2(0.5 + hx, 3) - s.u2(0.5 - hx, 3)) / (2 * hx) == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("random data meets every condition") {
    MaterialParams mp;
    mp.alpha1 = 1.3, mp.beta1 = 0.7, mp.gamma1 = 2.1, mp.delta1 = 0.9, mp.tau1 = 0.4, mp.kappa1 = 1.7;
    mp.alpha2 = 0.8, mp.ell1 = 2.0, mp.ell2 = 1.5;
    const auto vp = validate_params(mp);
    const auto f = random_smooth_forcing(vp, 7);
    const auto s = zero_resolvent_s1(vp, f);
    CHECK(std::abs(s.theta1(0.0)) < 1e-8);
    CHECK(std::abs(s.theta1(mp.ell1)) < 1e-8);
    CHECK(std::abs(s.u1(mp.ell1)) < 1e-8);
    CHECK(std::abs(s.u2(mp.ell2)) < 1e-8);
    CHECK(std::abs(s.u2(mp.ell2, 2)) < 1e-8);
    CHECK(std::abs(s.u2(0.0, 1)) < 1e-8);
    CHECK(std::abs(s.u1(0.0) - s.u2(0.0)) < 1e-8);
    CHECK(std::abs(mp.alpha2 * s.u2(0.0, 3) - mp.delta1 / mp.beta1 * mp.alpha1 * s.u1_x(0.0)) < 1e-8);

    // The equations, with derivatives by central differences.
    const double hx = 1e-4;
    for (double x : {0.4, 1.2}) {
      const double u1xx = (s.u1(x + hx) - 2 * s.u1(x) + s.u1(x - hx)) / (hx * hx);
      CHECK(mp.alpha1 * u1xx - mp.beta1 * s.theta1_x(x) == doctest::Approx(f.g1(x)).epsilon(1e-5));
      const double qx = (s.q1(x + hx) - s.q1(x - hx)) / (2 * hx);
      const double f1x = (f.f1(x + hx) - f.f1(x - hx)) / (2 * hx);
      CHECK(-mp.gamma1 * qx == doctest::Approx(mp.delta1 * f1x + f.h1(x)).epsilon(1e-6));
      CHECK(-s.q1(x) - mp.kappa1 * s.theta1_x(x) == doctest::Approx(mp.tau1 * f.d1(x)).epsilon(1e-8));
      CHECK(s.v1(x) == f.f1(x));
    }
    for (double x : {0.3, 1.0}) {
      const double u2xxxx = (s.u2(x + hx, 3) - s.u2(x - hx, 3)) / (2 * hx);
      CHECK(-mp.alpha2 * u2xxxx == doctest::Approx(f.g2(x)).epsilon(1e-6));
    }
  }
}

TEST_CASE("zero resolvent convergence of the discretization") {
  const auto v = validate_params(MaterialParams{});
  const auto c = zero_resolvent_convergence(v, random_smooth_forcing(v, 1), {32, 64, 128});
  REQUIRE(c.rows.size() == 3);
  CHECK(c.order == doctest::Approx(2.0).epsilon(0.15));
  for (std::size_t k = 1; k < 3; ++k) CHECK(c.rows[k].error < c.rows[k - 1].error);

  const auto z = zero_resolvent_convergence(v, ZeroResolventData{}, {16, 32});
  for (const auto& r : z.rows) CHECK(r.error == 0.0);
  CHECK_THROWS_AS(zero_resolvent_convergence(v, ZeroResolventData{}, {32, 16}), PreconditionViolation);
}

TEST_CASE("csv writers") {
  std::ostringstream a, b;
  const auto cc = characteristic_coefficients(validate_params(MaterialParams{}));
  write_roots_csv({characteristic_roots(cc, 10.0)}, a);
  CHECK(a.str().rfind("w,re_z1,im_z1,re_z2,im_z2,re_z3,im_z3\n", 0) == 0);
  write_mode_gains_csv({ModeGainRow{1.0, 2.0, 3.0}}, b);
  CHECK(b.str() == "w,gain,cond\n1,2,3\n");
}
