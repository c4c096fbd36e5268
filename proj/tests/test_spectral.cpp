#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "sslab/spectral.hpp"

using namespace sslab;

namespace {

constexpr SystemKind kS1 = SystemKind::ThermoStringElasticBeam;
constexpr SystemKind kS2 = SystemKind::ElasticStringThermoBeam;

MaterialParams mixed_params() {
  MaterialParams p;
  p.alpha1 = 1.3, p.beta1 = 0.7, p.gamma1 = 2.1, p.delta1 = 0.9, p.tau1 = 0.4, p.kappa1 = 1.7;
  p.alpha2 = 0.8, p.beta2 = 1.9, p.gamma2 = 0.6, p.delta2 = 1.4, p.tau2 = 2.2, p.kappa2 = 0.5;
  p.ell1 = 2.0, p.ell2 = 1.5;
  return p;
}

oracle::MatC shifted_dense(const BlockGenerator& g, double beta) {
  const oracle::MatC a = oracle::dense(g.op()).cast<cplx>();
  return cplx(0.0, beta) * oracle::MatC::Identity(a.rows(), a.cols()) - a;
}

}  // namespace

TEST_CASE("resolvent of -I") {
  linalg::BandedMatrix<double> a(2, 0, 0);
  a.at(0, 0) = a.at(1, 1) = -1.0;
  const auto w = linalg::WeightMatrix::identity(2);
  CHECK(resolvent_norm(a, w, 0.0).norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(resolvent_norm(a, w, 1.0).norm == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("resolvent norm matches the dense weighted SVD") {
  for (const auto& mp : {MaterialParams{}, mixed_params()}) {
    const auto v = validate_params(mp);
    for (SystemKind kind : {kS1, kS2}) {
      for (std::size_t n : {16, 48}) {
        const auto g = assemble_generator(v, kind, build_grids(v, n, n));
        const oracle::MatR w = oracle::dense(g.gram().matrix());
        for (double beta : {1.0, 10.0, 100.0}) {
          const double ref = 1.0 / oracle::weighted_sigma_min(shifted_dense(g, beta), w);
          CHECK(resolvent_norm(g, beta).norm == doctest::Approx(ref).epsilon(1e-6));
        }
      }
    }
  }
}

TEST_CASE("resolvent is even in beta") {
  const auto v = validate_params(mixed_params());
  const auto g = assemble_generator(v, kS2, build_grids(v, 24, 24));
  for (double beta : {0.7, 4.0, 31.0}) {
    CHECK(resolvent_norm(g, -beta).norm == doctest::Approx(resolvent_norm(g, beta).norm).epsilon(1e-8));
  }
}

TEST_CASE("resolvent scans") {
  const auto v = validate_params(MaterialParams{});
  const auto g = assemble_generator(v, kS1, build_grids(v, 32, 32));
  const auto one = resolvent_scan(g, 3.0, 10.0, 1);
  REQUIRE(one.betas.size() == 1);
  CHECK(one.betas[0] == 3.0);
  CHECK(one.norms[0] == resolvent_norm(g, 3.0).norm);

  ScanOptions serial, threaded;
  serial.threads = 1;
  threaded.threads = 4;
  serial.refine_peaks = threaded.refine_peaks = true;
  const auto a = resolvent_scan(g, 1.0, 50.0, 24, serial);
  const auto b = resolvent_scan(g, 1.0, 50.0, 24, threaded);
  CHECK(a.norms == b.norms);
  CHECK(a.iterations == b.iterations);
  REQUIRE(a.peaks.size() == b.peaks.size());
  for (std::size_t i = 0; i < a.peaks.size(); ++i) CHECK(a.peaks[i].r == b.peaks[i].r);
  for (std::size_t i = 1; i < a.betas.size(); ++i) {
    CHECK(a.betas[i] / a.betas[i - 1] == doctest::Approx(std::pow(50.0, 1.0 / 23.0)));
  }
  for (double r : a.norms) CHECK(r > 0.0);

  CHECK_THROWS_AS(resolvent_scan(g, 5.0, 1.0, 10), PreconditionViolation);
  CHECK_THROWS_AS(resolvent_scan(g, 1.0, 5.0, 0), PreconditionViolation);

  std::ostringstream os;
  write_scan_csv(one, os);
  CHECK(os.str().rfind("beta,r\n3,", 0) == 0);
}

TEST_CASE("growth fit on synthetic scans") {
  ResolventScan s;
  for (int k = 0; k < 31; ++k) {
    const double b = 10.0 * std::pow(100.0, k / 30.0);
    s.betas.push_back(b);
    s.norms.push_back(b * b);
    s.iterations.push_back(1);
  }
  const auto f = fit_resolvent_growth(s);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-6));
  for (double& r : s.norms) r = 3.0;
  CHECK(std::abs(fit_resolvent_growth(s).slope) < 1e-6);

  // sawtooth below a beta^1.5 envelope: the fit follows the envelope
  for (std::size_t k = 0; k < s.betas.size(); ++k) {
    s.norms[k] = std::pow(s.betas[k], 1.5) * (k % 3 == 0 ? 1.0 : 0.1);
  }
  CHECK(fit_resolvent_growth(s).slope == doctest::Approx(1.5).epsilon(1e-6));

  ResolventScan small;
  small.betas = {1, 2, 3};
  small.norms = {1, 1, 1};
  small.iterations = {1, 1, 1};
  CHECK_THROWS_AS(fit_resolvent_growth(small), WindowTooSmall);
}

TEST_CASE("string resolution rule") {
  const auto v = validate_params(MaterialParams{});
  CHECK(resolved_string_cells(v, 256, 10.0) == 256);
  // ceil(10 * 1000 * pi / (2 pi)) = 5000
  CHECK(resolved_string_cells(v, 256, 1000.0) == 5000);
  CHECK_THROWS_AS(resolved_string_cells(v, 256, 0.0), PreconditionViolation);
}

TEST_CASE("eigen branch matches the dense eigendecomposition") {
  const auto v = validate_params(mixed_params());
  for (SystemKind kind : {kS1, kS2}) {
    const auto g = assemble_generator(v, kind, build_grids(v, 16, 16));
    const oracle::MatC a = oracle::dense(g.op()).cast<cplx>();
    Eigen::ComplexEigenSolver<oracle::MatC> es(a);
    const auto ev = es.eigenvalues();
    const std::vector<cplx> shifts = {cplx(0.0, 2.0), cplx(0.0, -2.0), cplx(0.0, 9.0)};
    const auto branch = eigen_branch(g, shifts, 3);
    REQUIRE(branch.eigenvalues.size() >= 6);
    for (const auto& e : branch.eigenvalues) {
      double best = INFINITY;
      for (Eigen::Index j = 0; j < ev.size(); ++j) best = std::min(best, std::abs(ev[j] - e.value));
      CHECK(best < 1e-6 * std::abs(e.value));
      CHECK(e.value.real() < 0.0);
    }
    // the three nearest to each shift are the dense ones, in order
    for (const cplx s : shifts) {
      std::vector<cplx> ref(ev.data(), ev.data() + ev.size());
      std::sort(ref.begin(), ref.end(), [&](cplx p, cplx q) { return std::abs(p - s) < std::abs(q - s); });
      std::vector<cplx> got;
      for (const auto& e : branch.eigenvalues)
        if (e.shift == s) got.push_back(e.value);
      REQUIRE(!got.empty());
      CHECK(std::abs(got[0] - ref[0]) < 1e-6 * std::abs(ref[0]));
    }
    // closed under conjugation across the +-2i pair
    for (const auto& e : branch.eigenvalues) {
      if (e.shift != cplx(0.0, 2.0)) continue;
      bool found = false;
      for (const auto& f : branch.eigenvalues) found = found || std::abs(f.value - std::conj(e.value)) < 1e-8;
      CHECK(found);
    }
  }
}

TEST_CASE("branch decay fit on a synthetic branch") {
  EigenBranch b;
  for (int k = 1; k <= 8; ++k) {
    const double im = 10.0 * k;
    b.eigenvalues.push_back({cplx(-3.0 * std::pow(im, -1.5), im), 0.0, cplx(0.0, im)});
    // a more damped companion at each shift is ignored
    b.eigenvalues.push_back({cplx(-2.0, im + 1.0), 0.0, cplx(0.0, im)});
  }
  const auto f = fit_branch_decay(b);
  CHECK(f.exponent == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(f.used.size() >= 3);
  for (const cplx& z : f.used) CHECK(z.real() > -1.0);
  EigenBranch tiny;
  tiny.eigenvalues.push_back({cplx(-1.0, 1.0), 0.0, cplx(0.0, 1.0)});
  CHECK_THROWS_AS(fit_branch_decay(tiny), WindowTooSmall);
}

TEST_CASE("abscissa of the conservative core is zero") {
  const auto v = validate_params(MaterialParams{});
  AbscissaOptions opt;
  opt.conservative_core = true;
  const auto rows = spectral_abscissa_study(v, kS1, {16, 32}, 10.0, opt);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) CHECK(std::abs(r.abscissa) < 1e-10);
  CHECK_THROWS_AS(spectral_abscissa_study(v, kS1, {32, 16}, 10.0), PreconditionViolation);
}

TEST_CASE("probe gain matches a dense solve") {
  const auto v = validate_params(MaterialParams{});
  const double w = 0.9;
  const std::size_t n = probe_resolution(v, w) + 8;
  const auto g = assemble_generator(v, kS2, build_grids(v, n, n));
  const GainRow row = probe_gain(g, w);

  StateVector<double> f(g.layout());
  set_force_block(g, f, [&](double x) { return -std::sin(w * x); }, nullptr);
  const std::vector<double> fi = g.to_internal(f);
  Eigen::VectorXcd rhs(static_cast<Eigen::Index>(fi.size()));
  for (std::size_t i = 0; i < fi.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = fi[i];
  const Eigen::VectorXcd y = shifted_dense(g, w).partialPivLu().solve(rhs);
  const oracle::MatR gm = oracle::dense(g.gram().matrix());
  const double ny = std::sqrt(std::abs(y.dot(gm.cast<cplx>() * y)));
  const double nf = std::sqrt(std::abs(rhs.dot(gm.cast<cplx>() * rhs)));
  CHECK(row.gain == doctest::Approx(ny / nf).epsilon(1e-8));

  const auto coarse = assemble_generator(v, kS2, build_grids(v, 8, 8));
  CHECK_THROWS_AS(probe_gain(coarse, 50.0), UnderResolved);
  CHECK_THROWS_AS(probe_gain(assemble_generator(v, kS1, build_grids(v, 32, 32)), 0.5), PreconditionViolation);
  CHECK_THROWS_AS(lack_exp_probe(v, 3, 0.0, 16), UnderResolved);
}

TEST_CASE("gains along the sequence") {
  const auto v = validate_params(MaterialParams{});
  const auto seq = resonant_frequencies(v, 2);

  // single grid for both points
  const auto fixed = lack_exp_probe(v, 2, 0.0);
  REQUIRE(fixed.rows.size() == 2);
  CHECK(fixed.n == probe_resolution(v, seq.w[1]));
  CHECK(fixed.rows[0].w == seq.w[0]);

  const auto conv = lack_exp_probe_converged(v, 3, 0.0);
  REQUIRE(conv.rows.size() >= 2);
  CHECK(conv.unresolved == 3 - conv.rows.size());
  CHECK(conv.rows[1].gain > 5.0 * conv.rows[0].gain);
  CHECK(conv.exponent >= 0.5);

  // normalization by w^alpha
  const auto scaled = lack_exp_probe_converged(v, 2, 0.5);
  CHECK(scaled.exponent == doctest::Approx(conv.exponent - 0.5).epsilon(1e-9));

  // a generic frequency next to the sequence point gives a much smaller gain
  const double generic = resolved_probe_gain(v, seq.w[1] * 1.013).gain;
  CHECK(generic < 0.25 * conv.rows[1].gain);

  std::ostringstream os;
  write_gains_csv(conv, os);
  CHECK(os.str().rfind("w,gain\n", 0) == 0);
}
