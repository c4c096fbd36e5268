#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "sslab/analytic.hpp"
#include "sslab/csv.hpp"
#include "sslab/errors.hpp"
#include "sslab/linalg/dense.hpp"

namespace sslab {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

bool right_anchored(cplx z) { return z.real() >= 0.0; }

// Values of the two bounded exponentials of root z at x, and the exponents
// mu = +z, -z they carry.
void basis(cplx z, double x, cplx& plus, cplx& minus) {
  if (right_anchored(z)) {
    plus = std::exp(z * (x - kPi));
    minus = std::exp(-z * x);
  } else {
    plus = std::exp(z * x);
    minus = std::exp(-z * (x - kPi));
  }
}

cplx ipow(cplx z, int k) {
  cplx r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

// Sum of coefficient * factor(mu) * phi over all six exponentials, together
// with the sum of magnitudes used to judge relative residuals.
template <class Factor>
cplx beam_sum(const ModeSolution& m, double x, Factor factor, double* magnitude = nullptr) {
  cplx total = 0.0;
  double mag = 0.0;
  for (int k = 0; k < 3; ++k) {
    const cplx z = m.roots.z[k];
    cplx ep, em;
    basis(z, x, ep, em);
    const cplx tp = m.dhat[k] * factor(z) * ep;
    const cplx tm = m.bhat[k] * factor(-z) * em;
    total += tp + tm;
    mag += std::abs(tp) + std::abs(tm);
  }
  if (magnitude != nullptr) *magnitude = mag;
  return total;
}

// beta2 theta2 carries t(mu) e^{mu x} for every exponential of u2, with t read
// off from the heat equation (not from the reduced form used in the system).
cplx theta_factor(const ModeSolution& m, cplx mu) {
  const cplx iw = kI * m.w;
  return (m.kcoef / (iw * m.Lw)) * (-m.w * m.w + m.alpha2 * ipow(mu, 4)) - m.delta2 * m.beta2 * mu * mu;
}

double rel(cplx value, double scale) { return scale > 0.0 ? std::abs(value) / scale : std::abs(value); }

}  // namespace

cplx ModeSolution::d(std::size_t k) const {
  const cplx z = roots.z.at(k);
  return right_anchored(z) ? dhat[k] * std::exp(-z * kPi) : dhat[k];
}

cplx ModeSolution::b(std::size_t k) const {
  const cplx z = roots.z.at(k);
  return right_anchored(z) ? bhat[k] : bhat[k] * std::exp(z * kPi);
}

cplx ModeSolution::u1(double x, int order) const {
  const double s = std::pow(w, -alpha_exponent);
  const double g = gamma;
  const double sn = std::sin(g * x), cs = std::cos(g * x);
  const cplx c2x = c2 - x / (2.0 * g);
  switch (order) {
    case 0:
      return s * (c1 * sn + c2x * cs);
    case 1:
      return s * (c1 * g * cs - c2x * g * sn - cs / (2.0 * g));
    case 2:
      return s * (-c1 * g * g * sn - c2x * g * g * cs + sn);
    default:
      throw PreconditionViolation("u1 derivative order must be 0..2");
  }
}

cplx ModeSolution::u2(double x, int order) const {
  if (order < 0 || order > 6) throw PreconditionViolation("u2 derivative order must be 0..6");
  return beam_sum(*this, x, [&](cplx mu) { return ipow(mu, order); });
}

cplx ModeSolution::theta2(double x, int order) const {
  if (order < 0 || order > 2) throw PreconditionViolation("theta2 derivative order must be 0..2");
  return beam_sum(*this, x, [&](cplx mu) { return ipow(mu, order) * theta_factor(*this, mu); }) / beta2;
}

// Cattaneo law: i w tau2 q + q + kappa2 theta' = 0
cplx ModeSolution::q2(double x) const { return -qcoef * theta2(x, 1) / Lw; }

ModeSolution mode_coefficients(const ValidatedParams& p, double w, double alpha_exponent) {
  if (std::abs(p->ell1 - kPi) > 1e-12 || std::abs(p->ell2 - kPi) > 1e-12) {
    throw PreconditionViolation("mode_coefficients needs l1 = l2 = pi");
  }
  if (!(w > 0.0)) throw PreconditionViolation("mode_coefficients needs w > 0");
  const CharacteristicCoefficients cc = characteristic_coefficients(p);

  ModeSolution m;
  m.w = w;
  m.alpha_exponent = alpha_exponent;
  m.alpha1 = p->alpha1;
  m.alpha2 = p->alpha2;
  m.beta2 = p->beta2;
  m.delta2 = p->delta2;
  m.kcoef = cc.c;
  m.qcoef = p->kappa2;
  m.Lw = cc.L(w);
  m.gamma = w / std::sqrt(p->alpha1);
  m.roots = characteristic_roots(cc, w);

  const double g = m.gamma;
  const double s = std::pow(w, -alpha_exponent);
  // Unknowns: dhat_1..3, bhat_1..3, c1, c2.
  linalg::DenseMatrix a(8, 8);
  std::vector<cplx> rhs(8, 0.0);
  for (int k = 0; k < 3; ++k) {
    const cplx z = m.roots.z[k];
    cplx p0, m0, pp, mp;
    basis(z, 0.0, p0, m0);
    basis(z, kPi, pp, mp);
    const cplx t = -w * w / (z * z) + p->alpha2 * z * z;
    // transmission at x = 0
    a(0, k) = p0;
    a(0, 3 + k) = m0;
    a(1, k) = z * p0;
    a(1, 3 + k) = -z * m0;
    a(2, k) = (p->delta2 / p->beta2) * w * w / z * p0;
    a(2, 3 + k) = -(p->delta2 / p->beta2) * w * w / z * m0;
    a(3, k) = t * p0;
    a(3, 3 + k) = t * m0;
    // boundary at x = pi
    a(4, k) = pp;
    a(4, 3 + k) = mp;
    a(5, k) = z * z * pp;
    a(5, 3 + k) = z * z * mp;
    a(6, k) = pp / (z * z);
    a(6, 3 + k) = mp / (z * z);
  }
  a(0, 7) = -s;
  a(2, 6) = -p->alpha1 * s * g;
  rhs[2] = -p->alpha1 * s / (2.0 * g);
  a(7, 6) = std::sin(g * kPi);
  a(7, 7) = std::cos(g * kPi);
  rhs[7] = kPi / (2.0 * g) * std::cos(g * kPi);

  // Row then column equilibration; the condition number is judged on the
  // equilibrated matrix.
  std::vector<double> row_scale(8), col_scale(8);
  linalg::DenseMatrix e = a;
  std::vector<cplx> er = rhs;
  for (std::size_t i = 0; i < 8; ++i) {
    double mx = 0.0;
    for (std::size_t j = 0; j < 8; ++j) mx = std::max(mx, std::abs(e(i, j)));
    row_scale[i] = mx > 0.0 ? 1.0 / mx : 1.0;
    for (std::size_t j = 0; j < 8; ++j) e(i, j) *= row_scale[i];
    er[i] *= row_scale[i];
  }
  for (std::size_t j = 0; j < 8; ++j) {
    double mx = 0.0;
    for (std::size_t i = 0; i < 8; ++i) mx = std::max(mx, std::abs(e(i, j)));
    col_scale[j] = mx > 0.0 ? 1.0 / mx : 1.0;
    for (std::size_t i = 0; i < 8; ++i) e(i, j) *= col_scale[j];
  }
  m.condition = linalg::condition_number_1(e);
  if (!(m.condition <= 1e12)) {
    throw NearSingularModeSystem("mode system at w = " + format_double(w) + " has condition number " +
                                 format_double(m.condition));
  }
  std::vector<cplx> sol = er;
  if (!linalg::dense_solve(e, sol)) {
    throw NearSingularModeSystem("mode system at w = " + format_double(w) + " is singular");
  }
  for (std::size_t j = 0; j < 8; ++j) sol[j] *= col_scale[j];
  for (int k = 0; k < 3; ++k) {
    m.dhat[k] = sol[k];
    m.bhat[k] = sol[3 + k];
  }
  m.c1 = sol[6];
  m.c2 = sol[7];

  // residual of the assembled system, relative to |A| |x| + |b| row by row
  for (std::size_t i = 0; i < 8; ++i) {
    cplx acc = -rhs[i];
    double scale = std::abs(rhs[i]);
    for (std::size_t j = 0; j < 8; ++j) {
      acc += a(i, j) * sol[j];
      scale += std::abs(a(i, j) * sol[j]);
    }
    m.system_residual = std::max(m.system_residual, rel(acc, scale));
  }

  // Conditions evaluated on the reconstructed fields, theta2 from the heat
  // equation and the force balance in its original form.
  double mag = 0.0, mag2 = 0.0;
  auto worst = [&](double r) { m.conditions_residual = std::max(m.conditions_residual, r); };
  {
    const cplx u20 = beam_sum(m, 0.0, [](cplx) { return cplx(1.0); }, &mag);
    const cplx u10 = m.u1(0.0);
    worst(rel(u20 - u10, mag + std::abs(u10)));
    beam_sum(m, 0.0, [](cplx mu) { return mu; }, &mag);
    worst(rel(m.u2(0.0, 1), mag));
    // (delta2 / beta2) (alpha2 u2''' - beta2 theta2') = alpha1 u1'
    const cplx force = beam_sum(
        m, 0.0, [&](cplx mu) { return (p->delta2 / p->beta2) * (p->alpha2 * ipow(mu, 3) - mu * theta_factor(m, mu)); },
        &mag);
    beam_sum(m, 0.0, [&](cplx mu) { return (p->delta2 / p->beta2) * p->alpha2 * ipow(mu, 3); }, &mag2);
    const cplx tension = p->alpha1 * m.u1(0.0, 1);
    worst(rel(force - tension, mag + mag2 + std::abs(tension)));
    beam_sum(m, 0.0, [&](cplx mu) { return theta_factor(m, mu); }, &mag);
    worst(rel(m.theta2(0.0) * p->beta2, mag));
    beam_sum(m, kPi, [](cplx) { return cplx(1.0); }, &mag);
    worst(rel(m.u2(kPi), mag));
    beam_sum(m, kPi, [](cplx mu) { return mu * mu; }, &mag);
    worst(rel(m.u2(kPi, 2), mag));
    beam_sum(m, kPi, [&](cplx mu) { return theta_factor(m, mu); }, &mag);
    worst(rel(m.theta2(kPi) * p->beta2, mag));
    const cplx u1pi = m.u1(kPi);
    const double scale = s * (std::abs(m.c1) + std::abs(m.c2) + kPi / (2.0 * g));
    worst(rel(u1pi, scale));
  }

  // ODE residuals at interior sample points.
  const double iw_im = w;
  for (int j = 1; j <= 9; ++j) {
    const double x = kPi * j / 10.0;
    // -w^2 u2 + alpha2 u2'''' - beta2 theta2'' = 0
    double m1 = 0.0, m2 = 0.0, m3 = 0.0;
    const cplx r1 = beam_sum(
        m, x,
        [&](cplx mu) { return -w * w + p->alpha2 * ipow(mu, 4) - mu * mu * theta_factor(m, mu); }, nullptr);
    beam_sum(m, x, [&](cplx) { return cplx(w * w); }, &m1);
    beam_sum(m, x, [&](cplx mu) { return p->alpha2 * ipow(mu, 4); }, &m2);
    beam_sum(m, x, [&](cplx mu) { return mu * mu * theta_factor(m, mu); }, &m3);
    m.ode_residual = std::max(m.ode_residual, rel(r1, m1 + m2 + m3));
    // i w theta2 - (gamma2 kappa2 / L) theta2'' + i w delta2 u2'' = 0
    const cplx r2 = kI * iw_im * m.theta2(x) - (cc.c / m.Lw) * m.theta2(x, 2) + kI * iw_im * p->delta2 * m.u2(x, 2);
    const double s2 = std::abs(iw_im * m.theta2(x)) + std::abs(cc.c / m.Lw * m.theta2(x, 2)) +
                      std::abs(iw_im * p->delta2 * m.u2(x, 2));
    m.ode_residual = std::max(m.ode_residual, rel(r2, s2));
    // u1'' + gamma^2 u1 = w^{-alpha} sin(gamma x)
    const cplx r3 = m.u1(x, 2) + g * g * m.u1(x) - s * std::sin(g * x);
    const double s3 = std::abs(m.u1(x, 2)) + std::abs(g * g * m.u1(x)) + s * std::abs(std::sin(g * x));
    m.ode_residual = std::max(m.ode_residual, rel(r3, s3));
  }
  return m;
}

double mode_energy_gain(const ValidatedParams& p, const ModeSolution& m) {
  const WeightSet ws = energy_weights(p, SystemKind::ElasticStringThermoBeam);
  // Composite 4-point Gauss-Legendre with panels fine enough for the fastest
  // oscillation (z3 ~ i sqrt(b tau2 / a) w) and the steepest boundary layer.
  double rate = m.gamma;
  for (const cplx& z : m.roots.z) rate = std::max(rate, std::abs(z));
  const std::size_t panels = std::max<std::size_t>(256, static_cast<std::size_t>(std::ceil(rate * kPi * 2.0)));
  const double nodes[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
  const double weights[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
  const double h = kPi / static_cast<double>(panels);
  double ny = 0.0, nf = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double mid = (static_cast<double>(i) + 0.5) * h;
    for (int g = 0; g < 4; ++g) {
      const double x = mid + 0.5 * h * nodes[g];
      const double wt = 0.5 * h * weights[g];
      const cplx u1 = m.u1(x), u1x = m.u1(x, 1);
      const cplx u2 = m.u2(x), u2xx = m.u2(x, 2);
      const cplx th = m.theta2(x), q = m.q2(x);
      ny += wt * (ws.string_velocity * std::norm(m.w * u1) + ws.string_strain * std::norm(u1x) +
                  ws.beam_velocity * std::norm(m.w * u2) + ws.beam_curvature * std::norm(u2xx) +
                  ws.theta * std::norm(th) + ws.flux * std::norm(q));
      nf += wt * ws.string_velocity * std::pow(p->alpha1 * std::sin(m.gamma * x), 2);
    }
  }
  return std::sqrt(ny / nf);
}

void write_mode_gains_csv(const std::vector<ModeGainRow>& rows, std::ostream& out) {
  out << "w,gain,cond\n";
  for (const auto& r : rows) {
    out << format_double(r.w) << ',' << format_double(r.gain) << ',' << format_double(r.condition) << '\n';
  }
}

}  // namespace sslab
