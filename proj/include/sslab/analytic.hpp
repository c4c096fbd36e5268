#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "sslab/linalg/banded.hpp"
#include "sslab/model.hpp"

namespace sslab {

using linalg::cplx;

// ---------------------------------------------------------------------------
// Characteristic sextic of the thermoelastic beam with Cattaneo heat flux,
//   a z^6 - i w L b z^4 - c w^2 z^2 + i w^3 L = 0,  L(w) = i tau2 w + 1.
// ---------------------------------------------------------------------------

struct CharacteristicCoefficients {
  double a = 0.0;  // alpha2 kappa2 gamma2
  double b = 0.0;  // alpha2 + delta2 beta2
  double c = 0.0;  // gamma2 kappa2
  double m = 0.0;  // 2 b^3 / (27 a^3)
  double M = 0.0;  // sqrt(4 b^3 / (27 a^4)), so M^2 = 2 m / a
  double tau2 = 0.0;

  cplx L(double w) const { return cplx(1.0, tau2 * w); }
};

CharacteristicCoefficients characteristic_coefficients(const ValidatedParams& p);

// Roots of s^3 + p s + q = 0 by Cardano's formula. The cube root u0 is the
// principal one and v0 = -p / (3 u0), so u0 v0 = -p/3 holds by construction.
std::array<cplx, 3> cubic_roots_cardano(cplx p, cplx q);

struct CharacteristicRoots {
  double w = 0.0;
  // The six roots are +-z[0], +-z[1], +-z[2]; z[0] has Re >= 0, z[1] and z[2]
  // have Im >= 0. Labels follow the large-w asymptotes
  //   z1 ~ b^{-1/4} sqrt(w),  z2 ~ i b^{-1/4} sqrt(w),  z3 ~ i sqrt(b tau2 / a) w.
  std::array<cplx, 3> z;
  std::array<cplx, 3> x;  // x_k = z_k^2, roots of the cubic in X = z^2
  std::array<cplx, 3> s;  // roots of the depressed cubic, same labels
  cplx p, q;              // depressed cubic s^3 + p s + q
  cplx discriminant;      // q^2 + 4 p^3 / 27
  cplx delta;             // square root of the discriminant used
  cplx u0, v0;
};

// Throws PreconditionViolation for w <= 0 and DegenerateDiscriminant when the
// discriminant vanishes to working precision.
CharacteristicRoots characteristic_roots(const CharacteristicCoefficients& cc, double w);

// |P(z)| divided by the sum of the magnitudes of the four terms of P.
double sextic_residual(const CharacteristicCoefficients& cc, double w, cplx z);

// P = sum_k z_k^{-2} (z_{k+1}^2 - z_{k+2}^2), indices cyclic.
cplx cyclic_root_factor(const CharacteristicRoots& r);

struct RootDeviationRow {
  double w = 0.0;
  std::array<double, 3> deviation{};  // |z_k / asymptote_k - 1|
};

struct RootAsymptotics {
  std::vector<RootDeviationRow> rows;
  bool monotone = false;       // every column strictly decreasing in w
  double final_max = 0.0;      // largest deviation in the last row
};

// w_list must be increasing, hold at least 3 values and span two decades.
RootAsymptotics verify_root_asymptotics(const CharacteristicCoefficients& cc, const std::vector<double>& w_list);

void write_roots_csv(const std::vector<CharacteristicRoots>& roots, std::ostream& out);

// ---------------------------------------------------------------------------
// Rational approximation and the frequency sequence of the non-uniform
// decay argument.
// ---------------------------------------------------------------------------

struct DirichletSequence {
  std::vector<std::pair<long long, long long>> pairs;  // (p, q), q strictly increasing
  bool rational = false;  // continued fraction terminated before `count` pairs
};

// Continued-fraction convergents p/q of x with p >= 1. Pairs whose
// denominator repeats in the next convergent are dropped.
DirichletSequence dirichlet_sequence(double x, std::size_t count);

enum class ShiftRule {
  Uncorrected,      // alpha = alpha1^{1/4} / (4 b^{1/4})
  TangentCorrected  // the same divided by pi, from tan(gamma pi) ~ 2 alpha pi / q
};

struct FrequencySequence {
  std::vector<double> w;
  std::vector<double> gamma;  // gamma_n = w_n / sqrt(alpha1)
  std::vector<long long> q;
  double target = 0.0;  // (alpha1 / b)^{1/4}
  double shift = 0.0;   // alpha in sqrt(gamma_n) = q_n + alpha / q_n^2
  bool rational_target = false;
};

// When the target is rational its convergents stop; the sequence then uses
// the multiples (k p, k q), k = 1, 2, ..., of the last convergent, which
// still satisfy |x - p/q| < 1/q^2. `rational_target` records this.
FrequencySequence resonant_frequencies(const ValidatedParams& p, std::size_t count,
                                        ShiftRule rule = ShiftRule::Uncorrected);

// ---------------------------------------------------------------------------
// Interface/boundary mode system on l1 = l2 = pi for the forcing
// f = (0, -alpha1 sin(gamma x), 0, 0, 0, 0), gamma = w / sqrt(alpha1):
//   u1 = w^{-alpha} (c1 sin(gamma x) + (c2 - x / (2 gamma)) cos(gamma x)),
//   u2 = sum_k d_k e^{z_k x} + b_k e^{-z_k x}.
// ---------------------------------------------------------------------------

struct ModeSolution {
  double w = 0.0;
  double gamma = 0.0;
  double alpha_exponent = 0.0;
  CharacteristicRoots roots;
  // Coefficients of the bounded exponentials: for Re z_k >= 0,
  // u2 contains dhat_k e^{z_k (x - pi)} + bhat_k e^{-z_k x}, otherwise
  // dhat_k e^{z_k x} + bhat_k e^{-z_k (x - pi)}.
  std::array<cplx, 3> dhat{}, bhat{};
  cplx c1, c2;
  double condition = 0.0;           // 1-norm condition of the equilibrated system
  double system_residual = 0.0;     // relative residual of the eight conditions
  double conditions_residual = 0.0; // interface/boundary conditions of the reconstructed fields
  double ode_residual = 0.0;        // pointwise relative ODE residual at sample points

  // Unscaled coefficients of e^{+z_k x} and e^{-z_k x}; may overflow for large w.
  cplx d(std::size_t k) const;
  cplx b(std::size_t k) const;
  double gamma_c1() const { return std::abs(gamma * c1); }

  // Reconstructed fields. `order` is the x-derivative order (0..6 for u2,
  // 0..2 for theta2 and u1).
  cplx u1(double x, int order = 0) const;
  cplx u2(double x, int order = 0) const;
  cplx theta2(double x, int order = 0) const;
  cplx q2(double x) const;

  // Constants of the solve, kept so the fields can be evaluated.
  double alpha1 = 0.0, alpha2 = 0.0, beta2 = 0.0, delta2 = 0.0;
  double kcoef = 0.0;  // gamma2 kappa2
  double qcoef = 0.0;  // kappa2
  cplx Lw;
};

// Requires l1 = l2 = pi. Throws NearSingularModeSystem when the equilibrated
// condition number exceeds 1e12.
ModeSolution mode_coefficients(const ValidatedParams& p, double w, double alpha_exponent = 0.0);

// ||y||_H / ||f||_H in the S2 energy norm for the mode solution y of
// w^alpha (i w - A_2) y = f (numerical quadrature).
double mode_energy_gain(const ValidatedParams& p, const ModeSolution& m);

struct ModeGainRow {
  double w = 0.0;
  double gain = 0.0;
  double condition = 0.0;
};
void write_mode_gains_csv(const std::vector<ModeGainRow>& rows, std::ostream& out);

// ---------------------------------------------------------------------------
// lambda = 0 resolvent of the thermoelastic-string/elastic-beam system:
// solves A_1 y = F in closed form by repeated integration.
// ---------------------------------------------------------------------------

struct ZeroResolventData {
  // F = (f1, g1, f2, g2, h1, d1): displacement, velocity, temperature and
  // flux rows. Missing functions are zero.
  std::function<double(double)> f1, g1, f2, g2, h1, d1;
};

class ZeroResolventSolution {
 public:
  double u1(double x) const;
  double u1_x(double x) const;
  double v1(double x) const;
  double theta1(double x) const;
  double theta1_x(double x) const;
  double q1(double x) const;
  // k-th derivative of u2, k = 0..3.
  double u2(double x, int k = 0) const;
  double v2(double x) const;

  // Integration constants in the order they are eliminated.
  double a1 = 0.0, c1 = 0.0, d1 = 0.0, c2 = 0.0, d2 = 0.0, n2 = 0.0, m2 = 0.0;

 private:
  friend ZeroResolventSolution zero_resolvent_s1(const ValidatedParams& p, const ZeroResolventData& f);
  double integral(const std::function<double(double)>& g, double x, int power) const;

  MaterialParams p_;
  ZeroResolventData f_;
  double tol_ = 1e-10;
};

// Adaptive Simpson quadrature with absolute tolerance 1e-10; QuadratureFailure
// if it does not converge.
ZeroResolventSolution zero_resolvent_s1(const ValidatedParams& p, const ZeroResolventData& f);

// Smooth data with standard normal coefficients from mt19937_64(seed):
// g1, g2, h1, d1 are three-term cosine sums plus a constant; f1 and f2 share
// the interface value and satisfy f1(l1) = f2(l2) = f2'(0) = 0.
ZeroResolventData random_smooth_forcing(const ValidatedParams& p, std::uint64_t seed);

// Discrete solve of A_h y = F_h on the thermo-string/elastic-beam system
// against the closed form, on matched grids n1 = n2 = n. F_h samples the
// displacement, temperature and flux rows at the nodes and loads the velocity
// rows through set_force_block. Each error is the nodal max-norm difference
// over u1, u2, theta1 and q1, divided by the max-norm of the exact profile
// (absolute when the profile vanishes).
struct ZeroResolventRow {
  std::size_t n = 0;
  double h = 0.0;
  double error = 0.0;
};
struct ZeroResolventConvergence {
  std::vector<ZeroResolventRow> rows;
  double order = 0.0;  // slope of log error against log h; 0 with fewer than 2 nonzero rows
};
ZeroResolventConvergence zero_resolvent_convergence(const ValidatedParams& p, const ZeroResolventData& f,
                                                    const std::vector<std::size_t>& n_list);
void write_convergence_csv(const ZeroResolventConvergence& c, std::ostream& out);

// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 48);

}  // namespace sslab
