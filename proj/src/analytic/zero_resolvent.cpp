#include <cmath>

#include "sslab/analytic.hpp"
#include "sslab/csv.hpp"
#include "sslab/errors.hpp"

namespace sslab {

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  double tol;
};

double simpson_step(SimpsonState& st, double a, double b, double fa, double fm, double fb, double whole, double tol,
                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = st.f(lm), frm = st.f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (!std::isfinite(diff)) throw QuadratureFailure("non-finite integrand near x = " + format_double(m));
  if (std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  if (depth <= 0) {
    throw QuadratureFailure("adaptive Simpson did not converge on [" + format_double(a) + ", " + format_double(b) +
                            "]");
  }
  return simpson_step(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  SimpsonState st{f, tol};
  const double fa = f(a), fb = f(b);
  // A few forced subdivisions so that integrands vanishing at the three
  // initial nodes are not mistaken for zero.
  const int pieces = 8;
  double sum = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double x0 = a + (b - a) * i / pieces;
    const double x1 = a + (b - a) * (i + 1) / pieces;
    const double f0 = i == 0 ? fa : f(x0);
    const double f1 = i + 1 == pieces ? fb : f(x1);
    const double fmid = f(0.5 * (x0 + x1));
    const double est = (x1 - x0) / 6.0 * (f0 + 4.0 * fmid + f1);
    sum += simpson_step(st, x0, x1, f0, fmid, f1, est, tol / pieces, max_depth);
  }
  return sum;
}

// int_0^x (x - s)^k / k! g(s) ds, the k+1 fold iterated integral of g.
double ZeroResolventSolution::integral(const std::function<double(double)>& g, double x, int power) const {
  if (!g || x == 0.0) return 0.0;
  const double kf = factorial(power);
  return adaptive_simpson([&](double s) { return std::pow(x - s, power) / kf * g(s); }, 0.0, x, tol_);
}

double ZeroResolventSolution::v1(double x) const { return f_.f1 ? f_.f1(x) : 0.0; }
double ZeroResolventSolution::v2(double x) const { return f_.f2 ? f_.f2(x) : 0.0; }

// gamma1 kappa1 theta1 = F1(x) + a1 x with
// F1(x) = int_0^x (delta1 f1 - gamma1 tau1 d1) + int_0^x (x - s) h1.
double ZeroResolventSolution::theta1(double x) const {
  const double F1 = p_.delta1 * integral(f_.f1, x, 0) - p_.gamma1 * p_.tau1 * integral(f_.d1, x, 0) +
                    integral(f_.h1, x, 1);
  return (F1 + a1 * x) / (p_.gamma1 * p_.kappa1);
}

double ZeroResolventSolution::theta1_x(double x) const {
  const double f1 = f_.f1 ? f_.f1(x) : 0.0;
  const double d1v = f_.d1 ? f_.d1(x) : 0.0;
  return (p_.delta1 * f1 - p_.gamma1 * p_.tau1 * d1v + integral(f_.h1, x, 0) + a1) / (p_.gamma1 * p_.kappa1);
}

// -gamma1 q1 = delta1 f1 + int_0^x h1 + a1
double ZeroResolventSolution::q1(double x) const {
  const double f1 = f_.f1 ? f_.f1(x) : 0.0;
  return -(p_.delta1 * f1 + integral(f_.h1, x, 0) + a1) / p_.gamma1;
}

// alpha1 u1_x - beta1 theta1 = int_0^x g1 + c1
double ZeroResolventSolution::u1_x(double x) const {
  return (p_.beta1 * theta1(x) + integral(f_.g1, x, 0) + c1) / p_.alpha1;
}

// alpha1 u1 = beta1 int_0^x theta1 + int_0^x (x - s) g1 + c1 x + d1, with
// int_0^x theta1 written as a single integral by Cauchy's formula.
double ZeroResolventSolution::u1(double x) const {
  const double theta_int = (p_.delta1 * integral(f_.f1, x, 1) - p_.gamma1 * p_.tau1 * integral(f_.d1, x, 1) +
                            integral(f_.h1, x, 2) + 0.5 * a1 * x * x) /
                           (p_.gamma1 * p_.kappa1);
  return (p_.beta1 * theta_int + integral(f_.g1, x, 1) + c1 * x + d1) / p_.alpha1;
}

// alpha2 u2 = -int_0^x (x - s)^3 / 6 g2 + c2 x^3 / 6 + d2 x^2 / 2 + n2 x + m2
double ZeroResolventSolution::u2(double x, int k) const {
  switch (k) {
    case 0:
      return (-integral(f_.g2, x, 3) + c2 * x * x * x / 6.0 + 0.5 * d2 * x * x + n2 * x + m2) / p_.alpha2;
    case 1:
      return (-integral(f_.g2, x, 2) + 0.5 * c2 * x * x + d2 * x + n2) / p_.alpha2;
    case 2:
      return (-integral(f_.g2, x, 1) + c2 * x + d2) / p_.alpha2;
    case 3:
      return (-integral(f_.g2, x, 0) + c2) / p_.alpha2;
    default:
      throw PreconditionViolation("u2 derivative order must be 0..3");
  }
}

ZeroResolventSolution zero_resolvent_s1(const ValidatedParams& vp, const ZeroResolventData& f) {
  ZeroResolventSolution sol;
  sol.p_ = vp.raw();
  sol.f_ = f;
  const MaterialParams& p = sol.p_;
  const double l1 = p.ell1, l2 = p.ell2;

  // theta1(0) = theta1(l1) = 0 gives b1 = 0 and a1 = -F1(l1) / l1.
  sol.a1 = 0.0;
  const double F1_end = p.gamma1 * p.kappa1 * sol.theta1(l1);
  sol.a1 = -F1_end / l1;

  // Beam conditions: u2_x(0) = 0, u2(l2) = 0, u2_xx(l2) = 0.
  sol.n2 = 0.0;
  const double gamma2int = sol.integral(f.g2, l2, 3);  // Gamma_2
  const double gamma3int = sol.integral(f.g2, l2, 1);  // Gamma_3
  // Force balance alpha2 u2_xxx(0) = K u1_x(0) with K = (delta1/beta1) alpha1
  // and alpha1 u1_x(0) = c1 (theta1(0) = 0), so c2 = k c1 with k = K / alpha1.
  const double k = vp.interface_force_coefficient(SystemKind::ThermoStringElasticBeam) / p.alpha1;
  // d2 = Gamma_3 - c2 l2 and m2 = Gamma_2 - c2 l2^3 / 6 - d2 l2^2 / 2, so
  // m2 = (Gamma_2 - Gamma_3 l2^2 / 2) + k c1 l2^3 / 3.
  const double m2_0 = gamma2int - 0.5 * gamma3int * l2 * l2;
  const double m2_1 = k * l2 * l2 * l2 / 3.0;
  // Continuity u1(0) = u2(0): d1 / alpha1 = m2 / alpha2.
  const double r = p.alpha1 / p.alpha2;
  // u1(l1) = 0: beta1 Theta(l1) + G(l1) + c1 l1 + d1 = 0, where Theta is the
  // primitive of theta1 and G the double primitive of g1.
  sol.c1 = 0.0;
  sol.d1 = 0.0;
  const double base = p.alpha1 * sol.u1(l1);  // value with c1 = d1 = 0
  sol.c1 = -(base + r * m2_0) / (l1 + r * m2_1);
  sol.m2 = m2_0 + m2_1 * sol.c1;
  sol.d1 = r * sol.m2;
  sol.c2 = k * sol.c1;
  sol.d2 = gamma3int - sol.c2 * l2;
  return sol;
}

}  // namespace sslab
