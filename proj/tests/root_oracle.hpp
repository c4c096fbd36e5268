#pragma once

// Companion-matrix reference for the characteristic sextic.

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "sslab/analytic.hpp"

namespace oracle {

// Roots of a z^6 - i w L b z^4 - c w^2 z^2 + i w^3 L from the companion matrix.
inline Eigen::VectorXcd sextic_companion_roots(const sslab::CharacteristicCoefficients& cc, double w) {
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> L(1.0, cc.tau2 * w);
  // monic coefficients of z^0 .. z^5
  std::array<std::complex<double>, 6> c = {i * w * w * w * L / cc.a, 0.0, -cc.c * w * w / cc.a, 0.0, -i * w * L * cc.b / cc.a, 0.0};
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(6, 6);
  for (int k = 1; k < 6; ++k) m(k, k - 1) = 1.0;
  for (int k = 0; k < 6; ++k) m(k, 5) = -c[k];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
  Eigen::VectorXcd ev = es.eigenvalues();
  // The unbalanced companion matrix costs digits; polish each eigenvalue by
  // Newton's method on the polynomial in long double.
  using lc = std::complex<long double>;
  for (int j = 0; j < 6; ++j) {
    lc z = ev[j];
    for (int it = 0; it < 4; ++it) {
      lc f = 1.0L, df = 0.0L;
      for (int k = 5; k >= 0; --k) {
        df = df * z + f;
        f = f * z + lc(c[k]);
      }
      if (std::abs(df) == 0.0L) break;
      z -= f / df;
    }
    ev[j] = std::complex<double>(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  return ev;
}

}  // namespace oracle
