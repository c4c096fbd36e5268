#pragma once

#include <array>
#include <string>
#include <string_view>

namespace sslab {

// Which component carries the Cattaneo heat pair (theta, q).
enum class SystemKind {
  ThermoStringElasticBeam,  // S1: heat on the string
  ElasticStringThermoBeam,  // S2: heat on the beam
};

std::string_view to_string(SystemKind kind);
SystemKind system_kind_from_string(std::string_view name);

// Material constants for the string (index 1) and the beam (index 2).
// The heat constants of the undamped component are carried but unused.
struct MaterialParams {
  double alpha1 = 1.0, beta1 = 1.0, gamma1 = 1.0, delta1 = 1.0, tau1 = 1.0, kappa1 = 1.0;
  double alpha2 = 1.0, beta2 = 1.0, gamma2 = 1.0, delta2 = 1.0, tau2 = 1.0, kappa2 = 1.0;
  double ell1 = 3.14159265358979323846, ell2 = 3.14159265358979323846;

  static constexpr std::array<std::string_view, 14> kFieldNames = {
      "alpha1", "beta1", "gamma1", "delta1", "tau1", "kappa1", "alpha2",
      "beta2",  "gamma2", "delta2", "tau2",  "kappa2", "ell1",  "ell2"};

  double& field(std::size_t i);
  double field(std::size_t i) const;
};

// Parameters that passed validation; only `validate_params` constructs one.
class ValidatedParams {
 public:
  const MaterialParams& raw() const { return p_; }
  const MaterialParams* operator->() const { return &p_; }

  // Heat-pair constants of the damped component.
  struct HeatConstants {
    double gamma, kappa, tau, delta, beta;
  };
  HeatConstants heat(SystemKind kind) const;

  // Coefficient multiplying the string tension in the interface force balance:
  // S1: alpha2 u2_xxx(0) = (delta1/beta1) alpha1 u1_x(0)
  // S2: (alpha2 u2_xxx(0) - beta2 theta2_x(0)) = (beta2/delta2) alpha1 u1_x(0)
  double interface_force_coefficient(SystemKind kind) const;

 private:
  friend ValidatedParams validate_params(const MaterialParams& p);
  explicit ValidatedParams(const MaterialParams& p) : p_(p) {}
  MaterialParams p_;
};

// Throws NonPositiveParameter naming the first field that is not > 0.
ValidatedParams validate_params(const MaterialParams& p);

// Per-block energy weights. `string_velocity` multiplies |u1_t|^2,
// `string_strain` |u1_x|^2, `beam_velocity` |u2_t|^2, `beam_curvature`
// |u2_xx|^2; the heat weights refer to the damped component.
struct WeightSet {
  double string_velocity, string_strain;
  double beam_velocity, beam_curvature;
  double theta, flux;
};

WeightSet energy_weights(const ValidatedParams& p, SystemKind kind);

}  // namespace sslab
