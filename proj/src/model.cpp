#include "sslab/model.hpp"

#include <cmath>

#include "sslab/errors.hpp"

namespace sslab {

std::string_view to_string(SystemKind kind) {
  return kind == SystemKind::ThermoStringElasticBeam ? "S1" : "S2";
}

SystemKind system_kind_from_string(std::string_view name) {
  if (name == "S1" || name == "thermo_string_elastic_beam") return SystemKind::ThermoStringElasticBeam;
  if (name == "S2" || name == "elastic_string_thermo_beam") return SystemKind::ElasticStringThermoBeam;
  throw ConfigError("unknown system kind '" + std::string(name) + "' (expected S1 or S2)");
}

double& MaterialParams::field(std::size_t i) {
  double* fields[] = {&alpha1, &beta1, &gamma1, &delta1, &tau1, &kappa1, &alpha2,
                      &beta2,  &gamma2, &delta2, &tau2,  &kappa2, &ell1,  &ell2};
  return *fields[i];
}

double MaterialParams::field(std::size_t i) const { return const_cast<MaterialParams*>(this)->field(i); }

ValidatedParams validate_params(const MaterialParams& p) {
  for (std::size_t i = 0; i < MaterialParams::kFieldNames.size(); ++i) {
    const double v = p.field(i);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw NonPositiveParameter(std::string(MaterialParams::kFieldNames[i]));
    }
  }
  return ValidatedParams(p);
}

ValidatedParams::HeatConstants ValidatedParams::heat(SystemKind kind) const {
  if (kind == SystemKind::ThermoStringElasticBeam) return {p_.gamma1, p_.kappa1, p_.tau1, p_.delta1, p_.beta1};
  return {p_.gamma2, p_.kappa2, p_.tau2, p_.delta2, p_.beta2};
}

double ValidatedParams::interface_force_coefficient(SystemKind kind) const {
  if (kind == SystemKind::ThermoStringElasticBeam) return p_.delta1 / p_.beta1 * p_.alpha1;
  return p_.beta2 / p_.delta2 * p_.alpha1;
}

WeightSet energy_weights(const ValidatedParams& vp, SystemKind kind) {
  const MaterialParams& p = vp.raw();
  if (kind == SystemKind::ThermoStringElasticBeam) {
    return WeightSet{p.delta1 / p.beta1, p.delta1 * p.alpha1 / p.beta1, 1.0, p.alpha2, 1.0,
                     p.gamma1 * p.tau1 / p.kappa1};
  }
  return WeightSet{1.0, p.alpha1, p.delta2 / p.beta2, p.delta2 * p.alpha2 / p.beta2, 1.0,
                   p.gamma2 * p.tau2 / p.kappa2};
}

}  // namespace sslab
