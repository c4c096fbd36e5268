#include <cmath>
#include "doctest.h"
#include "sslab/errors.hpp"
#include "sslab/model.hpp"

using namespace sslab;

TEST_CASE("default parameters validate") {
  MaterialParams p;
  const auto v = validate_params(p);
  CHECK(v->alpha1 == 1.0);
  CHECK(v->ell1 == doctest::Approx(3.141592653589793));
  CHECK(v->ell2 == doctest::Approx(3.141592653589793));
}

TEST_CASE("non-positive fields are named") {
  MaterialParams p;
  p.tau2 = 0.0;
  try {
    validate_params(p);
    FAIL("expected NonPositiveParameter");
  } catch (const NonPositiveParameter& e) {
    CHECK(std::string(e.what()).find("tau2") != std::string::npos);
  }
  MaterialParams q;
  q.alpha1 = -1.0;
  CHECK_THROWS_WITH_AS(validate_params(q), doctest::Contains("alpha1"), NonPositiveParameter);
  MaterialParams r;
  r.ell2 = std::nan("");
  CHECK_THROWS_AS(validate_params(r), NonPositiveParameter);
}

TEST_CASE("energy weights") {
  MaterialParams p;
  auto w = energy_weights(validate_params(p), SystemKind::ThermoStringElasticBeam);
  for (double x : {w.string_velocity, w.string_strain, w.beam_velocity, w.beam_curvature, w.theta, w.flux})
    CHECK(x == 1.0);

  p.delta1 = 2;
  p.beta1 = 4;
  p.alpha1 = 3;
  w = energy_weights(validate_params(p), SystemKind::ThermoStringElasticBeam);
  CHECK(w.string_velocity == doctest::Approx(0.5));
  CHECK(w.string_strain == doctest::Approx(1.5));

  MaterialParams s;
  s.gamma2 = 3;
  s.tau2 = 2;
  s.kappa2 = 6;
  w = energy_weights(validate_params(s), SystemKind::ElasticStringThermoBeam);
  CHECK(w.flux == doctest::Approx(1.0));
}

TEST_CASE("interface force coefficient") {
  MaterialParams p;
  p.delta1 = 3;
  p.beta1 = 2;
  p.alpha1 = 5;
  p.beta2 = 7;
  p.delta2 = 4;
  const auto v = validate_params(p);
  CHECK(v.interface_force_coefficient(SystemKind::ThermoStringElasticBeam) == doctest::Approx(7.5));
  CHECK(v.interface_force_coefficient(SystemKind::ElasticStringThermoBeam) == doctest::Approx(7.0 / 4.0 * 5.0));
}

TEST_CASE("system kind names") {
  CHECK(system_kind_from_string("S1") == SystemKind::ThermoStringElasticBeam);
  CHECK(system_kind_from_string("S2") == SystemKind::ElasticStringThermoBeam);
  CHECK(to_string(SystemKind::ElasticStringThermoBeam) == "S2");
  CHECK_THROWS_AS(system_kind_from_string("S3"), ConfigError);
}
