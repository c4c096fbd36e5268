#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "sslab/discretization.hpp"

namespace sslab {

// Implicit midpoint rule y+ = (I - dt/2 A)^{-1} (I + dt/2 A) y with the
// shifted operator factored once.
class MidpointStepper {
 public:
  MidpointStepper(const BlockGenerator& g, double dt);

  double dt() const { return dt_; }
  const BlockGenerator& generator() const { return *g_; }

  StateVector<double> step(const StateVector<double>& y) const;
  // Interleaved in-place variant used by the simulation loop.
  void step_internal(std::vector<double>& x, std::vector<double>& work) const;

 private:
  const BlockGenerator* g_;
  double dt_;
  linalg::BandedMatrix<double> plus_;
  linalg::LUFactors<double> minus_lu_;
};

// Single step; factors the shifted operator on every call.
StateVector<double> step_implicit_midpoint(const BlockGenerator& g, const StateVector<double>& y, double dt);

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energies;
  std::vector<double> dissipations;
  SystemKind kind = SystemKind::ThermoStringElasticBeam;
  MaterialParams params;
  double dt = 0.0;
  // dt times the sum of dissipation at every step midpoint up to each sample,
  // so energies[0] - energies[k] should equal dissipated[k].
  std::vector<double> dissipated;
};

// Samples every `stride` steps, starting with t = 0. The final sample is
// the last step with t <= t_end.
EnergyTrace simulate(const BlockGenerator& g, const StateVector<double>& y0, double dt, double t_end,
                     std::size_t stride = 1);

// Same, also returning the final state.
EnergyTrace simulate(const BlockGenerator& g, const StateVector<double>& y0, double dt, double t_end,
                     std::size_t stride, StateVector<double>* final_state);

enum class DecayModel { Exponential, Polynomial };
std::string_view to_string(DecayModel m);

struct CandidateFit {
  DecayModel model;
  double rate = 0.0;       // E ~ exp(-rate t) or E ~ t^(-rate)
  double intercept = 0.0;  // of the transformed line
  double r_squared = 0.0;
};

struct FitWindow {
  double t_begin = 0.0;
  double t_end = 0.0;
};

struct DecayFit {
  DecayModel model = DecayModel::Exponential;
  double rate = 0.0;
  double r_squared = 0.0;
  FitWindow window;
  std::size_t samples = 0;
  CandidateFit exponential;
  CandidateFit polynomial;
};

// Least-squares fits of log E against t and against log t on the window
// (default [t_last/10, t_last]); the better R^2 wins.
DecayFit fit_decay(const EnergyTrace& trace, std::optional<FitWindow> window = std::nullopt);

struct Modal {
  enum class Field { Displacement, Velocity };
  int k = 1;
  Field field = Field::Displacement;
};
struct RandomSeeded {
  std::uint64_t seed = 0;
};
struct InterfaceBump {
  double width = 0.0;  // 0 -> min(l1, l2) / 8
};
using InitialRecipe = std::variant<Modal, RandomSeeded, InterfaceBump>;

// A state obeying every essential constraint by construction, scaled to E = 1.
//   Modal{k}: u1 = sin(k pi x / l1), everything else zero; with
//     Field::Velocity the profile goes into v1 instead
//   RandomSeeded: independent standard normal entries
//   InterfaceBump: u_j = exp(-(x/w)^2) (1 - (x/l_j)^2) on both components
StateVector<double> make_initial_data(const BlockGenerator& g, const InitialRecipe& recipe);

// CSV with header `t,E,D`, 17 significant digits.
void write_trace_csv(const EnergyTrace& trace, std::ostream& out);

}  // namespace sslab
