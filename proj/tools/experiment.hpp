#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sslab/analytic.hpp"
#include "sslab/evolution.hpp"
#include "sslab/model.hpp"
#include "sslab/spectral.hpp"

namespace sslab::cli {

using nlohmann::json;

// Resolved experiment settings. Every field has a default; fields that
// depend on the system kind are filled in by `parse_config`.
struct ExperimentConfig {
  SystemKind system = SystemKind::ThermoStringElasticBeam;
  MaterialParams params;
  std::size_t n1 = 256, n2 = 256;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  struct Integrator {
    double dt = 5e-3;
    double t_end = 100.0;
    std::size_t stride = 20;
  } integrator;

  struct Initial {
    std::string recipe;  // modal | random | bump
    int k = 1;
    std::string field;   // displacement | velocity
    double width = 0.0;
  } initial;

  struct Fit {
    double t_begin = 0.0, t_end = 0.0;  // 0, 0 -> [t_end / 10, t_end]
  } fit;

  struct Scan {
    double beta_min = 0.0, beta_max = 0.0;
    std::size_t count = 200;
    bool refine_peaks = true;
    double points_per_wavelength = 10.0;
  } scan;

  struct Eigen {
    double shift_min = 5.0, shift_max = 100.0, shift_step = 5.0;
    std::size_t k_per_shift = 6;
    std::vector<std::size_t> abscissa_n = {64, 128, 256};
    double sigma_max = 100.0;
    bool conservative_core = false;
  } eigen;

  struct Roots {
    std::vector<double> w = {1e2, 1e3, 1e4};
  } roots;

  struct Probe {
    std::size_t count = 6;
    double alpha_exponent = 0.0;
    ShiftRule rule = ShiftRule::Uncorrected;
    ShiftRule analytic_rule = ShiftRule::TangentCorrected;
    double rel_tol = 0.1;
    std::size_t max_cells = 8192;
    std::size_t n = 0;  // fixed-grid comparison; 0 -> probe_resolution(w_max)
  } probe;

  struct ZeroResolvent {
    std::vector<std::size_t> n_list = {32, 64, 128};
    std::string forcing = "random";  // random | zero
  } zero_resolvent;
};

// Throws ConfigError for unknown keys, wrong types and invalid ranges.
// `seed` overrides the config value when present.
ExperimentConfig parse_config(const json& j, std::optional<std::uint64_t> seed = std::nullopt);
json to_json(const ExperimentConfig& c);

const std::vector<std::string>& command_names();

// max/min of the log-log interpolated resolvent envelope on
// [beta_max / 10, beta_max].
double top_decade_ratio(const GrowthFit& fit, double beta_max);

// Runs one command, writing run.json, report.txt and the command's CSV and
// text files into `out`. Returns the report text.
std::string run_command(const std::string& command, const ExperimentConfig& c, const std::filesystem::path& out);

// Full command line front-end; returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace sslab::cli
