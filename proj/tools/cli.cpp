#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "experiment.hpp"

namespace sslab::cli {

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericExit = 3;

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
}

bool is_input_error(const Error& e) {
  return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const NonPositiveParameter*>(&e) ||
         dynamic_cast<const PreconditionViolation*>(&e) || dynamic_cast<const DimensionMismatch*>(&e);
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for coupled string/beam transmission problems with Cattaneo heat flux"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::optional<std::uint64_t> seed;
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON experiment config");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "seed, overrides the config value");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const ExperimentConfig c = parse_config(load_config(config_path), seed);
    std::cout << run_command(command, c, out_dir);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_input_error(e) ? kConfigExit : kNumericExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace sslab::cli
