#include <algorithm>
#include <cmath>
#include <set>

#include "experiment.hpp"

namespace sslab::cli {

namespace {

// Reads keys from one JSON object and remembers which ones were consumed,
// so that anything left over can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where(key) + " has the wrong type");
    }
  }

  void get_count(const std::string& key, std::size_t& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(where(key) + " must be a non-negative integer");
    out = v.get<std::size_t>();
  }

  void get_counts(const std::string& key, std::vector<std::size_t>& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + " must be an array");
    out.clear();
    for (const json& e : v) {
      if (!e.is_number_integer() || e.get<long long>() <= 0) throw ConfigError(where(key) + " entries must be positive integers");
      out.push_back(e.get<std::size_t>());
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  std::optional<Section> sub(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return Section(j_.at(key), where(key));
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key " + where(key));
    }
  }

  std::string where(const std::string& key = "") const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ShiftRule rule_from_string(const std::string& s, const std::string& where) {
  if (s == "uncorrected") return ShiftRule::Uncorrected;
  if (s == "tangent_corrected") return ShiftRule::TangentCorrected;
  throw ConfigError(where + " must be 'uncorrected' or 'tangent_corrected'");
}

std::string rule_name(ShiftRule r) { return r == ShiftRule::Uncorrected ? "uncorrected" : "tangent_corrected"; }

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

ExperimentConfig parse_config(const json& j, std::optional<std::uint64_t> seed) {
  ExperimentConfig c;
  Section root(j, "");

  std::string system = "S1";
  root.get("system", system);
  c.system = system_kind_from_string(system);

  if (auto s = root.sub("params")) {
    for (std::size_t i = 0; i < MaterialParams::kFieldNames.size(); ++i) {
      s->get(std::string(MaterialParams::kFieldNames[i]), c.params.field(i));
    }
    s->finish();
  }
  try {
    validate_params(c.params);
  } catch (const NonPositiveParameter& e) {
    throw ConfigError("params: " + std::string(e.what()));
  }

  if (auto s = root.sub("grid")) {
    if (s->has("n")) {
      s->get_count("n", c.n1);
      c.n2 = c.n1;
    }
    s->get_count("n1", c.n1);
    s->get_count("n2", c.n2);
    s->finish();
  }
  require(c.n1 >= 4 && c.n2 >= 4, "grid sizes must be at least 4");

  c.seed = 0;
  root.get("seed", c.seed);
  if (seed) c.seed = *seed;
  int threads = 0;
  root.get("threads", threads);
  require(threads >= 0, "threads must be >= 0");
  c.threads = static_cast<unsigned>(threads);

  if (auto s = root.sub("integrator")) {
    s->get("dt", c.integrator.dt);
    s->get("t_end", c.integrator.t_end);
    s->get_count("stride", c.integrator.stride);
    s->finish();
  }
  require(positive(c.integrator.dt), "integrator.dt must be > 0");
  require(positive(c.integrator.t_end), "integrator.t_end must be > 0");
  require(c.integrator.t_end >= c.integrator.dt, "integrator.t_end must be at least one step");
  require(c.integrator.stride >= 1, "integrator.stride must be >= 1");

  const bool s1 = c.system == SystemKind::ThermoStringElasticBeam;
  c.initial.recipe = s1 ? "modal" : "bump";
  c.initial.field = s1 ? "velocity" : "displacement";
  if (auto s = root.sub("initial")) {
    s->get("recipe", c.initial.recipe);
    s->get("k", c.initial.k);
    s->get("field", c.initial.field);
    s->get("width", c.initial.width);
    s->finish();
  }
  require(c.initial.recipe == "modal" || c.initial.recipe == "random" || c.initial.recipe == "bump",
          "initial.recipe must be modal, random or bump");
  require(c.initial.field == "displacement" || c.initial.field == "velocity",
          "initial.field must be displacement or velocity");
  require(c.initial.k >= 1, "initial.k must be >= 1");
  require(c.initial.width >= 0.0, "initial.width must be >= 0");

  if (auto s = root.sub("fit")) {
    s->get("t_begin", c.fit.t_begin);
    s->get("t_end", c.fit.t_end);
    s->finish();
  }
  if (c.fit.t_begin == 0.0 && c.fit.t_end == 0.0) {
    c.fit.t_begin = c.integrator.t_end / 10.0;
    c.fit.t_end = c.integrator.t_end;
  }
  require(c.fit.t_begin >= 0.0 && c.fit.t_end > c.fit.t_begin, "fit window must satisfy 0 <= t_begin < t_end");

  c.scan.beta_min = s1 ? 1.0 : 10.0;
  c.scan.beta_max = s1 ? 500.0 : 1000.0;
  if (auto s = root.sub("scan")) {
    s->get("beta_min", c.scan.beta_min);
    s->get("beta_max", c.scan.beta_max);
    s->get_count("count", c.scan.count);
    s->get("refine_peaks", c.scan.refine_peaks);
    s->get("points_per_wavelength", c.scan.points_per_wavelength);
    s->finish();
  }
  require(positive(c.scan.beta_min) && c.scan.beta_max > c.scan.beta_min, "scan range must satisfy 0 < beta_min < beta_max");
  require(c.scan.count >= 1, "scan.count must be >= 1");
  require(positive(c.scan.points_per_wavelength), "scan.points_per_wavelength must be > 0");

  if (auto s = root.sub("eigen")) {
    s->get("shift_min", c.eigen.shift_min);
    s->get("shift_max", c.eigen.shift_max);
    s->get("shift_step", c.eigen.shift_step);
    s->get_count("k_per_shift", c.eigen.k_per_shift);
    s->get_counts("abscissa_n", c.eigen.abscissa_n);
    s->get("sigma_max", c.eigen.sigma_max);
    s->get("conservative_core", c.eigen.conservative_core);
    s->finish();
  }
  require(c.eigen.shift_min >= 0.0 && c.eigen.shift_max >= c.eigen.shift_min && positive(c.eigen.shift_step),
          "eigen shifts must satisfy 0 <= shift_min <= shift_max and shift_step > 0");
  require(c.eigen.k_per_shift >= 1, "eigen.k_per_shift must be >= 1");
  require(!c.eigen.abscissa_n.empty() && std::is_sorted(c.eigen.abscissa_n.begin(), c.eigen.abscissa_n.end()) &&
              std::adjacent_find(c.eigen.abscissa_n.begin(), c.eigen.abscissa_n.end()) == c.eigen.abscissa_n.end(),
          "eigen.abscissa_n must be nonempty and strictly increasing");
  require(positive(c.eigen.sigma_max), "eigen.sigma_max must be > 0");

  if (auto s = root.sub("roots")) {
    s->get("w", c.roots.w);
    s->finish();
  }
  require(!c.roots.w.empty(), "roots.w must be nonempty");
  for (double w : c.roots.w) require(positive(w), "roots.w entries must be > 0");

  if (auto s = root.sub("probe")) {
    std::string rule = rule_name(c.probe.rule), analytic = rule_name(c.probe.analytic_rule);
    s->get_count("count", c.probe.count);
    s->get("alpha_exponent", c.probe.alpha_exponent);
    s->get("rule", rule);
    s->get("analytic_rule", analytic);
    s->get("rel_tol", c.probe.rel_tol);
    s->get_count("max_cells", c.probe.max_cells);
    s->get_count("n", c.probe.n);
    s->finish();
    c.probe.rule = rule_from_string(rule, "probe.rule");
    c.probe.analytic_rule = rule_from_string(analytic, "probe.analytic_rule");
  }
  require(c.probe.count >= 2, "probe.count must be >= 2");
  require(c.probe.alpha_exponent >= 0.0, "probe.alpha_exponent must be >= 0");
  require(positive(c.probe.rel_tol), "probe.rel_tol must be > 0");
  require(c.probe.max_cells >= 64, "probe.max_cells must be >= 64");

  if (auto s = root.sub("zero_resolvent")) {
    s->get_counts("n_list", c.zero_resolvent.n_list);
    s->get("forcing", c.zero_resolvent.forcing);
    s->finish();
  }
  require(c.zero_resolvent.n_list.size() >= 2 &&
              std::is_sorted(c.zero_resolvent.n_list.begin(), c.zero_resolvent.n_list.end()) &&
              std::adjacent_find(c.zero_resolvent.n_list.begin(), c.zero_resolvent.n_list.end()) ==
                  c.zero_resolvent.n_list.end(),
          "zero_resolvent.n_list needs at least two strictly increasing sizes");
  require(c.zero_resolvent.forcing == "random" || c.zero_resolvent.forcing == "zero",
          "zero_resolvent.forcing must be random or zero");

  root.finish();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json params = json::object();
  for (std::size_t i = 0; i < MaterialParams::kFieldNames.size(); ++i) {
    params[std::string(MaterialParams::kFieldNames[i])] = c.params.field(i);
  }
  return json{
      {"system", std::string(to_string(c.system))},
      {"params", params},
      {"grid", {{"n1", c.n1}, {"n2", c.n2}}},
      {"seed", c.seed},
      {"threads", c.threads},
      {"integrator", {{"dt", c.integrator.dt}, {"t_end", c.integrator.t_end}, {"stride", c.integrator.stride}}},
      {"initial",
       {{"recipe", c.initial.recipe}, {"k", c.initial.k}, {"field", c.initial.field}, {"width", c.initial.width}}},
      {"fit", {{"t_begin", c.fit.t_begin}, {"t_end", c.fit.t_end}}},
      {"scan",
       {{"beta_min", c.scan.beta_min},
        {"beta_max", c.scan.beta_max},
        {"count", c.scan.count},
        {"refine_peaks", c.scan.refine_peaks},
        {"points_per_wavelength", c.scan.points_per_wavelength}}},
      {"eigen",
       {{"shift_min", c.eigen.shift_min},
        {"shift_max", c.eigen.shift_max},
        {"shift_step", c.eigen.shift_step},
        {"k_per_shift", c.eigen.k_per_shift},
        {"abscissa_n", c.eigen.abscissa_n},
        {"sigma_max", c.eigen.sigma_max},
        {"conservative_core", c.eigen.conservative_core}}},
      {"roots", {{"w", c.roots.w}}},
      {"probe",
       {{"count", c.probe.count},
        {"alpha_exponent", c.probe.alpha_exponent},
        {"rule", rule_name(c.probe.rule)},
        {"analytic_rule", rule_name(c.probe.analytic_rule)},
        {"rel_tol", c.probe.rel_tol},
        {"max_cells", c.probe.max_cells},
        {"n", c.probe.n}}},
      {"zero_resolvent", {{"n_list", c.zero_resolvent.n_list}, {"forcing", c.zero_resolvent.forcing}}},
  };
}

}  // namespace sslab::cli
