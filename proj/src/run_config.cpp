#include "rydcs/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rydcs {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::string_view where, const std::set<std::string>& required,
                const std::set<std::string>& optional = {}) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!required.contains(key) && !optional.contains(key))
      throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  for (const auto& key : required)
    if (!j.contains(key)) throw ConfigError(std::string(where) + ": missing key '" + key + "'");
}

template <typename T>
T get_as(const json& j, const std::string& key, std::string_view where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(where) + "." + key + ": " + e.what());
  }
}

json drive_to_json(const DriveSchedule& drive) {
  if (const auto* c = std::get_if<DriveSchedule::Constant>(&drive.form()))
    return {{"constant", c->value}};
  const auto& k = std::get<DriveSchedule::Cubic>(drive.form()).coefficients;
  return {{"cubic", {k[0], k[1], k[2], k[3]}}};
}

DriveSchedule drive_from_json(const json& j, std::string_view where) {
  if (!j.is_object() || j.size() != 1)
    throw ConfigError(std::string(where) + ": expected {\"constant\": v} or {\"cubic\": [a,b,c,d]}");
  if (j.contains("constant")) return DriveSchedule::constant(get_as<double>(j, "constant", where));
  if (j.contains("cubic")) {
    const auto k = get_as<std::vector<double>>(j, "cubic", where);
    if (k.size() != 4) throw ConfigError(std::string(where) + ".cubic: expected four coefficients");
    return DriveSchedule::cubic({k[0], k[1], k[2], k[3]});
  }
  throw ConfigError(std::string(where) + ": unknown drive form '" + j.begin().key() + "'");
}

template <typename Fn>
auto translate(Fn&& fn, std::string_view where) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(where) + ": " + e.what());
  }
}

bool same_matrix(const RealMatrix& a, const RealMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

}  // namespace

std::string_view to_string(Engine engine) noexcept {
  return engine == Engine::Exact ? "exact" : "coherent";
}

Engine parse_engine(std::string_view text) {
  if (text == "coherent") return Engine::Coherent;
  if (text == "exact") return Engine::Exact;
  throw std::invalid_argument("unknown engine '" + std::string(text) + "' (expected coherent or exact)");
}

ClassicalConfiguration resolve_configuration(std::string_view label, int m) {
  if (label == "G") return ClassicalConfiguration::ground(m);
  if (label == "Z2") return ClassicalConfiguration::z2(m);
  if (label == "Z2p") return ClassicalConfiguration::z2_shifted(m);
  auto config = ClassicalConfiguration::from_string(label);
  if (config.sites() != m)
    throw std::invalid_argument("configuration '" + std::string(label) + "' has " +
                                std::to_string(config.sites()) + " sites, chain has " +
                                std::to_string(m));
  return config;
}

ChainModel RunConfig::chain() const { return ChainModel{m, rabi, detuning, interaction}; }

ScenarioSpec RunConfig::scenario_spec() const {
  ScenarioSpec spec;
  spec.kind = scenario;
  spec.chain = chain();
  spec.initial = resolve_configuration(initial, m);
  spec.basis = basis;
  spec.t_max_us = t_max_us;
  spec.sample_interval_us = sample_interval_us;
  return spec;
}

std::vector<ClassicalConfiguration> RunConfig::tracked_configurations() const {
  std::vector<ClassicalConfiguration> out;
  out.reserve(tracked.size());
  for (const auto& label : tracked) out.push_back(resolve_configuration(label, m));
  return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.scenario == b.scenario && a.engine == b.engine && a.m == b.m && a.rabi == b.rabi &&
         a.detuning == b.detuning && same_matrix(a.interaction, b.interaction) &&
         a.initial == b.initial && a.basis == b.basis && a.t_max_us == b.t_max_us &&
         a.sample_interval_us == b.sample_interval_us && a.integrator == b.integrator &&
         a.projection == b.projection && a.tracked == b.tracked && a.output == b.output &&
         a.reference_csv == b.reference_csv;
}

json to_json(const RunConfig& c) {
  json interaction = json::array();
  for (Eigen::Index i = 0; i < c.interaction.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < c.interaction.cols(); ++k) row.push_back(c.interaction(i, k));
    interaction.push_back(std::move(row));
  }
  json j = {
      {"scenario", std::string(to_string(c.scenario))},
      {"engine", std::string(to_string(c.engine))},
      {"sites", c.m},
      {"rabi_rad_per_us", drive_to_json(c.rabi)},
      {"detuning_rad_per_us", drive_to_json(c.detuning)},
      {"interaction_rad_per_us", interaction},
      {"initial", c.initial},
      {"basis", std::string(to_string(c.basis))},
      {"t_max_us", c.t_max_us},
      {"sample_interval_us", c.sample_interval_us},
      {"integrator",
       {{"step_us", c.integrator.step_us},
        {"method", to_string(c.integrator.method)},
        {"regularization_cutoff", c.integrator.regularization_cutoff},
        {"tolerance", c.integrator.tolerance},
        {"max_halvings", c.integrator.max_halvings}}},
      {"projection",
       {{"enabled", c.projection.enabled},
        {"interval_us", c.projection.interval_us},
        {"target", std::string(to_string(c.projection.target))},
        {"renormalize", c.projection.renormalize}}},
      {"tracked_configurations", c.tracked},
      {"output",
       {{"trajectory_csv", c.output.trajectory_csv}, {"summary_json", c.output.summary_json}}},
  };
  if (c.reference_csv) j["reference_csv"] = *c.reference_csv;
  return j;
}

RunConfig run_config_from_json(const json& j) {
  check_keys(j, "config",
             {"scenario", "engine", "sites", "rabi_rad_per_us", "detuning_rad_per_us",
              "interaction_rad_per_us", "initial", "basis", "t_max_us", "sample_interval_us",
              "integrator", "projection", "tracked_configurations", "output"},
             {"reference_csv"});
  RunConfig c;
  c.scenario = translate([&] { return parse_scenario_kind(get_as<std::string>(j, "scenario", "config")); },
                         "config.scenario");
  c.engine = translate([&] { return parse_engine(get_as<std::string>(j, "engine", "config")); },
                       "config.engine");
  c.m = get_as<int>(j, "sites", "config");
  if (c.m < 1 || c.m > kMaxEnumerableSites)
    throw ConfigError("config.sites: must lie in [1, " + std::to_string(kMaxEnumerableSites) + "]");
  c.rabi = drive_from_json(j.at("rabi_rad_per_us"), "config.rabi_rad_per_us");
  c.detuning = drive_from_json(j.at("detuning_rad_per_us"), "config.detuning_rad_per_us");

  const auto rows = get_as<std::vector<std::vector<double>>>(j, "interaction_rad_per_us", "config");
  if (rows.size() != static_cast<std::size_t>(c.m))
    throw ConfigError("config.interaction_rad_per_us: expected " + std::to_string(c.m) + " rows");
  c.interaction = RealMatrix(c.m, c.m);
  for (int i = 0; i < c.m; ++i) {
    if (rows[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(c.m))
      throw ConfigError("config.interaction_rad_per_us: row " + std::to_string(i) + " has wrong length");
    for (int k = 0; k < c.m; ++k) c.interaction(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  }
  translate([&] { c.chain().validate(); return 0; }, "config.interaction_rad_per_us");

  c.initial = get_as<std::string>(j, "initial", "config");
  translate([&] { return resolve_configuration(c.initial, c.m); }, "config.initial");
  c.basis = translate([&] { return parse_subset_kind(get_as<std::string>(j, "basis", "config")); },
                      "config.basis");
  c.t_max_us = get_as<double>(j, "t_max_us", "config");
  c.sample_interval_us = get_as<double>(j, "sample_interval_us", "config");

  const json& integ = j.at("integrator");
  check_keys(integ, "config.integrator", {"step_us", "method", "regularization_cutoff"},
             {"tolerance", "max_halvings"});
  c.integrator.step_us = get_as<double>(integ, "step_us", "config.integrator");
  c.integrator.method = translate(
      [&] { return parse_integrator_method(get_as<std::string>(integ, "method", "config.integrator")); },
      "config.integrator.method");
  c.integrator.regularization_cutoff = get_as<double>(integ, "regularization_cutoff", "config.integrator");
  if (integ.contains("tolerance")) c.integrator.tolerance = get_as<double>(integ, "tolerance", "config.integrator");
  if (integ.contains("max_halvings"))
    c.integrator.max_halvings = get_as<int>(integ, "max_halvings", "config.integrator");
  translate([&] { c.integrator.validate(); return 0; }, "config.integrator");

  const json& proj = j.at("projection");
  check_keys(proj, "config.projection", {"enabled", "interval_us", "target", "renormalize"});
  c.projection.enabled = get_as<bool>(proj, "enabled", "config.projection");
  c.projection.interval_us = get_as<double>(proj, "interval_us", "config.projection");
  c.projection.target = translate(
      [&] { return parse_subset_kind(get_as<std::string>(proj, "target", "config.projection")); },
      "config.projection.target");
  c.projection.renormalize = get_as<bool>(proj, "renormalize", "config.projection");
  if (c.projection.enabled)
    translate([&] { c.projection.validate(c.integrator); return 0; }, "config.projection");

  c.tracked = get_as<std::vector<std::string>>(j, "tracked_configurations", "config");
  for (const auto& label : c.tracked) {
    translate([&] { return resolve_configuration(label, c.m); }, "config.tracked_configurations");
  }

  const json& out = j.at("output");
  check_keys(out, "config.output", {"trajectory_csv", "summary_json"});
  c.output.trajectory_csv = get_as<std::string>(out, "trajectory_csv", "config.output");
  c.output.summary_json = get_as<std::string>(out, "summary_json", "config.output");
  if (j.contains("reference_csv") && !j.at("reference_csv").is_null())
    c.reference_csv = get_as<std::string>(j, "reference_csv", "config");

  translate([&] { c.scenario_spec().validate(c.integrator); return 0; }, "config");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

void save_run_config(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file " + path.string());
  out << to_json(config).dump(2) << '\n';
}

RunConfig preset(ScenarioKind name, int m, SubsetKind basis, bool projector,
                 std::vector<std::string>* warnings) {
  namespace sc = scenario_constants;
  if (name == ScenarioKind::Custom) throw std::invalid_argument("no preset for the custom scenario");
  if (m < 1 || m > kMaxEnumerableSites)
    throw std::invalid_argument("preset chain length must lie in [1, " +
                                std::to_string(kMaxEnumerableSites) + "]");
  if ((m < 2 || m > 7) && warnings)
    warnings->push_back("chain length " + std::to_string(m) +
                        " is outside the 2..7 range of the reference scenarios");

  RunConfig c;
  c.scenario = name;
  c.m = m;
  c.basis = basis;
  c.rabi = DriveSchedule::constant(sc::kRabi);
  c.interaction = ChainModel::nearest_neighbor(m, c.rabi, c.rabi, sc::kCoupling).interaction;
  if (name == ScenarioKind::QuenchZ2) {
    c.detuning = DriveSchedule::constant(0.0);
    c.initial = "Z2";
    c.t_max_us = sc::kQuenchDuration;
  } else {
    c.detuning = DriveSchedule::cubic(sc::kDetuningSweep);
    c.initial = "G";
    c.t_max_us = sc::kSweepDuration;
  }
  c.sample_interval_us = sc::kSampleInterval;
  c.projection.enabled = projector;
  c.projection.interval_us = sc::kProjectionInterval;
  c.projection.target = basis;
  c.projection.renormalize = true;
  // Fixed 1e-3 steps cannot follow the fast transients of full bases beyond
  // three sites; presets adapt underneath the same maximum step.
  c.integrator.method = IntegratorMethod::AdaptiveRk4;
  c.integrator.tolerance = sc::kPresetTolerance;
  c.tracked = {"G", "Z2"};
  return c;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace rydcs
