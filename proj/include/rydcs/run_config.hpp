#pragma once

// Declarative run description, scenario presets, and file outputs.

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rydcs/basis_sampling.hpp"
#include "rydcs/core_model.hpp"
#include "rydcs/propagation.hpp"
#include "rydcs/trajectory.hpp"

namespace rydcs {

class ConfigError : public Error {
  using Error::Error;
};

/// Which propagator executes the run.
enum class Engine {
  Coherent,  // time-dependent coherent basis
  Exact,     // fixed complete classical basis
};

std::string_view to_string(Engine engine) noexcept;
Engine parse_engine(std::string_view text);

inline constexpr double kTwoPi = 6.283185307179586;

namespace scenario_constants {
inline constexpr double kRabi = kTwoPi * 2.0;         // rad/us
inline constexpr double kCoupling = kTwoPi * 24.0;    // rad/us, nearest neighbour
inline constexpr std::array<double, 4> kDetuningSweep{-101.0, 205.0, -136.0, 30.0};
inline constexpr double kQuenchDuration = 2.0;        // us
inline constexpr double kSweepDuration = 3.0;         // us
inline constexpr double kProjectionInterval = 0.1;    // us
inline constexpr double kSampleInterval = 0.01;       // us
inline constexpr double kPresetTolerance = 1e-6;      // adaptive RK4 local tolerance
}  // namespace scenario_constants

struct OutputPaths {
  std::string trajectory_csv;
  std::string summary_json;
  friend bool operator==(const OutputPaths&, const OutputPaths&) = default;
};

struct RunConfig {
  ScenarioKind scenario = ScenarioKind::Custom;
  Engine engine = Engine::Coherent;
  int m = 2;
  DriveSchedule rabi;
  DriveSchedule detuning;
  RealMatrix interaction;
  std::string initial = "G";
  SubsetKind basis = SubsetKind::All;
  double t_max_us = 1.0;
  double sample_interval_us = scenario_constants::kSampleInterval;
  IntegratorSettings integrator;
  ProjectionSettings projection;
  std::vector<std::string> tracked;
  OutputPaths output;
  std::optional<std::string> reference_csv;

  ChainModel chain() const;
  ScenarioSpec scenario_spec() const;
  std::vector<ClassicalConfiguration> tracked_configurations() const;

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

/// "G", "Z2", "Z2p" or an explicit g/r string with site 0 first.
ClassicalConfiguration resolve_configuration(std::string_view label, int m);

nlohmann::json to_json(const RunConfig& config);
/// Strict: unknown or missing keys raise ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& config, const std::filesystem::path& path);

/// Ready-to-run configuration for one of the two shipped scenarios. Chain
/// lengths outside 2..7 are accepted and reported through `warnings`.
RunConfig preset(ScenarioKind name, int m, SubsetKind basis, bool projector,
                 std::vector<std::string>* warnings = nullptr);

/// Shortest round-trip decimal form; "inf"/"nan" for non-finite values.
std::string format_double(double value);

/// Column-wise deviations of a trajectory from a reference CSV, matched on t_us.
struct ColumnDeviation {
  std::string column;
  double max_abs = 0.0;
  double final_abs = 0.0;
};

struct Comparison {
  std::string reference;
  std::size_t matched_rows = 0;
  std::vector<ColumnDeviation> columns;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);
std::string trajectory_csv(const TrajectoryRecord& record, std::span<const std::string> labels);
Comparison compare_tables(const CsvTable& run, const CsvTable& reference, std::string name);

struct ExecuteResult {
  TrajectoryRecord record;
  nlohmann::json summary;
};

/// Runs the configuration and writes the trajectory CSV and summary JSON
/// (empty paths skip the corresponding file).
ExecuteResult execute(const RunConfig& config);

/// Z2 population at the end of the preparation sweep for every chain length
/// and basis mode, in one document.
struct Table1Options {
  int min_sites = 2;
  int max_sites = 7;
  double coherent_step_us = 1e-3;
  double exact_step_us = 5e-5;
};

nlohmann::json run_table1(const Table1Options& options);

}  // namespace rydcs
