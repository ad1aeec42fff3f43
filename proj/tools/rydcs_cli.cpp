// Command-line front end: run a JSON config, run a preset, or batch the
// preparation-sweep table.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rydcs/run_config.hpp"

namespace {

int report_error(const char* kind, const std::exception& e, int code) {
  const nlohmann::json err = {{"error", {{"type", kind}, {"message", e.what()}}}};
  std::cerr << err.dump() << '\n';
  return code;
}

void print_summary(const nlohmann::json& summary) {
  std::cout << "final t_us=" << summary["final"]["t_us"] << " norm=" << summary["final"]["norm"];
  for (const auto& [label, p] : summary["final"]["probabilities"].items())
    std::cout << " p_" << label << '=' << p;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent-state propagation of driven Rydberg chains"};
  app.require_subcommand(1);

  std::string compare_csv;
  app.add_option("--compare", compare_csv, "Reference trajectory CSV to compare against");

  auto* run_cmd = app.add_subcommand("run", "Execute a JSON run configuration");
  std::string config_path;
  run_cmd->fallthrough();
  run_cmd->add_option("config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);

  auto* preset_cmd = app.add_subcommand("preset", "Run one of the shipped scenarios");
  std::string preset_name;
  int sites = 7;
  std::string basis = "all";
  std::string projector = "off";
  std::string engine = "coherent";
  std::string out_dir = "out";
  double step_us = 0.0;
  std::string method;
  double tolerance = 0.0;
  preset_cmd->fallthrough();
  preset_cmd->add_option("name", preset_name, "quench-z2 or preparation-sweep")
      ->required()
      ->check(CLI::IsMember({"quench-z2", "preparation-sweep"}));
  preset_cmd->add_option("--m", sites, "Chain length")->required();
  preset_cmd->add_option("--basis", basis, "Basis subset")->check(CLI::IsMember({"all", "iso", "pair"}));
  preset_cmd->add_option("--projector", projector, "Periodic projection")->check(CLI::IsMember({"on", "off"}));
  preset_cmd->add_option("--engine", engine, "coherent or exact")->check(CLI::IsMember({"coherent", "exact"}));
  preset_cmd->add_option("--step", step_us, "Integrator step in us (default from preset)");
  preset_cmd->add_option("--method", method, "Integrator")->check(CLI::IsMember({"fixed-rk4", "adaptive-rk4"}));
  preset_cmd->add_option("--tolerance", tolerance, "Adaptive local tolerance");
  preset_cmd->add_option("--out", out_dir, "Output directory");

  auto* table_cmd = app.add_subcommand("table1", "Z2 population after the sweep for M = 2..7, all basis modes");
  std::string table_dir = "out";
  rydcs::Table1Options table_options;
  table_cmd->add_option("--out", table_dir, "Output directory");
  table_cmd->add_option("--min-m", table_options.min_sites, "Smallest chain");
  table_cmd->add_option("--max-m", table_options.max_sites, "Largest chain");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      auto config = rydcs::load_run_config(config_path);
      if (!compare_csv.empty()) config.reference_csv = compare_csv;
      print_summary(rydcs::execute(config).summary);
    } else if (*preset_cmd) {
      std::vector<std::string> warnings;
      auto config = rydcs::preset(rydcs::parse_scenario_kind(preset_name), sites,
                                  rydcs::parse_subset_kind(basis), projector == "on", &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
      config.engine = rydcs::parse_engine(engine);
      if (step_us > 0.0) config.integrator.step_us = step_us;
      if (!method.empty()) config.integrator.method = rydcs::parse_integrator_method(method);
      if (tolerance > 0.0) config.integrator.tolerance = tolerance;
      const std::filesystem::path dir(out_dir);
      std::filesystem::create_directories(dir);
      config.output.trajectory_csv = (dir / "trajectory.csv").string();
      config.output.summary_json = (dir / "summary.json").string();
      if (!compare_csv.empty()) config.reference_csv = compare_csv;
      rydcs::save_run_config(config, dir / "config.json");
      print_summary(rydcs::execute(config).summary);
    } else if (*table_cmd) {
      const auto table = rydcs::run_table1(table_options);
      const std::filesystem::path dir(table_dir);
      std::filesystem::create_directories(dir);
      std::ofstream(dir / "table1.json") << table.dump(2) << '\n';
      for (const auto& row : table["rows"]) {
        std::cout << "M=" << row["M"] << " C_tot=" << row["C_tot"]["population"];
        for (const char* col : {"C_pair_tilde", "C_iso", "C_pair_tilde+P", "C_iso+P"})
          std::cout << ' ' << col << '=' << row[col]["population"];
        std::cout << '\n';
      }
    }
  } catch (const rydcs::ConfigError& e) {
    return report_error("config", e, 2);
  } catch (const rydcs::RankCollapseError& e) {
    return report_error("rank_collapse", e, 3);
  } catch (const rydcs::NumericalError& e) {
    return report_error("numerical", e, 3);
  } catch (const std::exception& e) {
    return report_error("runtime", e, 1);
  }
  return 0;
}
