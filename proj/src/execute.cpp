#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rydcs/exact_reference.hpp"
#include "rydcs/run_config.hpp"

namespace rydcs {

using nlohmann::json;

namespace {

constexpr double kTimeMatchTolerance = 1e-9;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, const std::filesystem::path& path) {
  if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw ConfigError("CSV " + path.string() + ": cannot parse '" + cell + "' as a number");
  return v;
}

void write_file(const std::string& path, const std::string& contents) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << contents;
  if (!out) throw ConfigError("failed writing " + path);
}

json json_number(double v) {
  // JSON has no inf/nan; keep them as strings.
  if (!std::isfinite(v)) return format_double(v);
  return v;
}

json basis_sizes(int m, std::size_t n) {
  return {{"N", n},
          {"C_tot", count_closed_form(SubsetKind::All, m)},
          {"C_iso", count_closed_form(SubsetKind::Isolated, m)},
          {"C_pair", count_single_pair_closed_form(m)},
          {"C_pair_tilde", count_closed_form(SubsetKind::IsolatedPlusSinglePair, m)}};
}

TrajectoryRecord run_record(const RunConfig& config) {
  const ScenarioSpec spec = config.scenario_spec();
  const auto tracked = config.tracked_configurations();
  if (config.engine == Engine::Exact) {
    config.integrator.validate();
    spec.validate(config.integrator);
    return run_exact(DenseState::classical(spec.initial), spec.chain, spec.t_max_us,
                     config.integrator.step_us, spec.sample_interval_us, tracked);
  }
  return run(spec, config.integrator, config.projection, tracked);
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("CSV " + path.string() + " is empty");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != table.header.size())
      throw ConfigError("CSV " + path.string() + ": row width differs from header");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_cell(c, path));
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string trajectory_csv(const TrajectoryRecord& record, std::span<const std::string> labels) {
  if (labels.size() != record.tracked.size())
    throw std::invalid_argument("one label per tracked configuration required");
  std::string out = "t_us,norm,max_abs_xi,cond_gamma,dw_density";
  for (const auto& label : labels) out += ",p_" + label;
  out += '\n';
  for (const auto& s : record.samples) {
    const auto& o = s.observables;
    out += format_double(o.time_us) + ',' + format_double(o.norm) + ',' +
           format_double(s.max_abs_xi) + ',' + format_double(s.cond_gamma) + ',' +
           format_double(o.domain_wall_density);
    for (double p : o.probabilities) out += ',' + format_double(p);
    out += '\n';
  }
  return out;
}

Comparison compare_tables(const CsvTable& run, const CsvTable& reference, std::string name) {
  Comparison cmp;
  cmp.reference = std::move(name);
  auto column_of = [](const CsvTable& t, const std::string& key) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < t.header.size(); ++i)
      if (t.header[i] == key) return static_cast<std::ptrdiff_t>(i);
    return -1;
  };
  const auto run_t = column_of(run, "t_us");
  const auto ref_t = column_of(reference, "t_us");
  if (run_t < 0 || ref_t < 0) throw ConfigError("both CSV files need a t_us column");

  // Pair rows with equal times; both tables are sorted by time.
  std::vector<std::pair<std::size_t, std::size_t>> matches;
  std::size_t r = 0;
  for (std::size_t k = 0; k < run.rows.size(); ++k) {
    const double t = run.rows[k][static_cast<std::size_t>(run_t)];
    while (r < reference.rows.size() &&
           reference.rows[r][static_cast<std::size_t>(ref_t)] < t - kTimeMatchTolerance)
      ++r;
    if (r < reference.rows.size() &&
        std::abs(reference.rows[r][static_cast<std::size_t>(ref_t)] - t) <= kTimeMatchTolerance)
      matches.emplace_back(k, r);
  }
  cmp.matched_rows = matches.size();

  for (std::size_t c = 0; c < run.header.size(); ++c) {
    if (static_cast<std::ptrdiff_t>(c) == run_t) continue;
    const auto rc = column_of(reference, run.header[c]);
    if (rc < 0) continue;
    ColumnDeviation dev;
    dev.column = run.header[c];
    for (const auto& [k, q] : matches) {
      const double d = std::abs(run.rows[k][c] - reference.rows[q][static_cast<std::size_t>(rc)]);
      if (std::isnan(d)) continue;
      dev.max_abs = std::max(dev.max_abs, d);
      dev.final_abs = d;
    }
    cmp.columns.push_back(dev);
  }
  return cmp;
}

ExecuteResult execute(const RunConfig& config) {
  ExecuteResult result;
  result.record = run_record(config);
  const auto& record = result.record;
  const auto csv = trajectory_csv(record, config.tracked);

  json summary;
  summary["config"] = to_json(config);
  summary["engine"] = std::string(to_string(config.engine));
  summary["basis_sizes"] = basis_sizes(config.m, record.basis_size);
  const auto& last = record.samples.back();
  json final_probs = json::object();
  for (std::size_t k = 0; k < config.tracked.size(); ++k)
    final_probs[config.tracked[k]] = last.observables.probabilities[k];
  summary["final"] = {{"t_us", last.observables.time_us},
                      {"norm", last.observables.norm},
                      {"dw_density", json_number(last.observables.domain_wall_density)},
                      {"probabilities", final_probs}};
  json events = json::array();
  double discarded_total = 0.0;
  for (const auto& e : record.projections) {
    events.push_back({{"t_us", e.time_us},
                      {"norm_before", e.norm_before},
                      {"norm_after", e.norm_after},
                      {"discarded_norm", e.discarded_norm}});
    discarded_total += e.discarded_norm;
  }
  summary["projections"] = events;
  summary["total_discarded_norm"] = discarded_total;
  summary["integrator_substeps"] = record.substeps;
  summary["unresolved_steps"] = record.unresolved_steps;
  json notes = json::array();
  if (!config.detuning.is_constant() || !config.rabi.is_constant())
    notes.push_back("polynomial drives are evaluated over the whole run window [0, t_max]");
  if (config.projection.enabled && config.projection.renormalize)
    notes.push_back("state renormalized after every projection");
  summary["notes"] = notes;

  if (config.reference_csv) {
    CsvTable run_table;
    {
      std::istringstream is(csv);
      std::string line;
      std::getline(is, line);
      run_table.header = split(line);
      while (std::getline(is, line)) {
        std::vector<double> row;
        for (const auto& c : split(line)) row.push_back(parse_cell(c, "<run>"));
        run_table.rows.push_back(std::move(row));
      }
    }
    const auto cmp = compare_tables(run_table, read_csv(*config.reference_csv), *config.reference_csv);
    json cols = json::object();
    for (const auto& d : cmp.columns) cols[d.column] = {{"max_abs", d.max_abs}, {"final_abs", d.final_abs}};
    summary["comparison"] = {{"reference", cmp.reference}, {"matched_rows", cmp.matched_rows}, {"columns", cols}};
  }
  result.summary = summary;

  if (!config.output.trajectory_csv.empty()) write_file(config.output.trajectory_csv, csv);
  if (!config.output.summary_json.empty())
    write_file(config.output.summary_json, summary.dump(2) + "\n");
  return result;
}

json run_table1(const Table1Options& options) {
  struct Mode {
    const char* name;
    SubsetKind basis;
    bool projector;
  };
  const Mode modes[] = {{"C_pair_tilde", SubsetKind::IsolatedPlusSinglePair, false},
                        {"C_iso", SubsetKind::Isolated, false},
                        {"C_pair_tilde+P", SubsetKind::IsolatedPlusSinglePair, true},
                        {"C_iso+P", SubsetKind::Isolated, true}};

  json rows = json::array();
  for (int m = options.min_sites; m <= options.max_sites; ++m) {
    RunConfig reference = preset(ScenarioKind::PreparationSweep, m, SubsetKind::All, false);
    reference.engine = Engine::Exact;
    reference.integrator.step_us = options.exact_step_us;
    reference.sample_interval_us = scenario_constants::kSweepDuration;
    reference.tracked = {"Z2"};
    const double exact = execute(reference).record.samples.back().observables.probabilities[0];

    json row = {{"M", m}, {"C_tot", {{"population", exact}, {"basis_size", std::size_t{1} << m}}}};
    for (const auto& mode : modes) {
      RunConfig c = preset(ScenarioKind::PreparationSweep, m, mode.basis, mode.projector);
      c.integrator.step_us = options.coherent_step_us;
      c.sample_interval_us = scenario_constants::kSweepDuration;
      c.tracked = {"Z2"};
      const auto rec = execute(c).record;
      const double p = rec.samples.back().observables.probabilities[0];
      row[mode.name] = {{"population", p},
                        {"relative_deviation", exact != 0.0 ? (p - exact) / exact : 0.0},
                        {"basis_size", rec.basis_size}};
    }
    rows.push_back(std::move(row));
  }
  return {{"quantity", "Z2 population at the end of the preparation sweep"},
          {"t_us", scenario_constants::kSweepDuration},
          {"columns", {"C_tot", "C_pair_tilde", "C_iso", "C_pair_tilde+P", "C_iso+P"}},
          {"coherent_step_us", options.coherent_step_us},
          {"exact_step_us", options.exact_step_us},
          {"rows", rows}};
}

}  // namespace rydcs
