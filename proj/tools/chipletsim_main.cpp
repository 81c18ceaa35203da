// chipletsim: run, sweep, and compare chiplet/monolithic SoC simulations.
//
// Exit codes: 0 ok, 2 invalid input, 64 usage, 70 internal invariant
// violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "chipletsim/calibrate.hpp"
#include "chipletsim/report.hpp"
#include "chipletsim/system.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 2;
constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write " + p.string());
  out << text;
}

fs::path resolve_out(std::string out) {
  if (out.empty()) {
    if (const char* env = std::getenv("CHIPLET_SIM_OUT")) out = env;
  }
  if (out.empty()) throw UsageError("missing --out (or set CHIPLET_SIM_OUT)");
  return fs::path(out);
}

void check_preset_name(const std::string& name) {
  const auto& names = csim::preset_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string valid;
    for (const auto& n : names) valid += (valid.empty() ? "" : "|") + n;
    throw UsageError("unknown preset '" + name + "' (valid: " + valid + ")");
  }
}

csim::SystemSpec load_spec(const std::string& config, const std::string& preset_name,
                           std::optional<std::uint64_t> seed, std::string& label) {
  if (config.empty() == preset_name.empty())
    throw UsageError("exactly one of --config or --preset is required");
  csim::SystemSpec spec;
  if (!preset_name.empty()) {
    check_preset_name(preset_name);
    spec = csim::preset(preset_name);
    label = preset_name;
  } else {
    spec = csim::parse_config(slurp(config));
    label = config;
  }
  if (seed) spec.workload.seed = *seed;
  const auto diags = csim::validate(spec);
  if (!diags.empty()) {
    std::string msg = "configuration is invalid:";
    for (const auto& d : diags) msg += "\n  [" + d.code + "] " + d.path + ": " + d.message;
    throw InputError(msg);
  }
  return spec;
}

csim::RunReport run_spec(const csim::SystemSpec& spec, std::optional<double> until_s) {
  auto instance = csim::build_system(spec);
  std::optional<csim::SimTime> until;
  if (until_s) {
    if (*until_s <= 0.0) throw InputError("--until must be positive");
    until = static_cast<csim::SimTime>(std::llround(*until_s * 1e12));
  }
  return instance->run(until);
}

// ---- run --------------------------------------------------------------------

int cmd_run(const std::string& config, const std::string& preset_name,
            std::optional<std::uint64_t> seed, std::optional<double> until_s, std::string out) {
  std::string label;
  const csim::SystemSpec spec = load_spec(config, preset_name, seed, label);
  const fs::path out_dir = resolve_out(std::move(out));
  const csim::RunReport report = run_spec(spec, until_s);
  const csim::RunArtifacts artifacts = csim::write_run_artifacts(spec, report, out_dir, label);
  std::cout << "run " << label << ": " << report.counters.groups_executed << " groups, "
            << report.counters.transactions_completed << " transactions, final clock "
            << csim::format_ns(report.final_clock) << " ns\n";
  std::cout << "artifacts: " << artifacts.latency_csv.string() << ", "
            << artifacts.power_csv.string() << ", " << artifacts.summary.string() << "\n";
  return kExitOk;
}

// ---- compare ----------------------------------------------------------------

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double csv_mean_latency_s(const fs::path& latency_csv) {
  const auto rows = csim::read_csv(slurp(latency_csv));
  if (rows.size() < 2) throw InputError("no flow records in " + latency_csv.string());
  double sum_ns = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) sum_ns += std::stod(rows[i][4]);
  return sum_ns / static_cast<double>(rows.size() - 1) * 1e-9;
}

double csv_final_avg_power_mw(const fs::path& power_csv) {
  const auto rows = csim::read_csv(slurp(power_csv));
  double result = 0.0;
  bool found = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][1] == "ALL") {
      result = std::stod(rows[i][3]);
      found = true;
    }
  }
  if (!found) throw InputError("no ALL series in " + power_csv.string());
  return result;
}

int cmd_compare(const std::string& presets_csv, std::optional<std::uint64_t> seed,
                std::string out) {
  const std::vector<std::string> names = split_list(presets_csv);
  if (names.size() < 2) throw UsageError("--presets needs at least two preset names");
  for (const auto& n : names) check_preset_name(n);
  const fs::path out_dir = resolve_out(std::move(out));

  for (const auto& name : names) {
    csim::SystemSpec spec = csim::preset(name);
    if (seed) spec.workload.seed = *seed;
    const csim::RunReport report = run_spec(spec, std::nullopt);
    csim::write_run_artifacts(spec, report, out_dir / name, name);
  }

  // Verdicts are recomputed from the CSVs on disk, not from run state.
  std::vector<std::pair<std::string, std::pair<double, double>>> table;
  for (const auto& name : names) {
    table.emplace_back(name, std::make_pair(csv_mean_latency_s(out_dir / name / "latency.csv"),
                                            csv_final_avg_power_mw(out_dir / name / "power.csv")));
  }

  std::string csv = "preset,mean_latency_s,final_avg_power_mw\n";
  for (const auto& [name, vals] : table) {
    char buf[96];
    snprintf(buf, sizeof buf, "%s,%.9e,%.6f\n", name.c_str(), vals.first, vals.second);
    csv += buf;
  }
  spill(out_dir / "comparison.csv", csv);

  auto order_by = [&](auto key) {
    auto sorted = table;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [&](const auto& a, const auto& b) { return key(a) < key(b); });
    std::string s;
    for (const auto& e : sorted) s += (s.empty() ? "" : " < ") + e.first;
    return s;
  };
  const std::string latency_order = order_by([](const auto& e) { return e.second.first; });
  const std::string power_order = order_by([](const auto& e) { return e.second.second; });

  ordered_json verdicts;
  verdicts["table"] = ordered_json::array();
  for (const auto& [name, vals] : table)
    verdicts["table"].push_back(ordered_json{
        {"preset", name}, {"mean_latency_s", vals.first}, {"final_avg_power_mw", vals.second}});
  verdicts["latency_ordering"] = latency_order;
  verdicts["power_ordering"] = power_order;
  auto find = [&](const std::string& n) -> const std::pair<double, double>* {
    for (const auto& [name, vals] : table)
      if (name == n) return &vals;
    return nullptr;
  };
  const auto *e1 = find("exp1"), *e2 = find("exp2"), *e3 = find("exp3");
  if (e1 && e2 && e3) {
    verdicts["latency_claim_exp2_le_exp3_le_exp1"] =
        e2->first < e1->first && e2->first <= e3->first && e3->first <= e1->first;
    verdicts["power_claim_exp1_lt_exp2_lt_exp3"] =
        e1->second < e2->second && e2->second < e3->second;
  }
  spill(out_dir / "comparison.json", verdicts.dump(2) + "\n");

  std::cout << csv;
  std::cout << "latency ordering: " << latency_order << "\n";
  std::cout << "power ordering:   " << power_order << "\n";
  return kExitOk;
}

// ---- sweep ------------------------------------------------------------------

ordered_json* walk_keypath(ordered_json& root, const std::string& keypath) {
  ordered_json* node = &root;
  std::stringstream ss(keypath);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) return nullptr;
    if (node->is_array()) {
      if (part.find_first_not_of("0123456789") != std::string::npos || part.size() > 9)
        return nullptr;
      const std::size_t idx = std::stoul(part);
      if (idx >= node->size()) return nullptr;
      node = &(*node)[idx];
    } else if (node->is_object()) {
      auto it = node->find(part);
      if (it == node->end()) return nullptr;
      node = &*it;
    } else {
      return nullptr;
    }
  }
  return node;
}

int cmd_sweep(const std::string& preset_name, const std::string& keypath,
              const std::string& values_csv, std::optional<std::uint64_t> seed, std::string out) {
  check_preset_name(preset_name);
  const std::vector<std::string> tokens = split_list(values_csv);
  if (tokens.empty()) throw UsageError("--values needs at least one value");
  const fs::path out_dir = resolve_out(std::move(out));

  csim::SystemSpec base = csim::preset(preset_name);
  if (seed) base.workload.seed = *seed;

  std::string csv = "param_value,mean_latency_s,final_avg_power_mw\n";
  for (const std::string& token : tokens) {
    ordered_json doc = ordered_json::parse(csim::serialize(base));
    ordered_json* node = walk_keypath(doc, keypath);
    if (!node || !node->is_number())
      throw InputError("keypath '" + keypath + "' does not address a numeric field");
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw InputError("sweep value '" + token + "' is not a number");
    }
    if (node->is_number_float()) {
      *node = value;
    } else {
      if (value < 0.0 || value != std::floor(value))
        throw InputError("sweep value '" + token + "' is not valid for an integer field");
      *node = static_cast<std::uint64_t>(value);
    }
    const csim::SystemSpec spec = csim::parse_config(doc.dump());
    const auto diags = csim::validate(spec);
    if (!diags.empty())
      throw InputError("sweep value '" + token + "' produces an invalid spec: [" +
                       diags.front().code + "] " + diags.front().message);
    const csim::RunReport report = run_spec(spec, std::nullopt);
    if (report.flows.empty()) throw InputError("sweep run finished with no flow records");
    const double mean = csim::flow_latency_stats(report.flows).mean_s;
    double power = 0.0;
    for (auto it = report.power.rbegin(); it != report.power.rend(); ++it) {
      if (it->component_id == "ALL") {
        power = it->average_mw;
        break;
      }
    }
    char buf[96];
    snprintf(buf, sizeof buf, "%s,%.9e,%.6f\n", token.c_str(), mean, power);
    csv += buf;
  }
  fs::create_directories(out_dir);
  spill(out_dir / "sweep.csv", csv);
  std::cout << csv;
  return kExitOk;
}

// ---- plot -------------------------------------------------------------------

int cmd_plot(const std::string& csv_path, const std::string& kind, const std::string& out_file) {
  const std::string svg = csim::emit_plot(slurp(csv_path), kind);
  spill(out_file, svg);
  std::cout << "wrote " << out_file << "\n";
  return kExitOk;
}

// ---- calibrate --------------------------------------------------------------

int cmd_calibrate(std::string out, int budget, double tolerance) {
  csim::CalibrationBounds bounds;
  if (budget > 0) bounds.budget = budget;
  if (tolerance > 0.0) bounds.tolerance = tolerance;
  const fs::path out_dir = resolve_out(std::move(out));
  fs::create_directories(out_dir);

  const csim::CalibrationResult result = csim::calibrate(bounds);

  for (const auto& [name, spec] : result.presets)
    spill(out_dir / (name + ".json"), csim::serialize(spec));

  ordered_json j;
  j["status"] = result.within_tolerance ? "ok" : "warning";
  j["params"] = {{"n_groups", result.params.n_groups},
                 {"compute_cycles_per_group", result.params.compute_cycles},
                 {"mem_ratio", result.params.mem_ratio},
                 {"dram_access_latency", result.params.dram_access_latency}};
  j["runs_used"] = result.runs_used;
  j["iterations"] = result.iterations;
  j["achieved_mean_s"] = result.achieved_mean_s;
  j["relative_error"] = result.relative_error;
  spill(out_dir / "calibration.json", j.dump(2) + "\n");

  for (const auto& [name, mean] : result.achieved_mean_s) {
    std::cout << name << ": mean latency " << mean;
    const auto it = result.relative_error.find(name);
    if (it != result.relative_error.end()) std::cout << " (rel. error " << it->second << ")";
    std::cout << "\n";
  }
  if (!result.within_tolerance)
    std::cerr << "warning: calibration budget exhausted above tolerance; best-found written\n";
  std::cout << "wrote " << (out_dir / "calibration.json").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic chiplet/monolithic SoC performance and power simulator"};
  app.require_subcommand(1);

  std::string config, preset_name, presets_csv, keypath, values_csv, csv_path, kind, out_file;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> until_s;
  int budget = 0;
  double tolerance = 0.0;

  CLI::App* run = app.add_subcommand("run", "Run one preset or config file");
  run->add_option("--config", config, "Path to a system config (JSON)");
  run->add_option("--preset", preset_name, "Built-in preset (exp1|exp2|exp3)");
  run->add_option("--seed", seed, "Workload seed override");
  run->add_option("--until", until_s, "Stop after this many simulated seconds");
  run->add_option("--out", out, "Output directory (default: $CHIPLET_SIM_OUT)");

  CLI::App* compare = app.add_subcommand("compare", "Run several presets and compare them");
  compare->add_option("--presets", presets_csv, "Comma-separated preset names")->required();
  compare->add_option("--seed", seed, "Workload seed override");
  compare->add_option("--out", out, "Output directory (default: $CHIPLET_SIM_OUT)");

  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one numeric config field");
  sweep->add_option("--preset", preset_name, "Built-in preset to start from")->required();
  sweep->add_option("--param", keypath, "Keypath of a numeric field, e.g. "
                                        "d2d_links.0.bandwidth_bytes_per_ns")->required();
  sweep->add_option("--values", values_csv, "Comma-separated values")->required();
  sweep->add_option("--seed", seed, "Workload seed override");
  sweep->add_option("--out", out, "Output directory (default: $CHIPLET_SIM_OUT)");

  CLI::App* plot = app.add_subcommand("plot", "Render an SVG from a CSV artifact");
  plot->add_option("--csv", csv_path, "Input CSV path")->required();
  plot->add_option("--kind", kind, "Plot kind")
      ->required()
      ->check(CLI::IsMember({"latency-hist", "power-trace"}));
  plot->add_option("--out", out_file, "Output SVG path")->required();

  CLI::App* calibrate = app.add_subcommand("calibrate", "Fit free constants to the exp1 target");
  calibrate->add_option("--budget", budget, "Max simulation runs (default 200)");
  calibrate->add_option("--tolerance", tolerance, "Relative error target (default 0.05)");
  calibrate->add_option("--out", out, "Output directory (default: $CHIPLET_SIM_OUT)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(config, preset_name, seed, until_s, out);
    if (compare->parsed()) return cmd_compare(presets_csv, seed, out);
    if (sweep->parsed()) return cmd_sweep(preset_name, keypath, values_csv, seed, out);
    if (plot->parsed()) return cmd_plot(csv_path, kind, out_file);
    if (calibrate->parsed()) return cmd_calibrate(out, budget, tolerance);
    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const csim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
