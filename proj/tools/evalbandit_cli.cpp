// Command-line front end: synthetic experiments, oracle-gap sweeps, CSV
// replay and the diagnostic bound printer. Exit codes: 0 success, 2 invalid
// configuration, 3 malformed data.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evalbandit/config.hpp"
#include "evalbandit/harness.hpp"
#include "evalbandit/version.hpp"

namespace fs = std::filesystem;
using namespace evalbandit;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_out = true,
                bool preset_allowed = true) {
  cmd->add_option("--config", args.config_path, "key = value configuration file");
  if (preset_allowed)
    cmd->add_option("--preset", args.preset, "fig1a, fig1b, fig1c, fig1d or appendix");
  if (with_out) cmd->add_option("--out", args.out_dir, "output directory (default from config)");
  cmd->add_option("--set", args.overrides, "override one key, e.g. --set runs=8")->take_all();
}

/// Preset, then file, then overrides, in increasing precedence.
Preset resolve_config(const CommonArgs& args) {
  Preset preset;
  if (!args.preset.empty()) preset = make_preset(args.preset);
  KeyValues kv;
  if (!args.config_path.empty()) kv = load_key_values(args.config_path);
  for (const auto& assignment : args.overrides) apply_override(kv, assignment);
  preset.config = config_from_key_values(kv, preset.config);
  if (!args.out_dir.empty()) preset.config.out_dir = args.out_dir;
  return preset;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot open output file: " + path.string());
  writer(out);
  std::cerr << "wrote " << path.string() << '\n';
}

std::vector<std::string> split_names(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream stream(list);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run_synth(const CommonArgs& args, const std::string& dump_rounds) {
  const auto preset = resolve_config(args);
  const auto& config = preset.config;
  const fs::path out_dir(config.out_dir);

  if (preset.sweep) {
    const auto rows = sweep_oracle_gap(config, preset.sweep_j, preset.sweep_settings);
    write_file(out_dir / "oracle_gap.csv",
               [&](std::ostream& os) { write_oracle_gap_csv(rows, os); });
    return 0;
  }

  if (!dump_rounds.empty()) {
    const auto rounds = generate_rounds(config, 0);
    write_file(fs::path(dump_rounds), [&](std::ostream& os) { write_rounds_csv(rounds, os); });
  }

  const auto result = run_experiment(config);
  write_file(out_dir / "results.csv",
             [&](std::ostream& os) { write_results_csv(result, config, os); });
  write_file(out_dir / "metadata.json",
             [&](std::ostream& os) { write_metadata_json(result, config, os); });
  return 0;
}

int run_oracle_gap(const CommonArgs& args, const std::string& j_list, const std::string& setting) {
  auto preset = resolve_config(args);
  auto& config = preset.config;

  std::vector<int> j_values = preset.sweep_j;
  if (!j_list.empty()) {
    j_values.clear();
    for (const auto& item : split_names(j_list)) j_values.push_back(std::stoi(item));
  }
  if (j_values.empty()) j_values = {1, 2, 4, 8, 16, 32, 64, 128};

  std::vector<Setting> settings;
  if (setting == "glm")
    settings = {Setting::glm};
  else if (setting == "linear")
    settings = {Setting::linear};
  else if (setting == "both" || setting.empty())
    settings = {Setting::linear, Setting::glm};
  else
    throw validation_error("invalid --setting (expected glm, linear or both)", {"setting"});

  const auto rows = sweep_oracle_gap(config, j_values, settings);
  write_file(fs::path(config.out_dir) / "oracle_gap.csv",
             [&](std::ostream& os) { write_oracle_gap_csv(rows, os); });
  return 0;
}

int run_replay_cmd(const CommonArgs& args, const std::string& data_path,
                   const std::string& policy_list) {
  auto preset = resolve_config(args);
  auto& config = preset.config;
  if (!policy_list.empty()) config.policies = split_names(policy_list);
  const auto data = load_replay_dataset(data_path);
  config.evaluators = data.evaluators;
  config.validate();
  const auto result = run_replay(config, data);
  const fs::path out_dir(config.out_dir);
  write_file(out_dir / "results.csv",
             [&](std::ostream& os) { write_results_csv(result, config, os); });
  write_file(out_dir / "metadata.json",
             [&](std::ostream& os) { write_metadata_json(result, config, os); });
  return 0;
}

int run_bounds(const CommonArgs& args, const std::string& out_file) {
  const auto preset = resolve_config(args);
  const auto report = compute_bounds(preset.config);
  if (out_file.empty()) {
    write_bounds_json(report, preset.config, std::cout);
  } else {
    write_file(fs::path(out_file),
               [&](std::ostream& os) { write_bounds_json(report, preset.config, os); });
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bandit simulations driven by noisy, biased evaluator scores"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonArgs synth_args, gap_args, replay_args, bounds_args;
  std::string dump_rounds, j_list, gap_setting, data_path, policy_list, bounds_out;

  auto* synth = app.add_subcommand("synth", "run a seeded synthetic experiment");
  add_common(synth, synth_args);
  synth->add_option("--dump-rounds", dump_rounds,
                    "also export run 0's environment trace as a replay CSV");

  auto* gap = app.add_subcommand("oracle-gap", "oracle vs average suboptimality-gap sweep");
  add_common(gap, gap_args);
  gap->add_option("--j-list", j_list, "comma-separated evaluator counts");
  gap->add_option("--setting", gap_setting, "glm, linear or both");

  auto* replay = app.add_subcommand("replay", "run policies over a recorded CSV dataset");
  add_common(replay, replay_args, /*with_out=*/true, /*preset_allowed=*/false);
  replay->add_option("--data", data_path, "CSV with round,arm,reward,eval_1..J")->required();
  replay->add_option("--policies", policy_list, "comma-separated policy names");

  auto* bounds = app.add_subcommand("bounds", "print the diagnostic bound constants as JSON");
  add_common(bounds, bounds_args, /*with_out=*/false);
  bounds->add_option("--out", bounds_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synth(synth_args, dump_rounds);
    if (gap->parsed()) return run_oracle_gap(gap_args, j_list, gap_setting);
    if (replay->parsed()) return run_replay_cmd(replay_args, data_path, policy_list);
    if (bounds->parsed()) return run_bounds(bounds_args, bounds_out);
  } catch (const validation_error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const data_error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
