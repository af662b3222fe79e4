#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evalbandit/common.hpp"
#include "evalbandit/metrics.hpp"
#include "evalbandit/model.hpp"
#include "evalbandit/oracle.hpp"
#include "evalbandit/policies.hpp"

namespace evalbandit {

struct RewardSpec {
  RewardKind kind = RewardKind::truncated_gaussian;
  double mu = 0.0;
  double sd = 1.0;
  double lo = 0.0;
  double hi = 20.0;
  double p = 0.5;
  double scale = 1.0;

  RewardDistribution build() const;
};

struct ExperimentConfig {
  Setting setting = Setting::linear;
  LinkKind link = LinkKind::identity;
  std::int64_t horizon = 1000;
  int k_select = 1;
  int k_max = 20;
  bool variable_arm_count = false;
  int evaluators = 10;
  int runs = 2;
  std::uint64_t seed = 1729;
  double delta = 0.05;

  // Either explicit vectors or uniform ranges [x0/2, 3 x0/2].
  std::vector<double> alpha_explicit;
  std::vector<double> sigma_explicit;
  double alpha0 = 1.0;
  double sigma0 = 1.0;

  RewardSpec reward;
  NoiseKind noise = NoiseKind::gaussian;

  std::vector<std::string> policies{"oracle"};
  PolicyOptions options;
  std::map<std::string, PolicyOptions> per_policy;

  int record_every = 1;
  int threads = 0;  // 0 = hardware concurrency
  std::string out_dir = ".";

  /// Throws validation_error listing every offending field.
  void validate() const;

  PolicyOptions options_for(const std::string& policy_name) const;

  /// Alpha/sigma for one run: the explicit vectors, or fresh uniform draws.
  std::pair<std::vector<double>, std::vector<double>> draw_parameters(Rng& rng) const;

  /// Nominal vectors for diagnostics: explicit ones, or all-alpha0/all-sigma0.
  std::pair<std::vector<double>, std::vector<double>> nominal_parameters() const;
};

struct ExperimentResult {
  std::vector<std::string> policy_names;
  int runs = 0;
  std::vector<RunTrace> traces;  // [policy * runs + run]
  std::vector<std::vector<double>> run_alpha;
  std::vector<std::vector<double>> run_sigma;
  std::vector<double> total_reward;  // aligned with traces

  const RunTrace& trace(int policy, int run) const {
    return traces[static_cast<std::size_t>(policy) * runs + run];
  }
  /// Mean cumulative relative-regret curve of one policy across runs.
  std::vector<double> mean_relative_curve(int policy) const;
  std::vector<double> mean_estimation_curve(int policy) const;
};

/// Seeded multi-run execution: one environment trace per run shared by every
/// policy, child streams derived from (master, run, role, index).
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Environment trace of one run, exactly as run_experiment generates it.
std::vector<RoundObservation> generate_rounds(const ExperimentConfig& config, int run);

struct OracleGapRow {
  Setting setting = Setting::glm;
  int evaluators = 1;
  double oracle_gap = 0.0;
  double oracle_half_width = 0.0;
  double average_gap = 0.0;
  double average_half_width = 0.0;
};

/// Mean oracle and naive-average suboptimality gaps per (setting, J).
std::vector<OracleGapRow> sweep_oracle_gap(const ExperimentConfig& base,
                                           const std::vector<int>& j_values,
                                           const std::vector<Setting>& settings);

// --- Replay -----------------------------------------------------------------

struct ReplayDataset {
  int evaluators = 0;
  std::vector<RoundObservation> rounds;
};

/// CSV with header round,arm,reward,eval_1,...,eval_J. Throws data_error with
/// the offending line number.
ReplayDataset load_replay_dataset(const std::string& path);
ReplayDataset parse_replay_csv(std::istream& in, const std::string& origin);

/// Runs policies over recorded rounds; rewards come from the file, nothing is
/// sampled. Requires explicit alpha/sigma of matching length in the config.
ExperimentResult run_replay(const ExperimentConfig& config, const ReplayDataset& data);

void write_rounds_csv(const std::vector<RoundObservation>& rounds, std::ostream& out);

// --- Bounds -----------------------------------------------------------------

struct BoundsReport {
  double glm_gap_bound = 0.0;
  double linear_gap_bound = 0.0;
  TheoryConstants constants;
  double harmonic_arm_average = 0.0;  // K-bar over the configured schedule
  std::vector<double> alpha;
  std::vector<double> sigma;
  bool nominal_parameters = false;
};

BoundsReport compute_bounds(const ExperimentConfig& config);

/// Harmonic average of per-round arm counts: T over the summed reciprocals
/// of the running averages (the t = 1 term taken as 1/K_1, so a constant
/// schedule gives exactly that constant).
double harmonic_average_arms(const std::vector<int>& counts);

// --- Emission ---------------------------------------------------------------

/// Long-form results CSV: policy,run,t,rel_regret_cum,abs_regret_cum,est_error,gap.
void write_results_csv(const ExperimentResult& result, const ExperimentConfig& config,
                       std::ostream& out);

/// Metadata sidecar: config echo, seed scheme, per-run parameters, summary.
void write_metadata_json(const ExperimentResult& result, const ExperimentConfig& config,
                         std::ostream& out);

void write_oracle_gap_csv(const std::vector<OracleGapRow>& rows, std::ostream& out);

void write_bounds_json(const BoundsReport& report, const ExperimentConfig& config,
                       std::ostream& out);

// --- Presets ----------------------------------------------------------------

struct Preset {
  ExperimentConfig config;
  bool sweep = false;                 // oracle-gap sweep rather than a synth run
  std::vector<int> sweep_j;
  std::vector<Setting> sweep_settings;
};

/// fig1a, fig1b, fig1c, fig1d, appendix. Throws std::invalid_argument.
Preset make_preset(const std::string& name);

}  // namespace evalbandit
