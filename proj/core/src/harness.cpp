#include "evalbandit/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "evalbandit/version.hpp"
#include "json.hpp"

namespace evalbandit {

namespace {

/// >= 9 significant digits, locale-independent.
std::string format_number(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.12g", v);
  return buffer;
}

LinkFunction build_link(LinkKind kind, std::span<const double> alpha, double reward_cap) {
  return kind == LinkKind::identity ? LinkFunction::identity()
                                    : LinkFunction::logistic(alpha, reward_cap);
}

/// Oracle score of rank K minus rank K+1 (0 when every arm is selected).
double topk_margin(std::span<const double> scores, int k) {
  if (k >= static_cast<int>(scores.size())) return 0.0;
  std::vector<double> sorted(scores.begin(), scores.end());
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end(), std::greater<>());
  const double kth = sorted[static_cast<std::size_t>(k - 1)];
  std::nth_element(sorted.begin(), sorted.begin() + k, sorted.end(), std::greater<>());
  return kth - sorted[static_cast<std::size_t>(k)];
}

}  // namespace

RewardDistribution RewardSpec::build() const {
  switch (kind) {
    case RewardKind::truncated_gaussian:
      return RewardDistribution::truncated_gaussian(mu, sd, lo, hi);
    case RewardKind::uniform:
      return RewardDistribution::uniform(lo, hi);
    case RewardKind::bernoulli:
      return RewardDistribution::bernoulli(p, scale);
  }
  throw std::invalid_argument("unreachable reward kind");
}

void ExperimentConfig::validate() const {
  std::vector<std::string> bad;
  if (horizon < 1) bad.push_back("horizon (must be >= 1)");
  if (k_select < 1) bad.push_back("arms_select (must be >= 1)");
  if (k_select >= k_max) bad.push_back("arms_select/arms_max (need K < K_max)");
  if (evaluators < 1) bad.push_back("evaluators (must be >= 1)");
  if (runs < 1) bad.push_back("runs (must be >= 1)");
  if (!(delta > 0.0 && delta < 1.0)) bad.push_back("delta (must lie in (0,1))");
  if (record_every < 1) bad.push_back("record_every (must be >= 1)");
  if (threads < 0) bad.push_back("threads (must be >= 0)");
  if (policies.empty()) bad.push_back("policies (need at least one)");
  for (const auto& p : policies)
    if (!is_known_policy(p)) bad.push_back("policies (unknown name: " + p + ")");
  if (!alpha_explicit.empty() && static_cast<int>(alpha_explicit.size()) != evaluators)
    bad.push_back("alpha (length must equal evaluators)");
  if (!sigma_explicit.empty() && static_cast<int>(sigma_explicit.size()) != evaluators)
    bad.push_back("sigma (length must equal evaluators)");
  for (double s : sigma_explicit)
    if (s < 0.0) {
      bad.push_back("sigma (entries must be nonnegative)");
      break;
    }
  if (alpha_explicit.empty() && !(alpha0 > 0.0)) bad.push_back("alpha0 (must be > 0)");
  if (sigma_explicit.empty() && sigma0 < 0.0) bad.push_back("sigma0 (must be >= 0)");
  if (setting == Setting::linear && link == LinkKind::logistic)
    bad.push_back("link (the linear setting uses the identity link)");
  switch (reward.kind) {
    case RewardKind::truncated_gaussian:
      if (!(reward.sd > 0.0)) bad.push_back("reward_sd (must be > 0)");
      [[fallthrough]];
    case RewardKind::uniform:
      if (!(reward.hi > reward.lo)) bad.push_back("reward_lo/reward_hi (need lo < hi)");
      if (reward.lo < 0.0) bad.push_back("reward_lo (support must sit in [0, C])");
      break;
    case RewardKind::bernoulli:
      if (!(reward.p >= 0.0 && reward.p <= 1.0)) bad.push_back("reward_p (must lie in [0,1])");
      if (!(reward.scale > 0.0)) bad.push_back("reward_scale (must be > 0)");
      break;
  }
  if (options.eps_scale < 0.0) bad.push_back("eps_scale (must be >= 0)");
  if (!bad.empty()) {
    std::string message = "invalid configuration:";
    for (const auto& f : bad) message += "\n  - " + f;
    throw validation_error(message, bad);
  }
}

PolicyOptions ExperimentConfig::options_for(const std::string& policy_name) const {
  auto opts = options;
  if (const auto it = per_policy.find(policy_name); it != per_policy.end()) opts = it->second;
  opts.horizon = horizon;
  return opts;
}

std::pair<std::vector<double>, std::vector<double>> ExperimentConfig::draw_parameters(
    Rng& rng) const {
  std::vector<double> alpha = alpha_explicit;
  std::vector<double> sigma = sigma_explicit;
  if (alpha.empty()) {
    alpha.resize(static_cast<std::size_t>(evaluators));
    for (auto& a : alpha) a = alpha0 * (0.5 + rng.next_double());
  }
  if (sigma.empty()) {
    sigma.resize(static_cast<std::size_t>(evaluators));
    for (auto& s : sigma) s = sigma0 * (0.5 + rng.next_double());
  }
  return {std::move(alpha), std::move(sigma)};
}

std::pair<std::vector<double>, std::vector<double>> ExperimentConfig::nominal_parameters() const {
  auto alpha = alpha_explicit;
  auto sigma = sigma_explicit;
  if (alpha.empty()) alpha.assign(static_cast<std::size_t>(evaluators), alpha0);
  if (sigma.empty()) sigma.assign(static_cast<std::size_t>(evaluators), sigma0);
  return {std::move(alpha), std::move(sigma)};
}

std::vector<double> ExperimentResult::mean_relative_curve(int policy) const {
  std::vector<std::vector<double>> curves;
  curves.reserve(static_cast<std::size_t>(runs));
  for (int r = 0; r < runs; ++r) curves.push_back(trace(policy, r).cumulative_relative());
  if (runs == 1) return curves.front();
  return aggregate_ci(curves).mean;
}

std::vector<double> ExperimentResult::mean_estimation_curve(int policy) const {
  std::vector<std::vector<double>> curves;
  curves.reserve(static_cast<std::size_t>(runs));
  for (int r = 0; r < runs; ++r) curves.push_back(trace(policy, r).estimation_error);
  if (runs == 1) return curves.front();
  return aggregate_ci(curves).mean;
}

namespace {

/// Executes all policies of one run over a shared environment trace.
void execute_run(const ExperimentConfig& config, int run, const RewardDistribution& dist,
                 ExperimentResult& result) {
  Rng params_rng = Rng::derive(config.seed, static_cast<std::uint64_t>(run), StreamRole::params);
  auto [alpha, sigma] = config.draw_parameters(params_rng);
  const auto link = build_link(config.link, alpha, dist.support_cap());
  const EvaluatorModel model(alpha, sigma, link, config.noise, dist.support_cap());
  const auto w_plus = compute_oracle_weights(alpha, sigma, config.setting);

  PolicyContext ctx;
  ctx.link = link;
  ctx.sigma = sigma;
  ctx.reward_cap = dist.support_cap();
  ctx.oracle_weights = w_plus;

  const auto policy_count = static_cast<int>(config.policies.size());
  std::vector<std::unique_ptr<Policy>> policies;
  std::vector<Rng> policy_rngs;
  for (int p = 0; p < policy_count; ++p) {
    policies.push_back(
        make_policy(config.policies[static_cast<std::size_t>(p)], ctx,
                    config.options_for(config.policies[static_cast<std::size_t>(p)])));
    policy_rngs.push_back(Rng::derive(config.seed, static_cast<std::uint64_t>(run),
                                      StreamRole::policy, static_cast<std::uint64_t>(p)));
  }

  ArmSchedule schedule{config.variable_arm_count, config.k_select, config.k_max};
  Rng env_rng = Rng::derive(config.seed, static_cast<std::uint64_t>(run), StreamRole::environment);

  const int k = config.k_select;
  const double mean_reward = dist.mean();
  std::vector<double> reference_scaled(alpha.size(), 0.0);
  for (std::size_t j = 0; j < alpha.size(); ++j) reference_scaled[j] = mean_reward * alpha[j];

  std::vector<RunTrace*> traces(static_cast<std::size_t>(policy_count));
  std::vector<double*> totals(static_cast<std::size_t>(policy_count));
  for (int p = 0; p < policy_count; ++p) {
    auto& trace = result.traces[static_cast<std::size_t>(p) * config.runs + run];
    trace.policy = config.policies[static_cast<std::size_t>(p)];
    trace.run = run;
    trace.k = k;
    trace.relative_increment.reserve(static_cast<std::size_t>(config.horizon));
    traces[static_cast<std::size_t>(p)] = &trace;
    totals[static_cast<std::size_t>(p)] =
        &result.total_reward[static_cast<std::size_t>(p) * config.runs + run];
  }

  std::uint64_t env_hash = 0;
  std::vector<double> selected_rewards(static_cast<std::size_t>(k), 0.0);
  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    const auto obs = sample_round(t, dist, model, schedule, env_rng);
    env_hash = hash_evaluations(obs.evaluations, env_hash);
    const auto oracle_scores = estimate_rewards(w_plus, obs.evaluations, link);
    const auto oracle_selected = top_k(oracle_scores, k);
    const double margin = topk_margin(oracle_scores, k);

    for (int p = 0; p < policy_count; ++p) {
      auto& policy = *policies[static_cast<std::size_t>(p)];
      const auto selected =
          policy.select(obs.evaluations, k, policy_rngs[static_cast<std::size_t>(p)]);
      for (std::size_t s = 0; s < selected.size(); ++s)
        selected_rewards[s] = obs.rewards[static_cast<std::size_t>(selected[s])];
      policy.update(selected, std::span<const double>(selected_rewards.data(), selected.size()),
                    obs.evaluations);

      auto& trace = *traces[static_cast<std::size_t>(p)];
      trace.relative_increment.push_back(
          relative_regret_increment(oracle_scores, oracle_selected, selected));
      trace.absolute_increment.push_back(
          absolute_regret_increment(obs.rewards, selected, oracle_selected, k));
      trace.gap.push_back(suboptimality_gap(obs.rewards, selected, k));
      trace.oracle_topk_margin.push_back(margin);
      double estimation = std::numeric_limits<double>::quiet_NaN();
      switch (policy.alpha_reference()) {
        case AlphaReference::none:
          break;
        case AlphaReference::alpha:
          estimation = estimation_error(policy.alpha_estimate(), alpha);
          break;
        case AlphaReference::alpha_times_mean_reward:
          estimation = estimation_error(policy.alpha_estimate(), reference_scaled);
          break;
      }
      trace.estimation_error.push_back(estimation);
      trace.selected_flat.insert(trace.selected_flat.end(), selected.begin(), selected.end());
      trace.oracle_flat.insert(trace.oracle_flat.end(), oracle_selected.begin(),
                               oracle_selected.end());
      for (std::size_t s = 0; s < selected.size(); ++s)
        *totals[static_cast<std::size_t>(p)] += selected_rewards[s];
    }
  }
  for (int p = 0; p < policy_count; ++p) traces[static_cast<std::size_t>(p)]->environment_hash = env_hash;

  result.run_alpha[static_cast<std::size_t>(run)] = std::move(alpha);
  result.run_sigma[static_cast<std::size_t>(run)] = std::move(sigma);
}

void run_parallel(int jobs, int threads, const std::function<void(int)>& work) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, jobs));
  if (threads == 1) {
    for (int i = 0; i < jobs; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) work(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto dist = config.reward.build();

  ExperimentResult result;
  result.policy_names = config.policies;
  result.runs = config.runs;
  result.traces.resize(config.policies.size() * static_cast<std::size_t>(config.runs));
  result.total_reward.assign(result.traces.size(), 0.0);
  result.run_alpha.resize(static_cast<std::size_t>(config.runs));
  result.run_sigma.resize(static_cast<std::size_t>(config.runs));

  run_parallel(config.runs, config.threads,
               [&](int run) { execute_run(config, run, dist, result); });
  return result;
}

std::vector<RoundObservation> generate_rounds(const ExperimentConfig& config, int run) {
  const auto dist = config.reward.build();
  Rng params_rng = Rng::derive(config.seed, static_cast<std::uint64_t>(run), StreamRole::params);
  auto [alpha, sigma] = config.draw_parameters(params_rng);
  const auto link = build_link(config.link, alpha, dist.support_cap());
  const EvaluatorModel model(alpha, sigma, link, config.noise, dist.support_cap());
  ArmSchedule schedule{config.variable_arm_count, config.k_select, config.k_max};
  Rng env_rng = Rng::derive(config.seed, static_cast<std::uint64_t>(run), StreamRole::environment);
  std::vector<RoundObservation> rounds;
  rounds.reserve(static_cast<std::size_t>(config.horizon));
  for (std::int64_t t = 1; t <= config.horizon; ++t)
    rounds.push_back(sample_round(t, dist, model, schedule, env_rng));
  return rounds;
}

namespace {

/// Mean oracle and naive-average gaps of one (setting, J, run) cell.
std::pair<double, double> sweep_cell(const ExperimentConfig& base, Setting setting, int j_count,
                                     int run, const RewardDistribution& dist) {
  // Streams keyed by (J, setting) too, so every cell is independent.
  const std::uint64_t cell =
      static_cast<std::uint64_t>(j_count) * 2 + (setting == Setting::glm ? 1 : 0);
  Rng params_rng =
      Rng::derive(base.seed, static_cast<std::uint64_t>(run), StreamRole::params, cell);
  ExperimentConfig cell_config = base;
  cell_config.evaluators = j_count;
  cell_config.alpha_explicit.clear();
  cell_config.sigma_explicit.clear();
  auto [alpha, sigma] = cell_config.draw_parameters(params_rng);
  const auto kind = setting == Setting::glm ? LinkKind::logistic : LinkKind::identity;
  const auto noise = setting == Setting::glm ? NoiseKind::truncated_gaussian : NoiseKind::gaussian;
  const auto link = build_link(kind, alpha, dist.support_cap());
  const EvaluatorModel model(alpha, sigma, link, noise, dist.support_cap());
  const auto w_plus = compute_oracle_weights(alpha, sigma, setting);
  ArmSchedule schedule{base.variable_arm_count, base.k_select, base.k_max};
  Rng env_rng =
      Rng::derive(base.seed, static_cast<std::uint64_t>(run), StreamRole::environment, cell);

  double oracle_acc = 0.0;
  double average_acc = 0.0;
  for (std::int64_t t = 1; t <= base.horizon; ++t) {
    const auto obs = sample_round(t, dist, model, schedule, env_rng);
    const auto oracle_scores = estimate_rewards(w_plus, obs.evaluations, link);
    oracle_acc +=
        suboptimality_gap(obs.rewards, top_k(oracle_scores, base.k_select), base.k_select);
    std::vector<double> mean_scores(static_cast<std::size_t>(obs.arm_count), 0.0);
    for (int i = 0; i < obs.arm_count; ++i) {
      double acc = 0.0;
      for (double v : obs.evaluations.row(i)) acc += v;
      mean_scores[static_cast<std::size_t>(i)] = acc / j_count;
    }
    average_acc +=
        suboptimality_gap(obs.rewards, top_k(mean_scores, base.k_select), base.k_select);
  }
  return {oracle_acc / static_cast<double>(base.horizon),
          average_acc / static_cast<double>(base.horizon)};
}

}  // namespace

std::vector<OracleGapRow> sweep_oracle_gap(const ExperimentConfig& base,
                                           const std::vector<int>& j_values,
                                           const std::vector<Setting>& settings) {
  std::vector<OracleGapRow> rows;
  const auto dist = base.reward.build();

  struct Job {
    Setting setting;
    int j_count;
    int run;
  };
  std::vector<Job> jobs;
  for (const auto setting : settings)
    for (const int j_count : j_values)
      for (int run = 0; run < base.runs; ++run) jobs.push_back({setting, j_count, run});

  std::vector<std::pair<double, double>> cell_means(jobs.size());
  run_parallel(static_cast<int>(jobs.size()), base.threads, [&](int i) {
    const auto& job = jobs[static_cast<std::size_t>(i)];
    cell_means[static_cast<std::size_t>(i)] =
        sweep_cell(base, job.setting, job.j_count, job.run, dist);
  });

  std::size_t cursor = 0;
  for (const auto setting : settings) {
    for (const int j_count : j_values) {
      std::vector<double> oracle_run_means, average_run_means;
      for (int run = 0; run < base.runs; ++run, ++cursor) {
        oracle_run_means.push_back(cell_means[cursor].first);
        average_run_means.push_back(cell_means[cursor].second);
      }
      OracleGapRow row;
      row.setting = setting;
      row.evaluators = j_count;
      double om = 0.0, am = 0.0;
      for (double v : oracle_run_means) om += v;
      for (double v : average_run_means) am += v;
      om /= static_cast<double>(base.runs);
      am /= static_cast<double>(base.runs);
      row.oracle_gap = om;
      row.average_gap = am;
      if (base.runs >= 2) {
        double oss = 0.0, ass = 0.0;
        for (double v : oracle_run_means) oss += (v - om) * (v - om);
        for (double v : average_run_means) ass += (v - am) * (v - am);
        const double z = normal_quantile(0.975);
        row.oracle_half_width =
            z * std::sqrt(oss / (base.runs - 1)) / std::sqrt(static_cast<double>(base.runs));
        row.average_half_width =
            z * std::sqrt(ass / (base.runs - 1)) / std::sqrt(static_cast<double>(base.runs));
      }
      rows.push_back(row);
    }
  }
  return rows;
}

double harmonic_average_arms(const std::vector<int>& counts) {
  const auto total = static_cast<double>(counts.size());
  double reciprocal_sum = 0.0;
  double running = 0.0;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (t == 0)
      reciprocal_sum += 1.0 / counts[0];
    else
      reciprocal_sum += static_cast<double>(t) / running;
    running += counts[t];
  }
  return total / reciprocal_sum;
}

BoundsReport compute_bounds(const ExperimentConfig& config) {
  BoundsReport report;
  auto [alpha, sigma] = config.nominal_parameters();
  report.nominal_parameters = config.alpha_explicit.empty() || config.sigma_explicit.empty();
  report.alpha = alpha;
  report.sigma = sigma;

  const auto dist = config.reward.build();
  GapBoundInputs inputs;
  inputs.k = config.k_select;
  inputs.k_max = config.k_max;
  inputs.evaluators = config.evaluators;
  inputs.delta = config.delta;
  inputs.alpha = alpha;
  inputs.sigma = sigma;
  report.glm_gap_bound = oracle_gap_bound(inputs, Setting::glm);
  report.linear_gap_bound = oracle_gap_bound(inputs, Setting::linear);

  const auto link = build_link(config.link, alpha, dist.support_cap());
  report.constants = compute_theory_constants(alpha, sigma, config.k_select, config.k_max,
                                              config.delta, dist.support_cap(), link);

  std::vector<int> counts(static_cast<std::size_t>(config.horizon), config.k_max);
  if (config.variable_arm_count) {
    ArmSchedule schedule{true, config.k_select, config.k_max};
    Rng rng = Rng::derive(config.seed, 0, StreamRole::environment, /*index=*/0xA11);
    for (auto& c : counts) c = schedule.draw(rng);
  }
  report.harmonic_arm_average = harmonic_average_arms(counts);
  return report;
}

// --- emission ----------------------------------------------------------------

void write_results_csv(const ExperimentResult& result, const ExperimentConfig& config,
                       std::ostream& out) {
  out << "policy,run,t,rel_regret_cum,abs_regret_cum,est_error,gap\n";
  for (std::size_t p = 0; p < result.policy_names.size(); ++p) {
    for (int run = 0; run < result.runs; ++run) {
      const auto& trace = result.trace(static_cast<int>(p), run);
      double rel = 0.0, abs = 0.0;
      for (std::size_t t = 0; t < trace.rounds(); ++t) {
        rel += trace.relative_increment[t];
        abs += trace.absolute_increment[t];
        const bool keep = ((t + 1) % static_cast<std::size_t>(config.record_every)) == 0 ||
                          t + 1 == trace.rounds();
        if (!keep) continue;
        out << trace.policy << ',' << run << ',' << (t + 1) << ',' << format_number(rel) << ','
            << format_number(abs) << ',' << format_number(trace.estimation_error[t]) << ','
            << format_number(trace.gap[t]) << '\n';
      }
    }
  }
}

namespace {

nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["setting"] = config.setting == Setting::glm ? "glm" : "linear";
  j["link"] = config.link == LinkKind::identity ? "identity" : "logistic";
  j["horizon"] = config.horizon;
  j["arms_select"] = config.k_select;
  j["arms_max"] = config.k_max;
  j["arm_schedule"] = config.variable_arm_count ? "uniform" : "constant";
  j["evaluators"] = config.evaluators;
  j["runs"] = config.runs;
  j["seed"] = config.seed;
  j["delta"] = config.delta;
  j["alpha0"] = config.alpha0;
  j["sigma0"] = config.sigma0;
  if (!config.alpha_explicit.empty()) j["alpha"] = config.alpha_explicit;
  if (!config.sigma_explicit.empty()) j["sigma"] = config.sigma_explicit;
  switch (config.reward.kind) {
    case RewardKind::truncated_gaussian:
      j["reward"] = {{"dist", "truncated_gaussian"},
                     {"mu", config.reward.mu},
                     {"sd", config.reward.sd},
                     {"lo", config.reward.lo},
                     {"hi", config.reward.hi}};
      break;
    case RewardKind::uniform:
      j["reward"] = {{"dist", "uniform"}, {"lo", config.reward.lo}, {"hi", config.reward.hi}};
      break;
    case RewardKind::bernoulli:
      j["reward"] = {{"dist", "bernoulli"}, {"p", config.reward.p}, {"scale", config.reward.scale}};
      break;
  }
  j["noise"] =
      config.noise == NoiseKind::gaussian ? "gaussian" : "truncated_gaussian";
  j["policies"] = config.policies;
  j["options"] = {{"delta", config.options.delta},
                  {"eps_scale", config.options.eps_scale},
                  {"eps_power", config.options.eps_power},
                  {"mle_ridge", config.options.mle_ridge},
                  {"resolve_every", config.options.resolve_every},
                  {"lin_ucb_ridge", config.options.lin_ucb_ridge},
                  {"lin_ucb_theta_bound", config.options.lin_ucb_theta_bound},
                  {"exp4p_pmin_scale", config.options.exp4p_pmin_scale}};
  j["record_every"] = config.record_every;
  return j;
}

}  // namespace

void write_metadata_json(const ExperimentResult& result, const ExperimentConfig& config,
                         std::ostream& out) {
  nlohmann::json j;
  j["tool"] = "evalbandit";
  j["version"] = kVersion;
  j["config"] = config_to_json(config);
  j["seed_scheme"] = "splitmix64(master, run, role, index)";
  j["ci"] = {{"method", "normal_approximation"}, {"level", 0.95}, {"z", normal_quantile(0.975)}};
  j["run_parameters"] = {{"alpha", result.run_alpha}, {"sigma", result.run_sigma}};
  nlohmann::json totals;
  for (std::size_t p = 0; p < result.policy_names.size(); ++p) {
    std::vector<double> per_run(static_cast<std::size_t>(result.runs), 0.0);
    for (int r = 0; r < result.runs; ++r)
      per_run[static_cast<std::size_t>(r)] =
          result.total_reward[p * static_cast<std::size_t>(result.runs) + static_cast<std::size_t>(r)];
    totals[result.policy_names[p]] = per_run;
  }
  j["total_reward"] = totals;
  nlohmann::json hashes;
  for (std::size_t p = 0; p < result.policy_names.size(); ++p) {
    std::vector<std::string> per_run;
    for (int r = 0; r < result.runs; ++r) {
      char buffer[20];
      std::snprintf(buffer, sizeof buffer, "%016llx",
                    static_cast<unsigned long long>(result.trace(static_cast<int>(p), r).environment_hash));
      per_run.emplace_back(buffer);
    }
    hashes[result.policy_names[p]] = per_run;
  }
  j["environment_hash"] = hashes;
  out << j.dump(2) << '\n';
}

void write_oracle_gap_csv(const std::vector<OracleGapRow>& rows, std::ostream& out) {
  out << "setting,evaluators,strategy,mean_gap,ci_half_width\n";
  for (const auto& row : rows) {
    const char* setting = row.setting == Setting::glm ? "glm" : "linear";
    out << setting << ',' << row.evaluators << ",oracle," << format_number(row.oracle_gap) << ','
        << format_number(row.oracle_half_width) << '\n';
    out << setting << ',' << row.evaluators << ",average," << format_number(row.average_gap) << ','
        << format_number(row.average_half_width) << '\n';
  }
}

void write_bounds_json(const BoundsReport& report, const ExperimentConfig& config,
                       std::ostream& out) {
  nlohmann::json j;
  j["oracle_gap_bound"] = {{"glm", report.glm_gap_bound}, {"linear", report.linear_gap_bound}};
  j["theory_constants"] = {{"phi", report.constants.phi},
                           {"phi_reward_cap", report.constants.phi_reward_cap},
                           {"s", report.constants.s}};
  j["harmonic_arm_average"] = report.harmonic_arm_average;
  j["alpha"] = report.alpha;
  j["sigma"] = report.sigma;
  j["nominal_parameters"] = report.nominal_parameters;
  j["config"] = config_to_json(config);
  out << j.dump(2) << '\n';
}

// --- presets ------------------------------------------------------------------

Preset make_preset(const std::string& name) {
  Preset preset;
  auto& config = preset.config;
  config.reward = RewardSpec{};  // truncated gaussian (0, 1) on [0, 20]
  config.seed = 1729;
  config.delta = 0.05;
  config.evaluators = 10;
  config.k_max = 20;
  config.runs = 80;

  if (name == "fig1a") {
    preset.sweep = true;
    preset.sweep_j = {1, 2, 4, 8, 16, 32, 64, 128};
    preset.sweep_settings = {Setting::linear, Setting::glm};
    config.setting = Setting::linear;
    config.link = LinkKind::identity;
    config.horizon = 500;
    config.k_select = 1;
    config.alpha0 = 1.0;
    config.sigma0 = 1.0;
    config.policies = {"oracle", "average"};
  } else if (name == "fig1b") {
    config.setting = Setting::linear;
    config.link = LinkKind::identity;
    config.noise = NoiseKind::gaussian;
    config.horizon = 5000;
    config.k_select = 10;
    config.alpha0 = 1.0;
    config.sigma0 = 10.0;
    config.policies = {"eps_greedy", "eps_greedy_all"};
  } else if (name == "fig1c") {
    config.setting = Setting::glm;
    config.link = LinkKind::logistic;
    config.noise = NoiseKind::truncated_gaussian;
    config.horizon = 20000;
    config.k_select = 1;
    config.alpha0 = 1.0;
    config.sigma0 = 10.0;
    config.policies = {"oracle", "eps_greedy", "eps_greedy_all", "greedy",
                       "esag",   "eval_ucb",   "lin_ucb",        "exp4p",  "rand"};
  } else if (name == "fig1d") {
    config.setting = Setting::linear;
    config.link = LinkKind::identity;
    config.noise = NoiseKind::gaussian;
    config.horizon = 20000;
    config.k_select = 1;
    config.alpha0 = 1.0;
    config.sigma0 = 10.0;  // high noise: alpha_j = 0.1 sigma_j on average
    config.policies = {"oracle", "eps_greedy", "eps_greedy_all", "greedy",
                       "esag",   "eval_ucb",   "lin_ucb",        "exp4p",  "rand"};
  } else if (name == "appendix") {
    config.setting = Setting::glm;
    config.link = LinkKind::logistic;
    config.noise = NoiseKind::truncated_gaussian;
    config.horizon = 20000;
    config.k_select = 10;
    config.k_max = 60;
    config.alpha0 = 1.0;
    config.sigma0 = 1.0;
    config.options.eps_scale = 0.1;
    config.policies = {"oracle", "eps_greedy", "eps_greedy_all", "greedy",
                       "esag",   "eval_ucb",   "lin_ucb",        "exp4p",  "rand"};
  } else {
    throw std::invalid_argument("unknown preset: " + name +
                                " (known: fig1a, fig1b, fig1c, fig1d, appendix)");
  }
  return preset;
}

}  // namespace evalbandit
