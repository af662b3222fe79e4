#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "evalbandit/harness.hpp"

namespace evalbandit {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream stream(line);
  std::string field;
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_cell(const std::string& cell, int line_number, const std::string& column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (...) {
    throw data_error("line " + std::to_string(line_number) + ": non-numeric value '" + cell +
                     "' in column " + column);
  }
}

}  // namespace

ReplayDataset parse_replay_csv(std::istream& in, const std::string& origin) {
  std::string line;
  int line_number = 0;
  if (!std::getline(in, line)) throw data_error(origin + ": empty file");
  ++line_number;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "round" || header[1] != "arm" || header[2] != "reward")
    throw data_error(origin + ": header must be round,arm,reward,eval_1,...,eval_J");
  const int j_count = static_cast<int>(header.size()) - 3;
  for (int j = 0; j < j_count; ++j) {
    const std::string expected = "eval_" + std::to_string(j + 1);
    if (header[static_cast<std::size_t>(j + 3)] != expected)
      throw data_error(origin + ": header column " + std::to_string(j + 4) + " must be " +
                       expected);
  }

  struct Row {
    std::int64_t arm;
    double reward;
    std::vector<double> evals;
  };
  std::map<std::int64_t, std::vector<Row>> grouped;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw data_error("line " + std::to_string(line_number) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    Row row;
    const auto round_id =
        static_cast<std::int64_t>(parse_cell(fields[0], line_number, "round"));
    row.arm = static_cast<std::int64_t>(parse_cell(fields[1], line_number, "arm"));
    row.reward = parse_cell(fields[2], line_number, "reward");
    row.evals.reserve(static_cast<std::size_t>(j_count));
    for (int j = 0; j < j_count; ++j)
      row.evals.push_back(
          parse_cell(fields[static_cast<std::size_t>(j + 3)], line_number,
                     header[static_cast<std::size_t>(j + 3)]));
    grouped[round_id].push_back(std::move(row));
  }
  if (grouped.empty()) throw data_error(origin + ": no data rows");

  ReplayDataset dataset;
  dataset.evaluators = j_count;
  for (auto& [round_id, rows] : grouped) {
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.arm < b.arm; });
    RoundObservation obs;
    obs.round = round_id;
    obs.arm_count = static_cast<int>(rows.size());
    obs.rewards.reserve(rows.size());
    obs.evaluations = Matrix(obs.arm_count, j_count);
    for (int i = 0; i < obs.arm_count; ++i) {
      obs.rewards.push_back(rows[static_cast<std::size_t>(i)].reward);
      for (int j = 0; j < j_count; ++j)
        obs.evaluations(i, j) = rows[static_cast<std::size_t>(i)].evals[static_cast<std::size_t>(j)];
    }
    dataset.rounds.push_back(std::move(obs));
  }
  return dataset;
}

ReplayDataset load_replay_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open replay file: " + path);
  return parse_replay_csv(in, path);
}

ExperimentResult run_replay(const ExperimentConfig& config, const ReplayDataset& data) {
  config.validate();
  std::vector<std::string> bad;
  if (static_cast<int>(config.alpha_explicit.size()) != data.evaluators)
    bad.push_back("alpha (replay needs an explicit vector of length J = " +
                  std::to_string(data.evaluators) + ")");
  if (static_cast<int>(config.sigma_explicit.size()) != data.evaluators)
    bad.push_back("sigma (replay needs an explicit vector of length J = " +
                  std::to_string(data.evaluators) + ")");
  for (const auto& obs : data.rounds)
    if (obs.arm_count <= config.k_select) {
      bad.push_back("arms_select (round " + std::to_string(obs.round) + " has only " +
                    std::to_string(obs.arm_count) + " arms)");
      break;
    }
  if (!bad.empty()) {
    std::string message = "invalid replay configuration:";
    for (const auto& f : bad) message += "\n  - " + f;
    throw validation_error(message, bad);
  }

  double reward_cap = 0.0;
  double reward_sum = 0.0;
  std::int64_t reward_count = 0;
  for (const auto& obs : data.rounds) {
    for (double r : obs.rewards) {
      reward_cap = std::max(reward_cap, std::abs(r));
      reward_sum += r;
    }
    reward_count += obs.arm_count;
  }
  if (reward_cap == 0.0) reward_cap = 1.0;
  const double mean_reward = reward_sum / static_cast<double>(reward_count);

  const auto& alpha = config.alpha_explicit;
  const auto& sigma = config.sigma_explicit;
  const auto link = config.link == LinkKind::identity
                        ? LinkFunction::identity()
                        : LinkFunction::logistic(alpha, reward_cap);
  if (link.kind == LinkKind::logistic) {
    for (const auto& obs : data.rounds)
      for (double v : obs.evaluations.data)
        if (!(v > 0.0 && v < 1.0))
          throw data_error("round " + std::to_string(obs.round) +
                           ": logistic replay needs evaluations inside (0,1)");
  }
  const auto w_plus = compute_oracle_weights(alpha, sigma, config.setting);

  PolicyContext ctx;
  ctx.link = link;
  ctx.sigma = sigma;
  ctx.reward_cap = reward_cap;
  ctx.oracle_weights = w_plus;

  const int k = config.k_select;
  std::vector<double> reference_scaled(alpha.size());
  for (std::size_t j = 0; j < alpha.size(); ++j)
    reference_scaled[j] = mean_reward * alpha[j];

  ExperimentResult result;
  result.policy_names = config.policies;
  result.runs = config.runs;
  result.traces.resize(config.policies.size() * static_cast<std::size_t>(config.runs));
  result.total_reward.assign(result.traces.size(), 0.0);
  result.run_alpha.assign(static_cast<std::size_t>(config.runs), alpha);
  result.run_sigma.assign(static_cast<std::size_t>(config.runs), sigma);

  const auto policy_count = static_cast<int>(config.policies.size());
  for (int run = 0; run < config.runs; ++run) {
    std::vector<std::unique_ptr<Policy>> policies;
    std::vector<Rng> policy_rngs;
    for (int p = 0; p < policy_count; ++p) {
      auto opts = config.options_for(config.policies[static_cast<std::size_t>(p)]);
      opts.horizon = static_cast<std::int64_t>(data.rounds.size());
      policies.push_back(make_policy(config.policies[static_cast<std::size_t>(p)], ctx, opts));
      policy_rngs.push_back(Rng::derive(config.seed, static_cast<std::uint64_t>(run),
                                        StreamRole::policy, static_cast<std::uint64_t>(p)));
    }

    std::uint64_t env_hash = 0;
    std::vector<double> selected_rewards(static_cast<std::size_t>(k), 0.0);
    for (const auto& obs : data.rounds) {
      env_hash = hash_evaluations(obs.evaluations, env_hash);
      const auto oracle_scores = estimate_rewards(w_plus, obs.evaluations, link);
      const auto oracle_selected = top_k(oracle_scores, k);
      for (int p = 0; p < policy_count; ++p) {
        auto& policy = *policies[static_cast<std::size_t>(p)];
        const auto selected =
            policy.select(obs.evaluations, k, policy_rngs[static_cast<std::size_t>(p)]);
        for (std::size_t s = 0; s < selected.size(); ++s)
          selected_rewards[s] = obs.rewards[static_cast<std::size_t>(selected[s])];
        policy.update(selected, std::span<const double>(selected_rewards.data(), selected.size()),
                      obs.evaluations);

        auto& trace = result.traces[static_cast<std::size_t>(p) * config.runs + run];
        trace.policy = config.policies[static_cast<std::size_t>(p)];
        trace.run = run;
        trace.k = k;
        trace.relative_increment.push_back(
            relative_regret_increment(oracle_scores, oracle_selected, selected));
        trace.absolute_increment.push_back(
            absolute_regret_increment(obs.rewards, selected, oracle_selected, k));
        trace.gap.push_back(suboptimality_gap(obs.rewards, selected, k));
        trace.oracle_topk_margin.push_back(0.0);
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
          result.total_reward[static_cast<std::size_t>(p) * config.runs + run] +=
              selected_rewards[s];
      }
    }
    for (int p = 0; p < policy_count; ++p)
      result.traces[static_cast<std::size_t>(p) * config.runs + run].environment_hash = env_hash;
  }
  return result;
}

void write_rounds_csv(const std::vector<RoundObservation>& rounds, std::ostream& out) {
  if (rounds.empty()) return;
  const int j_count = rounds.front().evaluations.cols;
  out << "round,arm,reward";
  for (int j = 1; j <= j_count; ++j) out << ",eval_" << j;
  out << '\n';
  char buffer[40];
  for (const auto& obs : rounds) {
    for (int i = 0; i < obs.arm_count; ++i) {
      out << obs.round << ',' << i << ',';
      // %.17g keeps the doubles bit-exact through a parse round trip.
      std::snprintf(buffer, sizeof buffer, "%.17g", obs.rewards[static_cast<std::size_t>(i)]);
      out << buffer;
      for (int j = 0; j < j_count; ++j) {
        std::snprintf(buffer, sizeof buffer, "%.17g", obs.evaluations(i, j));
        out << ',' << buffer;
      }
      out << '\n';
    }
  }
}

}  // namespace evalbandit
