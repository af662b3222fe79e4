#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evalbandit/common.hpp"
#include "evalbandit/estimators.hpp"
#include "evalbandit/model.hpp"
#include "evalbandit/oracle.hpp"
#include "evalbandit/rng.hpp"

namespace evalbandit {

/// Which ground-truth vector an estimate should be compared against.
enum class AlphaReference { none, alpha, alpha_times_mean_reward };

/// Behavioral contract of every bandit algorithm: select K arms from the
/// evaluations alone, then receive the rewards of exactly those arms.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string_view name() const = 0;

  /// K distinct indices in [0, rows), ascending. Never sees rewards.
  virtual std::vector<int> select(const Matrix& evaluations, int k, Rng& rng) = 0;

  /// `rewards` is aligned with `selected`; evaluations are the same matrix
  /// that select saw.
  virtual void update(std::span<const int> selected, std::span<const double> rewards,
                      const Matrix& evaluations) = 0;

  virtual AlphaReference alpha_reference() const { return AlphaReference::none; }
  virtual std::vector<double> alpha_estimate() const { return {}; }
};

/// Exploration probability per round; constant schedules are built from
/// scale * T^power.
using EpsSchedule = std::function<double(std::int64_t round)>;

EpsSchedule make_eps_schedule(double scale, double power, std::int64_t horizon);

struct PolicyOptions {
  double delta = 0.05;            // confidence level of internal bounds
  double eps_scale = 1.0;         // epsilon = eps_scale * T^eps_power
  double eps_power = -1.0 / 3.0;
  double mle_ridge = -1.0;        // < 0 picks the 1/J default
  int resolve_every = 1;          // MLE re-solve cadence (dataset changes)
  double lin_ucb_ridge = 1.0;
  double lin_ucb_theta_bound = 1.0;
  double exp4p_pmin_scale = 1.0;
  std::int64_t horizon = 1;
};

/// Everything a policy may know about the problem. The true alpha never
/// appears here; only the oracle baseline receives precomputed weights.
struct PolicyContext {
  LinkFunction link;
  std::vector<double> sigma;
  double reward_cap = 1.0;
  WeightVector oracle_weights;  // used by "oracle" only
};

/// Known names: oracle, average, eps_greedy, eps_greedy_all, greedy, esag,
/// eval_ucb, lin_ucb, exp4p, rand. Throws std::invalid_argument otherwise.
std::unique_ptr<Policy> make_policy(std::string_view policy_name, const PolicyContext& ctx,
                                    const PolicyOptions& opts);

bool is_known_policy(std::string_view policy_name);

// --- Concrete policies (exposed for direct use and focused tests) ---

/// Epsilon-greedy over per-evaluator GLM maximum-likelihood estimates.
/// Exploration rounds select uniformly and feed the dataset; with
/// `all_samples` every round feeds it. The exploration-only variant ranks by
/// the structured weights alpha_hat_j / (sigma_j^2 ||alpha_hat.sigma^-1||^2);
/// the all-samples variants rank by the raw direction
/// alpha_hat_j / ||alpha_hat.sigma^-1||.
class EpsGreedyPolicy : public Policy {
 public:
  EpsGreedyPolicy(std::string display_name, const PolicyContext& ctx, EpsSchedule eps,
                  double ridge, bool all_samples, int resolve_every);

  std::string_view name() const override { return name_; }
  std::vector<int> select(const Matrix& evaluations, int k, Rng& rng) override;
  void update(std::span<const int> selected, std::span<const double> rewards,
              const Matrix& evaluations) override;
  AlphaReference alpha_reference() const override { return AlphaReference::alpha; }
  std::vector<double> alpha_estimate() const override { return alpha_hat_; }

  std::int64_t exploration_rounds() const { return exploration_rounds_; }
  std::size_t dataset_size() const;
  const std::vector<double>& weights() const { return weights_; }

 private:
  void resolve();

  std::string name_;
  LinkFunction link_;
  std::vector<double> sigma_;
  EpsSchedule eps_;
  bool all_samples_;
  int resolve_every_;
  std::vector<MleDataset> datasets_;
  std::vector<double> alpha_hat_;
  std::vector<double> weights_;
  std::int64_t round_ = 0;
  std::int64_t exploration_rounds_ = 0;
  int stale_updates_ = 0;
  bool last_explored_ = false;
};

/// Greedy selection on weights built from the running mean of all evaluation
/// rows; never touches observed rewards. With the identity link this is the
/// linear algorithm with the sqrt(T) guarantee; with a logistic link the same
/// machinery runs on g^{-1}(phi) as a heuristic.
class EsagPolicy : public Policy {
 public:
  EsagPolicy(std::string display_name, const PolicyContext& ctx);

  std::string_view name() const override { return name_; }
  std::vector<int> select(const Matrix& evaluations, int k, Rng& rng) override;
  void update(std::span<const int> selected, std::span<const double> rewards,
              const Matrix& evaluations) override;
  AlphaReference alpha_reference() const override {
    return AlphaReference::alpha_times_mean_reward;
  }
  std::vector<double> alpha_estimate() const override { return alpha_hat_; }

 private:
  std::string name_;
  LinkFunction link_;
  std::vector<double> sigma_;
  StreamingMean mean_;
  std::vector<double> alpha_hat_;
  std::vector<double> weights_;
  std::vector<double> scratch_row_;
};

/// Optimistic weights from the evaluation-ratio estimator: shrink alpha_hat
/// to the worst case inside a ||.||-ball of radius beta_t, then use the
/// structured weights of the shrunken vector.
class EvalUcbPolicy : public Policy {
 public:
  EvalUcbPolicy(std::string display_name, const PolicyContext& ctx, double delta);

  std::string_view name() const override { return name_; }
  std::vector<int> select(const Matrix& evaluations, int k, Rng& rng) override;
  void update(std::span<const int> selected, std::span<const double> rewards,
              const Matrix& evaluations) override;
  AlphaReference alpha_reference() const override { return AlphaReference::alpha; }
  std::vector<double> alpha_estimate() const override { return state_.alpha_hat(); }

  double last_confidence_width() const { return last_beta_; }
  const std::vector<double>& last_weights() const { return last_weights_; }

 private:
  std::string name_;
  LinkFunction link_;
  std::vector<double> sigma_;
  double delta_;
  double sigma2_sum_ = 0.0;
  UcbEstimatorState state_;
  double last_beta_ = 0.0;
  std::vector<double> last_weights_;
};

/// Ridge regression of observed rewards on g^{-1}(phi) features with the
/// usual self-normalized optimism bonus.
class LinUcbPolicy : public Policy {
 public:
  LinUcbPolicy(std::string display_name, const PolicyContext& ctx, double ridge,
               double theta_bound, double delta);

  std::string_view name() const override { return name_; }
  std::vector<int> select(const Matrix& evaluations, int k, Rng& rng) override;
  void update(std::span<const int> selected, std::span<const double> rewards,
              const Matrix& evaluations) override;

  std::vector<double> theta_hat() const;

 private:
  std::string name_;
  LinkFunction link_;
  double ridge_;
  double theta_bound_;
  double delta_;
  double noise_scale_;
  int width_;
  std::vector<double> gram_;      // J x J, row-major
  std::vector<double> response_;  // X^T r
};

/// Bandit-with-expert-advice baseline: each evaluator is an expert giving
/// point-mass advice on its top arm, plus one uniform expert; K arms are
/// sampled without replacement from the exploration-floored mixture.
class Exp4pPolicy : public Policy {
 public:
  Exp4pPolicy(std::string display_name, const PolicyContext& ctx, double delta,
              std::int64_t horizon, double pmin_scale);

  std::string_view name() const override { return name_; }
  std::vector<int> select(const Matrix& evaluations, int k, Rng& rng) override;
  void update(std::span<const int> selected, std::span<const double> rewards,
              const Matrix& evaluations) override;

  const std::vector<double>& expert_weights() const { return weights_; }
  const std::vector<double>& last_arm_probabilities() const { return last_probs_; }

 private:
  std::string name_;
  double reward_cap_;
  double delta_;
  std::int64_t horizon_;
  double pmin_scale_;
  std::vector<double> weights_;       // J experts + 1 uniform
  std::vector<int> last_best_arm_;    // advice argmax per expert
  std::vector<double> last_probs_;    // original mixture, per arm
  double last_pmin_ = 0.0;
};

/// Picks one evaluator uniformly at random each round and ranks by it.
class RandPolicy : public Policy {
 public:
  explicit RandPolicy(std::string display_name) : name_(std::move(display_name)) {}

  std::string_view name() const override { return name_; }
  std::vector<int> select(const Matrix& evaluations, int k, Rng& rng) override;
  void update(std::span<const int>, std::span<const double>, const Matrix&) override {}

  int last_evaluator() const { return last_evaluator_; }

 private:
  std::string name_;
  int last_evaluator_ = -1;
};

/// Fixed-weight oracle baseline; zero relative regret by construction.
class OraclePolicy : public Policy {
 public:
  OraclePolicy(std::string display_name, const PolicyContext& ctx);

  std::string_view name() const override { return name_; }
  std::vector<int> select(const Matrix& evaluations, int k, Rng& rng) override;
  void update(std::span<const int>, std::span<const double>, const Matrix&) override {}

 private:
  std::string name_;
  LinkFunction link_;
  WeightVector weights_;
};

/// Ranks arms by the plain average of the raw evaluations.
class AveragePolicy : public Policy {
 public:
  explicit AveragePolicy(std::string display_name) : name_(std::move(display_name)) {}

  std::string_view name() const override { return name_; }
  std::vector<int> select(const Matrix& evaluations, int k, Rng& rng) override;
  void update(std::span<const int>, std::span<const double>, const Matrix&) override {}

 private:
  std::string name_;
};

}  // namespace evalbandit
