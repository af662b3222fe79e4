#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "evalbandit/common.hpp"
#include "evalbandit/model.hpp"

namespace evalbandit {

/// (reward, evaluation) pairs of a single evaluator plus a ridge term.
struct MleDataset {
  std::vector<std::pair<double, double>> samples;
  double ridge = 0.0;

  // Running sums; the identity-link root is sum_r_eval / (sum_r2 + ridge).
  double sum_r_eval = 0.0;
  double sum_r2 = 0.0;
  double min_positive_reward = 0.0;

  void add(double reward, double evaluation);
  std::size_t size() const { return samples.size(); }
};

struct MleSolution {
  double value = 0.0;
  bool converged = false;  // false when no sign change was found on the bracket
};

/// Unique root of F(a) = sum_i r_i (g(a r_i) - phi_i) + ridge * a.
/// The ridge enters with a plus sign so F stays strictly increasing; with the
/// usual ridge = 1/J this matches the minus-sign variant to solver tolerance.
/// Bisection on an expanding bracket; |F(root)| < 1e-10 (1 + sum r^2).
MleSolution mle_glm_1d(const MleDataset& data, const LinkFunction& link);

/// Column-wise running mean with compensated summation; pooled over every
/// row ever added, matching the batch mean to 1e-12.
class StreamingMean {
 public:
  explicit StreamingMean(int width);

  void add_row(std::span<const double> row);
  void add_rows(const Matrix& rows);

  std::int64_t count() const { return count_; }
  int width() const { return static_cast<int>(sum_.size()); }
  std::vector<double> mean() const;

 private:
  std::vector<double> sum_;
  std::vector<double> carry_;  // Kahan compensation
  std::int64_t count_ = 0;
};

/// Accumulators of the evaluation-based optimistic estimator:
/// alpha_hat = sum of g^{-1}(phi) over selected arms / sum of their rewards.
struct UcbEstimatorState {
  std::vector<double> inverse_eval_sum;
  double reward_sum = 0.0;
  std::int64_t rounds_seen = 0;

  explicit UcbEstimatorState(int width) : inverse_eval_sum(static_cast<std::size_t>(width), 0.0) {}
  std::vector<double> alpha_hat() const;
};

/// Lagrange multiplier of the confidence-ball projection: the unique
/// lambda > 0 with sum_j (alpha_hat_j / (lambda sigma_j^2 + beta^2))^2 =
/// 1/beta^2. Requires ||alpha_hat|| > beta, else degenerate_estimate_error.
double solve_kkt_lambda(std::span<const double> alpha_hat, std::span<const double> sigma,
                        double beta);

/// Per-coordinate shrinkage toward the ball boundary:
/// alpha_tilde_j = alpha_hat_j * lambda sigma_j^2 / (lambda sigma_j^2 + beta^2).
std::vector<double> shrink_alpha(std::span<const double> alpha_hat, std::span<const double> sigma,
                                 double beta, double lambda);

}  // namespace evalbandit
