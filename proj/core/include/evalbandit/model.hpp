#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "evalbandit/common.hpp"
#include "evalbandit/rng.hpp"

namespace evalbandit {

enum class LinkKind { identity, logistic };

/// Strictly increasing link g of the evaluation model, with the analytic
/// lower bound on g' over the admissible input range.
struct LinkFunction {
  LinkKind kind = LinkKind::identity;
  double slope_lower_bound = 1.0;  // c_g

  static LinkFunction identity() { return {LinkKind::identity, 1.0}; }

  /// Logistic link; c_g = g'(A) with A = max_j |alpha_j| * reward_cap, the
  /// flattest point of the curve over the reachable inputs.
  static LinkFunction logistic(std::span<const double> alpha, double reward_cap);
};

double link_eval(const LinkFunction& link, double x);

/// Inverse of the link. Logistic requires y in (0,1); throws std::domain_error.
double link_inverse(const LinkFunction& link, double y);

enum class NoiseKind { gaussian, truncated_gaussian };

/// One evaluator per column: evaluation = g(alpha_j * reward) + noise_j.
struct EvaluatorModel {
  std::vector<double> alpha;
  std::vector<double> sigma;
  LinkFunction link;
  NoiseKind noise_kind = NoiseKind::gaussian;
  double reward_cap = 1.0;  // C, bounds the truncation interval

  EvaluatorModel(std::vector<double> alpha_in, std::vector<double> sigma_in, LinkFunction link_in,
                 NoiseKind noise, double cap);

  int evaluator_count() const { return static_cast<int>(alpha.size()); }
  /// True when every sigma_j == 0 (the flagged all-deterministic case).
  bool deterministic() const;
};

enum class RewardKind { truncated_gaussian, uniform, bernoulli };

/// Common reward distribution nu supported on [0, C], with cached moments.
class RewardDistribution {
 public:
  static RewardDistribution truncated_gaussian(double mu, double sd, double lo, double hi);
  static RewardDistribution uniform(double lo, double hi);
  /// Values {0, scale} with P(scale) = p.
  static RewardDistribution bernoulli(double p, double scale);

  RewardKind kind() const { return kind_; }
  double support_cap() const { return cap_; }    // C
  double mean() const { return mean_; }          // r-bar
  double second_moment() const { return eta2_; } // E[r^2]

  double sample(Rng& rng) const;

  /// E[f(r)] by composite-Simpson quadrature (exact sum for Bernoulli).
  double expectation(const std::function<double(double)>& f) const;

  // Parameters, echoed into metadata.
  double param_a() const { return a_; }   // mu / lo / p
  double param_b() const { return b_; }   // sd / hi / scale
  double lower() const { return lo_; }
  double upper() const { return hi_; }

 private:
  RewardDistribution() = default;
  RewardKind kind_ = RewardKind::uniform;
  double a_ = 0.0, b_ = 1.0;
  double lo_ = 0.0, hi_ = 1.0;
  double cap_ = 1.0;
  double mean_ = 0.0, eta2_ = 0.0;
  // truncated-gaussian sampling cache
  double cdf_lo_ = 0.0, cdf_hi_ = 1.0;
};

/// One round as seen before selection: hidden rewards plus the K_t x J
/// evaluation matrix.
struct RoundObservation {
  std::int64_t round = 0;
  int arm_count = 0;
  std::vector<double> rewards;
  Matrix evaluations;
};

/// Per-round arm-count schedule: constant K_max (default) or uniform in
/// (K, K_max].
struct ArmSchedule {
  bool variable = false;
  int k_select = 1;  // K
  int k_max = 2;     // K_max

  int draw(Rng& rng) const;
};

std::vector<double> sample_rewards(const RewardDistribution& dist, int arm_count, Rng& rng);

/// Entry (i,j) = g(alpha_j * r_i) + eps_ij, with eps drawn at scale sigma_j
/// (gaussian kind) or sqrt(2) sigma_j (truncated kind). Logistic entries are
/// clamped into [1e-6, 1 - 1e-6] so they never leave (0,1).
Matrix generate_evaluations(std::span<const double> rewards, const EvaluatorModel& model,
                            Rng& rng);

RoundObservation sample_round(std::int64_t t, const RewardDistribution& dist,
                              const EvaluatorModel& model, const ArmSchedule& schedule, Rng& rng);

}  // namespace evalbandit
