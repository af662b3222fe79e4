#pragma once

#include <span>
#include <vector>

#include "evalbandit/common.hpp"
#include "evalbandit/model.hpp"

namespace evalbandit {

enum class Setting { glm, linear };

/// Aggregation weights with the constraint metadata <w, alpha> = 1.
struct WeightVector {
  std::vector<double> weights;
  Setting setting = Setting::glm;
  bool satisfies_constraint = false;
};

/// Closed-form oracle weights w_j = alpha_j / (sigma_j^2 ||alpha.sigma^-1||^2)
/// for both settings. This is the constraint-normalized form: the squared
/// norm makes <w, alpha> = 1 hold exactly, and any positive rescaling leaves
/// the induced ranking unchanged. Zero sigmas are floored at 1e-9 so a
/// noiseless evaluator dominates; `sigma_floored`, when given, reports it.
/// Throws degenerate_model_error when alpha is all zero.
WeightVector compute_oracle_weights(std::span<const double> alpha, std::span<const double> sigma,
                                    Setting setting, bool* sigma_floored = nullptr);

/// Plug-in weights of the same shape for an estimated alpha. All-zero
/// estimates yield all-zero weights (callers fall back to index order).
std::vector<double> structured_weights(std::span<const double> alpha_like,
                                       std::span<const double> sigma);

/// r_hat_i = sum_j w_j g^{-1}(phi_ij).
std::vector<double> estimate_rewards(const WeightVector& w, const Matrix& phi,
                                     const LinkFunction& link);

/// Indices of the K largest scores; ties broken toward the lowest index;
/// result ascending. Throws std::invalid_argument when k > scores.size().
std::vector<int> top_k(std::span<const double> scores, int k);

/// Sum of the true top-K rewards minus the sum over `selected`; always >= 0.
double suboptimality_gap(std::span<const double> rewards, std::span<const int> selected, int k);

struct GapBoundInputs {
  int k = 1;
  int k_max = 2;
  int evaluators = 1;
  double delta = 0.05;
  std::vector<double> alpha;
  std::vector<double> sigma;
};

/// High-probability suboptimality-gap bound of the oracle:
///   GLM:    (2K sqrt(ln(K_max e / delta)) + K sqrt(J)) / ||alpha.sigma^-1||
///   Linear:  2K sqrt(ln(K_max e / delta))              / ||alpha.sigma^-1||
double oracle_gap_bound(const GapBoundInputs& in, Setting setting);

/// Diagnostic constants of the T^{2/3} regret bound. `phi` uses the supremum
/// of |g(alpha_j x)| over [0, C]; `phi_reward_cap` substitutes C for it.
struct TheoryConstants {
  double phi = 0.0;
  double phi_reward_cap = 0.0;
  double s = 0.0;
};

TheoryConstants compute_theory_constants(std::span<const double> alpha,
                                         std::span<const double> sigma, int k, int k_max,
                                         double delta, double reward_cap,
                                         const LinkFunction& link);

}  // namespace evalbandit
