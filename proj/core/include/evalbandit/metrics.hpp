#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evalbandit/common.hpp"
#include "evalbandit/model.hpp"
#include "evalbandit/oracle.hpp"

namespace evalbandit {

/// Per-round accounting of one policy over one run.
struct RunTrace {
  std::string policy;
  int run = 0;
  int k = 1;

  std::vector<double> relative_increment;
  std::vector<double> absolute_increment;
  std::vector<double> estimation_error;  // NaN for policies without an estimate
  std::vector<double> gap;               // suboptimality gap of the selection
  std::vector<double> oracle_topk_margin;  // oracle score of rank K minus rank K+1

  std::vector<int> selected_flat;  // rounds x K, ascending inside each round
  std::vector<int> oracle_flat;

  std::uint64_t environment_hash = 0;  // FNV-1a over the evaluation bytes

  std::size_t rounds() const { return relative_increment.size(); }
  std::vector<double> cumulative_relative() const;
  std::vector<double> cumulative_absolute() const;
};

/// Relative regret of one round: oracle-estimated value of the oracle's
/// top-K minus that of the selection; nonnegative by construction.
double relative_regret_increment(const WeightVector& w_plus, const Matrix& phi,
                                 const LinkFunction& link, std::span<const int> selected, int k);

/// Fast path over precomputed oracle scores and the oracle's selection.
double relative_regret_increment(std::span<const double> oracle_scores,
                                 std::span<const int> oracle_selected,
                                 std::span<const int> selected);

/// True-reward shortfall of the selection versus the oracle's pick; may be
/// negative in a single round.
double absolute_regret_increment(std::span<const double> rewards, std::span<const int> selected,
                                 std::span<const int> oracle_selected, int k);

double estimation_error(std::span<const double> alpha_hat, std::span<const double> alpha_ref);

struct CurveWithCi {
  std::vector<double> mean;
  std::vector<double> half_width;
};

/// Pointwise mean and normal-approximation half-width z * sd / sqrt(n) over
/// equally long series (n >= 2; sample sd with the n-1 denominator).
CurveWithCi aggregate_ci(const std::vector<std::vector<double>>& series, double level = 0.95);

/// Least-squares slope of log(curve) against log(round) over the last half
/// of the horizon, skipping rounds where the curve is still zero.
double growth_exponent(std::span<const double> cumulative);

/// FNV-1a over the raw bytes of the evaluation matrix, chained onto `seed`.
std::uint64_t hash_evaluations(const Matrix& phi, std::uint64_t seed);

}  // namespace evalbandit
