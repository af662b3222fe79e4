#include "evalbandit/policies.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace evalbandit {

namespace {

/// Scores = <w, g^{-1}(phi_i)> for every arm.
std::vector<double> weighted_inverse_scores(const Matrix& phi, const LinkFunction& link,
                                            std::span<const double> w) {
  std::vector<double> scores(static_cast<std::size_t>(phi.rows), 0.0);
  for (int i = 0; i < phi.rows; ++i) {
    const auto row = phi.row(i);
    double acc = 0.0;
    for (int j = 0; j < phi.cols; ++j)
      acc += w[static_cast<std::size_t>(j)] * link_inverse(link, row[static_cast<std::size_t>(j)]);
    scores[static_cast<std::size_t>(i)] = acc;
  }
  return scores;
}

}  // namespace

EpsSchedule make_eps_schedule(double scale, double power, std::int64_t horizon) {
  const double eps =
      std::clamp(scale * std::pow(static_cast<double>(horizon), power), 0.0, 1.0);
  return [eps](std::int64_t) { return eps; };
}

// --- EpsGreedyPolicy ---

EpsGreedyPolicy::EpsGreedyPolicy(std::string display_name, const PolicyContext& ctx,
                                 EpsSchedule eps, double ridge, bool all_samples,
                                 int resolve_every)
    : name_(std::move(display_name)),
      link_(ctx.link),
      sigma_(ctx.sigma),
      eps_(std::move(eps)),
      all_samples_(all_samples),
      resolve_every_(std::max(1, resolve_every)),
      datasets_(sigma_.size()),
      alpha_hat_(sigma_.size(), 0.0),
      weights_(sigma_.size(), 0.0) {
  for (auto& d : datasets_) d.ridge = ridge;
}

std::vector<int> EpsGreedyPolicy::select(const Matrix& evaluations, int k, Rng& rng) {
  ++round_;
  last_explored_ = rng.next_double() < eps_(round_);
  if (last_explored_) {
    ++exploration_rounds_;
    return rng.sample_without_replacement(evaluations.rows, k);
  }
  // w starts at zero, so the cold start degenerates to the lowest-index arms.
  return top_k(weighted_inverse_scores(evaluations, link_, weights_), k);
}

void EpsGreedyPolicy::update(std::span<const int> selected, std::span<const double> rewards,
                             const Matrix& evaluations) {
  if (!last_explored_ && !all_samples_) return;
  for (std::size_t s = 0; s < selected.size(); ++s) {
    const auto row = evaluations.row(selected[s]);
    for (std::size_t j = 0; j < datasets_.size(); ++j) datasets_[j].add(rewards[s], row[j]);
  }
  if (++stale_updates_ >= resolve_every_) {
    resolve();
    stale_updates_ = 0;
  }
}

void EpsGreedyPolicy::resolve() {
  for (std::size_t j = 0; j < datasets_.size(); ++j)
    alpha_hat_[j] = mle_glm_1d(datasets_[j], link_).value;
  if (!all_samples_) {
    // Exploration-only data is unbiased, so the oracle-shaped direction
    // alpha_hat . sigma^-2 converges to the oracle's.
    weights_ = structured_weights(alpha_hat_, sigma_);
    return;
  }
  // All-samples baselines rank by the raw estimate direction
  // w_j = alpha_hat_j / ||alpha_hat . sigma^-1||, which leaves the
  // selection-reuse bias of the estimate untreated.
  double norm2 = 0.0;
  for (std::size_t j = 0; j < sigma_.size(); ++j) {
    const double s = std::max(sigma_[j], 1e-9);
    norm2 += (alpha_hat_[j] / s) * (alpha_hat_[j] / s);
  }
  const double norm = std::sqrt(norm2);
  for (std::size_t j = 0; j < weights_.size(); ++j)
    weights_[j] = norm > 0.0 ? alpha_hat_[j] / norm : 0.0;
}

std::size_t EpsGreedyPolicy::dataset_size() const {
  return datasets_.empty() ? 0 : datasets_.front().size();
}

// --- EsagPolicy ---

EsagPolicy::EsagPolicy(std::string display_name, const PolicyContext& ctx)
    : name_(std::move(display_name)),
      link_(ctx.link),
      sigma_(ctx.sigma),
      mean_(static_cast<int>(ctx.sigma.size())),
      alpha_hat_(ctx.sigma.size(), 0.0),
      weights_(ctx.sigma.size(), 0.0),
      scratch_row_(ctx.sigma.size(), 0.0) {}

std::vector<int> EsagPolicy::select(const Matrix& evaluations, int k, Rng&) {
  return top_k(weighted_inverse_scores(evaluations, link_, weights_), k);
}

void EsagPolicy::update(std::span<const int>, std::span<const double>,
                        const Matrix& evaluations) {
  // Every observed row feeds the mean, selected or not; rewards are unused.
  for (int i = 0; i < evaluations.rows; ++i) {
    const auto row = evaluations.row(i);
    for (int j = 0; j < evaluations.cols; ++j)
      scratch_row_[static_cast<std::size_t>(j)] =
          link_inverse(link_, row[static_cast<std::size_t>(j)]);
    mean_.add_row(scratch_row_);
  }
  alpha_hat_ = mean_.mean();
  weights_ = structured_weights(alpha_hat_, sigma_);
}

// --- EvalUcbPolicy ---

EvalUcbPolicy::EvalUcbPolicy(std::string display_name, const PolicyContext& ctx, double delta)
    : name_(std::move(display_name)),
      link_(ctx.link),
      sigma_(ctx.sigma),
      delta_(delta),
      state_(static_cast<int>(ctx.sigma.size())) {
  for (double s : sigma_) sigma2_sum_ += s * s;
}

std::vector<int> EvalUcbPolicy::select(const Matrix& evaluations, int k, Rng& rng) {
  if (state_.reward_sum <= 0.0) return rng.sample_without_replacement(evaluations.rows, k);

  const auto alpha_hat = state_.alpha_hat();
  const double log_term = std::log(2.0 / delta_);
  const auto j_count = static_cast<double>(sigma_.size());
  const double beta =
      (2.0 * std::sqrt(2.0 * j_count * log_term) / 3.0 +
       std::sqrt(static_cast<double>(state_.rounds_seen) * k * sigma2_sum_ * log_term)) /
      state_.reward_sum;
  last_beta_ = beta;

  double norm = 0.0;
  for (double a : alpha_hat) norm += a * a;
  norm = std::sqrt(norm);

  if (norm <= beta) {
    last_weights_ = structured_weights(alpha_hat, sigma_);
  } else {
    try {
      const double lambda = solve_kkt_lambda(alpha_hat, sigma_, beta);
      const auto shrunk = shrink_alpha(alpha_hat, sigma_, beta, lambda);
      last_weights_ = structured_weights(shrunk, sigma_);
    } catch (const degenerate_estimate_error&) {
      // zero-noise coordinates can starve the multiplier equation
      last_weights_ = structured_weights(alpha_hat, sigma_);
    }
  }
  return top_k(weighted_inverse_scores(evaluations, link_, last_weights_), k);
}

void EvalUcbPolicy::update(std::span<const int> selected, std::span<const double> rewards,
                           const Matrix& evaluations) {
  for (std::size_t s = 0; s < selected.size(); ++s) {
    const auto row = evaluations.row(selected[s]);
    for (std::size_t j = 0; j < state_.inverse_eval_sum.size(); ++j)
      state_.inverse_eval_sum[j] += link_inverse(link_, row[j]);
    state_.reward_sum += rewards[s];
  }
  ++state_.rounds_seen;
}

// --- LinUcbPolicy ---

namespace {

/// In-place Cholesky of a row-major SPD matrix; returns the lower factor.
std::vector<double> cholesky(const std::vector<double>& m, int n) {
  std::vector<double> l(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double acc = m[static_cast<std::size_t>(i) * n + j];
      for (int p = 0; p < j; ++p)
        acc -= l[static_cast<std::size_t>(i) * n + p] * l[static_cast<std::size_t>(j) * n + p];
      if (i == j) {
        assert(acc > 0.0 && "gram matrix lost positive definiteness");
        l[static_cast<std::size_t>(i) * n + j] = std::sqrt(acc);
      } else {
        l[static_cast<std::size_t>(i) * n + j] = acc / l[static_cast<std::size_t>(j) * n + j];
      }
    }
  }
  return l;
}

/// Solves L z = b.
std::vector<double> forward_solve(const std::vector<double>& l, int n,
                                  std::span<const double> b) {
  std::vector<double> z(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = b[static_cast<std::size_t>(i)];
    for (int p = 0; p < i; ++p) acc -= l[static_cast<std::size_t>(i) * n + p] * z[static_cast<std::size_t>(p)];
    z[static_cast<std::size_t>(i)] = acc / l[static_cast<std::size_t>(i) * n + i];
  }
  return z;
}

/// Solves L^T x = z.
std::vector<double> backward_solve(const std::vector<double>& l, int n,
                                   std::span<const double> z) {
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double acc = z[static_cast<std::size_t>(i)];
    for (int p = i + 1; p < n; ++p)
      acc -= l[static_cast<std::size_t>(p) * n + i] * x[static_cast<std::size_t>(p)];
    x[static_cast<std::size_t>(i)] = acc / l[static_cast<std::size_t>(i) * n + i];
  }
  return x;
}

}  // namespace

LinUcbPolicy::LinUcbPolicy(std::string display_name, const PolicyContext& ctx, double ridge,
                           double theta_bound, double delta)
    : name_(std::move(display_name)),
      link_(ctx.link),
      ridge_(ridge),
      theta_bound_(theta_bound),
      delta_(delta),
      noise_scale_(0.0),
      width_(static_cast<int>(ctx.sigma.size())),
      gram_(static_cast<std::size_t>(width_) * width_, 0.0),
      response_(static_cast<std::size_t>(width_), 0.0) {
  for (double s : ctx.sigma) noise_scale_ = std::max(noise_scale_, s);
  for (int j = 0; j < width_; ++j) gram_[static_cast<std::size_t>(j) * width_ + j] = ridge_;
}

std::vector<int> LinUcbPolicy::select(const Matrix& evaluations, int k, Rng&) {
  const auto l = cholesky(gram_, width_);
  double log_det = 0.0;
  for (int j = 0; j < width_; ++j)
    log_det += 2.0 * std::log(l[static_cast<std::size_t>(j) * width_ + j]);
  const double radius =
      noise_scale_ * std::sqrt(log_det - width_ * std::log(ridge_) + 2.0 * std::log(1.0 / delta_)) +
      std::sqrt(ridge_) * theta_bound_;

  const auto theta = backward_solve(l, width_, forward_solve(l, width_, response_));

  std::vector<double> scores(static_cast<std::size_t>(evaluations.rows), 0.0);
  std::vector<double> x(static_cast<std::size_t>(width_), 0.0);
  for (int i = 0; i < evaluations.rows; ++i) {
    const auto row = evaluations.row(i);
    for (int j = 0; j < width_; ++j)
      x[static_cast<std::size_t>(j)] = link_inverse(link_, row[static_cast<std::size_t>(j)]);
    const auto z = forward_solve(l, width_, x);
    double quad = 0.0;  // x^T V^{-1} x = ||L^{-1} x||^2
    for (double v : z) quad += v * v;
    double dot = 0.0;
    for (int j = 0; j < width_; ++j)
      dot += theta[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    scores[static_cast<std::size_t>(i)] = dot + radius * std::sqrt(quad);
  }
  return top_k(scores, k);
}

void LinUcbPolicy::update(std::span<const int> selected, std::span<const double> rewards,
                          const Matrix& evaluations) {
  std::vector<double> x(static_cast<std::size_t>(width_), 0.0);
  for (std::size_t s = 0; s < selected.size(); ++s) {
    const auto row = evaluations.row(selected[s]);
    for (int j = 0; j < width_; ++j)
      x[static_cast<std::size_t>(j)] = link_inverse(link_, row[static_cast<std::size_t>(j)]);
    for (int a = 0; a < width_; ++a)
      for (int b = 0; b < width_; ++b)
        gram_[static_cast<std::size_t>(a) * width_ + b] +=
            x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(b)];
    for (int j = 0; j < width_; ++j)
      response_[static_cast<std::size_t>(j)] += rewards[s] * x[static_cast<std::size_t>(j)];
  }
}

std::vector<double> LinUcbPolicy::theta_hat() const {
  const auto l = cholesky(gram_, width_);
  return backward_solve(l, width_, forward_solve(l, width_, response_));
}

// --- Exp4pPolicy ---

Exp4pPolicy::Exp4pPolicy(std::string display_name, const PolicyContext& ctx, double delta,
                         std::int64_t horizon, double pmin_scale)
    : name_(std::move(display_name)),
      reward_cap_(ctx.reward_cap),
      delta_(delta),
      horizon_(std::max<std::int64_t>(1, horizon)),
      pmin_scale_(pmin_scale),
      weights_(ctx.sigma.size() + 1, 1.0) {}

std::vector<int> Exp4pPolicy::select(const Matrix& evaluations, int k, Rng& rng) {
  const int arms = evaluations.rows;
  const int experts = static_cast<int>(weights_.size());
  const int evaluator_experts = experts - 1;

  // Point-mass advice: g^{-1} is strictly increasing, so the argmax of the
  // raw column is the argmax of g^{-1}(phi_j).
  last_best_arm_.assign(static_cast<std::size_t>(evaluator_experts), 0);
  for (int j = 0; j < evaluator_experts; ++j) {
    int best = 0;
    for (int i = 1; i < arms; ++i)
      if (evaluations(i, j) > evaluations(best, j)) best = i;
    last_best_arm_[static_cast<std::size_t>(j)] = best;
  }

  const double pmin_raw =
      pmin_scale_ * std::sqrt(std::log(static_cast<double>(experts)) /
                              (static_cast<double>(arms) * static_cast<double>(horizon_)));
  const double pmin = std::min(pmin_raw, 1.0 / arms);
  last_pmin_ = pmin;

  double weight_total = 0.0;
  for (double w : weights_) weight_total += w;

  last_probs_.assign(static_cast<std::size_t>(arms), 0.0);
  const double uniform_share = weights_.back() / weight_total / arms;
  for (int i = 0; i < arms; ++i) last_probs_[static_cast<std::size_t>(i)] = uniform_share;
  for (int j = 0; j < evaluator_experts; ++j)
    last_probs_[static_cast<std::size_t>(last_best_arm_[static_cast<std::size_t>(j)])] +=
        weights_[static_cast<std::size_t>(j)] / weight_total;
  for (int i = 0; i < arms; ++i)
    last_probs_[static_cast<std::size_t>(i)] =
        (1.0 - arms * pmin) * last_probs_[static_cast<std::size_t>(i)] + pmin;

  // K draws without replacement from the floored mixture, renormalizing
  // the remaining mass after each draw.
  std::vector<double> residual = last_probs_;
  std::vector<int> selected;
  selected.reserve(static_cast<std::size_t>(k));
  double mass = 1.0;
  for (int draw = 0; draw < k; ++draw) {
    double u = rng.next_double() * mass;
    int pick = -1;
    for (int i = 0; i < arms; ++i) {
      const double p = residual[static_cast<std::size_t>(i)];
      if (p <= 0.0) continue;
      if (u < p) {
        pick = i;
        break;
      }
      u -= p;
      pick = i;  // numeric slack lands on the last positive entry
    }
    mass -= residual[static_cast<std::size_t>(pick)];
    residual[static_cast<std::size_t>(pick)] = 0.0;
    selected.push_back(pick);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

void Exp4pPolicy::update(std::span<const int> selected, std::span<const double> rewards,
                         const Matrix& evaluations) {
  const int arms = evaluations.rows;
  const int experts = static_cast<int>(weights_.size());
  const int evaluator_experts = experts - 1;

  // Importance-weighted gain estimates with the pre-draw probabilities.
  std::vector<double> gain(static_cast<std::size_t>(arms), 0.0);
  for (std::size_t s = 0; s < selected.size(); ++s)
    gain[static_cast<std::size_t>(selected[s])] =
        (rewards[s] / reward_cap_) / last_probs_[static_cast<std::size_t>(selected[s])];

  const double bonus_scale =
      std::sqrt(std::log(static_cast<double>(experts) / delta_) /
                (static_cast<double>(arms) * static_cast<double>(horizon_)));

  double largest = 0.0;
  for (int j = 0; j < experts; ++j) {
    double expected_gain;
    double variance_proxy;
    if (j < evaluator_experts) {
      const int advice = last_best_arm_[static_cast<std::size_t>(j)];
      expected_gain = gain[static_cast<std::size_t>(advice)];
      variance_proxy = 1.0 / last_probs_[static_cast<std::size_t>(advice)];
    } else {
      expected_gain = 0.0;
      variance_proxy = 0.0;
      for (int i = 0; i < arms; ++i) {
        expected_gain += gain[static_cast<std::size_t>(i)] / arms;
        variance_proxy += 1.0 / (arms * last_probs_[static_cast<std::size_t>(i)]);
      }
    }
    weights_[static_cast<std::size_t>(j)] *=
        std::exp(0.5 * last_pmin_ * (expected_gain + variance_proxy * bonus_scale));
    largest = std::max(largest, weights_[static_cast<std::size_t>(j)]);
  }
  // Rescaling keeps the mixture unchanged and the weights finite.
  if (largest > 1e100)
    for (auto& w : weights_) w /= largest;
}

// --- RandPolicy ---

std::vector<int> RandPolicy::select(const Matrix& evaluations, int k, Rng& rng) {
  last_evaluator_ = static_cast<int>(rng.next_int(0, evaluations.cols - 1));
  std::vector<double> column(static_cast<std::size_t>(evaluations.rows), 0.0);
  for (int i = 0; i < evaluations.rows; ++i)
    column[static_cast<std::size_t>(i)] = evaluations(i, last_evaluator_);
  // Ranking by the raw column equals ranking by g^{-1} of it.
  return top_k(column, k);
}

// --- OraclePolicy ---

OraclePolicy::OraclePolicy(std::string display_name, const PolicyContext& ctx)
    : name_(std::move(display_name)), link_(ctx.link), weights_(ctx.oracle_weights) {}

std::vector<int> OraclePolicy::select(const Matrix& evaluations, int k, Rng&) {
  return top_k(weighted_inverse_scores(evaluations, link_, weights_.weights), k);
}

// --- AveragePolicy ---

std::vector<int> AveragePolicy::select(const Matrix& evaluations, int k, Rng&) {
  std::vector<double> scores(static_cast<std::size_t>(evaluations.rows), 0.0);
  for (int i = 0; i < evaluations.rows; ++i) {
    double acc = 0.0;
    const auto row = evaluations.row(i);
    for (double v : row) acc += v;
    scores[static_cast<std::size_t>(i)] = acc / evaluations.cols;
  }
  return top_k(scores, k);
}

// --- factory ---

std::unique_ptr<Policy> make_policy(std::string_view policy_name, const PolicyContext& ctx,
                                    const PolicyOptions& opts) {
  const std::string name(policy_name);
  const double ridge =
      opts.mle_ridge >= 0.0 ? opts.mle_ridge : 1.0 / static_cast<double>(ctx.sigma.size());
  if (name == "oracle") return std::make_unique<OraclePolicy>(name, ctx);
  if (name == "average") return std::make_unique<AveragePolicy>(name);
  if (name == "eps_greedy")
    return std::make_unique<EpsGreedyPolicy>(
        name, ctx, make_eps_schedule(opts.eps_scale, opts.eps_power, opts.horizon), ridge,
        /*all_samples=*/false, opts.resolve_every);
  if (name == "eps_greedy_all")
    return std::make_unique<EpsGreedyPolicy>(
        name, ctx, make_eps_schedule(opts.eps_scale, opts.eps_power, opts.horizon), ridge,
        /*all_samples=*/true, opts.resolve_every);
  if (name == "greedy")
    return std::make_unique<EpsGreedyPolicy>(name, ctx, make_eps_schedule(0.0, 0.0, 1), ridge,
                                             /*all_samples=*/true, opts.resolve_every);
  if (name == "esag") return std::make_unique<EsagPolicy>(name, ctx);
  if (name == "eval_ucb") return std::make_unique<EvalUcbPolicy>(name, ctx, opts.delta);
  if (name == "lin_ucb")
    return std::make_unique<LinUcbPolicy>(name, ctx, opts.lin_ucb_ridge, opts.lin_ucb_theta_bound,
                                          opts.delta);
  if (name == "exp4p")
    return std::make_unique<Exp4pPolicy>(name, ctx, opts.delta, opts.horizon,
                                         opts.exp4p_pmin_scale);
  if (name == "rand") return std::make_unique<RandPolicy>(name);
  throw std::invalid_argument("unknown policy: " + name);
}

bool is_known_policy(std::string_view policy_name) {
  static constexpr std::string_view known[] = {"oracle",  "average",  "eps_greedy", "eps_greedy_all",
                                               "greedy",  "esag",     "eval_ucb",   "lin_ucb",
                                               "exp4p",   "rand"};
  return std::find(std::begin(known), std::end(known), policy_name) != std::end(known);
}

}  // namespace evalbandit
