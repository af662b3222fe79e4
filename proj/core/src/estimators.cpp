#include "evalbandit/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace evalbandit {

void MleDataset::add(double reward, double evaluation) {
  samples.emplace_back(reward, evaluation);
  sum_r_eval += reward * evaluation;
  sum_r2 += reward * reward;
  if (reward > 0.0 && (min_positive_reward == 0.0 || reward < min_positive_reward))
    min_positive_reward = reward;
}

namespace {

double mle_residual(const MleDataset& data, const LinkFunction& link, double a) {
  double acc = data.ridge * a;
  for (const auto& [r, phi] : data.samples) acc += r * (link_eval(link, a * r) - phi);
  return acc;
}

}  // namespace

MleSolution mle_glm_1d(const MleDataset& data, const LinkFunction& link) {
  if (link.kind == LinkKind::identity) {
    const double denom = data.sum_r2 + data.ridge;
    if (denom == 0.0) return {0.0, false};  // empty data and no ridge
    return {data.sum_r_eval / denom, true};
  }

  const double tolerance = 1e-10 * (1.0 + data.sum_r2);

  // Bracket sized from the data scale: the root is of order g^{-1}(phi)/r.
  double scale = 0.0;
  for (const auto& [r, phi] : data.samples) {
    (void)r;
    scale = std::max(scale, std::abs(link_inverse(link, phi)));
  }
  const double r_min = data.min_positive_reward > 0.0 ? data.min_positive_reward : 1.0;
  double bracket = 10.0 * (1.0 + scale / r_min);

  double lo = -bracket, hi = bracket;
  double f_lo = mle_residual(data, link, lo);
  double f_hi = mle_residual(data, link, hi);
  while (f_lo * f_hi > 0.0 && bracket < 0x1p60) {
    bracket *= 2.0;
    lo = -bracket;
    hi = bracket;
    f_lo = mle_residual(data, link, lo);
    f_hi = mle_residual(data, link, hi);
  }
  if (f_lo == 0.0 && f_hi == 0.0) return {0.5 * (lo + hi), false};  // flat residual
  if (f_lo == 0.0) return {lo, true};
  if (f_hi == 0.0) return {hi, true};
  if (f_lo * f_hi > 0.0) return {0.5 * (lo + hi), false};

  // F is strictly increasing, so keep F(lo) < 0 < F(hi). Bisect until the
  // bracket collapses to double resolution; the residual tolerance then
  // holds with room to spare.
  if (f_lo > 0.0) std::swap(lo, hi);
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double f_mid = mle_residual(data, link, mid);
    if (f_mid == 0.0) return {mid, true};
    if (f_mid < 0.0)
      lo = mid;
    else
      hi = mid;
    if (std::abs(hi - lo) < 5e-16 * std::max(1.0, std::abs(mid))) break;
  }
  mid = 0.5 * (lo + hi);
  return {mid, std::abs(mle_residual(data, link, mid)) < tolerance};
}

StreamingMean::StreamingMean(int width)
    : sum_(static_cast<std::size_t>(width), 0.0), carry_(static_cast<std::size_t>(width), 0.0) {}

void StreamingMean::add_row(std::span<const double> row) {
  for (std::size_t j = 0; j < sum_.size(); ++j) {
    const double y = row[j] - carry_[j];
    const double t = sum_[j] + y;
    carry_[j] = (t - sum_[j]) - y;
    sum_[j] = t;
  }
  ++count_;
}

void StreamingMean::add_rows(const Matrix& rows) {
  for (int i = 0; i < rows.rows; ++i) add_row(rows.row(i));
}

std::vector<double> StreamingMean::mean() const {
  std::vector<double> out(sum_.size(), 0.0);
  if (count_ == 0) return out;
  for (std::size_t j = 0; j < sum_.size(); ++j) out[j] = sum_[j] / static_cast<double>(count_);
  return out;
}

std::vector<double> UcbEstimatorState::alpha_hat() const {
  std::vector<double> out(inverse_eval_sum.size(), 0.0);
  if (reward_sum <= 0.0) return out;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = inverse_eval_sum[j] / reward_sum;
  return out;
}

namespace {

double kkt_value(std::span<const double> alpha_hat, std::span<const double> sigma, double beta,
                 double lambda) {
  double acc = 0.0;
  for (std::size_t j = 0; j < alpha_hat.size(); ++j) {
    if (sigma[j] <= 0.0) continue;
    const double term = alpha_hat[j] / (lambda * sigma[j] * sigma[j] + beta * beta);
    acc += term * term;
  }
  return acc;
}

}  // namespace

double solve_kkt_lambda(std::span<const double> alpha_hat, std::span<const double> sigma,
                        double beta) {
  double norm2 = 0.0;
  for (double a : alpha_hat) norm2 += a * a;
  if (!(std::sqrt(norm2) > beta))
    throw degenerate_estimate_error("solve_kkt_lambda: ||alpha_hat|| <= beta");

  const double target = 1.0 / (beta * beta);
  if (kkt_value(alpha_hat, sigma, beta, 0.0) <= target)
    throw degenerate_estimate_error("solve_kkt_lambda: no positive root (zero-noise coordinates)");

  // f is strictly decreasing from f(0) > target toward 0. Bisect to double
  // resolution in lambda; the residual then sits far below the 1e-10 target.
  double hi = 1.0;
  while (kkt_value(alpha_hat, sigma, beta, hi) > target && hi < 0x1p80) hi *= 2.0;
  double lo = hi > 1.0 ? hi * 0.5 : 0.0;

  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 500; ++iter) {
    mid = 0.5 * (lo + hi);
    const double value = kkt_value(alpha_hat, sigma, beta, mid);
    if (value == target) return mid;
    if (value > target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * (1.0 + mid)) break;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> shrink_alpha(std::span<const double> alpha_hat, std::span<const double> sigma,
                                 double beta, double lambda) {
  std::vector<double> out(alpha_hat.begin(), alpha_hat.end());
  if (beta == 0.0) return out;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double ls2 = lambda * sigma[j] * sigma[j];
    out[j] = alpha_hat[j] * ls2 / (ls2 + beta * beta);
  }
  return out;
}

}  // namespace evalbandit
