#include "evalbandit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace evalbandit {

namespace {

constexpr double kSigmaFloor = 1e-9;

}  // namespace

WeightVector compute_oracle_weights(std::span<const double> alpha, std::span<const double> sigma,
                                    Setting setting, bool* sigma_floored) {
  const std::size_t j_count = alpha.size();
  bool floored = false;
  double norm2 = 0.0;  // ||alpha . sigma^-1||^2 with floored sigmas
  for (std::size_t j = 0; j < j_count; ++j) {
    double s = sigma[j];
    if (s < kSigmaFloor) {
      s = kSigmaFloor;
      floored = true;
    }
    norm2 += (alpha[j] / s) * (alpha[j] / s);
  }
  if (sigma_floored != nullptr) *sigma_floored = floored;
  if (norm2 == 0.0) throw degenerate_model_error("compute_oracle_weights: alpha is all zero");

  WeightVector w;
  w.setting = setting;
  w.weights.resize(j_count);
  double constraint = 0.0;
  for (std::size_t j = 0; j < j_count; ++j) {
    const double s = std::max(sigma[j], kSigmaFloor);
    w.weights[j] = alpha[j] / (s * s * norm2);
    constraint += w.weights[j] * alpha[j];
  }
  w.satisfies_constraint = std::abs(constraint - 1.0) < 1e-10;
  return w;
}

std::vector<double> structured_weights(std::span<const double> alpha_like,
                                       std::span<const double> sigma) {
  const std::size_t j_count = alpha_like.size();
  double norm2 = 0.0;
  for (std::size_t j = 0; j < j_count; ++j) {
    const double s = std::max(sigma[j], kSigmaFloor);
    norm2 += (alpha_like[j] / s) * (alpha_like[j] / s);
  }
  std::vector<double> w(j_count, 0.0);
  if (norm2 == 0.0) return w;
  for (std::size_t j = 0; j < j_count; ++j) {
    const double s = std::max(sigma[j], kSigmaFloor);
    w[j] = alpha_like[j] / (s * s * norm2);
  }
  return w;
}

std::vector<double> estimate_rewards(const WeightVector& w, const Matrix& phi,
                                     const LinkFunction& link) {
  std::vector<double> estimates(static_cast<std::size_t>(phi.rows), 0.0);
  for (int i = 0; i < phi.rows; ++i) {
    double acc = 0.0;
    const auto row = phi.row(i);
    for (int j = 0; j < phi.cols; ++j)
      acc += w.weights[static_cast<std::size_t>(j)] * link_inverse(link, row[static_cast<std::size_t>(j)]);
    estimates[static_cast<std::size_t>(i)] = acc;
  }
  return estimates;
}

std::vector<int> top_k(std::span<const double> scores, int k) {
  const int n = static_cast<int>(scores.size());
  if (k > n) throw std::invalid_argument("top_k: k exceeds the number of scores");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
    const double sa = scores[static_cast<std::size_t>(a)];
    const double sb = scores[static_cast<std::size_t>(b)];
    return sa > sb || (sa == sb && a < b);
  });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

double suboptimality_gap(std::span<const double> rewards, std::span<const int> selected, int k) {
  const auto best = top_k(rewards, k);
  double best_sum = 0.0;
  for (int i : best) best_sum += rewards[static_cast<std::size_t>(i)];
  double selected_sum = 0.0;
  for (int i : selected) selected_sum += rewards[static_cast<std::size_t>(i)];
  return best_sum - selected_sum;
}

double oracle_gap_bound(const GapBoundInputs& in, Setting setting) {
  double norm2 = 0.0;
  for (std::size_t j = 0; j < in.alpha.size(); ++j) {
    const double s = std::max(in.sigma[j], kSigmaFloor);
    norm2 += (in.alpha[j] / s) * (in.alpha[j] / s);
  }
  const double norm = std::sqrt(norm2);
  const double k = in.k;
  const double log_term = 2.0 * k * std::sqrt(std::log(in.k_max * std::exp(1.0) / in.delta));
  if (setting == Setting::linear) return log_term / norm;
  return (log_term + k * std::sqrt(static_cast<double>(in.evaluators))) / norm;
}

TheoryConstants compute_theory_constants(std::span<const double> alpha,
                                         std::span<const double> sigma, int k, int k_max,
                                         double delta, double reward_cap,
                                         const LinkFunction& link) {
  const auto j_count = static_cast<double>(alpha.size());
  double sigma_max = 0.0;
  double g_sup = 0.0;  // max_j sup_{x in [0,C]} |g(alpha_j x)|
  double n_as2 = 0.0;  // ||alpha . sigma^-2||
  double n_s2 = 0.0;   // ||sigma^-2||
  double n_as1_2 = 0.0;  // ||alpha . sigma^-1||^2
  double n_s1_4 = 0.0;   // ||sigma^-1||_4^4
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    const double s = std::max(sigma[j], kSigmaFloor);
    sigma_max = std::max(sigma_max, sigma[j]);
    // g is monotone, so the sup over [0, C] sits at an endpoint.
    g_sup = std::max({g_sup, std::abs(link_eval(link, 0.0)),
                      std::abs(link_eval(link, alpha[j] * reward_cap))});
    n_as2 += alpha[j] * alpha[j] / (s * s * s * s);
    n_s2 += 1.0 / (s * s * s * s);
    n_as1_2 += alpha[j] * alpha[j] / (s * s);
    n_s1_4 += 1.0 / (s * s * s * s);
  }
  n_as2 = std::sqrt(n_as2);
  n_s2 = std::sqrt(n_s2);

  const double bracket =
      2.0 * std::sqrt(j_count) +
      std::sqrt(k * std::log(std::exp(1.0) * k_max / (k * delta)));
  TheoryConstants out;
  out.phi = 2.0 * k * sigma_max * bracket + k * g_sup;
  out.phi_reward_cap = 2.0 * k * sigma_max * bracket + k * reward_cap;
  out.s = (n_as2 + n_s2) * n_as2 / (n_as1_2 * n_as1_2) + std::sqrt(n_s1_4) / n_as1_2;
  return out;
}

}  // namespace evalbandit
