#include "evalbandit/metrics.hpp"

#include <cmath>
#include <cstring>

namespace evalbandit {

std::vector<double> RunTrace::cumulative_relative() const {
  std::vector<double> out(relative_increment.size(), 0.0);
  double acc = 0.0;
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = acc += relative_increment[t];
  return out;
}

std::vector<double> RunTrace::cumulative_absolute() const {
  std::vector<double> out(absolute_increment.size(), 0.0);
  double acc = 0.0;
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = acc += absolute_increment[t];
  return out;
}

double relative_regret_increment(const WeightVector& w_plus, const Matrix& phi,
                                 const LinkFunction& link, std::span<const int> selected, int k) {
  const auto scores = estimate_rewards(w_plus, phi, link);
  const auto oracle_selected = top_k(scores, k);
  return relative_regret_increment(scores, oracle_selected, selected);
}

double relative_regret_increment(std::span<const double> oracle_scores,
                                 std::span<const int> oracle_selected,
                                 std::span<const int> selected) {
  double oracle_sum = 0.0;
  for (int i : oracle_selected) oracle_sum += oracle_scores[static_cast<std::size_t>(i)];
  double selected_sum = 0.0;
  for (int i : selected) selected_sum += oracle_scores[static_cast<std::size_t>(i)];
  return oracle_sum - selected_sum;
}

double absolute_regret_increment(std::span<const double> rewards, std::span<const int> selected,
                                 std::span<const int> oracle_selected, int) {
  double oracle_sum = 0.0;
  for (int i : oracle_selected) oracle_sum += rewards[static_cast<std::size_t>(i)];
  double selected_sum = 0.0;
  for (int i : selected) selected_sum += rewards[static_cast<std::size_t>(i)];
  return oracle_sum - selected_sum;
}

double estimation_error(std::span<const double> alpha_hat, std::span<const double> alpha_ref) {
  double acc = 0.0;
  for (std::size_t j = 0; j < alpha_hat.size(); ++j) {
    const double d = alpha_hat[j] - alpha_ref[j];
    acc += d * d;
  }
  return std::sqrt(acc);
}

CurveWithCi aggregate_ci(const std::vector<std::vector<double>>& series, double level) {
  const std::size_t n = series.size();
  if (n < 2) throw std::invalid_argument("aggregate_ci: need at least two series");
  const std::size_t length = series.front().size();
  for (const auto& s : series)
    if (s.size() != length) throw std::invalid_argument("aggregate_ci: unequal series lengths");
  const double z = normal_quantile(0.5 + level / 2.0);
  CurveWithCi out;
  out.mean.assign(length, 0.0);
  out.half_width.assign(length, 0.0);
  for (std::size_t t = 0; t < length; ++t) {
    double mean = 0.0;
    for (const auto& s : series) mean += s[t];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& s : series) {
      const double d = s[t] - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    out.mean[t] = mean;
    out.half_width[t] = z * sd / std::sqrt(static_cast<double>(n));
  }
  return out;
}

double growth_exponent(std::span<const double> cumulative) {
  const std::size_t total = cumulative.size();
  const std::size_t start = total / 2;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t t = start; t < total; ++t) {
    if (cumulative[t] <= 0.0) continue;
    const double x = std::log(static_cast<double>(t + 1));
    const double y = std::log(cumulative[t]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

std::uint64_t hash_evaluations(const Matrix& phi, std::uint64_t seed) {
  std::uint64_t h = seed == 0 ? 0xCBF29CE484222325ULL : seed;
  for (double v : phi.data) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xFFULL;
      h *= 0x100000001B3ULL;
    }
  }
  return h;
}

}  // namespace evalbandit
