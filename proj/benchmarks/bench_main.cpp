#include <benchmark/benchmark.h>

#include <cmath>

#include "evalbandit/estimators.hpp"
#include "evalbandit/model.hpp"
#include "evalbandit/oracle.hpp"
#include "evalbandit/policies.hpp"
#include "evalbandit/rng.hpp"

using namespace evalbandit;

namespace {

void BM_NormalDraw(benchmark::State& state) {
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_normal());
}
BENCHMARK(BM_NormalDraw);

void BM_TruncatedGaussianSample(benchmark::State& state) {
  const auto dist = RewardDistribution::truncated_gaussian(0.0, 1.0, 0.0, 20.0);
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(dist.sample(rng));
}
BENCHMARK(BM_TruncatedGaussianSample);

void BM_GenerateEvaluations(benchmark::State& state) {
  const int j_count = static_cast<int>(state.range(0));
  const bool glm = state.range(1) == 1;
  std::vector<double> alpha(static_cast<std::size_t>(j_count), 1.0);
  std::vector<double> sigma(static_cast<std::size_t>(j_count), glm ? 10.0 : 1.0);
  const auto link = glm ? LinkFunction::logistic(alpha, 20.0) : LinkFunction::identity();
  const EvaluatorModel model(alpha, sigma, link,
                             glm ? NoiseKind::truncated_gaussian : NoiseKind::gaussian, 20.0);
  const auto dist = RewardDistribution::truncated_gaussian(0.0, 1.0, 0.0, 20.0);
  Rng rng(3);
  const auto rewards = sample_rewards(dist, 20, rng);
  for (auto _ : state) benchmark::DoNotOptimize(generate_evaluations(rewards, model, rng));
}
BENCHMARK(BM_GenerateEvaluations)->Args({10, 0})->Args({10, 1})->Args({64, 0});

void BM_OracleWeights(benchmark::State& state) {
  Rng rng(4);
  std::vector<double> alpha(64), sigma(64);
  for (auto& a : alpha) a = 0.5 + rng.next_double();
  for (auto& s : sigma) s = 0.5 + rng.next_double();
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_oracle_weights(alpha, sigma, Setting::glm));
}
BENCHMARK(BM_OracleWeights);

void BM_TopK(benchmark::State& state) {
  Rng rng(5);
  std::vector<double> scores(60);
  for (auto& s : scores) s = rng.next_double();
  for (auto _ : state) benchmark::DoNotOptimize(top_k(scores, 10));
}
BENCHMARK(BM_TopK);

void BM_MleSolveLogistic(benchmark::State& state) {
  const int samples = static_cast<int>(state.range(0));
  const double alpha_true[] = {0.8};
  const auto link = LinkFunction::logistic(alpha_true, 20.0);
  Rng rng(6);
  MleDataset data;
  data.ridge = 0.1;
  for (int i = 0; i < samples; ++i) {
    const double r = 0.5 + 1.5 * rng.next_double();
    data.add(r, 1.0 / (1.0 + std::exp(-0.8 * r)) + 0.05 * rng.next_normal());
  }
  for (auto _ : state) benchmark::DoNotOptimize(mle_glm_1d(data, link));
}
BENCHMARK(BM_MleSolveLogistic)->Arg(100)->Arg(1000);

void BM_EsagRound(benchmark::State& state) {
  std::vector<double> alpha(10, 1.0), sigma(10, 1.0);
  PolicyContext ctx;
  ctx.link = LinkFunction::identity();
  ctx.sigma = sigma;
  ctx.reward_cap = 20.0;
  EsagPolicy policy("esag", ctx);
  const EvaluatorModel model(alpha, sigma, ctx.link, NoiseKind::gaussian, 20.0);
  const auto dist = RewardDistribution::truncated_gaussian(0.0, 1.0, 0.0, 20.0);
  Rng rng(7);
  const auto rewards = sample_rewards(dist, 20, rng);
  const auto phi = generate_evaluations(rewards, model, rng);
  for (auto _ : state) {
    const auto selected = policy.select(phi, 1, rng);
    policy.update(selected, {}, phi);
    benchmark::DoNotOptimize(selected);
  }
}
BENCHMARK(BM_EsagRound);

}  // namespace

BENCHMARK_MAIN();
