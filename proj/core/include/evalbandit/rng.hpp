#pragma once

#include <cstdint>
#include <vector>

namespace evalbandit {

/// Substream roles hanging off one master seed. Environment draws stay
/// identical no matter which policies run, which is what makes paired
/// within-run comparisons possible.
enum class StreamRole : std::uint64_t {
  params = 1,       // per-run (alpha, sigma) draw
  environment = 2,  // arm counts, rewards, evaluation noise
  policy = 3,       // per-policy decision randomness
};

/// Counter-based splittable generator (SplitMix64 core). Streams are derived
/// by hashing (master, run, role, index); all draws go through our own
/// uniform/normal transforms so output is bit-reproducible on one platform
/// independent of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng derive(std::uint64_t master, std::uint64_t run, StreamRole role,
                    std::uint64_t index = 0);

  std::uint64_t next_u64();

  /// Uniform in (0, 1), endpoint-free so quantile transforms never fault.
  double next_double();

  /// Uniform integer in [lo, hi], both ends inclusive, unbiased.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi);

  /// Standard normal via the inverse CDF.
  double next_normal();

  /// k distinct indices drawn uniformly from {0, ..., n-1}, ascending.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::uint64_t state_;
};

/// Standard normal quantile (Wichura's AS 241, full double precision).
/// Throws std::domain_error outside (0, 1).
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

}  // namespace evalbandit
