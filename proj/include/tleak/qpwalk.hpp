#pragma once

#include <cstdint>

namespace tleak {

struct WalkConfig {
  long long length = 10;       // absorbing ends at 0 and L
  long long trials = 100000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct WalkResult {
  double p_opposite_exact = 0.0;
  double p_opposite_mc = 0.0;
  double mc_std_error = 0.0;
  long long opposite_count = 0;
  long long trials = 0;
};

// Trials are grouped in blocks of this size; block b draws from mt19937_64 seeded with
// seed + 0x9E3779B97F4A7C15 * (b + 1), so results do not depend on how blocks are
// distributed over threads.
inline constexpr long long kWalkBlock = 1024;
inline constexpr long long kWalkStepCap = 1000000000LL;

// x / L
double absorb_prob_right(long long x, long long length);
// 2 (x/L) ((L - x)/L)
double prob_opposite_ends(long long x, long long length);
// (1/3)(1 - 1/L)
double average_opposite(long long length);
// (1/(L+1)) sum_{x=0}^{L} prob_opposite_ends(x, L)
double average_opposite_sum(long long length);

WalkResult simulate_pair_walks(const WalkConfig& config);
// Single-threaded; identical output to simulate_pair_walks.
WalkResult simulate_pair_walks_serial(const WalkConfig& config);

}  // namespace tleak
