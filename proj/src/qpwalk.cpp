#include "tleak/qpwalk.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>

#include "tleak/errors.hpp"

namespace tleak {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

void check_site(long long x, long long length) {
  if (length < 1) throw InvalidParameter("walk length must be >= 1");
  if (x < 0 || x > length) throw InvalidParameter("start site must lie in [0, L]");
}

// Step bits are taken from the generator 64 at a time.
class StepSource {
 public:
  explicit StepSource(std::mt19937_64& rng) : rng_(rng) {}

  int next() {
    if (left_ == 0) {
      bits_ = rng_();
      left_ = 64;
    }
    const int s = (bits_ & 1u) ? 1 : -1;
    bits_ >>= 1;
    --left_;
    return s;
  }

 private:
  std::mt19937_64& rng_;
  std::uint64_t bits_ = 0;
  int left_ = 0;
};

// Uniform integer in [0, n) by rejection on the raw 64-bit output.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

// Returns true if the walker ends at L.
bool walk_to_boundary(long long x, long long length, StepSource& steps) {
  long long n = 0;
  while (x > 0 && x < length) {
    x += steps.next();
    if (++n > kWalkStepCap) throw Error("random walk exceeded the step cap");
  }
  return x == length;
}

long long run_block(const WalkConfig& config, long long block) {
  std::mt19937_64 rng(config.seed + kGolden * static_cast<std::uint64_t>(block + 1));
  StepSource steps(rng);
  const long long begin = block * kWalkBlock;
  const long long end = std::min(config.trials, begin + kWalkBlock);
  long long opposite = 0;
  for (long long t = begin; t < end; ++t) {
    const long long x = static_cast<long long>(uniform_below(rng, static_cast<std::uint64_t>(config.length + 1)));
    const bool a = walk_to_boundary(x, config.length, steps);
    const bool b = walk_to_boundary(x, config.length, steps);
    if (a != b) ++opposite;
  }
  return opposite;
}

WalkResult finish(const WalkConfig& config, long long opposite) {
  WalkResult r;
  r.trials = config.trials;
  r.opposite_count = opposite;
  r.p_opposite_exact = average_opposite(config.length);
  r.p_opposite_mc = static_cast<double>(opposite) / config.trials;
  r.mc_std_error = std::sqrt(r.p_opposite_mc * (1.0 - r.p_opposite_mc) / config.trials);
  return r;
}

}  // namespace

void WalkConfig::validate() const {
  if (length < 1) throw InvalidParameter("walk length must be >= 1");
  if (trials < 1) throw InvalidParameter("trials must be >= 1");
}

double absorb_prob_right(long long x, long long length) {
  check_site(x, length);
  return static_cast<double>(x) / static_cast<double>(length);
}

double prob_opposite_ends(long long x, long long length) {
  const double p = absorb_prob_right(x, length);
  const double q = absorb_prob_right(length - x, length);  // exact mirror of p
  return 2.0 * p * q;
}

double average_opposite(long long length) {
  if (length < 1) throw InvalidParameter("walk length must be >= 1");
  return (1.0 - 1.0 / static_cast<double>(length)) / 3.0;
}

double average_opposite_sum(long long length) {
  if (length < 1) throw InvalidParameter("walk length must be >= 1");
  // Kahan summation keeps the sum accurate for L up to ~1e7.
  double sum = 0.0, comp = 0.0;
  for (long long x = 0; x <= length; ++x) {
    const double y = prob_opposite_ends(x, length) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(length + 1);
}

WalkResult simulate_pair_walks(const WalkConfig& config) {
  config.validate();
  const long long blocks = (config.trials + kWalkBlock - 1) / kWalkBlock;
  long long opposite = 0;
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) reduction(+ : opposite)
  for (long long b = 0; b < blocks; ++b) {
    try {
      opposite += run_block(config, b);
    } catch (...) {
#pragma omp critical(tleak_walk_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return finish(config, opposite);
}

WalkResult simulate_pair_walks_serial(const WalkConfig& config) {
  config.validate();
  const long long blocks = (config.trials + kWalkBlock - 1) / kWalkBlock;
  long long opposite = 0;
  for (long long b = 0; b < blocks; ++b) opposite += run_block(config, b);
  return finish(config, opposite);
}

}  // namespace tleak
