#include "radiolab/primes.hpp"

#include <cmath>
#include <mutex>
#include <string>
#include <vector>

#include "radiolab/error.hpp"

namespace radiolab {

namespace {

std::mutex g_mu;
std::vector<std::uint32_t> g_primes;  // all primes below g_limit, ascending
std::uint64_t g_limit = 0;

// Rosser: p_i < i (ln i + ln ln i) for i >= 6.
std::uint64_t upper_estimate(std::uint64_t i) {
  if (i < 6) return 15;
  double x = static_cast<double>(i);
  return static_cast<std::uint64_t>(x * (std::log(x) + std::log(std::log(x)))) + 10;
}

void sieve_to(std::uint64_t limit) {
  // Odd-only sieve: index j stands for 2j+1.
  std::vector<bool> composite(limit / 2 + 1, false);
  std::vector<std::uint32_t> out{2};
  for (std::uint64_t j = 1; 2 * j + 1 < limit; ++j) {
    if (composite[j]) continue;
    std::uint64_t p = 2 * j + 1;
    out.push_back(static_cast<std::uint32_t>(p));
    for (std::uint64_t m = p * p; m < limit; m += 2 * p) composite[m / 2] = true;
  }
  g_primes = std::move(out);
  g_limit = limit;
}

}  // namespace

std::uint64_t nth_prime(std::uint64_t i, std::uint64_t bound) {
  if (i == 0) throw PreconditionViolation("nth_prime: index must be positive");
  if (i > bound)
    throw PrimeBoundExceeded("nth_prime: index " + std::to_string(i) + " exceeds bound " + std::to_string(bound));
  std::lock_guard<std::mutex> lock(g_mu);
  if (g_primes.size() < i) sieve_to(std::max(upper_estimate(i), g_limit * 2));
  return g_primes[i - 1];
}

}  // namespace radiolab
