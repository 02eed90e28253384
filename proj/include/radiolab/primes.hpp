#pragma once

#include <cstdint>

namespace radiolab {

inline constexpr std::uint64_t kDefaultPrimeBound = 10'000'000;

// p_1 = 2, p_2 = 3, ... Throws PrimeBoundExceeded when i > bound and
// PreconditionViolation when i == 0. Sieve grows on demand and is shared
// (guarded by a mutex).
std::uint64_t nth_prime(std::uint64_t i, std::uint64_t bound = kDefaultPrimeBound);

}  // namespace radiolab
