#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace momentlab {

using u128 = unsigned __int128;
using i128 = __int128;

// floor(sqrt(v)) exactly.
std::uint64_t isqrt(u128 v);
bool is_perfect_square(u128 v, std::uint64_t* root = nullptr);

// n = multiplier^2 * kernel with kernel squarefree.
struct SquarefreeSplit {
  std::uint64_t kernel;
  std::uint64_t multiplier;
};
SquarefreeSplit squarefree_split(std::uint64_t n);

// kernel[n] for 0 <= n <= limit (kernel[0] = 0).
std::vector<std::uint32_t> squarefree_kernels(std::uint32_t limit);

// d(n) for 0 <= n <= limit (d(0) = 0).
std::vector<std::uint32_t> divisor_counts(std::uint32_t limit);

// Primes p <= limit in increasing order.
std::vector<std::uint32_t> primes_up_to(std::uint32_t limit);

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

// Term coeff * sqrt(radicand) of an integer linear combination of roots.
struct RootTerm {
  std::int64_t coeff;
  std::uint64_t radicand;
};

// Exact sign of  sum_i coeff_i*sqrt(radicand_i) - offset  (offset is taken as
// the exact binary value of the double). Rational cancellation is decided by
// squarefree-kernel grouping; otherwise the value is provably nonzero and is
// evaluated in MPFR with a rigorous error bound at increasing precision.
int root_sum_sign(std::span<const RootTerm> terms, double offset = 0.0);

// True iff the combination sums exactly to zero.
inline bool root_sum_is_zero(std::span<const RootTerm> terms) { return root_sum_sign(terms, 0.0) == 0; }

}  // namespace momentlab
