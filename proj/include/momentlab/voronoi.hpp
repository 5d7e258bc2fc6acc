#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "momentlab/bigreal.hpp"
#include "momentlab/cuspform.hpp"

namespace momentlab::voronoi {

inline constexpr std::uint64_t kMaxDecomposeY = 2000;
inline constexpr long kMinPrecisionBits = 64;

// x^{k/2-1/4} sum_{n<=y} a(n) n^{-k/2-1/4} cos(4 pi sqrt(nx) - pi/4).
// Evaluated at twice the requested precision (the phases reach 4 pi sqrt(yx));
// the working precision is raised until a running error bound is below
// 2^{-precision_bits/2} |R|.
BigReal resonance_sum_R(const cusp::CoefficientTable& table, const BigReal& x, std::uint64_t y, long precision_bits);

// R(x) / (sqrt 2 pi): the main sum of the truncated formula, no error term.
// Requires 1 <= N <= range_constant * x and N <= n_max.
BigReal truncated_A(const cusp::CoefficientTable& table, const BigReal& x, std::uint64_t N, long precision_bits,
                    double range_constant = 1.0);

struct Decomposition {
  BigReal S1, S2, S3, S4;
  BigReal R4;        // R(x)^4 from the cosine sum
  BigReal diagonal;  // sum over resonance classes of Q_C^2; equals s_{4;2}(w; y)
  BigReal residual() const { return R4 - (S1 + S2 + S3 + S4); }
};

// R^4 = S1 + S2 + S3 + S4 by frequency pattern, X = x^{2k-1}, Z = sum w_n e^{i phi_n}:
//   S4 = -(1/8) X Re Z^4          (four equal signs)
//   S3 = (1/2) X |Z|^2 Im Z^2     (three against one)
//   S1 = (3/8) X s_{4;2}(w; y)    (two against two, resonant)
//   S2 = (3/8) X (|Z|^4 - s_{4;2}) (two against two, non-resonant)
// y <= 2000.
Decomposition decompose_S(const cusp::CoefficientTable& table, const BigReal& x, std::uint64_t y, long precision_bits);

struct TruncationProfile {
  int weight = 0;
  double x_lo = 0, x_hi = 0;
  std::vector<std::uint64_t> N;
  std::vector<double> x_grid;
  std::vector<double> max_rel_error;  // max over grid of |A(x) - truncated_A(x,N)| / x^{k/2}
  BigReal max_abs_error;              // max over grid and N of |A(x) - truncated_A(x,N)|
  double fitted_slope = 0;            // of log max_rel_error against log N
};

// Grid of half-integers n + 1/2 with a seeded jitter in (-1/4, 1/4), strictly
// increasing, kept away from the jumps of A.
std::vector<double> profile_grid(double x_lo, double x_hi, std::size_t grid_size, std::uint64_t seed);

// Double-precision evaluation through the SIMD cosine-sum kernel.
TruncationProfile truncation_error_profile(const cusp::CoefficientTable& table, double x_lo, double x_hi,
                                           std::span<const std::uint64_t> N_list, std::size_t grid_size,
                                           std::uint64_t seed = 1);

// Same double-precision path for a single point; exposed for cross-checks.
double truncated_A_normalized_fast(const cusp::CoefficientTable& table, double x, std::uint64_t N);

void write_profile_csv(std::ostream& out, const TruncationProfile& p);

}  // namespace momentlab::voronoi
