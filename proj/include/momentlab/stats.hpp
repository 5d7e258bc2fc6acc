#pragma once

#include <cstdint>
#include <span>

namespace momentlab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

// Ordinary least squares y = slope * x + intercept. Needs at least two
// distinct x values.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

// splitmix64: small, fully specified generator so seeded runs are identical
// across standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);
  // Uniform in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  // Uniform double in [0, 1).
  double unit();

 private:
  std::uint64_t state_;
};

}  // namespace momentlab
