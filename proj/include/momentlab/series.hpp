#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "momentlab/bigreal.hpp"

namespace momentlab::series {

/// Exact integer power-series prefix: coefficient n of q^n for 0 <= n < length.
class QSeries {
 public:
  explicit QSeries(std::size_t length);
  explicit QSeries(std::vector<BigInt> coeffs);
  QSeries(std::initializer_list<long> coeffs);

  std::size_t length() const { return coeffs_.size(); }
  const BigInt& operator[](std::size_t n) const { return coeffs_[n]; }
  BigInt& operator[](std::size_t n) { return coeffs_[n]; }
  std::span<const BigInt> coeffs() const { return coeffs_; }
  std::vector<BigInt> release() && { return std::move(coeffs_); }

  friend bool operator==(const QSeries& a, const QSeries& b) { return a.coeffs_ == b.coeffs_; }

 private:
  std::vector<BigInt> coeffs_;
};

// Normalized Eisenstein series 1 + c_k sum sigma_{k-1}(n) q^n, k in {4,6,8,10,14}.
QSeries eisenstein(int weight, std::size_t n_max);

// Exact truncated Cauchy product. Lengths must match. Uses a multi-prime NTT
// with CRT reconstruction above a small-size cutoff; the result is bit-identical
// to multiply_schoolbook.
QSeries multiply(const QSeries& a, const QSeries& b);
QSeries multiply_schoolbook(const QSeries& a, const QSeries& b);

// a^e by binary exponentiation over multiply(); e >= 1.
QSeries power(const QSeries& a, unsigned e);

// q * prod_{n>=1} (1 - q^n)^24 from the pentagonal-number series.
QSeries eta_product_24(std::size_t n_max);

// (E4^3 - E6^2) / 1728 with exact divisibility enforced.
QSeries delta(std::size_t n_max);

// sigma_j(n) for 0 <= n < n_max (sigma_j(0) = 0), by divisor sieve.
std::vector<BigInt> divisor_power_sums(unsigned j, std::size_t n_max);

// Number of CRT primes a single NTT pass needs for these operands; 0 when the
// bound exceeds the prime set and multiply() splits coefficients instead.
std::size_t crt_prime_count(const QSeries& a, const QSeries& b);

}  // namespace momentlab::series
