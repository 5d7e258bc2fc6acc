#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "momentlab/arith.hpp"

namespace momentlab::series::detail {

struct NttPrime {
  std::uint64_t modulus;    // c * 2^24 + 1, just below 2^62
  std::uint64_t generator;  // primitive root
};

inline constexpr unsigned kMaxLogLength = 24;

std::span<const NttPrime> ntt_primes();

// Montgomery arithmetic modulo an odd p < 2^62, R = 2^64.
class Montgomery {
 public:
  explicit Montgomery(std::uint64_t p);

  std::uint64_t modulus() const { return p_; }
  std::uint64_t to(std::uint64_t x) const { return mul(x % p_, r2_); }
  std::uint64_t from(std::uint64_t x) const { return reduce(x); }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return reduce(u128(a) * b); }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + p_ - b; }
  // Montgomery-form power.
  std::uint64_t pow(std::uint64_t base, std::uint64_t e) const;
  std::uint64_t one() const { return r1_; }

 private:
  std::uint64_t reduce(u128 t) const {
    const std::uint64_t m = static_cast<std::uint64_t>(t) * neg_inv_;
    const std::uint64_t u = static_cast<std::uint64_t>((t + u128(m) * p_) >> 64);
    return u >= p_ ? u - p_ : u;
  }

  std::uint64_t p_;
  std::uint64_t neg_inv_;  // -p^{-1} mod 2^64
  std::uint64_t r1_;       // R mod p
  std::uint64_t r2_;       // R^2 mod p
};

// Cyclic convolution of residues (plain form, each < p) truncated to out_len.
// a and b are zero-padded to a power of two >= a.size() + b.size() - 1.
std::vector<std::uint64_t> convolve_mod(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                        std::size_t out_len, const NttPrime& prime);

// a*a, saving one forward transform.
std::vector<std::uint64_t> square_mod(std::span<const std::uint64_t> a, std::size_t out_len, const NttPrime& prime);

}  // namespace momentlab::series::detail
