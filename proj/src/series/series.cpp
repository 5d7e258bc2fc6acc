#include "momentlab/series.hpp"

#include <algorithm>
#include <bit>
#include <utility>
#include <cmath>

#include "momentlab/arith.hpp"
#include "momentlab/error.hpp"
#include "momentlab/parallel.hpp"
#include "ntt.hpp"

namespace momentlab::series {
namespace {

constexpr std::size_t kSchoolbookCutoff = 64;

std::size_t max_bits(const QSeries& s) {
  std::size_t bits = 0;
  for (const BigInt& c : s.coeffs())
    if (c != 0) bits = std::max(bits, mpz_sizeinbase(c.get_mpz_t(), 2));
  return bits;
}

std::vector<std::uint64_t> residues(const QSeries& s, std::uint64_t p) {
  std::vector<std::uint64_t> r(s.length());
  for (std::size_t i = 0; i < s.length(); ++i) r[i] = mpz_fdiv_ui(s[i].get_mpz_t(), p);
  return r;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) { return static_cast<std::uint64_t>(u128(a) * b % p); }

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

// Mixed-radix CRT (Garner) back to signed integers in (-M/2, M/2].
std::vector<BigInt> reconstruct(const std::vector<std::vector<std::uint64_t>>& res,
                                std::span<const detail::NttPrime> primes, std::size_t length) {
  const std::size_t t = res.size();
  std::vector<std::vector<std::uint64_t>> inv(t, std::vector<std::uint64_t>(t, 0));
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < i; ++j)
      inv[i][j] = powmod(primes[j].modulus % primes[i].modulus, primes[i].modulus - 2, primes[i].modulus);

  BigInt modulus = 1;
  for (std::size_t i = 0; i < t; ++i) modulus *= static_cast<unsigned long>(primes[i].modulus);
  const BigInt half = modulus / 2;

  std::vector<BigInt> out(length);
  parallel_chunks(0, length, [&](unsigned, std::size_t lo, std::size_t hi) {
    std::vector<std::uint64_t> v(t);
    mpz_class x;
    for (std::size_t n = lo; n < hi; ++n) {
      for (std::size_t i = 0; i < t; ++i) {
        const std::uint64_t p = primes[i].modulus;
        std::uint64_t vi = res[i][n];
        for (std::size_t j = 0; j < i; ++j) {
          const std::uint64_t vj = v[j] % p;
          vi = mulmod(vi >= vj ? vi - vj : vi + p - vj, inv[i][j], p);
        }
        v[i] = vi;
      }
      x = static_cast<unsigned long>(v[t - 1]);
      for (std::size_t i = t - 1; i-- > 0;) {
        mpz_mul_ui(x.get_mpz_t(), x.get_mpz_t(), primes[i].modulus);
        mpz_add_ui(x.get_mpz_t(), x.get_mpz_t(), v[i]);
      }
      if (x > half) x -= modulus;
      out[n] = x;
    }
  });
  return out;
}

// a = hi * 2^shift + lo with 0 <= lo < 2^shift.
std::pair<QSeries, QSeries> split_bits(const QSeries& a, mp_bitcnt_t shift) {
  QSeries hi(a.length()), lo(a.length());
  for (std::size_t i = 0; i < a.length(); ++i) {
    mpz_fdiv_q_2exp(hi[i].get_mpz_t(), a[i].get_mpz_t(), shift);
    mpz_fdiv_r_2exp(lo[i].get_mpz_t(), a[i].get_mpz_t(), shift);
  }
  return {std::move(hi), std::move(lo)};
}

QSeries multiply_ntt(const QSeries& a, const QSeries& b, bool squaring);

// Coefficients beyond the CRT capacity: split each operand into bit halves and
// recombine four (three when squaring) narrower products.
QSeries multiply_split(const QSeries& a, const QSeries& b, bool squaring) {
  const mp_bitcnt_t shift = std::max(max_bits(a), max_bits(b)) / 2;
  auto [ahi, alo] = split_bits(a, shift);
  QSeries hh(1), ll(1), mid(a.length());
  if (squaring) {
    hh = multiply_ntt(ahi, ahi, true);
    ll = multiply_ntt(alo, alo, true);
    mid = multiply_ntt(ahi, alo, false);
    for (std::size_t i = 0; i < mid.length(); ++i) mid[i] <<= 1;
  } else {
    auto [bhi, blo] = split_bits(b, shift);
    hh = multiply_ntt(ahi, bhi, false);
    ll = multiply_ntt(alo, blo, false);
    mid = multiply_ntt(ahi, blo, false);
    const QSeries cross = multiply_ntt(alo, bhi, false);
    for (std::size_t i = 0; i < mid.length(); ++i) mid[i] += cross[i];
  }
  for (std::size_t i = 0; i < hh.length(); ++i) {
    mpz_mul_2exp(hh[i].get_mpz_t(), hh[i].get_mpz_t(), 2 * shift);
    mpz_mul_2exp(mid[i].get_mpz_t(), mid[i].get_mpz_t(), shift);
    hh[i] += mid[i];
    hh[i] += ll[i];
  }
  return hh;
}

QSeries multiply_ntt(const QSeries& a, const QSeries& b, bool squaring) {
  const std::size_t length = a.length();
  const std::size_t t = crt_prime_count(a, b);
  if (t == 0) return multiply_split(a, b, squaring);
  const auto primes = detail::ntt_primes().first(t);
  std::vector<std::vector<std::uint64_t>> res(t);
  parallel_chunks(0, t, [&](unsigned, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const auto ra = residues(a, primes[i].modulus);
      if (squaring) {
        res[i] = detail::square_mod(ra, length, primes[i]);
      } else {
        const auto rb = residues(b, primes[i].modulus);
        res[i] = detail::convolve_mod(ra, rb, length, primes[i]);
      }
    }
  });
  return QSeries(reconstruct(res, primes, length));
}

void require_same_length(const QSeries& a, const QSeries& b) {
  if (a.length() != b.length())
    throw InvalidArgument("multiply: length mismatch (" + std::to_string(a.length()) + " vs " +
                          std::to_string(b.length()) + ")");
}

}  // namespace

QSeries::QSeries(std::size_t length) : coeffs_(length) {
  if (length == 0) throw InvalidArgument("QSeries: length must be positive");
}

QSeries::QSeries(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw InvalidArgument("QSeries: length must be positive");
}

QSeries::QSeries(std::initializer_list<long> coeffs) {
  if (coeffs.size() == 0) throw InvalidArgument("QSeries: length must be positive");
  coeffs_.reserve(coeffs.size());
  for (long c : coeffs) coeffs_.emplace_back(c);
}

std::vector<BigInt> divisor_power_sums(unsigned j, std::size_t n_max) {
  std::vector<BigInt> sigma(n_max);
  if (n_max <= 1) return sigma;
  const std::size_t top = n_max - 1;
  // sigma_j(n) < 2 n^j for j >= 2, and small otherwise: 128-bit sieve when safe.
  if (j * std::bit_width(top) + 3 <= 126) {
    std::vector<u128> acc(n_max, 0);
    for (std::size_t d = 1; d <= top; ++d) {
      u128 dj = 1;
      for (unsigned e = 0; e < j; ++e) dj *= d;
      for (std::size_t m = d; m <= top; m += d) acc[m] += dj;
    }
    for (std::size_t n = 1; n <= top; ++n) {
      const std::uint64_t words[2] = {static_cast<std::uint64_t>(acc[n]), static_cast<std::uint64_t>(acc[n] >> 64)};
      mpz_import(sigma[n].get_mpz_t(), 2, -1, sizeof(std::uint64_t), 0, 0, words);
    }
    return sigma;
  }
  BigInt dj;
  for (std::size_t d = 1; d <= top; ++d) {
    mpz_ui_pow_ui(dj.get_mpz_t(), d, j);
    for (std::size_t m = d; m <= top; m += d) sigma[m] += dj;
  }
  return sigma;
}

QSeries eisenstein(int weight, std::size_t n_max) {
  long c;
  switch (weight) {
    case 4: c = 240; break;
    case 6: c = -504; break;
    case 8: c = 480; break;
    case 10: c = -264; break;
    case 14: c = -24; break;
    default:
      throw InvalidArgument("eisenstein: unsupported weight " + std::to_string(weight) +
                            " (supported: 4, 6, 8, 10, 14)");
  }
  if (n_max == 0) throw InvalidArgument("eisenstein: n_max must be >= 1");
  std::vector<BigInt> coeffs = divisor_power_sums(static_cast<unsigned>(weight - 1), n_max);
  coeffs[0] = 1;
  for (std::size_t n = 1; n < n_max; ++n) coeffs[n] *= c;
  return QSeries(std::move(coeffs));
}

std::size_t crt_prime_count(const QSeries& a, const QSeries& b) {
  // |c_n| <= (#terms) max|a| max|b|; the CRT modulus must exceed twice that.
  const std::size_t bound_bits = max_bits(a) + max_bits(b) + std::bit_width(a.length()) + 2;
  double capacity = 0;
  std::size_t count = 0;
  for (const auto& p : detail::ntt_primes()) {
    if (capacity > static_cast<double>(bound_bits)) break;
    capacity += std::log2(static_cast<double>(p.modulus));
    ++count;
  }
  return capacity > static_cast<double>(bound_bits) ? count : 0;
}

QSeries multiply_schoolbook(const QSeries& a, const QSeries& b) {
  require_same_length(a, b);
  const std::size_t n = a.length();
  QSeries out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; i + j < n; ++j) {
      if (b[j] == 0) continue;
      mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  return out;
}

QSeries multiply(const QSeries& a, const QSeries& b) {
  require_same_length(a, b);
  if (a.length() < kSchoolbookCutoff) return multiply_schoolbook(a, b);
  return multiply_ntt(a, b, &a == &b || a == b);
}

QSeries power(const QSeries& a, unsigned e) {
  if (e == 0) throw InvalidArgument("power: exponent must be >= 1");
  QSeries result = a;
  for (int bit = std::bit_width(e) - 2; bit >= 0; --bit) {
    result = multiply(result, result);
    if ((e >> bit) & 1u) result = multiply(result, a);
  }
  return result;
}

QSeries eta_product_24(std::size_t n_max) {
  if (n_max == 0) throw InvalidArgument("eta_product_24: n_max must be >= 1");
  QSeries out(n_max);
  if (n_max == 1) return out;
  // Euler: prod (1 - q^n) = sum_k (-1)^k q^{k(3k-1)/2}, k over all integers.
  const std::size_t m = n_max - 1;
  QSeries euler(m);
  for (long k = 0;; ++k) {
    const std::size_t e1 = static_cast<std::size_t>(k * (3 * k - 1) / 2);
    const std::size_t e2 = static_cast<std::size_t>(k * (3 * k + 1) / 2);
    if (e1 >= m) break;
    const long sign = (k % 2) ? -1 : 1;
    euler[e1] = sign;
    if (k > 0 && e2 < m) euler[e2] = sign;
  }
  QSeries p24 = power(euler, 24);
  for (std::size_t n = 1; n < n_max; ++n) out[n] = p24[n - 1];
  return out;
}

QSeries delta(std::size_t n_max) {
  if (n_max == 0) throw InvalidArgument("delta: n_max must be >= 1");
  QSeries numerator = power(eisenstein(4, n_max), 3);
  {
    const QSeries e6 = eisenstein(6, n_max);
    const QSeries e6sq = multiply(e6, e6);
    for (std::size_t n = 0; n < n_max; ++n) numerator[n] -= e6sq[n];
  }
  for (std::size_t n = 0; n < n_max; ++n) {
    if (!mpz_divisible_ui_p(numerator[n].get_mpz_t(), 1728))
      throw ConsistencyError("delta: E4^3 - E6^2 not divisible by 1728 at q^" + std::to_string(n));
    mpz_divexact_ui(numerator[n].get_mpz_t(), numerator[n].get_mpz_t(), 1728);
  }
  return numerator;
}

}  // namespace momentlab::series
