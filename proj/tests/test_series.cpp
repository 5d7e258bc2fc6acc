#include <vector>

#include "doctest.h"
#include "momentlab/error.hpp"
#include "momentlab/series.hpp"
#include "momentlab/stats.hpp"
#include "series/ntt.hpp"

using namespace momentlab;
using namespace momentlab::series;

namespace {

std::vector<long> as_longs(const QSeries& s) {
  std::vector<long> out;
  for (const auto& c : s.coeffs()) out.push_back(c.get_si());
  return out;
}

QSeries random_series(SplitMix64& rng, std::size_t length, unsigned max_bits) {
  QSeries s(length);
  for (std::size_t i = 0; i < length; ++i) {
    const unsigned bits = static_cast<unsigned>(rng.below(max_bits + 1));
    BigInt v = 0;
    for (unsigned b = 0; b < bits; b += 60) {
      v <<= 60;
      v += static_cast<unsigned long>(rng.next() >> 4);
    }
    if (bits > 0) v >>= static_cast<mp_bitcnt_t>((bits + 59) / 60 * 60 - bits);
    if (rng.below(2)) v = -v;
    if (rng.below(5) == 0) v = 0;
    s[i] = v;
  }
  return s;
}

BigInt naive_sigma(unsigned j, std::size_t n) {
  BigInt s = 0, dj;
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d) continue;
    mpz_ui_pow_ui(dj.get_mpz_t(), d, j);
    s += dj;
  }
  return s;
}

}  // namespace

TEST_CASE("eisenstein examples") {
  CHECK(as_longs(eisenstein(4, 3)) == std::vector<long>{1, 240, 2160});
  CHECK(as_longs(eisenstein(6, 2)) == std::vector<long>{1, -504});
  CHECK(as_longs(eisenstein(4, 1)) == std::vector<long>{1});
  // E8 = E4^2 is the classical identity relating two of the supported weights.
  CHECK(eisenstein(8, 200) == multiply(eisenstein(4, 200), eisenstein(4, 200)));
  CHECK(eisenstein(10, 200) == multiply(eisenstein(4, 200), eisenstein(6, 200)));
  CHECK(eisenstein(14, 200) == multiply(eisenstein(8, 200), eisenstein(6, 200)));
}

TEST_CASE("eisenstein rejects bad arguments") {
  CHECK_THROWS_AS(eisenstein(12, 10), InvalidArgument);
  CHECK_THROWS_AS(eisenstein(2, 10), InvalidArgument);
  CHECK_THROWS_AS(eisenstein(4, 0), InvalidArgument);
}

TEST_CASE("divisor power sums match naive divisor enumeration") {
  for (unsigned j : {0u, 1u, 3u, 5u, 13u, 25u}) {
    const auto sig = divisor_power_sums(j, 300);
    CHECK(sig[0] == 0);
    for (std::size_t n = 1; n < 300; ++n) CHECK(sig[n] == naive_sigma(j, n));
  }
}

TEST_CASE("multiply examples") {
  CHECK(as_longs(multiply(QSeries{1, 1}, QSeries{1, 1})) == std::vector<long>{1, 2});
  CHECK(as_longs(multiply(QSeries{1, 0, 0}, QSeries{0, 1, 0})) == std::vector<long>{0, 1, 0});
  CHECK(multiply(eisenstein(4, 5), eisenstein(6, 5))[1] == -264);
  CHECK_THROWS_AS(multiply(QSeries{1, 2}, QSeries{1, 2, 3}), InvalidArgument);
}

TEST_CASE("power examples") {
  CHECK(as_longs(power(QSeries{1, 1}, 2)) == std::vector<long>{1, 2});
  CHECK(as_longs(power(QSeries{1, -1, 0}, 3)) == std::vector<long>{1, -3, 3});
  const QSeries x{3, -7, 11, 0, 5};
  CHECK(power(x, 1) == x);
  CHECK(power(x, 5) == multiply(multiply(multiply(multiply(x, x), x), x), x));
  CHECK_THROWS_AS(power(x, 0), InvalidArgument);
}

TEST_CASE("NTT multiply is bit-identical to schoolbook") {
  SplitMix64 rng(20240601);
  for (std::size_t length : {64u, 65u, 127u, 300u, 1024u, 4096u}) {
    for (unsigned bits : {1u, 40u, 200u, 700u}) {
      if (length == 4096 && bits > 200) continue;
      const QSeries a = random_series(rng, length, bits);
      const QSeries b = random_series(rng, length, bits);
      CAPTURE(length);
      CAPTURE(bits);
      CHECK(multiply(a, b) == multiply_schoolbook(a, b));
      CHECK(multiply(a, a) == multiply_schoolbook(a, a));
    }
  }
}

TEST_CASE("multiply is commutative and associative") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t length = 1 + rng.below(150);
    const QSeries a = random_series(rng, length, 90);
    const QSeries b = random_series(rng, length, 90);
    const QSeries c = random_series(rng, length, 90);
    CHECK(multiply(a, b) == multiply(b, a));
    CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
  }
}

TEST_CASE("CRT prime count grows with the coefficient bound") {
  const QSeries small(std::vector<BigInt>(100, BigInt(3)));
  std::vector<BigInt> big(100);
  for (auto& c : big) mpz_ui_pow_ui(c.get_mpz_t(), 2, 400);
  const QSeries large(std::move(big));
  CHECK(crt_prime_count(small, small) == 1);
  CHECK(crt_prime_count(large, large) >= 14);
  CHECK(crt_prime_count(large, small) < crt_prime_count(large, large));
  std::vector<BigInt> huge(100);
  for (auto& c : huge) mpz_ui_pow_ui(c.get_mpz_t(), 3, 900);
  CHECK(crt_prime_count(QSeries(huge), QSeries(huge)) == 0);
}

TEST_CASE("NTT primes are primes with the advertised 2-adic order and generator") {
  for (const auto& prime : detail::ntt_primes()) {
    const std::uint64_t p = prime.modulus;
    CAPTURE(p);
    CHECK(p < (std::uint64_t{1} << 62));
    CHECK((p - 1) % (std::uint64_t{1} << detail::kMaxLogLength) == 0);
    const BigInt pz = static_cast<unsigned long>(p);
    CHECK(mpz_probab_prime_p(pz.get_mpz_t(), 40) > 0);
    // Primitive root: g^((p-1)/f) != 1 for every prime f | p-1.
    std::vector<std::uint64_t> factors{2};
    std::uint64_t c = (p - 1) >> detail::kMaxLogLength;
    while (c % 2 == 0) c /= 2;
    for (std::uint64_t f = 3; f * f <= c; f += 2) {
      if (c % f) continue;
      factors.push_back(f);
      while (c % f == 0) c /= f;
    }
    if (c > 1) factors.push_back(c);
    const detail::Montgomery mg(p);
    for (std::uint64_t f : factors) CHECK(mg.from(mg.pow(mg.to(prime.generator), (p - 1) / f)) != 1);
  }
}

TEST_CASE("Montgomery round trip and multiplication") {
  const detail::Montgomery mg(detail::ntt_primes()[0].modulus);
  const std::uint64_t p = mg.modulus();
  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t a = rng.below(p), b = rng.below(p);
    CHECK(mg.from(mg.to(a)) == a);
    const auto expect = static_cast<std::uint64_t>((unsigned __int128)a * b % p);
    CHECK(mg.from(mg.mul(mg.to(a), mg.to(b))) == expect);
  }
}

TEST_CASE("eta product examples") {
  const QSeries eta = eta_product_24(6);
  CHECK(eta[0] == 0);
  CHECK(eta[1] == 1);
  CHECK(eta[2] == -24);
  CHECK(eta[5] == 4830);
  CHECK(eta_product_24(1).length() == 1);
  CHECK(eta_product_24(1)[0] == 0);
}

TEST_CASE("delta examples and dual oracle") {
  const QSeries d = delta(5);
  CHECK(as_longs(d) == std::vector<long>{0, 1, -24, 252, -1472});
  for (std::size_t n : {1u, 2u, 7u, 63u, 64u, 65u, 500u, 2500u}) {
    CAPTURE(n);
    CHECK(delta(n) == eta_product_24(n));
  }
}
