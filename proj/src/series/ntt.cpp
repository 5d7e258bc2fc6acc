#include "ntt.hpp"

#include <algorithm>
#include <array>
#include <bit>

#include "momentlab/error.hpp"

namespace momentlab::series::detail {
namespace {

constexpr std::array<NttPrime, 16> kPrimes{{
    {0x3ffffffffa000001ULL, 3},  {0x3ffffffff9000001ULL, 5},  {0x3fffffffea000001ULL, 5},
    {0x3fffffffe5000001ULL, 3},  {0x3fffffffd9000001ULL, 3},  {0x3fffffffcc000001ULL, 5},
    {0x3fffffffa3000001ULL, 3},  {0x3fffffff96000001ULL, 17}, {0x3fffffff5e000001ULL, 3},
    {0x3fffffff34000001ULL, 3},  {0x3fffffff2d000001ULL, 11}, {0x3fffffff25000001ULL, 3},
    {0x3fffffff09000001ULL, 5},  {0x3fffffff03000001ULL, 10}, {0x3ffffffefb000001ULL, 3},
    {0x3ffffffed3000001ULL, 7},
}};

// Twiddles w^0 .. w^(n/2 - 1) for a primitive n-th root w, Montgomery form.
std::vector<std::uint64_t> twiddles(const Montgomery& mg, std::uint64_t generator, std::size_t n, bool inverse) {
  const std::uint64_t p = mg.modulus();
  std::uint64_t w = mg.pow(mg.to(generator), (p - 1) / n);
  if (inverse) w = mg.pow(w, n - 1);
  std::vector<std::uint64_t> tw(n / 2);
  std::uint64_t cur = mg.one();
  for (std::size_t j = 0; j < n / 2; ++j) {
    tw[j] = cur;
    cur = mg.mul(cur, w);
  }
  return tw;
}

// Decimation in frequency: natural order in, bit-reversed order out.
void forward(std::vector<std::uint64_t>& a, const Montgomery& mg, const std::vector<std::uint64_t>& tw) {
  const std::size_t n = a.size();
  for (std::size_t len = n / 2, stride = 1; len >= 1; len >>= 1, stride <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * len) {
      for (std::size_t j = 0; j < len; ++j) {
        const std::uint64_t u = a[i + j];
        const std::uint64_t v = a[i + j + len];
        a[i + j] = mg.add(u, v);
        a[i + j + len] = mg.mul(mg.sub(u, v), tw[j * stride]);
      }
    }
  }
}

// Decimation in time with inverse twiddles: bit-reversed in, natural out.
void inverse(std::vector<std::uint64_t>& a, const Montgomery& mg, const std::vector<std::uint64_t>& tw) {
  const std::size_t n = a.size();
  for (std::size_t len = 1, stride = n / 2; len < n; len <<= 1, stride >>= 1) {
    for (std::size_t i = 0; i < n; i += 2 * len) {
      for (std::size_t j = 0; j < len; ++j) {
        const std::uint64_t u = a[i + j];
        const std::uint64_t v = mg.mul(a[i + j + len], tw[j * stride]);
        a[i + j] = mg.add(u, v);
        a[i + j + len] = mg.sub(u, v);
      }
    }
  }
  const std::uint64_t n_inv = mg.pow(mg.to(n), mg.modulus() - 2);
  for (auto& x : a) x = mg.from(mg.mul(x, n_inv));
}

std::size_t transform_length(std::size_t needed) {
  const std::size_t n = std::bit_ceil(std::max<std::size_t>(needed, 2));
  if (n > (std::size_t{1} << kMaxLogLength)) throw InvalidArgument("convolution too long for the NTT prime set");
  return n;
}

std::vector<std::uint64_t> load(std::span<const std::uint64_t> src, std::size_t n, const Montgomery& mg) {
  std::vector<std::uint64_t> out(n, 0);
  for (std::size_t i = 0; i < src.size(); ++i) out[i] = mg.to(src[i]);
  return out;
}

}  // namespace

std::span<const NttPrime> ntt_primes() { return kPrimes; }

Montgomery::Montgomery(std::uint64_t p) : p_(p) {
  if (p % 2 == 0 || p >= (std::uint64_t{1} << 62)) throw InvalidArgument("Montgomery: modulus must be odd and < 2^62");
  std::uint64_t inv = p;  // Newton iteration for p^{-1} mod 2^64
  for (int i = 0; i < 6; ++i) inv *= 2 - p * inv;
  neg_inv_ = ~inv + 1;
  r1_ = static_cast<std::uint64_t>((u128(1) << 64) % p);
  r2_ = static_cast<std::uint64_t>(u128(r1_) * r1_ % p);
}

std::uint64_t Montgomery::pow(std::uint64_t base, std::uint64_t e) const {
  std::uint64_t r = r1_;
  while (e) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

std::vector<std::uint64_t> convolve_mod(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                        std::size_t out_len, const NttPrime& prime) {
  const std::size_t n = transform_length(a.size() + b.size() - 1);
  const Montgomery mg(prime.modulus);
  auto fa = load(a, n, mg);
  auto fb = load(b, n, mg);
  const auto tw = twiddles(mg, prime.generator, n, false);
  forward(fa, mg, tw);
  forward(fb, mg, tw);
  for (std::size_t i = 0; i < n; ++i) fa[i] = mg.mul(fa[i], fb[i]);
  fb = {};
  inverse(fa, mg, twiddles(mg, prime.generator, n, true));
  fa.resize(out_len);
  return fa;
}

std::vector<std::uint64_t> square_mod(std::span<const std::uint64_t> a, std::size_t out_len, const NttPrime& prime) {
  const std::size_t n = transform_length(2 * a.size() - 1);
  const Montgomery mg(prime.modulus);
  auto fa = load(a, n, mg);
  forward(fa, mg, twiddles(mg, prime.generator, n, false));
  for (auto& x : fa) x = mg.mul(x, x);
  inverse(fa, mg, twiddles(mg, prime.generator, n, true));
  fa.resize(out_len);
  return fa;
}

}  // namespace momentlab::series::detail
