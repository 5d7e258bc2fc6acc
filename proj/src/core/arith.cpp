#include "momentlab/arith.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>

#include "momentlab/error.hpp"

namespace momentlab {
namespace {

void set_exact(mpfr_t dst, i128 v) {
  const bool neg = v < 0;
  u128 mag = neg ? u128(-(v + 1)) + 1 : u128(v);
  mpz_t z;
  mpz_init(z);
  const std::uint64_t words[2] = {static_cast<std::uint64_t>(mag), static_cast<std::uint64_t>(mag >> 64)};
  mpz_import(z, 2, -1, sizeof(std::uint64_t), 0, 0, words);
  if (neg) mpz_neg(z, z);
  mpfr_set_z(dst, z, MPFR_RNDN);
  mpz_clear(z);
}

}  // namespace

std::uint64_t isqrt(u128 v) {
  if (v == 0) return 0;
  std::uint64_t r;
  if (v < (u128(1) << 52)) {
    r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(v)));
  } else {
    r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(v)));
  }
  while (u128(r) * r > v) --r;
  while (u128(r + 1) * (r + 1) <= v) ++r;
  return r;
}

bool is_perfect_square(u128 v, std::uint64_t* root) {
  const std::uint64_t r = isqrt(v);
  if (root) *root = r;
  return u128(r) * r == v;
}

SquarefreeSplit squarefree_split(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("squarefree_split: n must be positive");
  std::uint64_t kernel = 1, mult = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    for (int i = 0; i < e / 2; ++i) mult *= p;
    if (e % 2) kernel *= p;
  }
  kernel *= n;  // leftover prime (or 1)
  return {kernel, mult};
}

std::vector<std::uint32_t> squarefree_kernels(std::uint32_t limit) {
  std::vector<std::uint32_t> ker(static_cast<std::size_t>(limit) + 1);
  for (std::uint32_t n = 0; n <= limit; ++n) ker[n] = n;
  for (std::uint64_t p = 2; p * p <= limit; ++p) {
    const std::uint64_t sq = p * p;
    for (std::uint64_t m = sq; m <= limit; m += sq) {
      while (ker[m] % sq == 0) ker[m] /= static_cast<std::uint32_t>(sq);
    }
  }
  return ker;
}

std::vector<std::uint32_t> divisor_counts(std::uint32_t limit) {
  std::vector<std::uint32_t> d(static_cast<std::size_t>(limit) + 1, 0);
  for (std::uint64_t k = 1; k <= limit; ++k)
    for (std::uint64_t m = k; m <= limit; m += k) ++d[m];
  return d;
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
  std::vector<std::uint32_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (std::uint64_t p = 2; p <= limit; ++p) {
    if (composite[p]) continue;
    out.push_back(static_cast<std::uint32_t>(p));
    for (std::uint64_t m = p * p; m <= limit; m += p) composite[m] = true;
  }
  return out;
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  while (b) {
    const std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

int root_sum_sign(std::span<const RootTerm> terms, double offset) {
  // Group by squarefree kernel: sum c_i a_i sqrt(q_i).
  struct Grouped {
    std::uint64_t kernel;
    i128 coeff;
  };
  std::vector<Grouped> groups;
  groups.reserve(terms.size());
  for (const RootTerm& t : terms) {
    if (t.coeff == 0 || t.radicand == 0) continue;
    const SquarefreeSplit s = squarefree_split(t.radicand);
    const i128 c = i128(t.coeff) * i128(s.multiplier);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Grouped& g) { return g.kernel == s.kernel; });
    if (it == groups.end())
      groups.push_back({s.kernel, c});
    else
      it->coeff += c;
  }
  i128 rational = 0;
  bool irrational = false;
  for (const Grouped& g : groups) {
    if (g.kernel == 1)
      rational += g.coeff;
    else if (g.coeff != 0)
      irrational = true;
  }
  if (!irrational) {
    // Both sides are exact dyadic rationals; compare in MPFR to avoid double
    // overflow of the integer part.
    mpfr_t a, b;
    mpfr_inits2(256, a, b, static_cast<mpfr_ptr>(nullptr));
    set_exact(a, rational);
    mpfr_set_d(b, offset, MPFR_RNDN);
    const int c = mpfr_cmp(a, b);
    mpfr_clears(a, b, static_cast<mpfr_ptr>(nullptr));
    return (c > 0) - (c < 0);
  }
  // Linear independence of square roots of distinct squarefree integers makes
  // the value nonzero; refine until the error bound separates it from zero.
  for (mpfr_prec_t prec = 128; prec <= (1 << 16); prec *= 2) {
    mpfr_t sum, term, scale, root;
    mpfr_inits2(prec, sum, term, scale, root, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_d(sum, -offset, MPFR_RNDN);
    mpfr_set_d(scale, std::fabs(offset), MPFR_RNDN);
    for (const Grouped& g : groups) {
      if (g.coeff == 0) continue;
      mpfr_sqrt_ui(root, g.kernel, MPFR_RNDN);
      set_exact(term, g.coeff);
      mpfr_mul(term, term, root, MPFR_RNDN);
      mpfr_add(sum, sum, term, MPFR_RNDN);
      mpfr_abs(term, term, MPFR_RNDN);
      mpfr_add(scale, scale, term, MPFR_RNDN);
    }
    // |error| <= 4 (groups + 1) 2^-prec * scale, with room to spare.
    mpfr_mul_ui(scale, scale, 8 * (groups.size() + 1), MPFR_RNDU);
    mpfr_div_2si(scale, scale, prec, MPFR_RNDU);
    mpfr_abs(term, sum, MPFR_RNDN);
    const bool decided = mpfr_cmp(term, scale) > 0;
    const int s = mpfr_sgn(sum);
    mpfr_clears(sum, term, scale, root, static_cast<mpfr_ptr>(nullptr));
    if (decided) return (s > 0) - (s < 0);
  }
  throw ConsistencyError("root_sum_sign: could not separate a nonzero value from zero");
}

}  // namespace momentlab
