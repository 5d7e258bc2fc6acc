// Compiled with -mavx2 (no FMA): every lane performs the same IEEE operations
// as the scalar reference, which is what makes gap_row bit-identical.
#include <algorithm>
#include <cmath>
#include <limits>

#include "momentlab/simd.hpp"

#ifndef __AVX2__

namespace momentlab::simd {
// Non-x86 builds: the dispatcher never selects these, but keep them linkable.
double cos_sum_avx2(const double* weight, const double* freq, std::size_t count, double s, double phase) {
  return cos_sum_scalar(weight, freq, count, s, phase);
}
RowMin gap_row_avx2(double base, double base_weight, double base_max, const double* value, const double* weight,
                    const double* maxpow, std::size_t count, double tol, std::vector<std::uint32_t>& near_zero) {
  return gap_row_scalar(base, base_weight, base_max, value, weight, maxpow, count, tol, near_zero);
}
}  // namespace momentlab::simd

#else

#include <immintrin.h>

namespace momentlab::simd {
namespace {

// pi/2 split for Cody-Waite reduction; the first part has 25 significant bits
// so j * kPio2a is exact for |j| < 2^28.
constexpr double kPio2a = 1.570796310901641845703125;
constexpr double kPio2b = 1.589325471229585673428e-8;
constexpr double kPio2c = 6.12323399573676588614e-17;
constexpr double kTwoOverPi = 0.636619772367581343076;

// Minimax polynomials on [-pi/4, pi/4] (Cephes).
constexpr double kS0 = 1.58962301576546568060e-10, kS1 = -2.50507477628578072866e-8, kS2 = 2.75573136213857245213e-6,
                 kS3 = -1.98412698295895385996e-4, kS4 = 8.33333333332211858878e-3, kS5 = -1.66666666666666307295e-1;
constexpr double kC0 = -1.13585365213876817300e-11, kC1 = 2.08757008419747316778e-9, kC2 = -2.75573141792967388112e-7,
                 kC3 = 2.48015872888517045348e-5, kC4 = -1.38888888888730564116e-3, kC5 = 4.16666666666665929218e-2;

inline __m256d poly(__m256d z, double c0, double c1, double c2, double c3, double c4, double c5) {
  __m256d p = _mm256_set1_pd(c0);
  p = _mm256_add_pd(_mm256_mul_pd(p, z), _mm256_set1_pd(c1));
  p = _mm256_add_pd(_mm256_mul_pd(p, z), _mm256_set1_pd(c2));
  p = _mm256_add_pd(_mm256_mul_pd(p, z), _mm256_set1_pd(c3));
  p = _mm256_add_pd(_mm256_mul_pd(p, z), _mm256_set1_pd(c4));
  p = _mm256_add_pd(_mm256_mul_pd(p, z), _mm256_set1_pd(c5));
  return p;
}

inline __m256d cos4(__m256d x) {
  const __m256d j = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d y = _mm256_sub_pd(x, _mm256_mul_pd(j, _mm256_set1_pd(kPio2a)));
  y = _mm256_sub_pd(y, _mm256_mul_pd(j, _mm256_set1_pd(kPio2b)));
  y = _mm256_sub_pd(y, _mm256_mul_pd(j, _mm256_set1_pd(kPio2c)));
  const __m256d z = _mm256_mul_pd(y, y);

  const __m256d s = _mm256_add_pd(y, _mm256_mul_pd(_mm256_mul_pd(y, z), poly(z, kS0, kS1, kS2, kS3, kS4, kS5)));
  const __m256d c = _mm256_add_pd(_mm256_sub_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(z, _mm256_set1_pd(0.5))),
                                  _mm256_mul_pd(_mm256_mul_pd(z, z), poly(z, kC0, kC1, kC2, kC3, kC4, kC5)));

  // Quadrant q = j mod 4: cos x = cos y, -sin y, -cos y, sin y.
  const __m256i q = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(j));
  const __m256i one = _mm256_set1_epi64x(1), two = _mm256_set1_epi64x(2);
  const __m256d use_sin = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
  const __m256i flip = _mm256_cmpeq_epi64(_mm256_and_si256(_mm256_add_epi64(q, one), two), two);
  const __m256d r = _mm256_blendv_pd(c, s, use_sin);
  const __m256d sign = _mm256_castsi256_pd(_mm256_and_si256(flip, _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ULL))));
  return _mm256_xor_pd(r, sign);
}

}  // namespace

double cos_sum_avx2(const double* weight, const double* freq, std::size_t count, double s, double phase) {
  const __m256d vs = _mm256_set1_pd(s), vp = _mm256_set1_pd(phase);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d arg = _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(freq + j), vs), vp);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(weight + j), cos4(arg)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  if (j < count) {
    alignas(32) double w[4] = {0, 0, 0, 0}, f[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; j + i < count; ++i) w[i] = weight[j + i], f[i] = freq[j + i];
    const __m256d arg = _mm256_add_pd(_mm256_mul_pd(_mm256_load_pd(f), vs), vp);
    _mm256_store_pd(lanes, _mm256_mul_pd(_mm256_load_pd(w), cos4(arg)));
    total += (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  }
  return total;
}

RowMin gap_row_avx2(double base, double base_weight, double base_max, const double* value, const double* weight,
                    const double* maxpow, std::size_t count, double tol, std::vector<std::uint32_t>& near_zero) {
  const __m256d vb = _mm256_set1_pd(base), vbw = _mm256_set1_pd(base_weight), vbm = _mm256_set1_pd(base_max);
  const __m256d vtol = _mm256_set1_pd(tol);
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  const double inf = std::numeric_limits<double>::infinity();
  __m256d best = _mm256_set1_pd(inf);
  __m256d best_idx = _mm256_setzero_pd();  // indices held exactly as doubles
  __m256d idx = _mm256_setr_pd(0, 1, 2, 3);
  const __m256d step = _mm256_set1_pd(4);

  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d d = _mm256_and_pd(_mm256_sub_pd(vb, _mm256_loadu_pd(value + j)), abs_mask);
    const __m256d small = _mm256_cmp_pd(d, vtol, _CMP_LT_OQ);
    for (int mask = _mm256_movemask_pd(small); mask; mask &= mask - 1)
      near_zero.push_back(static_cast<std::uint32_t>(j + __builtin_ctz(static_cast<unsigned>(mask))));
    __m256d g = _mm256_mul_pd(d, vbw);
    g = _mm256_mul_pd(g, _mm256_loadu_pd(weight + j));
    g = _mm256_mul_pd(g, _mm256_max_pd(vbm, _mm256_loadu_pd(maxpow + j)));
    g = _mm256_blendv_pd(g, _mm256_set1_pd(inf), small);
    const __m256d better = _mm256_cmp_pd(g, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, g, better);
    best_idx = _mm256_blendv_pd(best_idx, idx, better);
    idx = _mm256_add_pd(idx, step);
  }

  alignas(32) double bv[4], bi[4];
  _mm256_store_pd(bv, best);
  _mm256_store_pd(bi, best_idx);
  RowMin out{inf, 0};
  for (int lane = 0; lane < 4; ++lane) {
    const auto i = static_cast<std::uint32_t>(bi[lane]);
    if (bv[lane] < out.min || (bv[lane] == out.min && bv[lane] != inf && i < out.index)) out = {bv[lane], i};
  }
  for (; j < count; ++j) {
    const double d = std::fabs(base - value[j]);
    if (d < tol) {
      near_zero.push_back(static_cast<std::uint32_t>(j));
      continue;
    }
    double g = d * base_weight;
    g = g * weight[j];
    g = g * std::max(base_max, maxpow[j]);
    if (g < out.min) out = {g, static_cast<std::uint32_t>(j)};
  }
  return out;
}

}  // namespace momentlab::simd

#endif
