#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace momentlab::simd {

enum class Backend { scalar, avx2 };

bool avx2_available();
// Selected once from CPU detection; MOMENTLAB_SIMD=scalar|avx2 overrides
// (an unavailable request falls back to scalar).
Backend active_backend();
// Forces a backend (tests, benchmarks). Throws if the CPU lacks it.
void set_backend(Backend backend);
std::string backend_name(Backend backend);

// sum_j weight[j] * cos(freq[j] * s + phase), all in double precision.
// Kernel contract: |freq[j] * s + phase| <= 2^26; larger arguments are
// routed to the scalar path.
using CosSumFn = double (*)(const double* weight, const double* freq, std::size_t count, double s, double phase);
double cos_sum_scalar(const double* weight, const double* freq, std::size_t count, double s, double phase);
double cos_sum_avx2(const double* weight, const double* freq, std::size_t count, double s, double phase);
double cos_sum(std::span<const double> weight, std::span<const double> freq, double s, double phase);

// One row of the gap scan: for each j,
//   d_j = |base - value[j]|,  g_j = d_j * base_weight * weight[j] * max(base_max, maxpow[j])
// (multiplied in that order). Entries with d_j < tol are not minimized; their
// indices are appended to near_zero for exact treatment. Returns the smallest
// g_j and its first index; min = +inf when every entry was near zero.
struct RowMin {
  double min;
  std::uint32_t index;
};
using GapRowFn = RowMin (*)(double base, double base_weight, double base_max, const double* value, const double* weight,
                            const double* maxpow, std::size_t count, double tol, std::vector<std::uint32_t>& near_zero);
RowMin gap_row_scalar(double base, double base_weight, double base_max, const double* value, const double* weight,
                      const double* maxpow, std::size_t count, double tol, std::vector<std::uint32_t>& near_zero);
RowMin gap_row_avx2(double base, double base_weight, double base_max, const double* value, const double* weight,
                    const double* maxpow, std::size_t count, double tol, std::vector<std::uint32_t>& near_zero);
RowMin gap_row(double base, double base_weight, double base_max, const double* value, const double* weight,
               const double* maxpow, std::size_t count, double tol, std::vector<std::uint32_t>& near_zero);

}  // namespace momentlab::simd
