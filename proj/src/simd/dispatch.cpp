#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

#include "momentlab/error.hpp"
#include "momentlab/simd.hpp"

namespace momentlab::simd {
namespace {

constexpr double kMaxKernelArgument = 67108864.0;  // 2^26

Backend detect() {
  const bool have = avx2_available();
  if (const char* env = std::getenv("MOMENTLAB_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0) return have ? Backend::avx2 : Backend::scalar;
  }
  return have ? Backend::avx2 : Backend::scalar;
}

std::atomic<int>& current() {
  static std::atomic<int> b{static_cast<int>(detect())};
  return b;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool have = __builtin_cpu_supports("avx2");
  return have;
#else
  return false;
#endif
}

Backend active_backend() { return static_cast<Backend>(current().load(std::memory_order_relaxed)); }

void set_backend(Backend backend) {
  if (backend == Backend::avx2 && !avx2_available()) throw InvalidArgument("AVX2 not available on this CPU");
  current().store(static_cast<int>(backend));
}

std::string backend_name(Backend backend) { return backend == Backend::avx2 ? "avx2" : "scalar"; }

double cos_sum_scalar(const double* weight, const double* freq, std::size_t count, double s, double phase) {
  double acc = 0.0;
  for (std::size_t j = 0; j < count; ++j) acc += weight[j] * std::cos(freq[j] * s + phase);
  return acc;
}

double cos_sum(std::span<const double> weight, std::span<const double> freq, double s, double phase) {
  if (weight.size() != freq.size()) throw InvalidArgument("cos_sum: length mismatch");
  const std::size_t n = weight.size();
  if (active_backend() == Backend::avx2) {
    double fmax = 0.0;
    for (double f : freq) fmax = std::max(fmax, std::abs(f));
    if (fmax * std::abs(s) + std::abs(phase) <= kMaxKernelArgument) return cos_sum_avx2(weight.data(), freq.data(), n, s, phase);
  }
  return cos_sum_scalar(weight.data(), freq.data(), n, s, phase);
}

RowMin gap_row_scalar(double base, double base_weight, double base_max, const double* value, const double* weight,
                      const double* maxpow, std::size_t count, double tol, std::vector<std::uint32_t>& near_zero) {
  RowMin best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t j = 0; j < count; ++j) {
    const double d = std::fabs(base - value[j]);
    if (d < tol) {
      near_zero.push_back(static_cast<std::uint32_t>(j));
      continue;
    }
    double g = d * base_weight;
    g = g * weight[j];
    g = g * std::max(base_max, maxpow[j]);
    if (g < best.min) best = {g, static_cast<std::uint32_t>(j)};
  }
  return best;
}

RowMin gap_row(double base, double base_weight, double base_max, const double* value, const double* weight,
               const double* maxpow, std::size_t count, double tol, std::vector<std::uint32_t>& near_zero) {
  if (active_backend() == Backend::avx2)
    return gap_row_avx2(base, base_weight, base_max, value, weight, maxpow, count, tol, near_zero);
  return gap_row_scalar(base, base_weight, base_max, value, weight, maxpow, count, tol, near_zero);
}

}  // namespace momentlab::simd
