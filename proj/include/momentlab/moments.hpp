#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "momentlab/bigreal.hpp"
#include "momentlab/cuspform.hpp"

namespace momentlab::moments {

inline constexpr int kMinOrder = 2;
inline constexpr int kMaxOrder = 8;
// Points below this endpoint are reported but kept out of fits and ratios.
inline constexpr std::uint64_t kWarmupT = 256;

// Integral of A(x)^k over [1, T]. A is constant on [n, n+1), so this is
// sum_{n=1}^{T-1} A(n)^k, exactly.
BigInt moment_exact(const cusp::CoefficientTable& table, int k, std::uint64_t T);
// Rational endpoint: adds (T - floor T) A(floor T)^k.
BigRational moment_exact(const cusp::CoefficientTable& table, int k, const BigRational& T);

// Exact moments at several integer endpoints in one pass.
std::vector<BigInt> moment_exact_many(const cusp::CoefficientTable& table, int k, std::span<const std::uint64_t> T_list);

// 1 + k(2 weight - 1)/4 as an exact rational.
BigRational main_term_exponent(int k, int weight);

// C_k T^{1 + k(2w-1)/4}; k in {2, 3, 4}.
BigReal main_term(const BigReal& Ck, int weight, int k, const BigReal& T, long precision_bits);

struct MomentConstant {
  int k = 0;
  int weight = 0;
  std::uint64_t y = 0;       // truncation of the singular series
  std::string source;        // "truncated" or "extrapolated"
  BigReal value;
  double heuristic_error = 0;  // extrapolated only
};

// C_k from s_{k;l}(f; y).
MomentConstant constant_truncated(const cusp::CoefficientTable& table, int k, std::uint64_t y, long precision_bits);
// C_k from the geometric continuation of the dyadic differences at y/32, ..., y.
MomentConstant constant_extrapolated(const cusp::CoefficientTable& table, int k, std::uint64_t y, long precision_bits);

struct MomentPoint {
  std::uint64_t T = 0;
  BigInt exact;
  BigReal main_term, error, ratio;
  bool in_fit = false;      // T >= kWarmupT and error != 0
  bool zero_error = false;
  std::optional<double> local_delta;  // from this point and the previous one
};

struct WindowPoint {  // integral over [T, 2T]
  std::uint64_t T = 0;
  BigInt exact;
  BigReal main_term, error, ratio;
};

struct MomentReport {
  int weight = 0;
  int k = 0;
  MomentConstant constant;
  BigRational exponent;
  std::vector<MomentPoint> points;
  std::vector<WindowPoint> windows;  // where 2T <= n_max
  double slope = 0;      // of log|error| against log T over in_fit points
  double delta_hat = 0;  // exponent - slope; empirical
  std::size_t fit_points = 0;
};

// T_list dyadic (each twice the previous), >= 5 entries, max <= n_max.
MomentReport error_exponent_fit(const cusp::CoefficientTable& table, const MomentConstant& constant,
                                std::span<const std::uint64_t> T_list, long precision_bits);

// Dyadic list T0, 2 T0, ..., up to T1 inclusive.
std::vector<std::uint64_t> dyadic_list(std::uint64_t T0, std::uint64_t T1);

struct OscillatoryReport {
  double alpha = 0, A = 0, B = 0, T = 0;
  BigReal value;                       // adaptive quadrature
  std::optional<BigReal> closed_form;  // when 2 alpha + 1 is a nonnegative integer
  double ratio = 0;                    // |value| |A| / T^{1/2 + alpha}
  std::size_t panels = 0;
};

// Integral over [T, 2T] of t^alpha cos(A sqrt t + B), computed as the integral
// over [sqrt T, sqrt 2T] of 2 u^{2 alpha + 1} cos(A u + B).
OscillatoryReport oscillatory_check(double alpha, double A, double B, double T, long precision_bits);

struct OscillatorySweep {
  std::vector<OscillatoryReport> rows;
  double max_ratio = 0, median_ratio = 0;
};
OscillatorySweep oscillatory_sweep(double alpha, std::span<const double> A_values, double B, double T,
                                   long precision_bits);

// CSV: k,T,exact_moment,main_term,error,ratio
void write_moment_csv(std::ostream& out, const MomentReport& r);

}  // namespace momentlab::moments
