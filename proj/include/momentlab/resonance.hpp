#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "momentlab/bigreal.hpp"
#include "momentlab/cuspform.hpp"

namespace momentlab::resonance {

// sqrt(n) + sqrt(m) == sqrt(k) + sqrt(l), decided in exact integer arithmetic.
// All arguments must lie in [1, 2^40].
bool exact_equal(std::uint64_t n, std::uint64_t m, std::uint64_t k, std::uint64_t l);

// Supported (k, l) shapes: (2,1), (3,2), (4,2).
void require_shape(int k, int l);

// Solution tuple; entries past index k-1 are zero.
using Tuple = std::array<std::uint64_t, 4>;

// Same-kernel family: n_i = mult_i^2 * q. Right side is mult[l..k-1].
struct KernelFamily {
  std::uint64_t q;
  std::array<std::uint64_t, 4> mult;
  Tuple realize(int k) const;
};

// Streams every ordered solution tuple with entries <= y exactly once:
// same-kernel families first (ordered by q, then multipliers), then, for (4,2),
// the cross-kernel tuples (n,m,n,m), (n,m,m,n) with kernel(n) != kernel(m).
void enumerate_solutions(int k, int l, std::uint64_t y, const std::function<void(const Tuple&)>& visit);

// Sorted, materialized enumerate_solutions.
std::vector<Tuple> collect_solutions(int k, int l, std::uint64_t y);

// Oracle: every tuple in [1,y]^k tested with the exact predicate. Sorted.
std::vector<Tuple> brute_force_solutions(int k, int l, std::uint64_t y);

struct SeriesValue {
  int k = 0;
  int l = 0;
  std::uint64_t y = 0;
  long precision_bits = 0;
  BigReal value;
};

// s_{k;l}(f; y) for per-index weights w[n] = f(n) / n^{3/4} (w.size() > y).
// Uses kernel-family aggregation: the (4,2) sum is
//   sum_q sum_t (sum_{a+b=t} u_a u_b)^2 + 4 sum_{q<q'} G_q G_q'
// with u_a = w[a^2 q] and G_q = sum_{ker n = q} w[n]^2.
SeriesValue s_trunc_weights(std::span<const BigReal> w, int k, int l, std::uint64_t y, long precision_bits);

// Tuple-by-tuple sum over enumerate_solutions; O(#solutions). Oracle for the above.
SeriesValue s_trunc_direct(std::span<const BigReal> w, int k, int l, std::uint64_t y, long precision_bits);

// f = normalized coefficients of the table.
SeriesValue s_trunc(const cusp::CoefficientTable& table, int k, int l, std::uint64_t y, long precision_bits);

// Prefactor p_k with C_k = p_k * s_{k;l}:  1/((4w+2)pi^2), 3/(4(6w+1)pi^3), 3/(64 w pi^4).
BigReal constant_prefactor(int k, int weight, long precision_bits);
BigReal constant_from_series(int k, int weight, const BigReal& series_value);
// Shape used for C_k: (2,1), (3,2), (4,2).
int shape_l_for(int k);
BigReal constant_Ck(const cusp::CoefficientTable& table, int k, std::uint64_t y, long precision_bits);

struct TailFit {
  int k = 0;
  int l = 0;
  std::vector<SeriesValue> values;
  std::vector<double> abs_differences;  // |s(y_{i+1}) - s(y_i)|
  double slope = 0.0;                   // of log|diff| against log y
  // Heuristic: geometric continuation of the last difference at ratio 2^slope.
  BigReal extrapolated_limit;
  double heuristic_error = 0.0;
};

// y_list must be dyadic (each entry twice the previous) with >= 4 entries.
TailFit tail_fit(const cusp::CoefficientTable& table, int k, int l, std::span<const std::uint64_t> y_list,
                 long precision_bits);
TailFit tail_fit_values(std::vector<SeriesValue> values);

}  // namespace momentlab::resonance
