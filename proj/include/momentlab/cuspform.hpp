#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "momentlab/bigreal.hpp"
#include "momentlab/series.hpp"

namespace momentlab::cusp {

// Weights whose cusp-form space for the full modular group is one-dimensional.
inline constexpr std::array<int, 6> kSupportedWeights{12, 16, 18, 20, 22, 26};
bool is_supported_weight(int weight);

struct CuspForm {
  int weight;
  series::QSeries series;  // a(0) = 0, a(1) = 1
};

// Delta * E_{weight-12} (E_0 = 1), coefficients q^0 .. q^{length-1}.
CuspForm build_form(int weight, std::size_t length);

/// a(n) and exact prefix sums A(n) = sum_{m <= n} a(m) for 1 <= n <= n_max.
class CoefficientTable {
 public:
  // coeffs[i] holds a(i + 1).
  CoefficientTable(int weight, std::vector<BigInt> coeffs);

  int weight() const { return weight_; }
  std::size_t n_max() const { return a_.size() - 1; }
  const BigInt& a(std::size_t n) const { return a_[n]; }
  // Valid for 0 <= n <= n_max; A(0) = 0.
  const BigInt& A(std::size_t n) const { return prefix_[n]; }

  friend bool operator==(const CoefficientTable& x, const CoefficientTable& y) {
    return x.weight_ == y.weight_ && x.a_ == y.a_;
  }

 private:
  int weight_;
  std::vector<BigInt> a_;       // a_[0] = 0
  std::vector<BigInt> prefix_;  // prefix_[0] = 0
};

CoefficientTable build_table(const CuspForm& form);

// Convenience: build_table(build_form(weight, n_max + 1)).
CoefficientTable make_table(int weight, std::size_t n_max);

// A(x) = A(floor x); zero for x < 1. Throws if x > n_max.
BigInt partial_sum(const CoefficientTable& table, double x);

// a(n) n^{-(k-1)/2}.
BigReal normalized_coefficient(const CoefficientTable& table, std::size_t n, long precision_bits);

// w[n] = a(n) n^{-k/2-1/4} = normalized a(n) / n^{3/4} for 1 <= n <= y; w[0] = 0.
// These are the per-index weights of the Voronoi sum and of the singular series.
std::vector<BigReal> resonance_weights(const CoefficientTable& table, std::size_t y, long precision_bits);

struct DeligneReport {
  std::size_t checked = 0;
  double max_ratio = 0.0;  // max |a(n)| / (d(n) n^{(k-1)/2})
  std::size_t argmax = 0;
  std::size_t violations = 0;
  std::size_t first_violation = 0;
  bool passed() const { return violations == 0; }
};

// |a(n)|^2 <= d(n)^2 n^{k-1}, decided in exact integer arithmetic.
DeligneReport check_deligne(const CoefficientTable& table);

struct HeckeOptions {
  std::size_t pair_trials = 1000;
  std::size_t prime_trials = 100;
  std::uint64_t seed = 1;
};

struct HeckeReport {
  std::size_t pairs_checked = 0;
  std::size_t prime_squares_checked = 0;
  std::size_t violations = 0;
  std::uint64_t witness_m = 0;  // first failing pair (m, n) or (p, p)
  std::uint64_t witness_n = 0;
  bool passed() const { return violations == 0; }
};

// a(mn) = a(m)a(n) for coprime m, n and a(p^2) = a(p)^2 - p^{k-1}.
HeckeReport check_hecke(const CoefficientTable& table, const HeckeOptions& options);

// Coefficient cache file:
//   momentlab-coeffs v1 weight=<k> nmax=<N>
//   <n> <a(n)>            (N lines)
//   checksum=<fnv64 hex>  (optional; FNV-1a over every preceding byte)
std::string cache_file_name(int weight, std::size_t n_max);
void write_cache(const CoefficientTable& table, std::ostream& out);
CoefficientTable read_cache(std::istream& in, int expected_weight);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);

}  // namespace momentlab::cusp
