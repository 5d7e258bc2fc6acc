#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace momentlab::counting {

// Four dyadic ranges; side X stands for X < x <= 2X.
struct DyadicBox {
  std::uint64_t N = 1, M = 1, K = 1, L = 1;
  std::array<std::uint64_t, 4> sides() const { return {N, M, K, L}; }
};

// minus: sqrt n1 + sqrt n2 - sqrt n3 - sqrt n4;  plus: sqrt n1 + sqrt n2 + sqrt n3 - sqrt n4.
enum class Sign { minus, plus };
std::string sign_name(Sign s);

// Constants used for the "M asymp L" flag: kAsympLow * L <= M <= kAsympHigh * L.
inline constexpr double kAsympLow = 0.5;
inline constexpr double kAsympHigh = 2.0;

// Recorded (never enforced) hypotheses of the first counting bound.
struct Hypotheses {
  bool n_le_m = false;
  bool k_le_l = false;
  bool n_le_k = false;
  bool m_asymp_l = false;
  bool delta_small = false;  // delta <= L^{1/2}
  bool all() const { return n_le_m && k_le_l && n_le_k && m_asymp_l && delta_small; }
};

struct CountReport {
  DyadicBox box;
  double delta = 0.0;
  Sign sign = Sign::minus;
  std::uint64_t count = 0;
  double bound = 0.0;
  double ratio = 0.0;
  Hypotheses hypotheses;         // meaningful for count_A1
  std::uint64_t exact_checks = 0;  // candidates resolved by exact arithmetic
};

// #{ 0 < |sqrt n + sqrt m - sqrt k - sqrt l| < delta } over the box.
// Bound: delta L^{1/2} N M K + N K L^{1/2}.
CountReport count_A1(const DyadicBox& box, double delta);

// Same with the chosen sign. Bound: prod_j (delta^{1/4} N_j^{7/8} + N_j^{1/2}).
CountReport count_Apm(const DyadicBox& box, double delta, Sign sign);

double bound_A1(const DyadicBox& box, double delta);
double bound_Apm(const DyadicBox& box, double delta);
Hypotheses hypotheses_A1(const DyadicBox& box, double delta);

// Oracle: every quadruple's |eta| is materialized and sorted once; each query
// delta is then a binary search with exact resolution of entries near delta.
class BruteForceCounter {
 public:
  BruteForceCounter(const DyadicBox& box, Sign sign);
  std::uint64_t count(double delta) const;

 private:
  DyadicBox box_;
  Sign sign_;
  std::vector<double> gaps_;  // |eta| for eta != 0, sorted
  std::vector<std::array<std::uint32_t, 4>> tuples_;
  double radius_;
};

// Lemma 3 style spacing scan over all quadruples with entries <= max_value.
struct GapWitness {
  std::array<std::uint64_t, 4> tuple{};  // lexicographically smallest symmetric image
  Sign sign = Sign::minus;
  double eta = 0.0;          // |eta|
  double normalized = 0.0;   // |eta| (n m k l)^{1/2} max^{3/2}
};

struct GapScanReport {
  std::uint64_t max_value = 0;
  GapWitness normalized_min;  // over both sign patterns
  GapWitness raw_min;
  std::array<GapWitness, 2> normalized_by_sign;  // [minus, plus]
  std::array<GapWitness, 2> raw_by_sign;
  std::uint64_t exact_zeros = 0;  // eta = 0 quadruples excluded (up to symmetry)
};

inline constexpr std::uint64_t kMaxGapScan = 300;
GapScanReport min_gap_scan(std::uint64_t max_value);

struct SweepRow {
  CountReport report;
  bool alarm = false;
};

// count_A1 over every (box, delta); rows with ratio > alarm_threshold flagged.
std::vector<SweepRow> lemma_ratio_sweep(std::span<const DyadicBox> boxes, std::span<const double> deltas,
                                        double alarm_threshold = 10.0);

// CSV: N,M,K,L,delta,sign,count,bound,ratio
void write_count_csv_header(std::ostream& out);
void write_count_csv_row(std::ostream& out, const CountReport& r);

}  // namespace momentlab::counting
