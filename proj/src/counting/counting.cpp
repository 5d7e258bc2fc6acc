#include "momentlab/counting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "momentlab/arith.hpp"
#include "momentlab/error.hpp"
#include "momentlab/parallel.hpp"
#include "momentlab/resonance.hpp"
#include "momentlab/simd.hpp"

namespace momentlab::counting {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_box(const DyadicBox& box) {
  for (std::uint64_t s : box.sides())
    if (s == 0 || s > (std::uint64_t{1} << 24)) throw InvalidArgument("box sides must be in [1, 2^24]");
}

void check_delta(double delta) {
  if (!(delta > 0) || !std::isfinite(delta)) throw InvalidArgument("delta must be a positive finite number");
}

std::array<RootTerm, 4> eta_terms(Sign sign, std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  return {RootTerm{1, a}, RootTerm{1, b}, RootTerm{sign == Sign::minus ? -1 : 1, c}, RootTerm{-1, d}};
}

// Exact: is 0 < |eta| < delta ?
bool exact_in_window(Sign sign, std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d, double delta) {
  const auto t = eta_terms(sign, a, b, c, d);
  const bool zero = sign == Sign::minus ? resonance::exact_equal(a, b, c, d) : root_sum_is_zero(t);
  if (zero) return false;
  return root_sum_sign(t, delta) < 0 && root_sum_sign(t, -delta) > 0;
}

// Right-hand pair (n3, n4) with the value eta is measured against.
struct RightEntry {
  double value;  // sqrt n3 + sqrt n4 (minus) or sqrt n4 - sqrt n3 (plus)
  std::uint32_t n3, n4;
};

struct Interval {
  std::size_t lo, hi;
};

}  // namespace

std::string sign_name(Sign s) { return s == Sign::minus ? "-" : "+"; }

double bound_A1(const DyadicBox& b, double delta) {
  const double N = double(b.N), M = double(b.M), K = double(b.K), L = double(b.L);
  return delta * std::sqrt(L) * N * M * K + N * K * std::sqrt(L);
}

double bound_Apm(const DyadicBox& b, double delta) {
  double prod = 1.0;
  for (std::uint64_t s : b.sides()) prod *= std::pow(delta, 0.25) * std::pow(double(s), 0.875) + std::sqrt(double(s));
  return prod;
}

Hypotheses hypotheses_A1(const DyadicBox& b, double delta) {
  Hypotheses h;
  h.n_le_m = b.N <= b.M;
  h.k_le_l = b.K <= b.L;
  h.n_le_k = b.N <= b.K;
  h.m_asymp_l = kAsympLow * double(b.L) <= double(b.M) && double(b.M) <= kAsympHigh * double(b.L);
  h.delta_small = delta <= std::sqrt(double(b.L));
  return h;
}

namespace {

CountReport count_fast(const DyadicBox& box, double delta, Sign sign) {
  check_box(box);
  check_delta(delta);
  const auto [N1, N2, N3, N4] = box.sides();

  std::vector<RightEntry> right;
  right.reserve(N3 * N4);
  double max_right = 0;
  for (std::uint64_t c = N3 + 1; c <= 2 * N3; ++c)
    for (std::uint64_t d = N4 + 1; d <= 2 * N4; ++d) {
      const double v = sign == Sign::minus ? std::sqrt(double(c)) + std::sqrt(double(d))
                                           : std::sqrt(double(d)) - std::sqrt(double(c));
      right.push_back({v, static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(d)});
      max_right = std::max(max_right, std::sqrt(double(c)) + std::sqrt(double(d)));
    }
  std::sort(right.begin(), right.end(), [](const RightEntry& x, const RightEntry& y) {
    return x.value < y.value || (x.value == y.value && (x.n3 < y.n3 || (x.n3 == y.n3 && x.n4 < y.n4)));
  });
  std::vector<double> values(right.size());
  for (std::size_t i = 0; i < right.size(); ++i) values[i] = right[i].value;

  const double max_left = std::sqrt(double(2 * N1)) + std::sqrt(double(2 * N2));
  // Each square root is correctly rounded and each value takes at most three
  // roundings; the boundary comparisons add a few more. 16 eps of the largest
  // magnitude in play covers all of them with margin.
  const double radius = 16 * kEps * (max_left + max_right + delta) + std::numeric_limits<double>::denorm_min();

  const std::uint64_t rows = N1 * N2;
  const unsigned chunks = std::max(1u, thread_count());
  std::vector<std::uint64_t> counts(chunks, 0), checks(chunks, 0);
  parallel_chunks(0, rows, [&](unsigned ch, std::size_t lo, std::size_t hi) {
    std::uint64_t count = 0, exact = 0;
    for (std::size_t r = lo; r < hi; ++r) {
      const std::uint64_t a = N1 + 1 + r / N2, b = N2 + 1 + r % N2;
      const double s = std::sqrt(double(a)) + std::sqrt(double(b));
      auto lb = [&](double x) { return std::size_t(std::lower_bound(values.begin(), values.end(), x) - values.begin()); };
      auto ub = [&](double x) { return std::size_t(std::upper_bound(values.begin(), values.end(), x) - values.begin()); };
      const std::size_t w_lo = lb(s - delta - radius), w_hi = ub(s + delta + radius);
      if (w_lo >= w_hi) continue;
      // Entries that might sit on a boundary (|eta| = delta) or at eta = 0.
      Interval u[3] = {{w_lo, ub(s - delta + radius)}, {lb(s - radius), ub(s + radius)}, {lb(s + delta - radius), w_hi}};
      std::sort(std::begin(u), std::end(u), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
      std::size_t uncertain = 0, cursor = w_lo;
      for (const Interval& iv : u) {
        const std::size_t from = std::max({iv.lo, cursor, w_lo}), to = std::min(iv.hi, w_hi);
        for (std::size_t j = from; j < to; ++j) {
          ++uncertain;
          ++exact;
          if (exact_in_window(sign, a, b, right[j].n3, right[j].n4, delta)) ++count;
        }
        cursor = std::max(cursor, to);
      }
      count += (w_hi - w_lo) - uncertain;
    }
    counts[ch] = count;
    checks[ch] = exact;
  }, chunks);

  CountReport rep;
  rep.box = box;
  rep.delta = delta;
  rep.sign = sign;
  for (unsigned c = 0; c < chunks; ++c) rep.count += counts[c], rep.exact_checks += checks[c];
  return rep;
}

}  // namespace

CountReport count_A1(const DyadicBox& box, double delta) {
  CountReport r = count_fast(box, delta, Sign::minus);
  r.bound = bound_A1(box, delta);
  r.ratio = double(r.count) / r.bound;
  r.hypotheses = hypotheses_A1(box, delta);
  return r;
}

CountReport count_Apm(const DyadicBox& box, double delta, Sign sign) {
  CountReport r = count_fast(box, delta, sign);
  r.bound = bound_Apm(box, delta);
  r.ratio = double(r.count) / r.bound;
  return r;
}

BruteForceCounter::BruteForceCounter(const DyadicBox& box, Sign sign) : box_(box), sign_(sign) {
  check_box(box);
  const auto [N1, N2, N3, N4] = box.sides();
  std::vector<std::pair<double, std::array<std::uint32_t, 4>>> all;
  all.reserve(N1 * N2 * N3 * N4);
  const double third = sign == Sign::minus ? -1.0 : 1.0;
  double scale = 0;
  for (std::uint64_t a = N1 + 1; a <= 2 * N1; ++a)
    for (std::uint64_t b = N2 + 1; b <= 2 * N2; ++b)
      for (std::uint64_t c = N3 + 1; c <= 2 * N3; ++c)
        for (std::uint64_t d = N4 + 1; d <= 2 * N4; ++d) {
          // Left-to-right in long double: an evaluation path unrelated to the fast counter's.
          const long double e = std::sqrt((long double)a) + std::sqrt((long double)b) + third * std::sqrt((long double)c) -
                                std::sqrt((long double)d);
          scale = std::max(scale, double(std::sqrt((long double)a) + std::sqrt((long double)b) + std::sqrt((long double)c) +
                                         std::sqrt((long double)d)));
          const std::array<std::uint32_t, 4> t{std::uint32_t(a), std::uint32_t(b), std::uint32_t(c), std::uint32_t(d)};
          if (std::fabs(e) < 1e-9L && root_sum_is_zero(eta_terms(sign, a, b, c, d))) continue;
          all.push_back({double(std::fabs(e)), t});
        }
  std::sort(all.begin(), all.end());
  gaps_.reserve(all.size());
  tuples_.reserve(all.size());
  for (auto& [g, t] : all) {
    gaps_.push_back(g);
    tuples_.push_back(t);
  }
  radius_ = 16 * kEps * scale;
}

std::uint64_t BruteForceCounter::count(double delta) const {
  check_delta(delta);
  const auto lo = std::lower_bound(gaps_.begin(), gaps_.end(), delta - radius_) - gaps_.begin();
  const auto hi = std::upper_bound(gaps_.begin(), gaps_.end(), delta + radius_) - gaps_.begin();
  std::uint64_t n = static_cast<std::uint64_t>(lo);
  for (auto i = lo; i < hi; ++i) {
    const auto& t = tuples_[i];
    if (root_sum_sign(eta_terms(sign_, t[0], t[1], t[2], t[3]), delta) < 0 &&
        root_sum_sign(eta_terms(sign_, t[0], t[1], t[2], t[3]), -delta) > 0)
      ++n;
  }
  return n;
}

// ---------------------------------------------------------------- gap scan

namespace {

struct Candidate {
  double normalized = std::numeric_limits<double>::infinity();
  double eta = std::numeric_limits<double>::infinity();
  std::array<std::uint64_t, 4> tuple{};
  bool valid = false;
};

bool better(const Candidate& x, const Candidate& y, bool by_normalized) {
  if (!x.valid) return false;
  if (!y.valid) return true;
  const double kx = by_normalized ? x.normalized : x.eta, ky = by_normalized ? y.normalized : y.eta;
  if (kx != ky) return kx < ky;
  return x.tuple < y.tuple;
}

std::array<std::uint64_t, 4> canonical(Sign sign, std::array<std::uint64_t, 4> t) {
  if (sign == Sign::minus) {
    std::array<std::uint64_t, 4> a{std::min(t[0], t[1]), std::max(t[0], t[1]), std::min(t[2], t[3]), std::max(t[2], t[3])};
    std::array<std::uint64_t, 4> b{a[2], a[3], a[0], a[1]};
    return std::min(a, b);
  }
  std::sort(t.begin(), t.begin() + 3);
  return t;
}

// |eta| and the normalized value in 256-bit arithmetic for a reported witness.
void refine(Sign sign, Candidate& c) {
  const auto& t = c.tuple;
  mpfr_t e, r, w;
  mpfr_inits2(256, e, r, w, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_ui(e, 0, MPFR_RNDN);
  const double sgn[4] = {1, 1, sign == Sign::minus ? -1.0 : 1.0, -1};
  for (int i = 0; i < 4; ++i) {
    mpfr_sqrt_ui(r, t[i], MPFR_RNDN);
    if (sgn[i] > 0)
      mpfr_add(e, e, r, MPFR_RNDN);
    else
      mpfr_sub(e, e, r, MPFR_RNDN);
  }
  mpfr_abs(e, e, MPFR_RNDN);
  c.eta = mpfr_get_d(e, MPFR_RNDN);
  const std::uint64_t mx = *std::max_element(t.begin(), t.end());
  mpfr_set_ui(w, t[0], MPFR_RNDN);
  for (int i = 1; i < 4; ++i) mpfr_mul_ui(w, w, t[i], MPFR_RNDN);
  mpfr_sqrt(w, w, MPFR_RNDN);
  mpfr_mul(e, e, w, MPFR_RNDN);
  mpfr_set_ui(r, mx, MPFR_RNDN);
  mpfr_pow_ui(w, r, 3, MPFR_RNDN);
  mpfr_sqrt(w, w, MPFR_RNDN);
  mpfr_mul(e, e, w, MPFR_RNDN);
  c.normalized = mpfr_get_d(e, MPFR_RNDN);
  mpfr_clears(e, r, w, static_cast<mpfr_ptr>(nullptr));
}

struct Column {
  std::vector<double> value, weight, maxpow, ones;
  std::vector<std::array<std::uint64_t, 2>> idx;
};

constexpr double kNearZero = 1e-11;

struct ScanResult {
  Candidate normalized, raw;
  std::uint64_t zeros = 0;
};

// Rows are described by (base value, sqrt of product, max^{3/2}, indices).
template <class RowFn>
ScanResult scan(Sign sign, std::size_t rows, const Column& col, RowFn row_of, bool upper_triangle) {
  const unsigned chunks = std::max(1u, thread_count());
  std::vector<ScanResult> parts(chunks);
  parallel_chunks(0, rows, [&](unsigned ch, std::size_t lo, std::size_t hi) {
    ScanResult& res = parts[ch];
    std::vector<std::uint32_t> near;
    for (std::size_t r = lo; r < hi; ++r) {
      const auto row = row_of(r);  // {base, bw, bm, tuple-prefix}
      const std::size_t start = upper_triangle ? r : 0;
      const std::size_t count = col.value.size() - start;
      auto make = [&](std::size_t j) {
        std::array<std::uint64_t, 4> t;
        if (sign == Sign::minus)
          t = {row.ids[0], row.ids[1], col.idx[j][0], col.idx[j][1]};
        else
          t = {row.ids[0], row.ids[1], row.ids[2], col.idx[j][0]};
        return t;
      };
      near.clear();
      const simd::RowMin mn = simd::gap_row(row.base, row.bw, row.bm, col.value.data() + start, col.weight.data() + start,
                                            col.maxpow.data() + start, count, kNearZero, near);
      for (std::uint32_t k : near) {
        const auto t = make(start + k);
        const bool zero = sign == Sign::minus ? resonance::exact_equal(t[0], t[1], t[2], t[3])
                                              : root_sum_is_zero(eta_terms(sign, t[0], t[1], t[2], t[3]));
        if (zero) {
          ++res.zeros;
          continue;
        }
        Candidate c;
        c.tuple = canonical(sign, t);
        c.valid = true;
        refine(sign, c);
        if (better(c, res.normalized, true)) res.normalized = c;
        if (better(c, res.raw, false)) res.raw = c;
      }
      if (mn.min != std::numeric_limits<double>::infinity()) {
        Candidate c;
        c.tuple = canonical(sign, make(start + mn.index));
        c.normalized = mn.min;
        c.eta = std::fabs(row.base - col.value[start + mn.index]);
        c.valid = true;
        if (better(c, res.normalized, true)) res.normalized = c;
      }
      near.clear();
      const simd::RowMin rm = simd::gap_row(row.base, 1.0, 1.0, col.value.data() + start, col.ones.data() + start,
                                            col.ones.data() + start, count, kNearZero, near);
      if (rm.min != std::numeric_limits<double>::infinity()) {
        Candidate c;
        c.tuple = canonical(sign, make(start + rm.index));
        c.eta = rm.min;
        c.valid = true;
        if (better(c, res.raw, false)) res.raw = c;
      }
    }
  }, chunks);
  ScanResult out;
  for (const auto& p : parts) {
    out.zeros += p.zeros;
    if (better(p.normalized, out.normalized, true)) out.normalized = p.normalized;
    if (better(p.raw, out.raw, false)) out.raw = p.raw;
  }
  return out;
}

struct Row {
  double base, bw, bm;
  std::array<std::uint64_t, 3> ids;
};

double pow15(std::uint64_t v) { return std::sqrt(double(v) * double(v) * double(v)); }

GapWitness to_witness(Sign sign, Candidate c) {
  refine(sign, c);
  return {c.tuple, sign, c.eta, c.normalized};
}

}  // namespace

GapScanReport min_gap_scan(std::uint64_t max_value) {
  if (max_value < 2) throw InvalidArgument("min_gap_scan: max_value must be >= 2");
  if (max_value > kMaxGapScan) throw InvalidArgument("min_gap_scan: max_value above 300 makes the quartic scan infeasible");
  const std::uint64_t V = max_value;
  GapScanReport rep;
  rep.max_value = V;

  // minus: pairs n <= m against pairs k <= l, each unordered pair of pairs once.
  Column pairs;
  for (std::uint64_t n = 1; n <= V; ++n)
    for (std::uint64_t m = n; m <= V; ++m) {
      pairs.value.push_back(std::sqrt(double(n)) + std::sqrt(double(m)));
      pairs.weight.push_back(std::sqrt(double(n * m)));
      pairs.maxpow.push_back(pow15(m));
      pairs.idx.push_back({n, m});
    }
  pairs.ones.assign(pairs.value.size(), 1.0);
  const ScanResult minus = scan(Sign::minus, pairs.value.size(), pairs, [&](std::size_t r) {
    return Row{pairs.value[r], pairs.weight[r], pairs.maxpow[r], {pairs.idx[r][0], pairs.idx[r][1], 0}};
  }, true);

  // plus: sorted triples n <= m <= k against every l.
  Column singles;
  for (std::uint64_t l = 1; l <= V; ++l) {
    singles.value.push_back(std::sqrt(double(l)));
    singles.weight.push_back(std::sqrt(double(l)));
    singles.maxpow.push_back(pow15(l));
    singles.idx.push_back({l, 0});
  }
  singles.ones.assign(V, 1.0);
  std::vector<Row> triples;
  for (std::uint64_t n = 1; n <= V; ++n)
    for (std::uint64_t m = n; m <= V; ++m)
      for (std::uint64_t k = m; k <= V; ++k)
        triples.push_back({std::sqrt(double(n)) + std::sqrt(double(m)) + std::sqrt(double(k)),
                           std::sqrt(double(n * m * k)), pow15(k), {n, m, k}});
  const ScanResult plus = scan(Sign::plus, triples.size(), singles, [&](std::size_t r) { return triples[r]; }, false);

  rep.exact_zeros = minus.zeros + plus.zeros;
  rep.normalized_by_sign = {to_witness(Sign::minus, minus.normalized), to_witness(Sign::plus, plus.normalized)};
  rep.raw_by_sign = {to_witness(Sign::minus, minus.raw), to_witness(Sign::plus, plus.raw)};
  auto pick = [](const GapWitness& a, const GapWitness& b, bool by_norm) {
    const double ka = by_norm ? a.normalized : a.eta, kb = by_norm ? b.normalized : b.eta;
    return kb < ka ? b : a;
  };
  rep.normalized_min = pick(rep.normalized_by_sign[0], rep.normalized_by_sign[1], true);
  rep.raw_min = pick(rep.raw_by_sign[0], rep.raw_by_sign[1], false);
  return rep;
}

std::vector<SweepRow> lemma_ratio_sweep(std::span<const DyadicBox> boxes, std::span<const double> deltas,
                                        double alarm_threshold) {
  std::vector<SweepRow> rows;
  for (const DyadicBox& b : boxes)
    for (double d : deltas) {
      SweepRow r{count_A1(b, d), false};
      r.alarm = r.report.ratio > alarm_threshold;
      rows.push_back(r);
    }
  return rows;
}

void write_count_csv_header(std::ostream& out) { out << "N,M,K,L,delta,sign,count,bound,ratio\n"; }

void write_count_csv_row(std::ostream& out, const CountReport& r) {
  const auto old = out.precision(17);
  out << r.box.N << ',' << r.box.M << ',' << r.box.K << ',' << r.box.L << ',' << r.delta << ','
      << sign_name(r.sign) << ',' << r.count << ',' << r.bound << ',' << r.ratio << '\n';
  out.precision(old);
}

}  // namespace momentlab::counting
