#include "momentlab/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <ostream>

#include "momentlab/error.hpp"
#include "momentlab/parallel.hpp"
#include "momentlab/resonance.hpp"
#include "momentlab/simd.hpp"
#include "momentlab/stats.hpp"

namespace momentlab::voronoi {
namespace {

constexpr long kMaxWorkingBits = 1L << 16;

void check_common(const cusp::CoefficientTable& table, const BigReal& x, std::uint64_t y, long precision_bits) {
  if (precision_bits < kMinPrecisionBits) throw InvalidArgument("precision_bits must be >= 64");
  if (y == 0) throw InvalidArgument("truncation length must be >= 1");
  if (y > table.n_max()) throw InvalidArgument("truncation length exceeds the coefficient table");
  if (!(x.sign() > 0) || !x.is_finite()) throw InvalidArgument("x must be positive");
}

// 4 pi sqrt(n x) - pi/4 at the precision of `out`.
void phase(mpfr_ptr out, std::uint64_t n, const BigReal& sqrt_x, const BigReal& four_pi, const BigReal& pi_4) {
  mpfr_sqrt_ui(out, n, MPFR_RNDN);
  mpfr_mul(out, out, sqrt_x.get(), MPFR_RNDN);
  mpfr_mul(out, out, four_pi.get(), MPFR_RNDN);
  mpfr_sub(out, out, pi_4.get(), MPFR_RNDN);
}

}  // namespace

BigReal resonance_sum_R(const cusp::CoefficientTable& table, const BigReal& x, std::uint64_t y, long precision_bits) {
  check_common(table, x, y, precision_bits);
  for (long wp = 2 * precision_bits;; wp *= 2) {
    const auto w = cusp::resonance_weights(table, y, wp);
    const BigReal pi = BigReal::pi(wp);
    const BigReal four_pi = pi * 4L, pi_4 = pi / 4L;
    const BigReal sx = sqrt(x.with_precision(wp));

    const unsigned chunks = std::max(1u, thread_count());
    std::vector<Accumulator> sums(chunks, Accumulator(wp)), bounds(chunks, Accumulator(64, 0));
    parallel_chunks(1, y + 1, [&](unsigned c, std::size_t lo, std::size_t hi) {
      BigReal theta(wp), term(wp), err(64);
      for (std::size_t n = lo; n < hi; ++n) {
        phase(theta.get(), n, sx, four_pi, pi_4);
        // err_n = |w_n| (8 |theta| + 8): phase and weight error propagated through cos.
        mpfr_abs(err.get(), theta.get(), MPFR_RNDU);
        mpfr_mul_ui(err.get(), err.get(), 8, MPFR_RNDU);
        mpfr_add_ui(err.get(), err.get(), 8, MPFR_RNDU);
        mpfr_cos(theta.get(), theta.get(), MPFR_RNDN);
        mpfr_mul(term.get(), w[n].get(), theta.get(), MPFR_RNDN);
        sums[c].add(term);
        mpfr_mul(err.get(), err.get(), w[n].get(), MPFR_RNDU);
        mpfr_abs(err.get(), err.get(), MPFR_RNDU);
        bounds[c].add(err);
      }
    }, chunks);
    Accumulator sum(wp), bound(64, 0);
    for (unsigned c = 0; c < chunks; ++c) sum.add(sums[c]), bound.add(bounds[c]);

    // Accumulation adds at most (y + 1) ulps of the absolute sum, which is
    // dominated by the per-term bound already collected.
    BigReal err = bound.raw();
    err *= static_cast<long>(y + 2);
    mpfr_div_2si(err.get(), err.get(), wp, MPFR_RNDU);
    BigReal target = abs(sum.raw()).with_precision(64);
    mpfr_div_2si(target.get(), target.get(), precision_bits / 2 + 1, MPFR_RNDD);
    if (err <= target || wp >= kMaxWorkingBits) {
      BigReal r = sum.raw();
      r *= pow_rational(x.with_precision(wp), 2 * table.weight() - 1, 4);
      return r.with_precision(precision_bits);
    }
  }
}

BigReal truncated_A(const cusp::CoefficientTable& table, const BigReal& x, std::uint64_t N, long precision_bits,
                    double range_constant) {
  check_common(table, x, N, precision_bits);
  if (static_cast<double>(N) > range_constant * x.to_double())
    throw InvalidArgument("truncated_A: N must satisfy N <= C x");
  const long wp = precision_bits + 32;
  BigReal r = resonance_sum_R(table, x, N, wp);
  BigReal scale = sqrt(BigReal(2.0, wp)) * BigReal::pi(wp);
  return (r / scale).with_precision(precision_bits);
}

Decomposition decompose_S(const cusp::CoefficientTable& table, const BigReal& x, std::uint64_t y, long precision_bits) {
  check_common(table, x, y, precision_bits);
  if (y > kMaxDecomposeY)
    throw InvalidArgument("decompose_S: y = " + std::to_string(y) + " exceeds 2000; use a smaller y");
  const long wp = 2 * precision_bits + 64;
  const auto w = cusp::resonance_weights(table, y, wp);
  const BigReal pi = BigReal::pi(wp);
  const BigReal four_pi = pi * 4L;
  const BigReal zero(0.0, wp);
  const BigReal sx = sqrt(x.with_precision(wp));

  // Z = sum w_n exp(i 4 pi sqrt(n x)).
  BigComplex z(wp);
  {
    BigReal theta(wp), c(wp), s(wp);
    Accumulator re(wp), im(wp);
    for (std::uint64_t n = 1; n <= y; ++n) {
      phase(theta.get(), n, sx, four_pi, zero);
      mpfr_sin_cos(s.get(), c.get(), theta.get(), MPFR_RNDN);
      re.add_product(w[n], c);
      im.add_product(w[n], s);
    }
    z = BigComplex(re.raw().with_precision(wp), im.raw().with_precision(wp));
  }

  // Resonance classes of ordered pairs by the exact value of sqrt n + sqrt m.
  struct Pair {
    double v;
    std::uint32_t n, m;
  };
  std::vector<Pair> pairs;
  pairs.reserve(y * (y + 1) / 2);
  for (std::uint64_t n = 1; n <= y; ++n)
    for (std::uint64_t m = n; m <= y; ++m)
      pairs.push_back({std::sqrt(double(n)) + std::sqrt(double(m)), std::uint32_t(n), std::uint32_t(m)});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return a.v < b.v || (a.v == b.v && (a.n < b.n || (a.n == b.n && a.m < b.m)));
  });
  Accumulator diagonal(wp);
  {
    struct Class {
      std::uint32_t n, m;
      BigReal q;
    };
    std::vector<Class> cluster;
    BigReal prod(wp);
    auto flush = [&] {
      for (auto& c : cluster) diagonal.add_product(c.q, c.q);
      cluster.clear();
    };
    double last = -1;
    for (const Pair& p : pairs) {
      if (p.v - last > 1e-9) flush();
      last = p.v;
      mpfr_mul(prod.get(), w[p.n].get(), w[p.m].get(), MPFR_RNDN);
      if (p.n != p.m) mpfr_mul_2ui(prod.get(), prod.get(), 1, MPFR_RNDN);  // (n,m) and (m,n)
      auto it = std::find_if(cluster.begin(), cluster.end(),
                             [&](const Class& c) { return resonance::exact_equal(p.n, p.m, c.n, c.m); });
      if (it == cluster.end())
        cluster.push_back({p.n, p.m, prod});
      else
        it->q += prod;
    }
    flush();
  }

  const BigReal X = pow(x.with_precision(wp), static_cast<long>(2 * table.weight() - 1));
  const BigComplex z2 = z * z;
  const BigComplex z4 = z2 * z2;
  const BigReal norm2 = z.norm_squared();
  const BigReal s42 = resonance::s_trunc_weights(w, 4, 2, y, wp).value;

  Decomposition d{BigReal(precision_bits), BigReal(precision_bits), BigReal(precision_bits), BigReal(precision_bits),
                  BigReal(precision_bits), BigReal(precision_bits)};
  d.diagonal = diagonal.raw().with_precision(precision_bits);
  d.S4 = (-(X * z4.re) / 8L).with_precision(precision_bits);
  d.S3 = (X * norm2 * z2.im / 2L).with_precision(precision_bits);
  d.S1 = (X * s42 * 3L / 8L).with_precision(precision_bits);
  d.S2 = (X * (norm2 * norm2 - diagonal.raw()) * 3L / 8L).with_precision(precision_bits);
  const BigReal r = resonance_sum_R(table, x, y, wp);
  d.R4 = pow(r, 4L).with_precision(precision_bits);
  return d;
}

std::vector<double> profile_grid(double x_lo, double x_hi, std::size_t grid_size, std::uint64_t seed) {
  if (!(x_lo >= 1) || !(x_hi > x_lo)) throw InvalidArgument("profile grid: need 1 <= x_lo < x_hi");
  const auto first = static_cast<std::uint64_t>(std::ceil(x_lo));
  const auto last = static_cast<std::uint64_t>(std::floor(x_hi));
  if (grid_size == 0 || last <= first || last - first < grid_size)
    throw InvalidArgument("profile grid: range holds fewer unit cells than grid points");
  const std::uint64_t span = last - first;
  SplitMix64 rng(seed);
  std::vector<double> grid(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const std::uint64_t p = first + span * i / grid_size;
    grid[i] = double(p) + 0.5 + (rng.unit() - 0.5) / 2;
  }
  return grid;
}

namespace {

struct FastTables {
  std::vector<double> w, freq;  // index n - 1
};

FastTables fast_tables(const cusp::CoefficientTable& table, std::uint64_t nmax) {
  const auto wr = cusp::resonance_weights(table, nmax, 64);
  FastTables t;
  t.w.resize(nmax);
  t.freq.resize(nmax);
  const double four_pi = 4 * std::numbers::pi;
  for (std::uint64_t n = 1; n <= nmax; ++n) {
    t.w[n - 1] = wr[n].to_double();
    t.freq[n - 1] = four_pi * std::sqrt(double(n));
  }
  return t;
}

// A(x) / x^{k/2} rounded to double.
double normalized_A(const cusp::CoefficientTable& table, double x) {
  BigReal v(table.A(static_cast<std::size_t>(std::floor(x))), 128);
  v /= pow_rational(BigReal(x, 128), table.weight(), 2);
  return v.to_double();
}

double scale_factor(double x) { return std::pow(x, -0.25) / (std::sqrt(2.0) * std::numbers::pi); }

}  // namespace

double truncated_A_normalized_fast(const cusp::CoefficientTable& table, double x, std::uint64_t N) {
  if (N == 0 || N > table.n_max()) throw InvalidArgument("truncation length outside the table");
  const FastTables t = fast_tables(table, N);
  return scale_factor(x) * simd::cos_sum(t.w, t.freq, std::sqrt(x), -std::numbers::pi / 4);
}

TruncationProfile truncation_error_profile(const cusp::CoefficientTable& table, double x_lo, double x_hi,
                                           std::span<const std::uint64_t> N_list, std::size_t grid_size,
                                           std::uint64_t seed) {
  if (N_list.empty()) throw InvalidArgument("truncation profile needs at least one N");
  std::vector<std::uint64_t> Ns(N_list.begin(), N_list.end());
  std::sort(Ns.begin(), Ns.end());
  if (Ns.front() == 0 || Ns.back() > table.n_max()) throw InvalidArgument("N outside the coefficient table");
  if (x_hi > double(table.n_max())) throw InvalidArgument("x range exceeds the coefficient table");
  if (double(Ns.back()) > x_lo) throw InvalidArgument("truncation profile requires N <= x");

  TruncationProfile p;
  p.weight = table.weight();
  p.x_lo = x_lo;
  p.x_hi = x_hi;
  p.N = Ns;
  p.x_grid = profile_grid(x_lo, x_hi, grid_size, seed);
  const FastTables t = fast_tables(table, Ns.back());

  std::vector<std::vector<double>> err(p.x_grid.size(), std::vector<double>(Ns.size()));
  std::vector<double> abs_err(p.x_grid.size(), 0.0);
  parallel_chunks(0, p.x_grid.size(), [&](unsigned, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double x = p.x_grid[i], s = std::sqrt(x), scale = scale_factor(x);
      const double a = normalized_A(table, x);
      double partial = 0;
      std::uint64_t done = 0;
      for (std::size_t k = 0; k < Ns.size(); ++k) {
        partial += simd::cos_sum(std::span(t.w).subspan(done, Ns[k] - done), std::span(t.freq).subspan(done, Ns[k] - done), s,
                                 -std::numbers::pi / 4);
        done = Ns[k];
        err[i][k] = std::abs(a - scale * partial);
        abs_err[i] = std::max(abs_err[i], err[i][k] * std::pow(x, 0.5 * table.weight()));
      }
    }
  });

  p.max_rel_error.assign(Ns.size(), 0.0);
  for (const auto& row : err)
    for (std::size_t k = 0; k < Ns.size(); ++k) p.max_rel_error[k] = std::max(p.max_rel_error[k], row[k]);
  p.max_abs_error = BigReal(*std::max_element(abs_err.begin(), abs_err.end()), 64);

  if (Ns.size() >= 2) {
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < Ns.size(); ++k) {
      if (p.max_rel_error[k] <= 0) continue;
      lx.push_back(std::log(double(Ns[k])));
      ly.push_back(std::log(p.max_rel_error[k]));
    }
    if (lx.size() >= 2) p.fitted_slope = least_squares(lx, ly).slope;
  }
  return p;
}

void write_profile_csv(std::ostream& out, const TruncationProfile& p) {
  const auto old = out.precision(17);
  out << "N,max_rel_error\n";
  for (std::size_t k = 0; k < p.N.size(); ++k) out << p.N[k] << ',' << p.max_rel_error[k] << '\n';
  out.precision(old);
}

}  // namespace momentlab::voronoi
