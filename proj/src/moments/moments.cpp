#include "momentlab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "momentlab/error.hpp"
#include "momentlab/parallel.hpp"
#include "momentlab/resonance.hpp"
#include "momentlab/stats.hpp"

namespace momentlab::moments {
namespace {

void check_order(int k) {
  if (k < kMinOrder || k > kMaxOrder) throw InvalidArgument("moment order must be in 2..8");
}

void check_endpoint(const cusp::CoefficientTable& table, std::uint64_t T) {
  if (T < 2) throw InvalidArgument("moment endpoint must be >= 2");
  if (T > table.n_max())
    throw InvalidArgument("moment endpoint " + std::to_string(T) + " exceeds the table (n_max = " +
                          std::to_string(table.n_max()) + ")");
}

double log_abs(const BigReal& v) { return log(abs(v)).to_double(); }

}  // namespace

std::vector<BigInt> moment_exact_many(const cusp::CoefficientTable& table, int k, std::span<const std::uint64_t> T_list) {
  check_order(k);
  if (T_list.empty()) return {};
  for (std::uint64_t T : T_list) check_endpoint(table, T);
  std::vector<std::uint64_t> Ts(T_list.begin(), T_list.end());
  std::sort(Ts.begin(), Ts.end());
  Ts.erase(std::unique(Ts.begin(), Ts.end()), Ts.end());

  // seg[i] holds the terms n with Ts[i-1] <= n < Ts[i]; chunk sums are exact,
  // so the merge order does not matter.
  const unsigned chunks = std::max(1u, thread_count());
  std::vector<std::vector<BigInt>> seg(chunks, std::vector<BigInt>(Ts.size(), 0));
  parallel_chunks(1, Ts.back(), [&](unsigned c, std::size_t lo, std::size_t hi) {
    BigInt p;
    std::size_t idx = std::upper_bound(Ts.begin(), Ts.end(), lo) - Ts.begin();
    for (std::size_t n = lo; n < hi; ++n) {
      while (Ts[idx] <= n) ++idx;
      mpz_pow_ui(p.get_mpz_t(), table.A(n).get_mpz_t(), static_cast<unsigned long>(k));
      seg[c][idx] += p;
    }
  }, chunks);

  std::vector<BigInt> cumulative(Ts.size());
  BigInt run = 0;
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    for (unsigned c = 0; c < chunks; ++c) run += seg[c][i];
    cumulative[i] = run;
  }
  std::vector<BigInt> out;
  out.reserve(T_list.size());
  for (std::uint64_t T : T_list) out.push_back(cumulative[std::lower_bound(Ts.begin(), Ts.end(), T) - Ts.begin()]);
  return out;
}

BigInt moment_exact(const cusp::CoefficientTable& table, int k, std::uint64_t T) {
  const std::uint64_t one[1] = {T};
  return moment_exact_many(table, k, one).front();
}

BigRational moment_exact(const cusp::CoefficientTable& table, int k, const BigRational& T) {
  check_order(k);
  if (T < 2) throw InvalidArgument("moment endpoint must be >= 2");
  BigInt fl;
  mpz_fdiv_q(fl.get_mpz_t(), T.get_num_mpz_t(), T.get_den_mpz_t());
  if (T > BigRational(BigInt(static_cast<unsigned long>(table.n_max()))))
    throw InvalidArgument("moment endpoint exceeds the table");
  const std::uint64_t n = fl.get_ui();
  BigRational total(moment_exact(table, k, n));
  const BigRational frac = T - BigRational(fl);
  if (frac != 0) {
    BigInt p;
    mpz_pow_ui(p.get_mpz_t(), table.A(n).get_mpz_t(), static_cast<unsigned long>(k));
    total += frac * BigRational(p);
  }
  total.canonicalize();
  return total;
}

BigRational main_term_exponent(int k, int weight) {
  BigRational e(4 + k * (2 * weight - 1), 4);
  e.canonicalize();
  return e;
}

BigReal main_term(const BigReal& Ck, int weight, int k, const BigReal& T, long precision_bits) {
  if (k < 2 || k > 4) throw InvalidArgument("main term is available for k = 2, 3, 4 only");
  // Structural identities of the exponent family.
  if (main_term_exponent(4, weight) != BigRational(2 * weight) ||
      main_term_exponent(2, weight) != BigRational(2 * weight + 1, 2))
    throw ConsistencyError("main-term exponent identities failed");
  const BigRational e = main_term_exponent(k, weight);
  const long wp = precision_bits + 32;
  BigReal v = pow_rational(T.with_precision(wp), e.get_num().get_si(), e.get_den().get_si());
  v *= Ck.with_precision(wp);
  return v.with_precision(precision_bits);
}

MomentConstant constant_truncated(const cusp::CoefficientTable& table, int k, std::uint64_t y, long precision_bits) {
  if (k < 2 || k > 4) throw InvalidArgument("constants exist for k = 2, 3, 4 only");
  if (y == 0 || y > table.n_max()) throw InvalidArgument("constant truncation y outside the table");
  MomentConstant c;
  c.k = k;
  c.weight = table.weight();
  c.y = y;
  c.source = "truncated";
  c.value = resonance::constant_Ck(table, k, y, precision_bits);
  return c;
}

MomentConstant constant_extrapolated(const cusp::CoefficientTable& table, int k, std::uint64_t y, long precision_bits) {
  if (k < 2 || k > 4) throw InvalidArgument("constants exist for k = 2, 3, 4 only");
  if (y < 32 || y > table.n_max()) throw InvalidArgument("extrapolated constant needs 32 <= y <= n_max");
  std::vector<std::uint64_t> ys;
  for (int j = 5; j >= 0; --j) ys.push_back(y >> j);
  const resonance::TailFit fit = resonance::tail_fit(table, k, resonance::shape_l_for(k), ys, precision_bits);
  MomentConstant c;
  c.k = k;
  c.weight = table.weight();
  c.y = ys.back();
  c.source = "extrapolated";
  c.value = resonance::constant_from_series(k, table.weight(), fit.extrapolated_limit);
  c.heuristic_error = fit.heuristic_error * resonance::constant_prefactor(k, table.weight(), 64).to_double();
  return c;
}

std::vector<std::uint64_t> dyadic_list(std::uint64_t T0, std::uint64_t T1) {
  if (T0 == 0 || T1 < T0) throw InvalidArgument("dyadic list needs 0 < T0 <= T1");
  std::vector<std::uint64_t> out;
  for (std::uint64_t t = T0; t <= T1; t *= 2) out.push_back(t);
  return out;
}

MomentReport error_exponent_fit(const cusp::CoefficientTable& table, const MomentConstant& constant,
                                std::span<const std::uint64_t> T_list, long precision_bits) {
  if (constant.weight != table.weight()) throw InvalidArgument("constant was computed for another weight");
  const int k = constant.k;
  if (T_list.size() < 5) throw InvalidArgument("error fit needs at least 5 dyadic endpoints");
  for (std::size_t i = 1; i < T_list.size(); ++i)
    if (T_list[i] != 2 * T_list[i - 1]) throw InvalidArgument("endpoint list must be dyadic");

  std::vector<std::uint64_t> all(T_list.begin(), T_list.end());
  const bool extra = 2 * all.back() <= table.n_max();
  if (extra) all.push_back(2 * all.back());
  const std::vector<BigInt> exact = moment_exact_many(table, k, all);

  MomentReport r;
  r.weight = table.weight();
  r.k = k;
  r.constant = constant;
  r.exponent = main_term_exponent(k, table.weight());
  const long wp = precision_bits + 32;
  std::vector<BigReal> mains;
  for (std::size_t i = 0; i < all.size(); ++i)
    mains.push_back(main_term(constant.value, table.weight(), k, BigReal(static_cast<double>(all[i]), wp), wp));

  const double exponent = r.exponent.get_d();
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < T_list.size(); ++i) {
    MomentPoint p;
    p.T = all[i];
    p.exact = exact[i];
    p.main_term = mains[i].with_precision(precision_bits);
    p.error = (BigReal(exact[i], wp) - mains[i]).with_precision(precision_bits);
    p.ratio = (BigReal(exact[i], wp) / mains[i]).with_precision(precision_bits);
    p.zero_error = p.error.is_zero();
    p.in_fit = p.T >= kWarmupT && !p.zero_error;
    if (p.in_fit) {
      lx.push_back(std::log(static_cast<double>(p.T)));
      ly.push_back(log_abs(p.error));
      if (!r.points.empty() && r.points.back().in_fit) {
        const double s = (ly.back() - log_abs(r.points.back().error)) /
                         std::log(double(p.T) / double(r.points.back().T));
        p.local_delta = exponent - s;
      }
    }
    r.points.push_back(std::move(p));
  }
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    WindowPoint w;
    w.T = all[i];
    w.exact = exact[i + 1] - exact[i];
    const BigReal main = mains[i + 1] - mains[i];
    w.main_term = main.with_precision(precision_bits);
    w.error = (BigReal(w.exact, wp) - main).with_precision(precision_bits);
    w.ratio = (BigReal(w.exact, wp) / main).with_precision(precision_bits);
    r.windows.push_back(std::move(w));
  }
  r.fit_points = lx.size();
  if (lx.size() >= 2) {
    r.slope = least_squares(lx, ly).slope;
    r.delta_hat = exponent - r.slope;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Oscillatory integral

namespace {

constexpr int kNodes = 20;

struct GaussLegendre {
  std::vector<BigReal> x, w;  // on [-1, 1]
};

GaussLegendre gauss_legendre(long wp) {
  GaussLegendre g;
  const BigReal one(1.0, wp);
  BigReal tol(1.0, 64);
  mpfr_div_2si(tol.get(), tol.get(), wp - 8, MPFR_RNDN);
  for (int i = 1; i <= kNodes; ++i) {
    BigReal x(std::cos(std::numbers::pi * (i - 0.25) / (kNodes + 0.5)), wp);
    BigReal p0(wp), p1(wp), dp(wp);
    for (int it = 0; it < 200; ++it) {
      p0 = one;
      p1 = x;
      for (int j = 2; j <= kNodes; ++j) {
        BigReal p2 = (x * p1 * static_cast<long>(2 * j - 1) - p0 * static_cast<long>(j - 1)) / static_cast<long>(j);
        p0 = std::move(p1);
        p1 = std::move(p2);
      }
      dp = (x * p1 - p0) * static_cast<long>(kNodes) / (x * x - one);
      const BigReal step = p1 / dp;
      x -= step;
      if (abs(step) < tol) break;
    }
    g.x.push_back(x);
    g.w.push_back(BigReal(2.0, wp) / ((one - x * x) * dp * dp));
  }
  return g;
}

struct Quad {
  BigReal value, l1;
};

// Composite rule with `panels` equal panels on [a, b].
Quad composite(const GaussLegendre& g, const BigReal& a, const BigReal& b, std::size_t panels, const BigReal& power,
               const BigReal& A, const BigReal& B, long wp) {
  const BigReal h = (b - a) / static_cast<long>(panels);
  const BigReal half = h / 2L;
  Accumulator sum(wp), l1(wp);
  BigReal u(wp), f(wp), c(wp);
  for (std::size_t p = 0; p < panels; ++p) {
    const BigReal mid = a + h * static_cast<long>(p) + half;
    for (int i = 0; i < kNodes; ++i) {
      mpfr_mul(u.get(), g.x[i].get(), half.get(), MPFR_RNDN);
      mpfr_add(u.get(), u.get(), mid.get(), MPFR_RNDN);
      mpfr_pow(f.get(), u.get(), power.get(), MPFR_RNDN);
      mpfr_mul(c.get(), A.get(), u.get(), MPFR_RNDN);
      mpfr_add(c.get(), c.get(), B.get(), MPFR_RNDN);
      mpfr_cos(c.get(), c.get(), MPFR_RNDN);
      mpfr_mul(f.get(), f.get(), g.w[i].get(), MPFR_RNDN);
      l1.add(abs(f));
      mpfr_mul(f.get(), f.get(), c.get(), MPFR_RNDN);
      sum.add(f);
    }
  }
  Quad q{sum.raw() * half * 2L, l1.raw() * half * 2L};
  return q;
}

// Antiderivative of 2 u^n cos(A u + B), from repeated integration by parts.
BigReal antiderivative(int n, const BigReal& u, const BigReal& A, const BigReal& B, long wp) {
  const BigReal theta = A * u + B;
  const BigReal c = cos(theta), s = sin(theta);
  BigReal total(0.0, wp), coef(1.0, wp);  // n! / (n-j)!
  BigReal apow = A;                        // A^{j+1}
  for (int j = 0; j <= n; ++j) {
    // Re(e^{i theta} (-i)^{j+1})
    const int m = (j + 1) % 4;
    BigReal re = m == 0 ? c : m == 1 ? s : m == 2 ? -c : -s;
    BigReal term = coef * pow(u, static_cast<long>(n - j)) * re / apow;
    if (j % 2) term = -term;
    total += term;
    coef *= static_cast<long>(n - j);
    apow *= A;
  }
  return total * 2L;
}

}  // namespace

OscillatoryReport oscillatory_check(double alpha, double A, double B, double T, long precision_bits) {
  if (A == 0 || !std::isfinite(A)) throw InvalidArgument("oscillatory_check: A must be nonzero");
  if (!(T > 0) || !std::isfinite(T)) throw InvalidArgument("oscillatory_check: T must be positive");
  if (!std::isfinite(alpha) || !std::isfinite(B)) throw InvalidArgument("oscillatory_check: non-finite input");
  if (precision_bits < 53) throw InvalidArgument("oscillatory_check: precision_bits must be >= 53");
  const long wp = precision_bits + 32;
  const BigReal bA(A, wp), bB(B, wp), power(2 * alpha + 1, wp);
  const BigReal a = sqrt(BigReal(T, wp)), b = sqrt(BigReal(2 * T, wp));
  const GaussLegendre g = gauss_legendre(wp);

  // Start with panels spanning at most 4 radians of the cosine.
  std::size_t panels = static_cast<std::size_t>(std::ceil(std::abs(A) * (b - a).to_double() / 4)) + 1;
  Quad prev = composite(g, a, b, panels, power, bA, bB, wp);
  BigReal tol(1.0, 64);
  mpfr_div_2si(tol.get(), tol.get(), precision_bits, MPFR_RNDN);
  for (;;) {
    Quad next = composite(g, a, b, 2 * panels, power, bA, bB, wp);
    panels *= 2;
    const bool done = abs(next.value - prev.value) <= next.l1 * tol;
    prev = std::move(next);
    if (done || panels > (std::size_t(1) << 22)) break;
  }

  OscillatoryReport r;
  r.alpha = alpha;
  r.A = A;
  r.B = B;
  r.T = T;
  r.panels = panels;
  r.value = prev.value.with_precision(precision_bits);
  const double n = 2 * alpha + 1;
  if (n >= 0 && n == std::floor(n) && n <= 64) {
    const int ni = static_cast<int>(n);
    r.closed_form = (antiderivative(ni, b, bA, bB, wp) - antiderivative(ni, a, bA, bB, wp)).with_precision(precision_bits);
  }
  r.ratio = std::abs(r.value.to_double()) * std::abs(A) / std::pow(T, 0.5 + alpha);
  return r;
}

OscillatorySweep oscillatory_sweep(double alpha, std::span<const double> A_values, double B, double T,
                                   long precision_bits) {
  if (A_values.empty()) throw InvalidArgument("oscillatory sweep needs at least one A");
  OscillatorySweep s;
  std::vector<double> ratios;
  for (double A : A_values) {
    s.rows.push_back(oscillatory_check(alpha, A, B, T, precision_bits));
    ratios.push_back(s.rows.back().ratio);
  }
  std::sort(ratios.begin(), ratios.end());
  s.max_ratio = ratios.back();
  const std::size_t m = ratios.size();
  s.median_ratio = m % 2 ? ratios[m / 2] : (ratios[m / 2 - 1] + ratios[m / 2]) / 2;
  return s;
}

void write_moment_csv(std::ostream& out, const MomentReport& r) {
  out << "k,T,exact_moment,main_term,error,ratio\n";
  for (const MomentPoint& p : r.points)
    out << r.k << ',' << p.T << ',' << p.exact.get_str() << ',' << p.main_term.to_string() << ','
        << p.error.to_string() << ',' << p.ratio.to_string() << '\n';
}

}  // namespace momentlab::moments
