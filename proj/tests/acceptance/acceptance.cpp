// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion, with
// the measured quantities, and exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "momentlab/counting.hpp"
#include "momentlab/cuspform.hpp"
#include "momentlab/moments.hpp"
#include "momentlab/resonance.hpp"
#include "momentlab/series.hpp"
#include "momentlab/stats.hpp"
#include "momentlab/voronoi.hpp"

using namespace momentlab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %2d: %s |%s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.str().c_str(), secs);
  std::fflush(stdout);
}

const cusp::CoefficientTable& big_table() {
  static const cusp::CoefficientTable t = cusp::make_table(12, std::size_t(1) << 20);
  return t;
}

std::vector<cusp::CoefficientTable>& weight_tables() {
  static std::vector<cusp::CoefficientTable> tables = [] {
    std::vector<cusp::CoefficientTable> v;
    for (int w : cusp::kSupportedWeights) v.push_back(cusp::make_table(w, 100000));
    return v;
  }();
  return tables;
}

}  // namespace

int main() {
  criterion(1, "coefficient dual oracle", [](Outcome& o) {
    const std::size_t len = 10001;
    const series::QSeries a = series::delta(len);
    const series::QSeries b = series::eta_product_24(len);
    std::size_t mismatches = 0;
    for (std::size_t n = 0; n < len; ++n) mismatches += a[n] != b[n];
    o.detail << " n<=10^4 mismatches=" << mismatches << " a(2..5)=" << a[2] << "," << a[3] << "," << a[4] << ","
             << a[5];
    o.require(mismatches == 0, "eisenstein and eta routes differ");
    o.require(a[2] == -24 && a[3] == 252 && a[4] == -1472 && a[5] == 4830, "spot values");
  });

  criterion(2, "Deligne scan, n <= 10^5, six weights", [](Outcome& o) {
    for (const auto& t : weight_tables()) {
      const auto r = cusp::check_deligne(t);
      o.detail << " w" << t.weight() << ":" << r.violations << "/" << r.checked;
      o.require(r.passed() && r.checked == 100000, "weight " + std::to_string(t.weight()));
    }
  });

  criterion(3, "Hecke relations", [](Outcome& o) {
    for (const auto& t : weight_tables()) {
      const auto r = cusp::check_hecke(t, cusp::HeckeOptions{1000, 100, 1});
      o.detail << " w" << t.weight() << ":" << r.pairs_checked << "+" << r.prime_squares_checked << " viol=" << r.violations;
      o.require(r.passed() && r.pairs_checked == 1000 && r.prime_squares_checked == 100,
                "weight " + std::to_string(t.weight()));
    }
  });

  criterion(4, "decomposition identity, 100 x, y = 200, 128 bits", [](Outcome& o) {
    const auto table = cusp::make_table(12, 2000);
    SplitMix64 rng(2024);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const BigReal x(10000 + 10000 * rng.unit(), 128);
      const auto d = voronoi::decompose_S(table, x, 200, 128);
      const double rel = (abs(d.residual()) / abs(d.R4)).to_double();
      worst = std::max(worst, rel);
    }
    o.detail << " max |R^4 - sum S_i| / |R^4| = " << worst;
    o.require(worst <= 1e-20, "residual above 1e-20");
  });

  criterion(5, "resonance enumeration equals brute force, y <= 64", [](Outcome& o) {
    const std::pair<int, int> shapes[] = {{2, 1}, {3, 2}, {4, 2}};
    for (auto [k, l] : shapes) {
      const auto brute = resonance::brute_force_solutions(k, l, 64);
      std::size_t bad = 0;
      for (std::uint64_t y = 1; y <= 64; ++y) {
        std::vector<resonance::Tuple> expect;
        for (const auto& t : brute)
          if (*std::max_element(t.begin(), t.begin() + k) <= y) expect.push_back(t);
        bad += resonance::collect_solutions(k, l, y) != expect;
      }
      o.detail << " (" << k << "," << l << "):" << brute.size() << " tuples, bad y=" << bad;
      o.require(bad == 0, "shape mismatch");
    }
    const std::size_t n9 = resonance::collect_solutions(4, 2, 9).size();
    o.detail << " y=9 (4,2) count=" << n9;
    o.require(n9 == 157, "157 quadruples at y = 9");
  });

  criterion(6, "counting oracle, sides <= 32, both signs, 100 deltas", [](Outcome& o) {
    const std::uint64_t sides[] = {1, 2, 4, 8, 16, 32};
    SplitMix64 rng(6);
    std::size_t boxes = 0, queries = 0, bad = 0;
    for (auto sign : {counting::Sign::minus, counting::Sign::plus})
      for (auto N : sides)
        for (auto M : sides)
          for (auto K : sides)
            for (auto L : sides) {
              const counting::DyadicBox box{N, M, K, L};
              const counting::BruteForceCounter brute(box, sign);
              ++boxes;
              for (int i = 0; i < 100; ++i) {
                const double delta = std::exp2(-12 + 13 * rng.unit());
                bad += counting::count_Apm(box, delta, sign).count != brute.count(delta);
                ++queries;
              }
            }
    const auto example = counting::count_A1({2, 2, 2, 2}, 0.3).count;
    o.detail << " boxes=" << boxes << " queries=" << queries << " mismatches=" << bad << " (2,2,2,2;0.3)=" << example;
    o.require(bad == 0, "fast counter differs from brute force");
    o.require(example == 8, "example count");
  });

  // Moments at T = 2^20 share the big table and the exact sums.
  const auto moment_fit = [](int k) {
    const auto& t = big_table();
    const auto c = moments::constant_truncated(t, k, t.n_max(), 128);
    const auto Ts = moments::dyadic_list(std::uint64_t(1) << 12, std::uint64_t(1) << 20);
    return moments::error_exponent_fit(t, c, Ts, 128);
  };

  criterion(7, "second moment against C_2 T^{k+1/2}", [&](Outcome& o) {
    const auto r = moment_fit(2);
    const double top = r.points.back().ratio.to_double();
    std::vector<double> dev;
    for (const auto& p : r.points)
      if (p.T >= (1u << 14)) dev.push_back(std::abs(p.ratio.to_double() - 1));
    int decreases = 0;
    for (std::size_t i = 1; i < dev.size(); ++i) decreases += dev[i] < dev[i - 1];
    o.detail << " C2(y=2^20)=" << r.constant.value.to_string(10) << " ratio(2^20)=" << top << " |ratio-1| over 2^14..2^20:";
    for (double d : dev) o.detail << " " << d;
    o.detail << " decreases=" << decreases << "/6";
    o.require(top >= 0.85 && top <= 1.15, "ratio band");
    o.require(decreases >= 5, "|ratio-1| decreases in >= 5 of 6 steps");
  });

  criterion(8, "fourth moment against C_4 T^{2k}", [&](Outcome& o) {
    const auto r = moment_fit(4);
    const double top = r.points.back().ratio.to_double();
    const std::size_t n = r.points.size();
    double dev[3];
    for (int i = 0; i < 3; ++i) dev[i] = std::abs(r.points[n - 3 + i].ratio.to_double() - 1);
    o.detail << " C4(y=2^20)=" << r.constant.value.to_string(10) << " slope=" << r.slope
             << " delta_hat=" << r.delta_hat << " (reported) ratio(2^20)=" << top << " |ratio-1| last three: " << dev[0]
             << " " << dev[1] << " " << dev[2];
    o.require(r.slope < 24, "error slope below 2k");
    o.require(top >= 0.5 && top <= 2.0, "ratio band");
    o.require(dev[1] < dev[0] && dev[2] < dev[1], "ratio moves toward 1 over the last three points");
  });

  criterion(9, "dyadic tail differences of s_{4;2}, y = 2^8..2^16", [](Outcome& o) {
    const auto ys = moments::dyadic_list(256, 65536);
    const auto fit = resonance::tail_fit(big_table(), 4, 2, ys, 128);
    o.detail << " slope=" << fit.slope;
    o.require(fit.slope >= -0.8 && fit.slope <= -0.3, "slope band [-0.8, -0.3]");
  });

  criterion(10, "truncation error profile slope, N = 2^6..2^12", [](Outcome& o) {
    const auto Ns = moments::dyadic_list(64, 4096);
    const auto& t = big_table();
    // One grid point per unit interval of x: every step of A is sampled.
    const auto p = voronoi::truncation_error_profile(t, 10000, 20000, Ns, 10000, 1);
    o.detail << " slope(grid 10000)=" << p.fitted_slope << "; coarser grids for reference:";
    for (std::size_t g : {100, 400, 1000})
      o.detail << " " << g << ":" << voronoi::truncation_error_profile(t, 10000, 20000, Ns, g, 1).fitted_slope;
    o.require(p.fitted_slope >= -0.7 && p.fitted_slope <= -0.3, "slope band [-0.7, -0.3]");
  });

  criterion(11, "oscillatory integral bound", [](Outcome& o) {
    const auto ex = moments::oscillatory_check(0, 2 * std::numbers::pi, 0, 1, 128);
    const double v = ex.value.to_double();
    double worst = (abs(ex.value - *ex.closed_form) / abs(*ex.closed_form)).to_double();
    std::vector<double> As;
    for (int j = 0; j <= 12; ++j) As.push_back(std::ldexp(1.0, j));
    const auto s = moments::oscillatory_sweep(1, As, 0, 1000, 128);
    for (const auto& r : s.rows) worst = std::max(worst, (abs(r.value - *r.closed_form) / abs(*r.closed_form)).to_double());
    o.detail << " example=" << v << " max quadrature/closed-form rel diff=" << worst << " sweep max=" << s.max_ratio
             << " median=" << s.median_ratio;
    o.require(std::abs(v - 0.1369) <= 0.001, "example value");
    o.require(worst <= 1e-6, "quadrature matches closed form");
    o.require(std::isfinite(s.max_ratio) && s.max_ratio <= 4 * s.median_ratio, "max <= 4 x median");
  });

  criterion(12, "minimal gaps of square-root sums", [](Outcome& o) {
    double prev = 0;
    for (std::uint64_t V : {50, 100, 200}) {
      const auto r = counting::min_gap_scan(V);
      const double g = r.normalized_min.normalized;
      const auto& w = r.normalized_min.tuple;
      o.detail << " V=" << V << ":" << g << "@(" << w[0] << "," << w[1] << "," << w[2] << "," << w[3] << ")";
      o.require(g > 0, "positive minimum at V=" + std::to_string(V));
      if (prev > 0) {
        o.detail << " ratio=" << g / prev;
        o.require(g / prev >= 0.5, "successive ratio >= 0.5 at V=" + std::to_string(V));
      }
      prev = g;
    }
    const auto r4 = counting::min_gap_scan(4);
    o.detail << " V=4 raw=" << r4.raw_min.eta;
    o.require(std::abs(r4.raw_min.eta - 0.04988) < 1e-5, "raw gap at V=4");
    o.require(r4.raw_min.tuple == std::array<std::uint64_t, 4>{2, 4, 3, 3}, "witness (2,4,3,3)");
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
