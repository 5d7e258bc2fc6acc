#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "momentlab/error.hpp"
#include "momentlab/resonance.hpp"
#include "momentlab/stats.hpp"

using namespace momentlab;
using namespace momentlab::resonance;

namespace {

const cusp::CoefficientTable& tau_table() {
  static const cusp::CoefficientTable t = cusp::make_table(12, 1 << 14);
  return t;
}

std::vector<BigReal> random_weights(SplitMix64& rng, std::size_t y, bool nonnegative) {
  std::vector<BigReal> w(y + 1, BigReal(192));
  for (std::size_t n = 1; n <= y; ++n) {
    double v = rng.unit() / std::pow(double(n), 0.75);
    if (!nonnegative && rng.below(2)) v = -v;
    w[n] = BigReal(v, 192);
  }
  return w;
}

double rel(const BigReal& a, const BigReal& b) {
  if (b.is_zero()) return std::abs(a.to_double());
  return std::abs(((a - b) / b).to_double());
}

}  // namespace

TEST_CASE("exact_equal examples") {
  CHECK(exact_equal(1, 9, 4, 4));
  CHECK(exact_equal(2, 18, 8, 8));
  CHECK_FALSE(exact_equal(2, 3, 1, 8));
  CHECK(exact_equal(5, 7, 7, 5));
  CHECK_FALSE(exact_equal(3, 12, 27, 3));
  CHECK(exact_equal(3, 12, 27, 27) == false);
  CHECK(exact_equal(12, 27, 3, 48));  // 2r3 + 3r3 = r3 + 4r3
  CHECK_THROWS_AS(exact_equal(0, 1, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(exact_equal(1, 1, 1, (std::uint64_t{1} << 40) + 1), InvalidArgument);
}

TEST_CASE("exact_equal symmetry and agreement with floating evaluation") {
  SplitMix64 rng(11);
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t q = rng.between(1, 30);
    std::uint64_t n, m, k, l;
    if (i % 2) {
      // Family solution a+b = c+d on a shared kernel.
      const std::uint64_t a = rng.between(1, 20), b = rng.between(1, 20), c = rng.between(1, a + b - 1);
      n = a * a * q, m = b * b * q, k = c * c * q, l = (a + b - c) * (a + b - c) * q;
    } else {
      n = rng.between(1, 500), m = rng.between(1, 500), k = rng.between(1, 500), l = rng.between(1, 500);
    }
    const bool e = exact_equal(n, m, k, l);
    CHECK(e == exact_equal(k, l, n, m));
    CHECK(e == exact_equal(m, n, k, l));
    CHECK(e == exact_equal(n, m, l, k));
    const long double gap = std::sqrt((long double)n) + std::sqrt((long double)m) - std::sqrt((long double)k) -
                            std::sqrt((long double)l);
    if (e) CHECK(std::abs(gap) < 1e-12L);
    if (std::abs(gap) > 1e-9L) CHECK_FALSE(e);
    if (i % 2) CHECK(e);
  }
}

TEST_CASE("enumeration matches brute force for every y <= 40") {
  for (auto [k, l] : {std::pair{2, 1}, {3, 2}, {4, 2}}) {
    const auto brute = brute_force_solutions(k, l, 40);
    for (std::uint64_t y = 1; y <= 40; ++y) {
      CAPTURE(k);
      CAPTURE(y);
      std::vector<Tuple> expect;
      for (const auto& t : brute)
        if (*std::max_element(t.begin(), t.begin() + k) <= y) expect.push_back(t);
      const auto got = collect_solutions(k, l, y);
      CHECK(got == expect);
      CHECK(std::set<Tuple>(got.begin(), got.end()).size() == got.size());
    }
  }
}

TEST_CASE("enumeration examples") {
  CHECK(collect_solutions(4, 2, 9).size() == 157);
  CHECK(collect_solutions(2, 1, 5) == std::vector<Tuple>{{1, 1, 0, 0}, {2, 2, 0, 0}, {3, 3, 0, 0}, {4, 4, 0, 0}, {5, 5, 0, 0}});
  const auto s32 = collect_solutions(3, 2, 9);
  for (Tuple t : {Tuple{1, 1, 4, 0}, Tuple{1, 4, 9, 0}, Tuple{4, 1, 9, 0}, Tuple{2, 2, 8, 0}})
    CHECK(std::find(s32.begin(), s32.end(), t) != s32.end());
  CHECK_THROWS_AS(collect_solutions(5, 2, 9), InvalidArgument);
  CHECK_THROWS_AS(collect_solutions(4, 1, 9), InvalidArgument);
}

TEST_CASE("every emitted tuple satisfies the exact predicate") {
  for (auto [k, l] : {std::pair{3, 2}, {4, 2}}) {
    enumerate_solutions(k, l, 120, [&](const Tuple& t) {
      if (k == 4)
        REQUIRE(exact_equal(t[0], t[1], t[2], t[3]));
      else  // sqrt a + sqrt b = sqrt c  iff  sqrt 4a + sqrt 4b = sqrt c + sqrt c
        REQUIRE(exact_equal(4 * t[0], 4 * t[1], t[2], t[2]));
    });
  }
}

TEST_CASE("family aggregation equals tuple-by-tuple summation") {
  SplitMix64 rng(5);
  for (auto [k, l] : {std::pair{2, 1}, {3, 2}, {4, 2}}) {
    for (std::uint64_t y : {1u, 2u, 7u, 50u, 200u}) {
      CAPTURE(k);
      CAPTURE(y);
      const auto w = random_weights(rng, y, false);
      const SeriesValue fast = s_trunc_weights(w, k, l, y, 128);
      const SeriesValue slow = s_trunc_direct(w, k, l, y, 128);
      CHECK(rel(fast.value, slow.value) < 1e-35);
    }
  }
}

TEST_CASE("s_trunc examples") {
  const auto& t = tau_table();
  const double expect = 1.0 + (576.0 / 2048.0) / std::pow(2.0, 1.5);
  CHECK(s_trunc(t, 2, 1, 2, 128).value.to_double() == doctest::Approx(expect).epsilon(1e-15));
  CHECK(std::abs(expect - 1.09943689) < 1e-8);
  CHECK(s_trunc(t, 4, 2, 1, 128).value.to_double() == 1.0);

  const cusp::CoefficientTable zero(12, std::vector<BigInt>(50, BigInt(0)));
  for (auto [k, l] : {std::pair{2, 1}, {3, 2}, {4, 2}}) CHECK(s_trunc(zero, k, l, 50, 128).value.is_zero());
  CHECK_THROWS_AS(s_trunc(t, 4, 2, t.n_max() + 1, 128), InvalidArgument);
}

TEST_CASE("s_trunc is monotone in y for nonnegative weights") {
  SplitMix64 rng(9);
  const auto w = random_weights(rng, 300, true);
  for (auto [k, l] : {std::pair{2, 1}, {3, 2}, {4, 2}}) {
    BigReal prev(0.0, 128);
    for (std::uint64_t y = 1; y <= 300; y += 13) {
      const BigReal v = s_trunc_weights(w, k, l, y, 128).value;
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("precision refinement is consistent") {
  const auto& t = tau_table();
  const BigReal lo = s_trunc(t, 4, 2, 500, 128).value;
  const BigReal hi = s_trunc(t, 4, 2, 500, 256).value;
  CHECK(rel(lo, hi) < std::ldexp(1.0, -64));
}

TEST_CASE("constants") {
  const auto& t = tau_table();
  const double pi = 3.14159265358979323846;
  CHECK(constant_Ck(t, 2, 1, 128).to_double() == doctest::Approx(1.0 / (50 * pi * pi)).epsilon(1e-15));
  const BigReal s42 = s_trunc(t, 4, 2, 300, 128).value;
  const BigReal c4 = constant_Ck(t, 4, 300, 128);
  CHECK(rel(c4 * BigReal(64.0 * 12, 128) * pow(BigReal::pi(128), 4L) / BigReal(3.0, 128), s42) < 1e-36);
  const BigReal s32 = s_trunc(t, 3, 2, 300, 128).value;
  CHECK(constant_Ck(t, 3, 300, 128).to_double() ==
        doctest::Approx(3 * s32.to_double() / (4 * 73 * pi * pi * pi)).epsilon(1e-14));
  CHECK_THROWS_AS(constant_Ck(t, 5, 10, 128), InvalidArgument);
}

TEST_CASE("dyadic differences of s42 shrink") {
  const auto& t = tau_table();
  std::vector<double> diffs;
  BigReal prev = s_trunc(t, 4, 2, 64, 128).value;
  for (std::uint64_t y = 128; y <= 8192; y *= 2) {
    const BigReal cur = s_trunc(t, 4, 2, y, 128).value;
    diffs.push_back(std::abs((cur - prev).to_double()));
    prev = cur;
  }
  for (std::size_t i = 1; i < diffs.size(); ++i) CHECK(diffs[i] < diffs[i - 1]);
}

TEST_CASE("tail fit for the second-moment series") {
  const auto& t = tau_table();
  std::vector<std::uint64_t> ys;
  for (std::uint64_t y = 64; y <= 16384; y *= 2) ys.push_back(y);
  const TailFit f = tail_fit(t, 2, 1, ys, 128);
  CHECK(f.slope >= -0.8);
  CHECK(f.slope <= -0.3);
  CHECK(f.abs_differences.size() == ys.size() - 1);
  for (double d : f.abs_differences) CHECK(d >= 0.0);
  const double s1 = f.values[f.values.size() - 2].value.to_double();
  const double s2 = f.values.back().value.to_double();
  const double lim = f.extrapolated_limit.to_double();
  CHECK(lim >= std::min(s1, s2) - 3 * f.heuristic_error);
  CHECK(lim <= std::max(s1, s2) + 3 * f.heuristic_error);

  CHECK_THROWS_AS(tail_fit(t, 2, 1, std::vector<std::uint64_t>{64, 128, 256}, 128), InvalidArgument);
  CHECK_THROWS_AS(tail_fit(t, 2, 1, std::vector<std::uint64_t>{64, 128, 256, 1024}, 128), InvalidArgument);
}
