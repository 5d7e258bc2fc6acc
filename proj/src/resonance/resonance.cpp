#include "momentlab/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "momentlab/arith.hpp"
#include "momentlab/error.hpp"
#include "momentlab/parallel.hpp"
#include "momentlab/stats.hpp"

namespace momentlab::resonance {
namespace {

constexpr std::uint64_t kMaxArgument = std::uint64_t{1} << 40;
constexpr long kGuardBits = 64;

// Same predicate, zero entries allowed (sqrt(0) = 0); used by the oracles for
// the shorter shapes.
bool exact_equal_z(std::uint64_t n, std::uint64_t m, std::uint64_t k, std::uint64_t l) {
  const i128 d = static_cast<i128>(n) + m - static_cast<i128>(k) - l;
  if (d == 0) return u128(n) * m == u128(k) * l;
  std::uint64_t s;
  if (!is_perfect_square(u128(n) * m, &s)) return false;
  if (d + 2 * static_cast<i128>(s) < 0) return false;
  return 4 * d * static_cast<i128>(s) == 4 * static_cast<i128>(u128(k) * l) - 4 * static_cast<i128>(u128(n) * m) - d * d;
}

std::vector<std::uint64_t> squarefree_list(std::uint64_t y) {
  if (y > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("y too large");
  const auto ker = squarefree_kernels(static_cast<std::uint32_t>(y));
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = 1; q <= y; ++q)
    if (ker[q] == q) out.push_back(q);
  return out;
}

void check_weights(std::span<const BigReal> w, std::uint64_t y) {
  if (w.size() <= y) throw InvalidArgument("weight vector shorter than y + 1");
  if (y == 0) throw InvalidArgument("y must be >= 1");
}

}  // namespace

bool exact_equal(std::uint64_t n, std::uint64_t m, std::uint64_t k, std::uint64_t l) {
  for (std::uint64_t v : {n, m, k, l})
    if (v == 0 || v > kMaxArgument) throw InvalidArgument("exact_equal: arguments must be in [1, 2^40]");
  return exact_equal_z(n, m, k, l);
}

void require_shape(int k, int l) {
  if (!((k == 2 && l == 1) || (k == 3 && l == 2) || (k == 4 && l == 2)))
    throw InvalidArgument("unsupported (k,l) = (" + std::to_string(k) + "," + std::to_string(l) +
                          "); supported: (2,1), (3,2), (4,2)");
}

Tuple KernelFamily::realize(int k) const {
  Tuple t{};
  for (int i = 0; i < k; ++i) t[i] = mult[i] * mult[i] * q;
  return t;
}

void enumerate_solutions(int k, int l, std::uint64_t y, const std::function<void(const Tuple&)>& visit) {
  require_shape(k, l);
  if (y == 0) return;
  if (k == 2) {
    for (std::uint64_t n = 1; n <= y; ++n) visit({n, n, 0, 0});
    return;
  }
  const auto qs = squarefree_list(y);
  for (std::uint64_t q : qs) {
    const std::uint64_t amax = isqrt(y / q);
    KernelFamily f{q, {}};
    if (k == 3) {
      for (std::uint64_t a = 1; a < amax; ++a)
        for (std::uint64_t b = 1; a + b <= amax; ++b) {
          f.mult = {a, b, a + b, 0};
          visit(f.realize(3));
        }
    } else {
      for (std::uint64_t a = 1; a <= amax; ++a)
        for (std::uint64_t b = 1; b <= amax; ++b)
          for (std::uint64_t c = 1; c <= amax; ++c) {
            if (a + b <= c || a + b - c > amax) continue;
            f.mult = {a, b, c, a + b - c};
            visit(f.realize(4));
          }
    }
  }
  if (k == 4) {
    const auto ker = squarefree_kernels(static_cast<std::uint32_t>(y));
    for (std::uint64_t n = 1; n <= y; ++n)
      for (std::uint64_t m = 1; m <= y; ++m) {
        if (ker[n] == ker[m]) continue;
        visit({n, m, n, m});
        visit({n, m, m, n});
      }
  }
}

std::vector<Tuple> collect_solutions(int k, int l, std::uint64_t y) {
  std::vector<Tuple> out;
  enumerate_solutions(k, l, y, [&](const Tuple& t) { out.push_back(t); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Tuple> brute_force_solutions(int k, int l, std::uint64_t y) {
  require_shape(k, l);
  if (y > kMaxArgument) throw InvalidArgument("y too large");
  std::vector<Tuple> out;
  for (std::uint64_t a = 1; a <= y; ++a)
    for (std::uint64_t b = 1; b <= y; ++b) {
      if (k == 2) {
        if (exact_equal_z(a, 0, b, 0)) out.push_back({a, b, 0, 0});
        continue;
      }
      for (std::uint64_t c = 1; c <= y; ++c) {
        if (k == 3) {
          if (exact_equal_z(a, b, c, 0)) out.push_back({a, b, c, 0});
          continue;
        }
        for (std::uint64_t d = 1; d <= y; ++d)
          if (exact_equal_z(a, b, c, d)) out.push_back({a, b, c, d});
      }
    }
  return out;  // already lexicographic
}

SeriesValue s_trunc_weights(std::span<const BigReal> w, int k, int l, std::uint64_t y, long precision_bits) {
  require_shape(k, l);
  check_weights(w, y);
  const long wp = precision_bits + kGuardBits;
  SeriesValue out{k, l, y, precision_bits, BigReal(precision_bits)};

  if (k == 2) {
    const unsigned chunks = std::max(1u, thread_count());
    std::vector<Accumulator> parts(chunks, Accumulator(wp));
    parallel_chunks(1, y + 1, [&](unsigned c, std::size_t lo, std::size_t hi) {
      for (std::size_t n = lo; n < hi; ++n) parts[c].add_product(w[n], w[n]);
    }, chunks);
    Accumulator total(wp);
    for (const auto& p : parts) total.add(p);
    out.value = total.raw().with_precision(precision_bits);
    return out;
  }

  const auto qs = squarefree_list(y);
  const unsigned chunks = std::max(1u, thread_count());
  std::vector<Accumulator> same(chunks, Accumulator(wp));
  std::vector<BigReal> g(k == 4 ? qs.size() : 0, BigReal(wp));

  parallel_chunks(0, qs.size(), [&](unsigned c, std::size_t lo, std::size_t hi) {
    BigReal conv(wp + kGuardBits), term(wp + kGuardBits);
    std::vector<mpfr_srcptr> u;
    for (std::size_t i = lo; i < hi; ++i) {
      const std::uint64_t q = qs[i];
      const std::uint64_t amax = isqrt(y / q);
      u.assign(amax + 1, nullptr);
      for (std::uint64_t a = 1; a <= amax; ++a) u[a] = w[a * a * q].get();
      // conv = sum_{a+b=t, 1<=a,b<=amax} u_a u_b, using the a <-> b symmetry.
      const std::uint64_t tmax = k == 3 ? amax : 2 * amax;
      for (std::uint64_t t = 2; t <= tmax; ++t) {
        const std::uint64_t alo = t > amax ? t - amax : 1;
        mpfr_set_zero(conv.get(), 1);
        for (std::uint64_t a = alo; 2 * a < t; ++a) {
          mpfr_mul(term.get(), u[a], u[t - a], MPFR_RNDN);
          mpfr_add(conv.get(), conv.get(), term.get(), MPFR_RNDN);
        }
        mpfr_mul_2ui(conv.get(), conv.get(), 1, MPFR_RNDN);
        if (t % 2 == 0) {
          mpfr_sqr(term.get(), u[t / 2], MPFR_RNDN);
          mpfr_add(conv.get(), conv.get(), term.get(), MPFR_RNDN);
        }
        if (k == 3) {
          mpfr_mul(term.get(), conv.get(), u[t], MPFR_RNDN);
          same[c].add(term);
        } else {
          mpfr_sqr(term.get(), conv.get(), MPFR_RNDN);
          same[c].add(term);
        }
      }
      if (k == 4) {
        Accumulator gq(wp);
        for (std::uint64_t a = 1; a <= amax; ++a) gq.add_product(w[a * a * q], w[a * a * q]);
        g[i] = gq.raw().with_precision(wp);
      }
    }
  }, chunks);

  Accumulator total(wp);
  for (const auto& p : same) total.add(p);
  if (k == 4) {
    // Cross-kernel tuples: ordered (n, m) with distinct kernels, two layouts each.
    Accumulator cross(wp), prefix(wp);
    for (const BigReal& gq : g) {
      cross.add_product(gq, prefix.raw());
      prefix.add(gq);
    }
    BigReal c = cross.raw();
    c *= 4L;
    total.add(c);
  }
  out.value = total.raw().with_precision(precision_bits);
  return out;
}

SeriesValue s_trunc_direct(std::span<const BigReal> w, int k, int l, std::uint64_t y, long precision_bits) {
  require_shape(k, l);
  check_weights(w, y);
  const long wp = precision_bits + kGuardBits;
  Accumulator acc(wp);
  BigReal prod(wp);
  enumerate_solutions(k, l, y, [&](const Tuple& t) {
    mpfr_set(prod.get(), w[t[0]].get(), MPFR_RNDN);
    for (int i = 1; i < k; ++i) mpfr_mul(prod.get(), prod.get(), w[t[i]].get(), MPFR_RNDN);
    acc.add(prod);
  });
  return {k, l, y, precision_bits, acc.raw().with_precision(precision_bits)};
}

SeriesValue s_trunc(const cusp::CoefficientTable& table, int k, int l, std::uint64_t y, long precision_bits) {
  require_shape(k, l);
  if (y > table.n_max()) throw InvalidArgument("s_trunc: y exceeds the table length");
  const auto w = cusp::resonance_weights(table, y, precision_bits + kGuardBits);
  return s_trunc_weights(w, k, l, y, precision_bits);
}

int shape_l_for(int k) {
  switch (k) {
    case 2: return 1;
    case 3: return 2;
    case 4: return 2;
    default: throw InvalidArgument("constant C_k available for k = 2, 3, 4 only");
  }
}

BigReal constant_prefactor(int k, int weight, long precision_bits) {
  shape_l_for(k);
  const long wp = precision_bits + 16;
  const BigReal pi = BigReal::pi(wp);
  BigReal num(1.0, wp);
  BigReal den = pow(pi, static_cast<long>(k));
  switch (k) {
    case 2: den *= static_cast<long>(4 * weight + 2); break;
    case 3: num = BigReal(3.0, wp); den *= static_cast<long>(4 * (6 * weight + 1)); break;
    default: num = BigReal(3.0, wp); den *= static_cast<long>(64 * weight); break;
  }
  return (num / den).with_precision(precision_bits);
}

BigReal constant_from_series(int k, int weight, const BigReal& series_value) {
  const long bits = series_value.precision();
  return (constant_prefactor(k, weight, bits + 16) * series_value).with_precision(bits);
}

BigReal constant_Ck(const cusp::CoefficientTable& table, int k, std::uint64_t y, long precision_bits) {
  const SeriesValue s = s_trunc(table, k, shape_l_for(k), y, precision_bits);
  return constant_from_series(k, table.weight(), s.value);
}

TailFit tail_fit_values(std::vector<SeriesValue> values) {
  if (values.size() < 4) throw InvalidArgument("tail_fit needs at least 4 dyadic y values");
  std::sort(values.begin(), values.end(), [](const SeriesValue& a, const SeriesValue& b) { return a.y < b.y; });
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i].y != 2 * values[i - 1].y) throw InvalidArgument("tail_fit: y list must be dyadic");

  TailFit fit;
  fit.k = values.front().k;
  fit.l = values.front().l;
  std::vector<double> lx, ly;
  BigReal last_diff(values.back().value.precision());
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    last_diff = values[i + 1].value - values[i].value;
    const double d = std::abs(last_diff.to_double());
    fit.abs_differences.push_back(d);
    if (d > 0) {
      lx.push_back(std::log(static_cast<double>(values[i].y)));
      ly.push_back(std::log(d));
    }
  }
  if (lx.size() < 2) throw InvalidArgument("tail_fit: differences vanish; nothing to fit");
  fit.slope = least_squares(lx, ly).slope;

  fit.extrapolated_limit = values.back().value;
  if (fit.slope < 0) {
    const double r = std::exp2(fit.slope);
    const double factor = r / (1 - r);
    BigReal tail = last_diff;
    tail *= BigReal(factor, 64);
    fit.extrapolated_limit += tail;
    fit.heuristic_error = std::abs(tail.to_double());
  } else {
    fit.heuristic_error = std::numeric_limits<double>::infinity();
  }
  fit.values = std::move(values);
  return fit;
}

TailFit tail_fit(const cusp::CoefficientTable& table, int k, int l, std::span<const std::uint64_t> y_list,
                 long precision_bits) {
  require_shape(k, l);
  if (y_list.size() < 4) throw InvalidArgument("tail_fit needs at least 4 dyadic y values");
  const std::uint64_t ymax = *std::max_element(y_list.begin(), y_list.end());
  if (ymax > table.n_max()) throw InvalidArgument("tail_fit: y exceeds the table length");
  const auto w = cusp::resonance_weights(table, ymax, precision_bits + kGuardBits);
  std::vector<SeriesValue> values;
  for (std::uint64_t y : y_list) values.push_back(s_trunc_weights(w, k, l, y, precision_bits));
  return tail_fit_values(std::move(values));
}

}  // namespace momentlab::resonance
