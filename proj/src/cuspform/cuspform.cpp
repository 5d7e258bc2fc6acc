#include "momentlab/cuspform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "momentlab/arith.hpp"
#include "momentlab/error.hpp"
#include "momentlab/parallel.hpp"
#include "momentlab/stats.hpp"

namespace momentlab::cusp {

bool is_supported_weight(int weight) {
  return std::find(kSupportedWeights.begin(), kSupportedWeights.end(), weight) != kSupportedWeights.end();
}

CuspForm build_form(int weight, std::size_t length) {
  if (!is_supported_weight(weight))
    throw InvalidArgument("weight " + std::to_string(weight) +
                          " unsupported: the cusp-form space must be one-dimensional (weights 12,16,18,20,22,26)");
  if (length == 0) throw InvalidArgument("build_form: length must be >= 1");
  series::QSeries d = series::delta(length);
  if (weight == 12) return {weight, std::move(d)};
  return {weight, series::multiply(d, series::eisenstein(weight - 12, length))};
}

CoefficientTable::CoefficientTable(int weight, std::vector<BigInt> coeffs) : weight_(weight) {
  if (weight <= 0 || weight % 2) throw InvalidArgument("CoefficientTable: weight must be positive and even");
  a_.reserve(coeffs.size() + 1);
  a_.emplace_back(0);
  for (auto& c : coeffs) a_.push_back(std::move(c));
  prefix_.resize(a_.size());
  prefix_[0] = 0;
  for (std::size_t n = 1; n < a_.size(); ++n) prefix_[n] = prefix_[n - 1] + a_[n];
}

CoefficientTable build_table(const CuspForm& form) {
  const auto c = form.series.coeffs();
  if (c.empty() || c[0] != 0) throw InvalidArgument("build_table: series must vanish at q^0");
  return CoefficientTable(form.weight, std::vector<BigInt>(c.begin() + 1, c.end()));
}

CoefficientTable make_table(int weight, std::size_t n_max) { return build_table(build_form(weight, n_max + 1)); }

BigInt partial_sum(const CoefficientTable& table, double x) {
  if (std::isnan(x)) throw InvalidArgument("partial_sum: x is NaN");
  if (x < 1.0) return 0;
  if (x > static_cast<double>(table.n_max()))
    throw InvalidArgument("partial_sum: x exceeds the table length " + std::to_string(table.n_max()));
  return table.A(static_cast<std::size_t>(std::floor(x)));
}

namespace {

void check_index(const CoefficientTable& table, std::size_t n) {
  if (n < 1 || n > table.n_max()) throw InvalidArgument("coefficient index out of table range");
}

// a(n) / n^{k/2} at the given precision.
void scaled_coefficient(mpfr_ptr out, const CoefficientTable& table, std::size_t n, mpz_class& scratch) {
  mpz_ui_pow_ui(scratch.get_mpz_t(), n, static_cast<unsigned long>(table.weight() / 2));
  mpfr_set_z(out, table.a(n).get_mpz_t(), MPFR_RNDN);
  mpfr_div_z(out, out, scratch.get_mpz_t(), MPFR_RNDN);
}

}  // namespace

BigReal normalized_coefficient(const CoefficientTable& table, std::size_t n, long precision_bits) {
  check_index(table, n);
  BigReal v(precision_bits), root(precision_bits);
  mpz_class scratch;
  scaled_coefficient(v.get(), table, n, scratch);
  mpfr_sqrt_ui(root.get(), n, MPFR_RNDN);
  v *= root;
  return v;
}

std::vector<BigReal> resonance_weights(const CoefficientTable& table, std::size_t y, long precision_bits) {
  if (y > table.n_max()) throw InvalidArgument("resonance_weights: y exceeds the table length");
  std::vector<BigReal> w(y + 1, BigReal(precision_bits));
  parallel_chunks(1, y + 1, [&](unsigned, std::size_t lo, std::size_t hi) {
    mpz_class scratch;
    BigReal q(precision_bits);
    for (std::size_t n = lo; n < hi; ++n) {
      scaled_coefficient(w[n].get(), table, n, scratch);
      mpfr_sqrt_ui(q.get(), n, MPFR_RNDN);
      mpfr_sqrt(q.get(), q.get(), MPFR_RNDN);
      mpfr_div(w[n].get(), w[n].get(), q.get(), MPFR_RNDN);
    }
  });
  return w;
}

DeligneReport check_deligne(const CoefficientTable& table) {
  const std::size_t n_max = table.n_max();
  if (n_max >= (std::size_t{1} << 32)) throw InvalidArgument("check_deligne: table too long");
  const auto d = divisor_counts(static_cast<std::uint32_t>(n_max));
  const unsigned long power = static_cast<unsigned long>(table.weight() - 1);

  struct Partial {
    DeligneReport report;
    mpq_class best{-1};
  };
  const unsigned chunks = std::max(1u, thread_count());
  std::vector<Partial> parts(chunks);
  parallel_chunks(1, n_max + 1, [&](unsigned c, std::size_t lo, std::size_t hi) {
    Partial& p = parts[c];
    mpz_class lhs, rhs;
    mpq_class ratio_sq;
    for (std::size_t n = lo; n < hi; ++n) {
      lhs = table.a(n) * table.a(n);
      mpz_ui_pow_ui(rhs.get_mpz_t(), n, power);
      rhs *= static_cast<unsigned long>(d[n]) * d[n];
      ++p.report.checked;
      if (lhs > rhs && p.report.violations++ == 0) p.report.first_violation = n;
      ratio_sq = mpq_class(lhs, rhs);
      ratio_sq.canonicalize();
      if (ratio_sq > p.best) {
        p.best = ratio_sq;
        p.report.argmax = n;
      }
    }
  }, chunks);

  DeligneReport out;
  mpq_class best(-1);
  for (const Partial& p : parts) {
    out.checked += p.report.checked;
    if (p.report.violations && out.violations == 0) out.first_violation = p.report.first_violation;
    out.violations += p.report.violations;
    if (p.report.checked && p.best > best) {
      best = p.best;
      out.argmax = p.report.argmax;
    }
  }
  if (out.checked) out.max_ratio = std::sqrt(best.get_d());
  return out;
}

HeckeReport check_hecke(const CoefficientTable& table, const HeckeOptions& options) {
  const std::size_t n_max = table.n_max();
  HeckeReport report;
  if (n_max == 0) return report;
  SplitMix64 rng(options.seed);
  auto fail = [&](std::uint64_t m, std::uint64_t n) {
    if (report.violations++ == 0) {
      report.witness_m = m;
      report.witness_n = n;
    }
  };

  for (std::size_t t = 0; t < options.pair_trials; ++t) {
    std::uint64_t m, n;
    do {
      m = rng.between(1, n_max);
      n = rng.between(1, n_max / m);
    } while (gcd(m, n) != 1);
    ++report.pairs_checked;
    if (table.a(m * n) != table.a(m) * table.a(n)) fail(m, n);
  }

  const auto primes = primes_up_to(static_cast<std::uint32_t>(isqrt(n_max)));
  if (!primes.empty()) {
    mpz_class pk;
    for (std::size_t t = 0; t < options.prime_trials; ++t) {
      const std::uint64_t p = primes[rng.below(primes.size())];
      mpz_ui_pow_ui(pk.get_mpz_t(), p, static_cast<unsigned long>(table.weight() - 1));
      ++report.prime_squares_checked;
      if (table.a(p * p) != table.a(p) * table.a(p) - pk) fail(p, p);
    }
  }
  return report;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  return state;
}

std::string cache_file_name(int weight, std::size_t n_max) {
  return "coeffs_w" + std::to_string(weight) + "_n" + std::to_string(n_max) + ".dat";
}

namespace {

std::string header_line(int weight, std::size_t n_max) {
  return "momentlab-coeffs v1 weight=" + std::to_string(weight) + " nmax=" + std::to_string(n_max);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void write_cache(const CoefficientTable& table, std::ostream& out) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto emit = [&](const std::string& line) {
    h = fnv1a64(line, h);
    h = fnv1a64("\n", h);
    out << line << '\n';
  };
  emit(header_line(table.weight(), table.n_max()));
  std::string line;
  for (std::size_t n = 1; n <= table.n_max(); ++n) {
    line = std::to_string(n);
    line += ' ';
    line += table.a(n).get_str();
    emit(line);
  }
  out << "checksum=" << hex64(h) << '\n';
  if (!out) throw CacheError("failed writing coefficient cache");
}

CoefficientTable read_cache(std::istream& in, int expected_weight) {
  std::string line;
  if (!std::getline(in, line)) throw CacheError("cache: empty file");
  std::istringstream hs(line);
  std::string magic, version, wfield, nfield, extra;
  hs >> magic >> version >> wfield >> nfield;
  if (magic != "momentlab-coeffs") throw CacheError("cache: bad magic");
  if (version != "v1") throw CacheError("cache: unsupported version '" + version + "'");
  if (hs >> extra) throw CacheError("cache: trailing header fields");
  int weight = 0;
  unsigned long long n_max = 0;
  if (std::sscanf(wfield.c_str(), "weight=%d", &weight) != 1 || std::sscanf(nfield.c_str(), "nmax=%llu", &n_max) != 1 ||
      header_line(weight, n_max) != line)
    throw CacheError("cache: malformed header");
  if (weight != expected_weight)
    throw CacheError("cache: weight " + std::to_string(weight) + " does not match " + std::to_string(expected_weight));

  std::uint64_t h = fnv1a64(line + "\n");
  std::vector<BigInt> coeffs(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (!std::getline(in, line)) throw CacheError("cache: truncated at n=" + std::to_string(n));
    h = fnv1a64(line, h);
    h = fnv1a64("\n", h);
    const auto space = line.find(' ');
    if (space == std::string::npos || line.compare(0, space, std::to_string(n)) != 0)
      throw CacheError("cache: bad index on line " + std::to_string(n + 1));
    if (coeffs[n - 1].set_str(line.substr(space + 1), 10) != 0)
      throw CacheError("cache: bad coefficient on line " + std::to_string(n + 1));
  }
  if (std::getline(in, line)) {
    if (line.rfind("checksum=", 0) != 0) throw CacheError("cache: unexpected trailing content");
    if (line.substr(9) != hex64(h)) throw CacheError("cache: checksum mismatch");
    if (std::getline(in, line)) throw CacheError("cache: content after checksum");
  }
  return CoefficientTable(weight, std::move(coeffs));
}

}  // namespace momentlab::cusp
