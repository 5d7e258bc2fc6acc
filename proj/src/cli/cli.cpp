#include "momentlab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "momentlab/counting.hpp"
#include "momentlab/cuspform.hpp"
#include "momentlab/error.hpp"
#include "momentlab/moments.hpp"
#include "momentlab/parallel.hpp"
#include "momentlab/resonance.hpp"
#include "momentlab/voronoi.hpp"

namespace momentlab::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Usage or environment problem (exit 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Config {
  int weight = 12;
  std::size_t n_max = 0;  // 0: pick from the cache
  long precision_bits = kDefaultPrecisionBits;
  std::string cache_dir;
  unsigned threads = 0;
  std::string format;  // empty: command default
  std::uint64_t seed = 1;
  std::string output;
};

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Doubles carry 17 significant digits at most; BigReal values use bits/3.
std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string fmt(const BigReal& v) { return v.to_string(); }

bool wants_json(const Config& c, bool json_by_default) {
  if (c.format.empty()) return json_by_default;
  return c.format == "json";
}

json envelope(const Config& c, const std::string& command) {
  json j;
  j["command"] = command;
  j["timestamp"] = timestamp();
  j["weight"] = c.weight;
  j["precision_bits"] = c.precision_bits;
  j["seed"] = c.seed;
  return j;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& text) {
  const std::string t = strip(text);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size())
    throw UsageError("not a nonnegative integer: '" + text + "'");
  return v;
}

double parse_double(const std::string& text) {
  const std::string t = strip(text);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + text + "'");
  }
  if (used != t.size() || !std::isfinite(v)) throw UsageError("not a number: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::pair<std::string, std::string> split_range(const std::string& text) {
  const auto pos = text.find("..");
  if (pos == std::string::npos) throw UsageError("expected a range a..b, got '" + text + "'");
  return {text.substr(0, pos), text.substr(pos + 2)};
}

// ---------------------------------------------------------------------------
// Cache

struct LoadedTable {
  cusp::CoefficientTable table;
  std::string path;
};

LoadedTable load_table(const Config& c, std::size_t need) {
  if (!cusp::is_supported_weight(c.weight)) throw UsageError("unsupported weight " + std::to_string(c.weight));
  const fs::path dir = resolve_cache_dir(c.cache_dir);
  fs::path path;
  if (c.n_max != 0) {
    if (c.n_max < need)
      throw UsageError("--nmax " + std::to_string(c.n_max) + " is below the required " + std::to_string(need));
    path = dir / cusp::cache_file_name(c.weight, c.n_max);
  } else {
    const std::string prefix = "coeffs_w" + std::to_string(c.weight) + "_n";
    std::optional<std::size_t> best;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind(prefix, 0) != 0 || name.size() <= prefix.size() + 4 || !name.ends_with(".dat")) continue;
      const std::string digits = name.substr(prefix.size(), name.size() - prefix.size() - 4);
      std::size_t n = 0;
      const auto [p, err] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
      if (err != std::errc() || p != digits.data() + digits.size()) continue;
      if (n >= need && (!best || n < *best)) best = n;
    }
    if (!best)
      throw UsageError("no coefficient cache for weight " + std::to_string(c.weight) + " with nmax >= " +
                       std::to_string(need) + " in " + dir.string() + "; run `momentlab coeffs --weight " +
                       std::to_string(c.weight) + " --nmax " + std::to_string(need) + "` first");
    path = dir / cusp::cache_file_name(c.weight, *best);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw UsageError("coefficient cache missing: " + path.string() + "; run `momentlab coeffs` first");
  return {cusp::read_cache(in, c.weight), path.string()};
}

// ---------------------------------------------------------------------------
// Commands

int cmd_coeffs(const Config& c, std::ostream& out, std::ostream& err) {
  if (!cusp::is_supported_weight(c.weight))
    throw UsageError("unsupported weight " + std::to_string(c.weight) + "; supported: 12, 16, 18, 20, 22, 26");
  if (c.n_max == 0) throw UsageError("coeffs needs --nmax >= 1");
  const fs::path dir = resolve_cache_dir(c.cache_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create cache directory " + dir.string() + ": " + ec.message());
  const fs::path path = dir / cusp::cache_file_name(c.weight, c.n_max);

  json j = envelope(c, "coeffs");
  j["n_max"] = c.n_max;
  j["file"] = path.string();

  if (fs::exists(path)) {
    try {
      std::ifstream in(path, std::ios::binary);
      const auto t = cusp::read_cache(in, c.weight);
      if (t.n_max() == c.n_max) {
        j["rebuilt"] = false;
        j["validated"] = nullptr;
        out << j.dump(2) << '\n';
        return kExitOk;
      }
      err << "warning: " << path.string() << " holds a different length; rebuilding\n";
    } catch (const CacheError& e) {
      err << "warning: " << e.what() << "; rebuilding " << path.string() << '\n';
    }
  }

  const auto table = cusp::make_table(c.weight, c.n_max);
  const auto deligne = cusp::check_deligne(table);
  cusp::HeckeOptions opts;
  opts.seed = c.seed;
  const auto hecke = cusp::check_hecke(table, opts);
  j["deligne"] = {{"checked", deligne.checked},
                  {"max_ratio", deligne.max_ratio},
                  {"argmax", deligne.argmax},
                  {"violations", deligne.violations},
                  {"first_violation", deligne.first_violation}};
  j["hecke"] = {{"pairs_checked", hecke.pairs_checked},
                {"prime_squares_checked", hecke.prime_squares_checked},
                {"violations", hecke.violations},
                {"witness", {hecke.witness_m, hecke.witness_n}}};
  if (!deligne.passed() || !hecke.passed()) {
    j["rebuilt"] = false;
    j["validated"] = false;
    out << j.dump(2) << '\n';
    err << "validation failed; cache not written\n";
    return kExitValidation;
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw UsageError("cannot write " + tmp.string());
    cusp::write_cache(table, o);
    if (!o.flush()) throw UsageError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw UsageError("cannot move cache into place: " + ec.message());
  j["rebuilt"] = true;
  j["validated"] = true;
  out << j.dump(2) << '\n';
  return kExitOk;
}

struct MomentsArgs {
  int k = 0;
  std::string t;
  bool dyadic = false;
  std::uint64_t constant_y = 0;
  bool extrapolate = false;
};

int cmd_moments(const Config& c, const MomentsArgs& a, std::ostream& out) {
  if (a.k < moments::kMinOrder || a.k > moments::kMaxOrder)
    throw UsageError("--k must be in 2..8, got " + std::to_string(a.k));
  const auto Ts = parse_index_list(a.t, a.dyadic);
  const std::uint64_t need = *std::max_element(Ts.begin(), Ts.end());
  const LoadedTable lt = load_table(c, need);
  const auto& table = lt.table;
  const long bits = c.precision_bits;

  std::optional<moments::MomentConstant> constant;
  std::optional<moments::MomentReport> report;
  std::vector<moments::MomentPoint> rows;
  if (a.k <= 4) {
    const std::uint64_t y = a.constant_y ? a.constant_y : table.n_max();
    constant = a.extrapolate ? moments::constant_extrapolated(table, a.k, y, bits)
                             : moments::constant_truncated(table, a.k, y, bits);
    bool dyadic_run = Ts.size() >= 5;
    for (std::size_t i = 1; i < Ts.size(); ++i) dyadic_run = dyadic_run && Ts[i] == 2 * Ts[i - 1];
    if (dyadic_run) {
      report = moments::error_exponent_fit(table, *constant, Ts, bits);
      rows = report->points;
    }
  }
  if (!report) {
    const auto exact = moments::moment_exact_many(table, a.k, Ts);
    for (std::size_t i = 0; i < Ts.size(); ++i) {
      moments::MomentPoint p;
      p.T = Ts[i];
      p.exact = exact[i];
      if (constant) {
        p.main_term = moments::main_term(constant->value, table.weight(), a.k,
                                         BigReal(static_cast<double>(Ts[i]), bits), bits);
        p.error = BigReal(p.exact, bits + 32) - p.main_term;
        p.error.set_precision(bits);
        p.ratio = (BigReal(p.exact, bits + 32) / p.main_term).with_precision(bits);
      }
      rows.push_back(std::move(p));
    }
  }

  if (wants_json(c, false)) {
    json j = envelope(c, "moments");
    j["k"] = a.k;
    j["n_max"] = table.n_max();
    json arr = json::array();
    for (const auto& p : rows) {
      json r = {{"T", p.T}, {"exact_moment", p.exact.get_str()}};
      if (constant) {
        r["main_term"] = fmt(p.main_term);
        r["error"] = fmt(p.error);
        r["ratio"] = fmt(p.ratio);
      }
      if (p.local_delta) r["local_delta_hat"] = *p.local_delta;
      arr.push_back(r);
    }
    j["rows"] = arr;
    if (constant) {
      const BigRational e = moments::main_term_exponent(a.k, table.weight());
      j["exponent"] = e.get_str();
      j["constant"] = {{"value", fmt(constant->value)},
                       {"y", constant->y},
                       {"source", constant->source},
                       {"heuristic_error", constant->heuristic_error}};
    }
    if (report) {
      j["fit"] = {{"slope", report->slope},
                  {"delta_hat", report->delta_hat},
                  {"points", report->fit_points},
                  {"warmup_T", moments::kWarmupT},
                  {"label", "empirical"}};
      json win = json::array();
      for (const auto& w : report->windows)
        win.push_back({{"T", w.T}, {"exact_moment", w.exact.get_str()}, {"main_term", fmt(w.main_term)},
                       {"error", fmt(w.error)}, {"ratio", fmt(w.ratio)}});
      j["windows"] = win;
    }
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "k,T,exact_moment,main_term,error,ratio\n";
  for (const auto& p : rows) {
    out << a.k << ',' << p.T << ',' << p.exact.get_str() << ',';
    if (constant) out << fmt(p.main_term) << ',' << fmt(p.error) << ',' << fmt(p.ratio);
    else out << ",,";
    out << '\n';
  }
  return kExitOk;
}

struct ConstantArgs {
  int k = 0;
  int l = 0;
  std::string y;
  bool dyadic = false;
};

int cmd_constant(const Config& c, const ConstantArgs& a, std::ostream& out) {
  const int l = a.l ? a.l : (a.k >= 2 && a.k <= 4 ? resonance::shape_l_for(a.k) : 0);
  try {
    resonance::require_shape(a.k, l);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const auto ys = parse_index_list(a.y, a.dyadic);
  const std::uint64_t ymax = *std::max_element(ys.begin(), ys.end());
  const LoadedTable lt = load_table(c, ymax);
  const long bits = c.precision_bits;
  const auto w = cusp::resonance_weights(lt.table, ymax, bits + 64);
  std::vector<resonance::SeriesValue> values;
  for (std::uint64_t y : ys) values.push_back(resonance::s_trunc_weights(w, a.k, l, y, bits));

  bool dyadic_run = values.size() >= 4;
  for (std::size_t i = 1; i < ys.size(); ++i) dyadic_run = dyadic_run && ys[i] == 2 * ys[i - 1];
  const bool ck_shape = resonance::shape_l_for(a.k) == l;

  if (wants_json(c, true)) {
    json j = envelope(c, "constant");
    j["k"] = a.k;
    j["l"] = l;
    json arr = json::array();
    for (const auto& v : values) {
      json r = {{"y", v.y}, {"value", fmt(v.value)}};
      if (ck_shape) r["C_k"] = fmt(resonance::constant_from_series(a.k, lt.table.weight(), v.value));
      arr.push_back(r);
    }
    j["values"] = arr;
    if (dyadic_run) {
      const auto fit = resonance::tail_fit_values(values);
      j["tail_fit"] = {{"slope", fit.slope},
                       {"abs_differences", fit.abs_differences},
                       {"extrapolated_limit", fmt(fit.extrapolated_limit)},
                       {"heuristic_error", fit.heuristic_error},
                       {"label", "heuristic"}};
      if (ck_shape)
        j["tail_fit"]["C_k_extrapolated"] =
            fmt(resonance::constant_from_series(a.k, lt.table.weight(), fit.extrapolated_limit));
    }
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "k,l,y,value\n";
  for (const auto& v : values) out << a.k << ',' << l << ',' << v.y << ',' << fmt(v.value) << '\n';
  return kExitOk;
}

struct CountArgs {
  std::string lemma;
  std::string box;
  std::string delta;
  std::string sign = "minus";
};

int cmd_count(const Config& c, const CountArgs& a, std::ostream& out) {
  if (a.lemma != "A1" && a.lemma != "Apm") throw UsageError("--lemma must be A1 or Apm");
  const auto parts = split(a.box, ',');
  if (parts.size() != 4) throw UsageError("--box needs four sides N,M,K,L");
  const counting::DyadicBox box{parse_u64(parts[0]), parse_u64(parts[1]), parse_u64(parts[2]), parse_u64(parts[3])};
  const auto deltas = parse_real_list(a.delta);
  std::vector<counting::Sign> signs;
  if (a.lemma == "A1" || a.sign == "minus") signs = {counting::Sign::minus};
  else if (a.sign == "plus") signs = {counting::Sign::plus};
  else if (a.sign == "both") signs = {counting::Sign::minus, counting::Sign::plus};
  else throw UsageError("--sign must be minus, plus or both");

  std::vector<counting::CountReport> reports;
  for (auto s : signs)
    for (double d : deltas) {
      try {
        reports.push_back(a.lemma == "A1" ? counting::count_A1(box, d) : counting::count_Apm(box, d, s));
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
    }
  if (wants_json(c, false)) {
    json j = envelope(c, "count");
    j["lemma"] = a.lemma;
    json arr = json::array();
    for (const auto& r : reports) {
      json row = {{"box", {r.box.N, r.box.M, r.box.K, r.box.L}},
                  {"delta", r.delta},
                  {"sign", counting::sign_name(r.sign)},
                  {"count", r.count},
                  {"bound", r.bound},
                  {"ratio", r.ratio},
                  {"exact_checks", r.exact_checks}};
      if (a.lemma == "A1")
        row["hypotheses"] = {{"n_le_m", r.hypotheses.n_le_m},       {"k_le_l", r.hypotheses.k_le_l},
                             {"n_le_k", r.hypotheses.n_le_k},       {"m_asymp_l", r.hypotheses.m_asymp_l},
                             {"delta_small", r.hypotheses.delta_small}, {"all", r.hypotheses.all()}};
      arr.push_back(row);
    }
    j["rows"] = arr;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  counting::write_count_csv_header(out);
  for (const auto& r : reports) counting::write_count_csv_row(out, r);
  return kExitOk;
}

struct VoronoiArgs {
  std::string x;
  std::string n;
  bool dyadic = false;
  std::size_t grid = 0;
};

int cmd_voronoi(const Config& c, const VoronoiArgs& a, std::ostream& out, std::ostream& err) {
  const auto [lo_s, hi_s] = split_range(a.x);
  const double x_lo = parse_double(lo_s), x_hi = parse_double(hi_s);
  if (!(x_lo >= 2) || !(x_hi > x_lo)) throw UsageError("--x needs 2 <= a < b");
  const auto Ns = parse_index_list(a.n, a.dyadic);
  const LoadedTable lt = load_table(c, static_cast<std::size_t>(std::ceil(x_hi)));
  std::size_t grid = a.grid;
  if (grid == 0) grid = static_cast<std::size_t>(std::floor(x_hi) - std::ceil(x_lo));  // one per unit cell
  voronoi::TruncationProfile p;
  try {
    p = voronoi::truncation_error_profile(lt.table, x_lo, x_hi, Ns, grid, c.seed);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  json summary = {{"weight", p.weight}, {"slope", p.fitted_slope}, {"x_lo", p.x_lo}, {"x_hi", p.x_hi},
                  {"grid_size", grid}, {"max_abs_error", fmt(p.max_abs_error)}};
  if (wants_json(c, false)) {
    json j = envelope(c, "voronoi");
    j["summary"] = summary;
    json rows = json::array();
    for (std::size_t i = 0; i < p.N.size(); ++i) rows.push_back({{"N", p.N[i]}, {"max_rel_error", p.max_rel_error[i]}});
    j["rows"] = rows;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  voronoi::write_profile_csv(out, p);
  err << summary.dump() << '\n';
  return kExitOk;
}

int cmd_decompose(const Config& c, const std::string& x_text, std::uint64_t y, std::ostream& out) {
  const long bits = c.precision_bits;
  BigReal x(bits);
  try {
    x = BigReal::from_string(strip(x_text), bits);
  } catch (const InvalidArgument&) {
    throw UsageError("--x: not a number: '" + x_text + "'");
  }
  if (y == 0) throw UsageError("--y must be >= 1");
  if (y > voronoi::kMaxDecomposeY)
    throw UsageError("--y " + std::to_string(y) + " exceeds 2000; the decomposition is quadratic in y");
  const LoadedTable lt = load_table(c, y);
  const voronoi::Decomposition d = voronoi::decompose_S(lt.table, x, y, bits);
  const BigReal res = d.residual();
  const double rel = d.R4.is_zero() ? 0.0 : (abs(res) / abs(d.R4)).to_double();
  json j = envelope(c, "decompose");
  j["x"] = fmt(x);
  j["y"] = y;
  j["S1"] = fmt(d.S1);
  j["S2"] = fmt(d.S2);
  j["S3"] = fmt(d.S3);
  j["S4"] = fmt(d.S4);
  j["R4"] = fmt(d.R4);
  j["diagonal_s42"] = fmt(d.diagonal);
  j["residual"] = fmt(res);
  j["relative_residual"] = rel;
  if (wants_json(c, true)) {
    out << j.dump(2) << '\n';
  } else {
    out << "x,y,S1,S2,S3,S4,R4,residual,relative_residual\n"
        << fmt(x) << ',' << y << ',' << fmt(d.S1) << ',' << fmt(d.S2) << ',' << fmt(d.S3) << ',' << fmt(d.S4) << ','
        << fmt(d.R4) << ',' << fmt(res) << ',' << fmt(rel) << '\n';
  }
  return kExitOk;
}

json witness_json(const counting::GapWitness& w) {
  return {{"tuple", w.tuple}, {"sign", counting::sign_name(w.sign)}, {"eta", w.eta}, {"normalized", w.normalized}};
}

int cmd_gapscan(const Config& c, std::uint64_t max_value, std::ostream& out) {
  if (max_value < 1 || max_value > counting::kMaxGapScan)
    throw UsageError("--max-value must be in 1..300");
  const auto r = counting::min_gap_scan(max_value);
  if (wants_json(c, true)) {
    json j = envelope(c, "gapscan");
    j["max_value"] = r.max_value;
    j["normalized_min"] = witness_json(r.normalized_min);
    j["raw_min"] = witness_json(r.raw_min);
    j["normalized_by_sign"] = {witness_json(r.normalized_by_sign[0]), witness_json(r.normalized_by_sign[1])};
    j["raw_by_sign"] = {witness_json(r.raw_by_sign[0]), witness_json(r.raw_by_sign[1])};
    j["exact_zeros"] = r.exact_zeros;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "kind,sign,n1,n2,n3,n4,eta,normalized\n";
  auto row = [&](const char* kind, const counting::GapWitness& w) {
    out << kind << ',' << counting::sign_name(w.sign) << ',' << w.tuple[0] << ',' << w.tuple[1] << ','
        << w.tuple[2] << ',' << w.tuple[3] << ',' << fmt(w.eta) << ',' << fmt(w.normalized) << '\n';
  };
  row("normalized", r.normalized_min);
  row("raw", r.raw_min);
  return kExitOk;
}

struct Lemma2Args {
  double alpha = 1;
  std::string A;
  double B = 0;
  double T = 1000;
};

int cmd_lemma2(const Config& c, const Lemma2Args& a, std::ostream& out) {
  std::vector<double> As;
  if (a.A.empty()) {
    for (int j = 0; j <= 12; ++j) As.push_back(std::ldexp(1.0, j));
  } else {
    As = parse_real_list(a.A);
  }
  moments::OscillatorySweep s;
  try {
    s = moments::oscillatory_sweep(a.alpha, As, a.B, a.T, c.precision_bits);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (wants_json(c, true)) {
    json j = envelope(c, "lemma2");
    j["alpha"] = a.alpha;
    j["B"] = a.B;
    j["T"] = a.T;
    json rows = json::array();
    for (const auto& r : s.rows) {
      json row = {{"A", r.A}, {"value", fmt(r.value)}, {"ratio", r.ratio}, {"panels", r.panels}};
      if (r.closed_form) {
        row["closed_form"] = fmt(*r.closed_form);
        row["closed_form_rel_diff"] =
            r.closed_form->is_zero() ? 0.0 : (abs(r.value - *r.closed_form) / abs(*r.closed_form)).to_double();
      }
      rows.push_back(row);
    }
    j["rows"] = rows;
    j["max_ratio"] = s.max_ratio;
    j["median_ratio"] = s.median_ratio;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "alpha,A,B,T,value,closed_form,ratio\n";
  for (const auto& r : s.rows)
    out << fmt(r.alpha) << ',' << fmt(r.A) << ',' << fmt(r.B) << ',' << fmt(r.T) << ',' << fmt(r.value) << ','
        << (r.closed_form ? fmt(*r.closed_form) : std::string()) << ',' << fmt(r.ratio) << '\n';
  return kExitOk;
}

}  // namespace

std::vector<std::uint64_t> parse_index_list(const std::string& text, bool dyadic) {
  std::vector<std::uint64_t> out;
  if (text.find("..") != std::string::npos) {
    if (!dyadic) throw UsageError("range '" + text + "' needs --dyadic");
    const auto [a, b] = split_range(text);
    const std::uint64_t lo = parse_u64(a), hi = parse_u64(b);
    if (lo == 0 || hi < lo) throw UsageError("range needs 1 <= a <= b, got '" + text + "'");
    for (std::uint64_t v = lo; v <= hi; v *= 2) out.push_back(v);
  } else {
    for (const auto& part : split(text, ',')) out.push_back(parse_u64(part));
  }
  if (out.empty()) throw UsageError("empty list");
  for (std::uint64_t v : out)
    if (v == 0) throw UsageError("list entries must be >= 1");
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_double(part));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::string resolve_cache_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("MOMENTLAB_CACHE"); env && *env) return env;
  return "momentlab_cache";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"momentlab: coefficient tables, moments, singular series and counting reports", "momentlab"};
  app.require_subcommand(1);
  app.fallthrough();

  Config cfg;
  app.add_option("--weight", cfg.weight, "Weight of the cusp form (12, 16, 18, 20, 22, 26)");
  app.add_option("--nmax", cfg.n_max, "Number of coefficients");
  app.add_option("--precision", cfg.precision_bits, "Working precision in bits")->check(CLI::Range(64L, 1L << 16));
  app.add_option("--cache-dir", cfg.cache_dir, "Cache directory (overrides MOMENTLAB_CACHE)");
  app.add_option("--threads", cfg.threads, "Worker threads, 0 = all cores");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", cfg.seed, "Seed for randomized checks and grids");
  app.add_option("--output", cfg.output, "Write the report to this file instead of stdout");

  auto* coeffs = app.add_subcommand("coeffs", "Build, validate and cache a coefficient table");

  MomentsArgs ma;
  auto* mom = app.add_subcommand("moments", "Exact power moments against the main term");
  mom->add_option("--k", ma.k, "Moment order 2..8")->required();
  mom->add_option("--t", ma.t, "Endpoints: list a,b,c or range a..b with --dyadic")->required();
  mom->add_flag("--dyadic", ma.dyadic, "Expand a..b to a, 2a, 4a, ...");
  mom->add_option("--constant-y", ma.constant_y, "Truncation of the singular series (default nmax)");
  mom->add_flag("--extrapolate", ma.extrapolate, "Use the extrapolated constant");

  ConstantArgs ca;
  auto* con = app.add_subcommand("constant", "Truncated singular series and tail fit");
  con->add_option("--k", ca.k, "Number of square roots")->required();
  con->add_option("--l", ca.l, "Left-hand count (default: the shape used for C_k)");
  con->add_option("--y", ca.y, "Truncations: list or range with --dyadic")->required();
  con->add_flag("--dyadic", ca.dyadic, "Expand a..b to a, 2a, 4a, ...");

  CountArgs cta;
  auto* cnt = app.add_subcommand("count", "Count near-coincidences of square-root sums in a dyadic box");
  cnt->add_option("--lemma", cta.lemma, "A1 or Apm")->required();
  cnt->add_option("--box", cta.box, "Sides N,M,K,L")->required();
  cnt->add_option("--delta", cta.delta, "One or more deltas, comma separated")->required();
  cnt->add_option("--sign", cta.sign, "minus, plus or both (Apm only)");

  VoronoiArgs va;
  auto* vor = app.add_subcommand("voronoi", "Truncation error profile of the cosine-sum formula");
  vor->add_option("--x", va.x, "Interval a..b")->required();
  vor->add_option("--n", va.n, "Truncation lengths: list or range with --dyadic")->required();
  vor->add_flag("--dyadic", va.dyadic, "Expand a..b to a, 2a, 4a, ...");
  vor->add_option("--grid", va.grid, "Grid points (default: one per unit interval)");

  std::string dx;
  std::uint64_t dy = 0;
  auto* dec = app.add_subcommand("decompose", "Split R(x)^4 into its four frequency classes");
  dec->add_option("--x", dx, "Point x (decimal)")->required();
  dec->add_option("--y", dy, "Truncation y <= 2000")->required();

  std::uint64_t gmax = 0;
  auto* gap = app.add_subcommand("gapscan", "Smallest nonzero square-root sum gaps");
  gap->add_option("--max-value", gmax, "Largest entry, at most 300")->required();

  Lemma2Args la;
  auto* lem = app.add_subcommand("lemma2", "Oscillatory integral bound ratios");
  lem->add_option("--alpha", la.alpha, "Power of t");
  lem->add_option("--A", la.A, "Frequencies, comma separated (default 2^0..2^12)");
  lem->add_option("--B", la.B, "Phase");
  lem->add_option("--t", la.T, "Window start T");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::ofstream file;
  if (!cfg.output.empty()) {
    file.open(cfg.output, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "error: cannot open " << cfg.output << " for writing\n";
      return kExitUsage;
    }
  }
  std::ostream& sink = cfg.output.empty() ? out : file;

  try {
    set_thread_count(cfg.threads);
    int code = kExitOk;
    if (*coeffs) code = cmd_coeffs(cfg, sink, err);
    else if (*mom) code = cmd_moments(cfg, ma, sink);
    else if (*con) code = cmd_constant(cfg, ca, sink);
    else if (*cnt) code = cmd_count(cfg, cta, sink);
    else if (*vor) code = cmd_voronoi(cfg, va, sink, err);
    else if (*dec) code = cmd_decompose(cfg, dx, dy, sink);
    else if (*gap) code = cmd_gapscan(cfg, gmax, sink);
    else if (*lem) code = cmd_lemma2(cfg, la, sink);
    sink.flush();
    return code;
  } catch (const ValidationFailure& e) {
    err << "validation failure: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace momentlab::cli
