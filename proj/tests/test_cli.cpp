#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "momentlab/cli.hpp"

using namespace momentlab;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "momentlab");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// One cache directory for the whole binary, filled once.
const std::string& cache_dir() {
  static const std::string dir = [] {
    const fs::path p = fs::temp_directory_path() / ("momentlab_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(p);
    const Result r = run({"coeffs", "--weight", "12", "--nmax", "20000", "--cache-dir", p.string()});
    REQUIRE(r.code == 0);
    return p.string();
  }();
  return dir;
}

std::string strip_timestamp(const std::string& s) {
  return std::regex_replace(s, std::regex("\"timestamp\": \"[^\"]*\""), "\"timestamp\": \"\"");
}

}  // namespace

TEST_CASE("list and range parsing") {
  CHECK(cli::parse_index_list("256..4096", true) == std::vector<std::uint64_t>{256, 512, 1024, 2048, 4096});
  CHECK(cli::parse_index_list("3..20", true) == std::vector<std::uint64_t>{3, 6, 12});
  CHECK(cli::parse_index_list("7", false) == std::vector<std::uint64_t>{7});
  CHECK(cli::parse_index_list("1,5, 9", false) == std::vector<std::uint64_t>{1, 5, 9});
  CHECK_THROWS(cli::parse_index_list("1..8", false));
  CHECK_THROWS(cli::parse_index_list("0", false));
  CHECK_THROWS(cli::parse_index_list("8..1", true));
  CHECK_THROWS(cli::parse_index_list("x", false));
  CHECK(cli::parse_real_list("0.5,1e-3") == std::vector<double>{0.5, 1e-3});
  CHECK_THROWS(cli::parse_real_list("0.5,abc"));
}

TEST_CASE("cache directory precedence") {
  ::setenv("MOMENTLAB_CACHE", "/from/env", 1);
  CHECK(cli::resolve_cache_dir("/from/flag") == "/from/flag");
  CHECK(cli::resolve_cache_dir("") == "/from/env");
  ::unsetenv("MOMENTLAB_CACHE");
  CHECK(cli::resolve_cache_dir("") == "momentlab_cache");
}

TEST_CASE("coeffs builds, reuses and rebuilds the cache") {
  const std::string dir = cache_dir();
  const fs::path file = fs::path(dir) / "coeffs_w12_n20000.dat";
  CHECK(fs::exists(file));
  const auto stamp = fs::last_write_time(file);
  Result r = run({"coeffs", "--weight", "12", "--nmax", "20000", "--cache-dir", dir});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["rebuilt"] == false);
  CHECK(fs::last_write_time(file) == stamp);

  // The environment variable is honoured when no flag is given.
  ::setenv("MOMENTLAB_CACHE", dir.c_str(), 1);
  r = run({"coeffs", "--weight", "12", "--nmax", "20000"});
  ::unsetenv("MOMENTLAB_CACHE");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["rebuilt"] == false);

  // A damaged cache is replaced.
  const fs::path small = fs::path(dir) / "coeffs_w16_n50.dat";
  r = run({"coeffs", "--weight", "16", "--nmax", "50", "--cache-dir", dir});
  REQUIRE(r.code == 0);
  {
    std::ofstream o(small, std::ios::app);
    o << "garbage\n";
  }
  r = run({"coeffs", "--weight", "16", "--nmax", "50", "--cache-dir", dir});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["rebuilt"] == true);
  CHECK(r.err.find("rebuilding") != std::string::npos);

  CHECK(run({"coeffs", "--weight", "14", "--nmax", "10", "--cache-dir", dir}).code == 1);
  CHECK(run({"coeffs", "--weight", "12", "--cache-dir", dir}).code == 1);
}

TEST_CASE("moments command") {
  const std::string dir = cache_dir();
  Result r = run({"moments", "--k", "2", "--t", "3", "--cache-dir", dir});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("k,T,exact_moment,main_term,error,ratio\n2,3,530,", 0) == 0);

  r = run({"moments", "--weight", "12", "--k", "4", "--t", "256..16384", "--dyadic", "--cache-dir", dir});
  REQUIRE(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1 + 7);

  r = run({"moments", "--k", "4", "--t", "256..16384", "--dyadic", "--format", "json", "--cache-dir", dir});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["rows"].size() == 7);
  CHECK(j["exponent"] == "24");
  CHECK(j["constant"]["source"] == "truncated");
  CHECK(j["constant"]["y"] == 20000);
  CHECK(j["fit"]["label"] == "empirical");

  r = run({"moments", "--k", "8", "--t", "2,3", "--cache-dir", dir});
  REQUIRE(r.code == 0);
  CHECK(r.out == "k,T,exact_moment,main_term,error,ratio\n8,2,1,,,\n8,3,78310985282,,,\n");

  CHECK(run({"moments", "--k", "9", "--t", "3", "--cache-dir", dir}).code == 1);
  CHECK(run({"moments", "--k", "2", "--t", "30000", "--cache-dir", dir}).code == 1);
  CHECK(run({"moments", "--weight", "18", "--k", "2", "--t", "3", "--cache-dir", dir}).code == 1);
  CHECK(run({"moments", "--k", "2", "--t", "4..64", "--cache-dir", dir}).code == 1);
}

TEST_CASE("constant command") {
  const std::string dir = cache_dir();
  Result r = run({"constant", "--k", "4", "--l", "2", "--y", "1", "--cache-dir", dir});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["values"][0]["value"].get<std::string>().rfind("1.000000000000000000000", 0) == 0);

  r = run({"constant", "--k", "4", "--y", "64..1024", "--dyadic", "--cache-dir", dir});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["values"].size() == 5);
  CHECK(j["tail_fit"]["slope"].get<double>() < 0);
  CHECK(j["tail_fit"].contains("C_k_extrapolated"));

  CHECK(run({"constant", "--k", "5", "--y", "4", "--cache-dir", dir}).code == 1);
  CHECK(run({"constant", "--k", "4", "--l", "1", "--y", "4", "--cache-dir", dir}).code == 1);
}

TEST_CASE("count command") {
  Result r = run({"count", "--lemma", "A1", "--box", "2,2,2,2", "--delta", "0.3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\n2,2,2,2,0.29999999999999999,-,8,") != std::string::npos);
  r = run({"count", "--lemma", "Apm", "--box", "1,1,1,1", "--delta", "0.05,0.5", "--sign", "both", "--format", "json"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["rows"].size() == 4);
  CHECK(run({"count", "--lemma", "B", "--box", "1,1,1,1", "--delta", "0.1"}).code == 1);
  CHECK(run({"count", "--lemma", "A1", "--box", "1,1,1", "--delta", "0.1"}).code == 1);
  CHECK(run({"count", "--lemma", "A1", "--box", "1,1,1,1", "--delta", "-1"}).code == 1);
}

TEST_CASE("decompose command") {
  const Result r = run({"decompose", "--x", "10000.5", "--y", "200", "--cache-dir", cache_dir()});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["relative_residual"].get<double>() <= 1e-20);
  for (const char* key : {"S1", "S2", "S3", "S4", "R4", "residual"}) CHECK(j.contains(key));
  CHECK(run({"decompose", "--x", "10000.5", "--y", "2001", "--cache-dir", cache_dir()}).code == 1);
  CHECK(run({"decompose", "--x", "abc", "--y", "20", "--cache-dir", cache_dir()}).code == 1);
}

TEST_CASE("voronoi command") {
  const Result r = run({"voronoi", "--weight", "12", "--x", "10000..20000", "--n", "64..4096", "--dyadic",
                        "--cache-dir", cache_dir()});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("N,max_rel_error\n64,", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 8);
  const json s = json::parse(r.err);
  CHECK(s["weight"] == 12);
  CHECK(s["x_lo"] == 10000.0);
  CHECK(s["x_hi"] == 20000.0);
  CHECK(s["slope"].get<double>() < 0);
  CHECK(run({"voronoi", "--x", "10000..30000", "--n", "64", "--cache-dir", cache_dir()}).code == 1);
}

TEST_CASE("gapscan and lemma2 commands") {
  Result r = run({"gapscan", "--max-value", "4"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["raw_min"]["tuple"] == json::array({2, 4, 3, 3}));
  CHECK(j["raw_min"]["eta"].get<double>() == doctest::Approx(0.0498880527));
  CHECK(run({"gapscan", "--max-value", "301"}).code == 1);

  r = run({"lemma2", "--alpha", "0", "--A", "6.283185307179586", "--B", "0", "--t", "1"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["rows"][0]["closed_form_rel_diff"].get<double>() < 1e-20);
  CHECK(std::stod(j["rows"][0]["value"].get<std::string>()) == doctest::Approx(0.13692262772965855));
  CHECK(run({"lemma2", "--A", "0"}).code == 1);
}

TEST_CASE("reports are deterministic apart from the timestamp") {
  const std::vector<std::string> json_cmd{"moments", "--k", "2", "--t", "512..8192", "--dyadic", "--format", "json",
                                          "--cache-dir", cache_dir()};
  CHECK(strip_timestamp(run(json_cmd).out) == strip_timestamp(run(json_cmd).out));
  const std::vector<std::string> csv_cmd{"voronoi", "--x", "10000..12000", "--n", "64..1024", "--dyadic",
                                         "--cache-dir", cache_dir(), "--seed", "9"};
  CHECK(run(csv_cmd).out == run(csv_cmd).out);
  const std::vector<std::string> threads{"moments", "--k", "4", "--t", "512..8192", "--dyadic", "--cache-dir",
                                         cache_dir(), "--threads", "3"};
  const std::vector<std::string> single{"moments", "--k", "4", "--t", "512..8192", "--dyadic", "--cache-dir",
                                        cache_dir(), "--threads", "1"};
  CHECK(run(threads).out == run(single).out);
}

TEST_CASE("usage errors and output files") {
  CHECK(run({}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"count", "--lemma", "A1", "--box", "2,2,2,2", "--delta", "0.3", "--format", "xml"}).code == 1);
  CHECK(run({"count", "--lemma", "A1", "--box", "2,2,2,2", "--delta", "0.3", "--precision", "32"}).code == 1);
  const fs::path file = fs::path(cache_dir()) / "count.csv";
  const Result r = run({"count", "--lemma", "A1", "--box", "2,2,2,2", "--delta", "0.3", "--output", file.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().rfind("N,M,K,L,delta,sign,count,bound,ratio\n", 0) == 0);
  CHECK(run({"count", "--lemma", "A1", "--box", "2,2,2,2", "--delta", "0.3", "--output", "/nonexistent/dir/x"}).code ==
        1);
}
