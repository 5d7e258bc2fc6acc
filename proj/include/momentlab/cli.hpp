#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace momentlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;       // bad arguments, missing cache, I/O
inline constexpr int kExitValidation = 2;  // a mathematical validator failed

// Entry point of the `momentlab` tool. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "a..b" with dyadic = true gives a, 2a, 4a, ... <= b. A comma list "a,b,c" or a
// single value is taken as is. A range without dyadic is rejected.
std::vector<std::uint64_t> parse_index_list(const std::string& text, bool dyadic);
std::vector<double> parse_real_list(const std::string& text);

// Cache directory: explicit flag, then MOMENTLAB_CACHE, then ./momentlab_cache.
std::string resolve_cache_dir(const std::string& flag_value);

}  // namespace momentlab::cli
