#ifndef CARATE_CLI_HPP_
#define CARATE_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace carate {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitNumerical = 70;

std::string_view version();

// Entry point of the `carate` executable. CSV goes to --out, or to `out` when
// no file is given; the resolved configuration and human-readable summaries
// go to `out` when a file is given and to `err` otherwise, so that stdout
// stays pure CSV. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Resolved key/value settings of one run, in print order.
struct ResolvedConfig {
  struct Entry {
    std::string key;
    std::string value;
    bool hashed = true;  // false for worker counts and output paths
  };
  std::vector<Entry> entries;

  void add(std::string key, std::string value, bool hashed = true);
  // FNV-1a 64 over "key=value\n" of the hashed entries, as 16 hex digits.
  std::string hash() const;
};

// "start:stop:step" or a comma-separated list; empty text gives an empty grid.
std::vector<double> parse_real_grid(const std::string& text);
std::vector<std::size_t> parse_count_grid(const std::string& text);

}  // namespace carate

#endif  // CARATE_CLI_HPP_
