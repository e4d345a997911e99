#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

namespace lzc::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitNumerical = 3,
  kExitVerification = 4,
};

/// Bad flags, bad config file, or invalid parameter combinations.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Keys accepted in a config file.
inline constexpr const char* kConfigKeys[] = {
    "k2", "g1", "g2", "b1", "b2", "var", "from", "to", "steps", "c1", "c2", "verify_every"};

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// skipped; unknown keys and malformed lines throw UsageError.
std::map<std::string, std::string> parse_config(std::istream& in);
std::map<std::string, std::string> load_config(const std::string& path);

double to_double(const std::string& key, const std::string& text);
long to_long(const std::string& key, const std::string& text);

}  // namespace lzc::app
