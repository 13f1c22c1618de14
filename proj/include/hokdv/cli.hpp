#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hokdv::cli {

/// Exit statuses of the hokdv binary.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitConfig = 2;

/// Bad configuration: unknown or missing key, unparsable value. Maps to exit 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A run finished but its result violates the asserted property. Maps to exit 1.
class AssertionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat configuration, ordered by key.
using KeyValues = std::map<std::string, std::string>;

/// `key = value` lines; '#' starts a comment, blank lines are skipped.
/// Malformed lines and repeated keys throw ConfigError naming the line.
KeyValues parse_config_text(std::string_view text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// One "key = value" line per entry in key order; the hashed form.
std::string canonical_config(const KeyValues& kv);
std::uint64_t config_hash(const KeyValues& kv);

struct RunManifest {
  std::string command;
  std::string config_hash;  ///< 16 hex digits
  std::uint64_t seed = 0;
  std::string version;
  std::string started;  ///< ISO 8601 UTC
  std::string finished;
  int exit_code = 0;
  std::string error;
  KeyValues config;
  std::vector<std::string> artifacts;
  std::vector<std::string> summary;
};

std::string to_json(const RunManifest& m);

inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kOutDirVariable = "HOKDV_OUT_DIR";

const std::vector<std::string>& subcommands();

/// Full command line without the program name, e.g. {"solve", "--K", "16"}.
/// Writes artifacts and the manifest, prints a summary to `out` and problems
/// to `err`, and returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hokdv::cli
