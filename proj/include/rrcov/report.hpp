#pragma once

#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace rrcov {

inline constexpr const char* kToolName = "rrcov";
inline constexpr const char* kToolVersion = "1.0.0";

/// 12 significant digits; "nan"/"inf"/"-inf" for non-finite values.
std::string format_value(double v);

/// FNV-1a 64-bit digest of the bytes, as 16 hex digits.
std::string digest_hex(const std::string& bytes);

/// Everything needed to re-run a command and reproduce its data output.
/// Entries keep insertion order so the header block is stable.
struct RunManifest {
  std::vector<std::pair<std::string, std::string>> entries;

  void set(const std::string& key, const std::string& value);
  // Empty string when absent.
  std::string get(const std::string& key) const;
  bool has(const std::string& key) const;
};

/// "# key=value" lines, one per entry.
std::string manifest_header(const RunManifest& m);

/// Reads the leading "# key=value" block of a CSV file.
RunManifest parse_manifest(std::istream& in);

/// Comma-separated values, quoted when needed.
std::string csv_line(const std::vector<std::string>& cells);

}  // namespace rrcov
