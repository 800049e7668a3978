#include "rrcov/report.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

namespace rrcov {

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string digest_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void RunManifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries.emplace_back(key, value);
}

std::string RunManifest::get(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return v;
  return {};
}

bool RunManifest::has(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return true;
  return false;
}

std::string manifest_header(const RunManifest& m) {
  std::string out;
  for (const auto& [k, v] : m.entries) out += "# " + k + "=" + v + "\n";
  return out;
}

RunManifest parse_manifest(std::istream& in) {
  RunManifest m;
  std::string line;
  while (in.peek() == '#' && std::getline(in, line)) {
    std::string body = line.substr(1);
    if (!body.empty() && body.front() == ' ') body.erase(0, 1);
    const auto eq = body.find('=');
    if (eq == std::string::npos) continue;
    m.set(body.substr(0, eq), body.substr(eq + 1));
  }
  return m;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n") != std::string::npos) {
      out += '"';
      for (char ch : c) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    } else {
      out += c;
    }
  }
  out += '\n';
  return out;
}

}  // namespace rrcov
