#pragma once

#include "fmcorr/common.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace fmcorr {

/// Ordered key=value sidecar. Insertion order is preserved on write so
/// regenerated manifests are byte-identical.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_)
      if (k == key) {
        v = value;
        return;
      }
    entries_.emplace_back(key, value);
  }
  void set_u64(const std::string& key, std::uint64_t value) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    set(key, buf);
  }
  void set_int(const std::string& key, long long value) { set(key, std::to_string(value)); }

  bool has(const std::string& key) const {
    for (const auto& [k, v] : entries_)
      if (k == key) return true;
    return false;
  }
  const std::string& get(const std::string& key) const {
    for (const auto& [k, v] : entries_)
      if (k == key) return v;
    throw io_error("manifest: missing key '" + key + "'");
  }
  long long get_int(const std::string& key) const { return std::stoll(get(key)); }
  std::uint64_t get_u64(const std::string& key) const {
    return std::stoull(get(key), nullptr, 16);
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  void write(std::ostream& out) const {
    for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
  }
  void write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write '" + path + "'");
    write(out);
  }

  static Manifest read(std::istream& in) {
    Manifest m;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw io_error("manifest: malformed line '" + line + "'");
      m.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return m;
  }
  static Manifest read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "'");
    return read(in);
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

inline std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for checksum");
  Fnv1a hash;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof buf);
    hash.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return hash.digest();
}

inline std::string hex_u64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace fmcorr
