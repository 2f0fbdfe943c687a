#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sobrec {

// Flat `key = value` text with # comments; keys are case-insensitive and
// canonicalized to lower case.
struct KeyValues {
  std::map<std::string, std::string> kv;

  static KeyValues parse(std::istream& is);
  static KeyValues parse_file(const std::string& path);

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;   // accepts "inf"
  long long get_int(const std::string& key, long long fallback) const;
  std::optional<double> get_opt_double(const std::string& key) const;

  std::string canonical() const;  // sorted key=value lines
};

std::uint64_t fnv1a64(std::string_view s);
std::string hash_hex(std::uint64_t h);

// 17 significant digits, round-trip safe
std::string fmt17(double v);

// "2^6..2^12" dyadic range, or comma list of integers (tokens may use 2^k)
std::vector<std::size_t> parse_count_list(const std::string& text);

inline constexpr const char* kToolVersion = "sobrec 0.1.0";

void write_manifest(const std::string& path, const std::string& config_echo,
                    std::uint64_t config_hash, const std::vector<std::string>& outputs);

}  // namespace sobrec
