#include "sobrec/config.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sobrec/errors.hpp"

namespace sobrec {

static std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

static std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

KeyValues KeyValues::parse(std::istream& is) {
  KeyValues out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    out.kv[key] = value;
  }
  return out;
}

KeyValues KeyValues::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open config file: " + path);
  return parse(f);
}

std::string KeyValues::get(const std::string& key, const std::string& fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const std::string v = lower(trim(it->second));
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': not a number: " + it->second);
  }
}

long long KeyValues::get_int(const std::string& key, long long fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stoll(trim(it->second));
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': not an integer: " + it->second);
  }
}

std::optional<double> KeyValues::get_opt_double(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_double(key, 0.0);
}

std::string KeyValues::canonical() const {
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

static std::size_t parse_count_token(const std::string& tok) {
  const std::size_t caret = tok.find('^');
  if (caret != std::string::npos) {
    const long long base = std::stoll(tok.substr(0, caret));
    const long long expo = std::stoll(tok.substr(caret + 1));
    if (base < 2 || expo < 0 || expo > 40) throw UsageError("bad count token: " + tok);
    std::size_t v = 1;
    for (long long i = 0; i < expo; ++i) v *= static_cast<std::size_t>(base);
    return v;
  }
  const long long v = std::stoll(tok);
  if (v < 0) throw UsageError("bad count token: " + tok);
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> parse_count_list(const std::string& text) {
  std::vector<std::size_t> out;
  const std::string t = trim(text);
  const std::size_t dots = t.find("..");
  try {
    if (dots != std::string::npos) {
      const std::size_t lo = parse_count_token(trim(t.substr(0, dots)));
      const std::size_t hi = parse_count_token(trim(t.substr(dots + 2)));
      if (lo < 1 || hi < lo) throw UsageError("bad count range: " + text);
      for (std::size_t v = lo; v <= hi; v *= 2) out.push_back(v);
      return out;
    }
    std::stringstream ss(t);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (!tok.empty()) out.push_back(parse_count_token(tok));
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("bad count list: " + text);
  }
  if (out.empty()) throw UsageError("empty count list: " + text);
  return out;
}

void write_manifest(const std::string& path, const std::string& config_echo,
                    std::uint64_t config_hash, const std::vector<std::string>& outputs) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write manifest: " + path);
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[64];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  f << "tool = " << kToolVersion << "\n";
  f << "timestamp = " << stamp << "\n";
  f << "config_hash = " << hash_hex(config_hash) << "\n";
  for (const auto& o : outputs) f << "output = " << o << "\n";
  f << "# --- config echo ---\n" << config_echo;
}

}  // namespace sobrec
