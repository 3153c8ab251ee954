#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgame::cli {

// Flat declarative config: [section] tables with key = value lines, where a
// value is a quoted string, number, boolean, or a one-level array of those.
// No code execution, diff-able, hashable.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Value {
  enum class Kind { String, Number, Bool, Array } kind = Kind::String;
  std::string str;
  double num = 0;
  bool flag = false;
  std::vector<Value> items;
};

class Config {
 public:
  static Config parse(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  const Value& get(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section,
                         const std::string& key) const;
  double get_number(const std::string& section, const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  double get_number_or(const std::string& section, const std::string& key,
                       double fallback) const;
  std::vector<double> get_numbers(const std::string& section,
                                  const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& section,
                                       const std::string& key) const;

  const std::string& text() const { return text_; }

 private:
  std::map<std::string, std::map<std::string, Value>> tables_;
  std::string text_;
};

// FNV-1a 64-bit content checksum, rendered as 16 hex digits.
std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace dgame::cli
