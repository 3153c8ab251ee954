#include "config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace dgame::cli {

namespace {

std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

Value parse_scalar(const std::string& raw, int lineno) {
  std::string t = strip(raw);
  if (t.empty())
    throw ConfigError("line " + std::to_string(lineno) + ": empty value");
  Value v;
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"')
      throw ConfigError("line " + std::to_string(lineno) +
                        ": unterminated string");
    v.kind = Value::Kind::String;
    v.str = t.substr(1, t.size() - 2);
    return v;
  }
  if (t == "true" || t == "false") {
    v.kind = Value::Kind::Bool;
    v.flag = t == "true";
    return v;
  }
  try {
    std::size_t used = 0;
    v.num = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    v.kind = Value::Kind::Number;
    return v;
  } catch (...) {
    throw ConfigError("line " + std::to_string(lineno) + ": bad value '" + t +
                      "'");
  }
}

Value parse_value(const std::string& raw, int lineno) {
  std::string t = strip(raw);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']')
      throw ConfigError("line " + std::to_string(lineno) +
                        ": unterminated array");
    Value v;
    v.kind = Value::Kind::Array;
    std::string body = t.substr(1, t.size() - 2);
    std::string item;
    bool in_string = false;
    for (char c : body) {
      if (c == '"') in_string = !in_string;
      if (c == ',' && !in_string) {
        if (!strip(item).empty()) v.items.push_back(parse_scalar(item, lineno));
        item.clear();
      } else {
        item.push_back(c);
      }
    }
    if (!strip(item).empty()) v.items.push_back(parse_scalar(item, lineno));
    return v;
  }
  return parse_scalar(t, lineno);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  cfg.text_ = text;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = strip(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(lineno) +
                          ": empty section name");
      cfg.tables_[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = strip(line.substr(0, eq));
    if (key.empty() || section.empty())
      throw ConfigError("line " + std::to_string(lineno) +
                        ": key outside a section");
    cfg.tables_[section][key] = parse_value(line.substr(eq + 1), lineno);
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse(os.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto t = tables_.find(section);
  return t != tables_.end() && t->second.count(key) > 0;
}

const Value& Config::get(const std::string& section,
                         const std::string& key) const {
  auto t = tables_.find(section);
  if (t == tables_.end())
    throw ConfigError("missing section [" + section + "]");
  auto k = t->second.find(key);
  if (k == t->second.end())
    throw ConfigError("missing key '" + key + "' in [" + section + "]");
  return k->second;
}

std::string Config::get_string(const std::string& section,
                               const std::string& key) const {
  const Value& v = get(section, key);
  if (v.kind != Value::Kind::String)
    throw ConfigError("[" + section + "]." + key + " must be a string");
  return v.str;
}

double Config::get_number(const std::string& section,
                          const std::string& key) const {
  const Value& v = get(section, key);
  if (v.kind != Value::Kind::Number)
    throw ConfigError("[" + section + "]." + key + " must be a number");
  return v.num;
}

std::string Config::get_string_or(const std::string& section,
                                  const std::string& key,
                                  const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double Config::get_number_or(const std::string& section,
                             const std::string& key, double fallback) const {
  return has(section, key) ? get_number(section, key) : fallback;
}

std::vector<double> Config::get_numbers(const std::string& section,
                                        const std::string& key) const {
  const Value& v = get(section, key);
  if (v.kind != Value::Kind::Array)
    throw ConfigError("[" + section + "]." + key + " must be an array");
  std::vector<double> out;
  for (const Value& item : v.items) {
    if (item.kind != Value::Kind::Number)
      throw ConfigError("[" + section + "]." + key +
                        " must contain only numbers");
    out.push_back(item.num);
  }
  return out;
}

std::vector<std::string> Config::get_strings(const std::string& section,
                                             const std::string& key) const {
  const Value& v = get(section, key);
  if (v.kind != Value::Kind::Array)
    throw ConfigError("[" + section + "]." + key + " must be an array");
  std::vector<std::string> out;
  for (const Value& item : v.items) {
    if (item.kind != Value::Kind::String)
      throw ConfigError("[" + section + "]." + key +
                        " must contain only strings");
    out.push_back(item.str);
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace dgame::cli
