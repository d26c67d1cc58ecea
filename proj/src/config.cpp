#include "assist/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "assist/error.hpp"

namespace assist {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& text, const std::string& key) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "': not a number: '" + text + "'");
  }
  return value;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  KeyValueConfig config;
  config.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError,
                  origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::ConfigError, origin + ":" + std::to_string(line_no) + ": empty key");
    }
    if (config.values_.count(key) != 0) {
      throw Error(ErrorCode::ConfigError,
                  origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    config.values_.emplace(std::move(key), std::move(value));
  }
  return config;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error(ErrorCode::IoError, "cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse(buffer.str(), path);
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw Error(ErrorCode::ConfigError, origin_ + ": missing key '" + key + "'");
  }
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  return parse_double(get_string(key), key);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KeyValueConfig::get_int(const std::string& key) const {
  const std::string text = get_string(key);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "': not an integer: '" + text + "'");
  }
  return value;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string text = get_string(key);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw Error(ErrorCode::ConfigError, "key '" + key + "': not a boolean: '" + text + "'");
}

std::vector<double> KeyValueConfig::get_vector(const std::string& key) const {
  std::istringstream in(get_string(key));
  std::vector<double> out;
  std::string token;
  while (in >> token) out.push_back(parse_double(token, key));
  return out;
}

std::vector<double> KeyValueConfig::get_vector(const std::string& key, std::size_t expected) const {
  auto out = get_vector(key);
  if (out.size() != expected) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "': expected " + std::to_string(expected) +
                                            " values, got " + std::to_string(out.size()));
  }
  return out;
}

}  // namespace assist
