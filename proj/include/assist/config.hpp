#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace assist {

// Declarative `key = value` text files.
//
//   # comment to end of line (units are documented here)
//   camera.fx = 500        # pixels
//   arm.joint1.axis = 0 0 1
//
// Keys are dotted identifiers; values are free text up to an unquoted '#'.
// Vectors are whitespace-separated numbers. A key may appear only once.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_vector(const std::string& key) const;
  std::vector<double> get_vector(const std::string& key, std::size_t expected) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }
  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

}  // namespace assist
