#pragma once

#include <map>
#include <string>
#include <vector>

namespace bbm::toml_lite {

// Minimal TOML subset sufficient for flat config files: [section] headers,
// string / number / boolean scalars, and single-line arrays of numbers or
// strings. Keys are exposed fully dotted ("section.key"). Line numbers are
// kept for diagnostics.

struct Value {
  enum class Type { string, number, boolean, number_array, string_array };
  Type type = Type::string;
  std::string str;
  double num = 0.0;
  bool flag = false;
  std::vector<double> nums;
  std::vector<std::string> strs;
  int line = 0;
};

using Table = std::map<std::string, Value>;

// Throws bbm::ConfigError with a line-numbered message on malformed input.
Table parse(const std::string& text);

std::string escape_string(const std::string& s);

}  // namespace bbm::toml_lite
