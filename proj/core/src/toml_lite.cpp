#include "bbm/toml_lite.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "bbm/errors.hpp"

namespace bbm::toml_lite {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Removes an unquoted trailing comment.
std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') {
      return false;
    }
  }
  return true;
}

std::string parse_string_token(const std::string& tok, int line) {
  if (tok.size() < 2 || tok.front() != '"' || tok.back() != '"') {
    fail(line, "malformed string: " + tok);
  }
  std::string out;
  for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
    if (tok[i] == '\\' && i + 2 < tok.size()) {
      ++i;
      switch (tok[i]) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(line, "unsupported escape in string");
      }
    } else {
      out += tok[i];
    }
  }
  return out;
}

Value parse_scalar(const std::string& tok, int line) {
  Value v;
  v.line = line;
  if (tok.empty()) fail(line, "missing value");
  if (tok.front() == '"') {
    v.type = Value::Type::string;
    v.str = parse_string_token(tok, line);
    return v;
  }
  if (tok == "true" || tok == "false") {
    v.type = Value::Type::boolean;
    v.flag = tok == "true";
    return v;
  }
  char* end = nullptr;
  const double num = std::strtod(tok.c_str(), &end);
  if (end == nullptr || *end != '\0') fail(line, "cannot parse value: " + tok);
  v.type = Value::Type::number;
  v.num = num;
  return v;
}

std::vector<std::string> split_array_items(const std::string& body, int line) {
  std::vector<std::string> items;
  std::string cur;
  bool in_string = false;
  for (char c : body) {
    if (c == '"') in_string = !in_string;
    if (c == ',' && !in_string) {
      items.push_back(strip(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  const std::string last = strip(cur);
  if (!last.empty()) items.push_back(last);
  if (in_string) fail(line, "unterminated string in array");
  return items;
}

}  // namespace

Table parse(const std::string& text) {
  Table table;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const std::string line = strip(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header");
      section = strip(line.substr(1, line.size() - 2));
      if (!valid_key(section)) fail(line_no, "invalid section name: " + section);
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = strip(line.substr(0, eq));
    if (!valid_key(key)) fail(line_no, "invalid key: " + key);
    const std::string value = strip(line.substr(eq + 1));
    if (value.empty()) fail(line_no, "missing value for key: " + key);

    Value v;
    if (value.front() == '[') {
      if (value.back() != ']') fail(line_no, "unterminated array");
      const auto items = split_array_items(value.substr(1, value.size() - 2), line_no);
      v.line = line_no;
      if (!items.empty() && items.front().front() == '"') {
        v.type = Value::Type::string_array;
        for (const auto& item : items) v.strs.push_back(parse_string_token(item, line_no));
      } else {
        v.type = Value::Type::number_array;
        for (const auto& item : items) {
          const Value s = parse_scalar(item, line_no);
          if (s.type != Value::Type::number) fail(line_no, "array items must be numbers");
          v.nums.push_back(s.num);
        }
      }
    } else {
      v = parse_scalar(value, line_no);
    }

    const std::string full = section.empty() ? key : section + "." + key;
    if (table.count(full)) fail(line_no, "duplicate key: " + full);
    table[full] = v;
  }
  return table;
}

std::string escape_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace bbm::toml_lite
