#include "bbm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bbm/errors.hpp"

namespace bbm {

std::string format_double(double x) {
  char buf[40];
  // %.17g round-trips every binary64 value.
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string point_measure_to_json(const PointMeasure& eta) {
  std::ostringstream os;
  os << "{\"atoms\":[";
  bool first = true;
  for (const Atom& a : eta.atoms()) {
    if (!first) os << ",";
    first = false;
    os << "[" << format_double(a.position) << "," << format_double(a.multiplicity) << "]";
  }
  os << "]}";
  return os.str();
}

PointMeasure point_measure_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("point measure JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array()) {
    throw Error("point measure JSON: expected object with an \"atoms\" array");
  }
  std::vector<Atom> atoms;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& entry : j["atoms"]) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
        !entry[1].is_number()) {
      throw Error("point measure JSON: each atom must be [position, multiplicity]");
    }
    const double pos = entry[0].get<double>();
    const double mult = entry[1].get<double>();
    if (!(pos < prev)) {
      throw Error("point measure JSON: positions must be strictly decreasing");
    }
    if (!(mult >= 1.0)) {
      throw Error("point measure JSON: multiplicities must be >= 1");
    }
    prev = pos;
    atoms.push_back(Atom{pos, mult});
  }
  return PointMeasure::from_atoms(std::move(atoms));
}

void write_point_measure(const PointMeasure& eta, const std::string& path) {
  write_text_file(path, point_measure_to_json(eta));
}

PointMeasure read_point_measure(const std::string& path) {
  return point_measure_from_json(read_text_file(path));
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path);
  os << contents;
  if (!os) throw Error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open for reading: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) os << ",";
    os << header[i];
  }
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      os << format_double(row[i]);
    }
    os << "\n";
  }
  write_text_file(path, os.str());
}

}  // namespace bbm
