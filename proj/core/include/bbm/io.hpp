#pragma once

#include <string>
#include <vector>

#include "bbm/point_measure.hpp"

namespace bbm {

// Shortest-width round-trip formatting used by every writer, so identical
// inputs always produce identical bytes.
std::string format_double(double x);

// Point-measure JSON: {"atoms": [[position, multiplicity], ...]}, atoms in
// strictly decreasing position order.
std::string point_measure_to_json(const PointMeasure& eta);
PointMeasure point_measure_from_json(const std::string& text);
void write_point_measure(const PointMeasure& eta, const std::string& path);
PointMeasure read_point_measure(const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

// CSV with a header row; every cell formatted via format_double.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace bbm
