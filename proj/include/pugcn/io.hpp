#pragma once

#include <map>
#include <string>

#include "pugcn/geometry.hpp"

namespace pugcn {

// ASCII XYZ: one "x y z" triple per line, '#' comments and blank lines ignored.
// Written with 9 significant digits.
PointCloud read_xyz(const std::string& path);
void write_xyz(const std::string& path, const PointCloud& cloud);

// ASCII OFF, triangular faces; polygons are fan-triangulated on load and
// degenerate (zero-area) faces dropped.
Mesh read_off(const std::string& path);
void write_off(const std::string& path, const Mesh& mesh);

// "key = value" configuration lines; '#' comments ignored.
std::map<std::string, std::string> read_config_file(const std::string& path);

}  // namespace pugcn
