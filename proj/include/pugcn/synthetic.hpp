#pragma once

#include <string>
#include <vector>

#include "pugcn/geometry.hpp"

namespace pugcn {

// Analytic test meshes used as a stand-in dataset source.

Mesh make_sphere(int rings = 24, int segments = 48, double radius = 1.0);
Mesh make_torus(int rings = 32, int segments = 24, double major_radius = 1.0,
                double minor_radius = 0.35);
// Axis-aligned cube with a square hole punched through each face.
Mesh make_holed_cube(double half_extent = 1.0, double hole_fraction = 0.4);
Mesh make_superellipsoid(double e1, double e2, int rings = 24, int segments = 48);

struct NamedMesh {
    std::string name;
    Mesh mesh;
};

// Deterministic pack of `count` meshes cycling through the shape families
// with varied parameters.
std::vector<NamedMesh> synthetic_mesh_pack(int count);

}  // namespace pugcn
