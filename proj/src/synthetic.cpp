#include "pugcn/synthetic.hpp"

#include <cmath>

namespace pugcn {

namespace {

constexpr double kPi = 3.14159265358979323846;

double signed_pow(double v, double e) {
    return v >= 0.0 ? std::pow(v, e) : -std::pow(-v, e);
}

void push_quad(Mesh& mesh, std::int32_t a, std::int32_t b, std::int32_t c, std::int32_t d) {
    auto push_tri = [&](std::int32_t i, std::int32_t j, std::int32_t k) {
        const Vec3 n = cross(mesh.vertices[j] - mesh.vertices[i], mesh.vertices[k] - mesh.vertices[i]);
        if (norm2(n) > 0.0) mesh.faces.push_back({i, j, k});
    };
    push_tri(a, b, c);
    push_tri(a, c, d);
}

// latitude/longitude grid with poles; exponents shape the profile
Mesh latlon_surface(int rings, int segments, double e1, double e2, double radius) {
    Mesh mesh;
    const std::int32_t north = 0, south = 1;
    mesh.vertices.push_back({0, 0, radius});
    mesh.vertices.push_back({0, 0, -radius});
    // interior rings, theta in (-pi/2, pi/2), top to bottom
    for (int i = 1; i < rings; ++i) {
        const double theta = kPi / 2.0 - kPi * i / rings;
        const double ct = signed_pow(std::cos(theta), e1);
        const double st = signed_pow(std::sin(theta), e1);
        for (int j = 0; j < segments; ++j) {
            const double phi = 2.0 * kPi * j / segments;
            mesh.vertices.push_back({radius * ct * signed_pow(std::cos(phi), e2),
                                     radius * ct * signed_pow(std::sin(phi), e2), radius * st});
        }
    }
    auto ring_vertex = [&](int i, int j) {
        return static_cast<std::int32_t>(2 + (i - 1) * segments + (j % segments));
    };
    for (int j = 0; j < segments; ++j) {
        const Vec3 n1 = cross(mesh.vertices[ring_vertex(1, j)] - mesh.vertices[north],
                              mesh.vertices[ring_vertex(1, j + 1)] - mesh.vertices[north]);
        if (norm2(n1) > 0.0) mesh.faces.push_back({north, ring_vertex(1, j), ring_vertex(1, j + 1)});
        const Vec3 n2 =
            cross(mesh.vertices[ring_vertex(rings - 1, j + 1)] - mesh.vertices[south],
                  mesh.vertices[ring_vertex(rings - 1, j)] - mesh.vertices[south]);
        if (norm2(n2) > 0.0)
            mesh.faces.push_back({south, ring_vertex(rings - 1, j + 1), ring_vertex(rings - 1, j)});
    }
    for (int i = 1; i + 1 < rings; ++i)
        for (int j = 0; j < segments; ++j)
            push_quad(mesh, ring_vertex(i, j), ring_vertex(i + 1, j), ring_vertex(i + 1, j + 1),
                      ring_vertex(i, j + 1));
    return mesh;
}

}  // namespace

Mesh make_sphere(int rings, int segments, double radius) {
    return latlon_surface(rings, segments, 1.0, 1.0, radius);
}

Mesh make_superellipsoid(double e1, double e2, int rings, int segments) {
    return latlon_surface(rings, segments, e1, e2, 1.0);
}

Mesh make_torus(int rings, int segments, double major_radius, double minor_radius) {
    Mesh mesh;
    for (int i = 0; i < rings; ++i) {
        const double u = 2.0 * kPi * i / rings;
        for (int j = 0; j < segments; ++j) {
            const double v = 2.0 * kPi * j / segments;
            const double w = major_radius + minor_radius * std::cos(v);
            mesh.vertices.push_back(
                {w * std::cos(u), w * std::sin(u), minor_radius * std::sin(v)});
        }
    }
    auto vid = [&](int i, int j) {
        return static_cast<std::int32_t>((i % rings) * segments + (j % segments));
    };
    for (int i = 0; i < rings; ++i)
        for (int j = 0; j < segments; ++j)
            push_quad(mesh, vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
    return mesh;
}

Mesh make_holed_cube(double half_extent, double hole_fraction) {
    Mesh mesh;
    const double a = half_extent;
    const double b = half_extent * hole_fraction;
    // each face: picture frame of four trapezoid quads between the outer and
    // inner squares, mitered at the corners
    const double corners[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    for (int axis = 0; axis < 3; ++axis) {
        for (int side = -1; side <= 1; side += 2) {
            auto to3d = [&](double u, double v) -> Vec3 {
                const double w = side * a;
                if (axis == 0) return {w, u, v};
                if (axis == 1) return {u, w, v};
                return {u, v, w};
            };
            const std::int32_t base = static_cast<std::int32_t>(mesh.vertices.size());
            for (const auto& c : corners) mesh.vertices.push_back(to3d(a * c[0], a * c[1]));
            for (const auto& c : corners) mesh.vertices.push_back(to3d(b * c[0], b * c[1]));
            for (int e = 0; e < 4; ++e) {
                const std::int32_t o0 = base + e, o1 = base + (e + 1) % 4;
                const std::int32_t i0 = base + 4 + e, i1 = base + 4 + (e + 1) % 4;
                push_quad(mesh, o0, o1, i1, i0);
            }
        }
    }
    return mesh;
}

std::vector<NamedMesh> synthetic_mesh_pack(int count) {
    if (count < 1) throw ArgumentError("synthetic_mesh_pack: count must be >= 1");
    std::vector<NamedMesh> pack;
    pack.reserve(count);
    for (int i = 0; i < count; ++i) {
        const int cycle = i / 4;
        switch (i % 4) {
            case 0:
                pack.push_back({strformat("sphere_%02d", i),
                                make_sphere(24, 48, 1.0 + 0.15 * cycle)});
                break;
            case 1:
                pack.push_back({strformat("torus_%02d", i),
                                make_torus(32, 24, 1.0, 0.25 + 0.08 * (cycle % 4))});
                break;
            case 2:
                pack.push_back({strformat("holed_cube_%02d", i),
                                make_holed_cube(1.0, 0.3 + 0.1 * (cycle % 4))});
                break;
            default:
                pack.push_back({strformat("superellipsoid_%02d", i),
                                make_superellipsoid(0.5 + 0.35 * (cycle % 5),
                                                    0.7 + 0.25 * (cycle % 3))});
                break;
        }
    }
    return pack;
}

}  // namespace pugcn
