#include "pugcn/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pugcn {

namespace {

std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// drop everything from '#'
std::string strip_comment(const std::string& line) {
    const auto pos = line.find('#');
    return strip(pos == std::string::npos ? line : line.substr(0, pos));
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(strformat("cannot open %s for reading", path.c_str()));
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(strformat("cannot open %s for writing", path.c_str()));
    return out;
}

}  // namespace

PointCloud read_xyz(const std::string& path) {
    auto in = open_in(path);
    PointCloud cloud;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = strip_comment(line);
        if (body.empty()) continue;
        std::istringstream ss(body);
        Vec3 p;
        if (!(ss >> p.x >> p.y >> p.z))
            throw FormatError(strformat("%s:%lld: expected 'x y z', got \"%s\"", path.c_str(),
                                        static_cast<long long>(lineno), body.c_str()));
        cloud.points.push_back(p);
    }
    if (cloud.empty()) throw FormatError(strformat("%s: no points", path.c_str()));
    return cloud;
}

void write_xyz(const std::string& path, const PointCloud& cloud) {
    auto out = open_out(path);
    char buf[128];
    for (const Vec3& p : cloud.points) {
        std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", p.x, p.y, p.z);
        out << buf;
    }
    if (!out) throw DataError(strformat("write failed: %s", path.c_str()));
}

Mesh read_off(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    std::int64_t lineno = 0;
    auto next_body = [&]() -> std::string {
        while (std::getline(in, line)) {
            ++lineno;
            const std::string body = strip_comment(line);
            if (!body.empty()) return body;
        }
        throw FormatError(strformat("%s:%lld: unexpected end of file", path.c_str(),
                                    static_cast<long long>(lineno)));
    };

    std::string header = next_body();
    if (header != "OFF")
        throw FormatError(strformat("%s:1: expected OFF header, got \"%s\"", path.c_str(),
                                    header.c_str()));
    std::istringstream counts(next_body());
    std::int64_t nv = 0, nf = 0, ne = 0;
    if (!(counts >> nv >> nf >> ne) || nv < 1 || nf < 0)
        throw FormatError(strformat("%s:%lld: bad vertex/face counts", path.c_str(),
                                    static_cast<long long>(lineno)));

    Mesh mesh;
    mesh.vertices.reserve(nv);
    for (std::int64_t i = 0; i < nv; ++i) {
        std::istringstream ss(next_body());
        Vec3 p;
        if (!(ss >> p.x >> p.y >> p.z))
            throw FormatError(strformat("%s:%lld: bad vertex line", path.c_str(),
                                        static_cast<long long>(lineno)));
        mesh.vertices.push_back(p);
    }
    for (std::int64_t i = 0; i < nf; ++i) {
        std::istringstream ss(next_body());
        int arity = 0;
        if (!(ss >> arity) || arity < 3)
            throw FormatError(strformat("%s:%lld: bad face line", path.c_str(),
                                        static_cast<long long>(lineno)));
        std::vector<std::int32_t> poly(arity);
        for (int v = 0; v < arity; ++v) {
            if (!(ss >> poly[v]) || poly[v] < 0 || poly[v] >= nv)
                throw FormatError(strformat("%s:%lld: face index out of range", path.c_str(),
                                            static_cast<long long>(lineno)));
        }
        // fan-triangulate, dropping degenerate triangles
        for (int v = 1; v + 1 < arity; ++v) {
            const std::array<std::int32_t, 3> tri{poly[0], poly[v], poly[v + 1]};
            const Vec3 n = cross(mesh.vertices[tri[1]] - mesh.vertices[tri[0]],
                                 mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
            if (norm2(n) > 0.0) mesh.faces.push_back(tri);
        }
    }
    if (mesh.faces.empty())
        throw FormatError(strformat("%s: no non-degenerate faces", path.c_str()));
    return mesh;
}

void write_off(const std::string& path, const Mesh& mesh) {
    auto out = open_out(path);
    out << "OFF\n" << mesh.vertices.size() << " " << mesh.faces.size() << " 0\n";
    char buf[128];
    for (const Vec3& p : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", p.x, p.y, p.z);
        out << buf;
    }
    for (const auto& f : mesh.faces) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
    if (!out) throw DataError(strformat("write failed: %s", path.c_str()));
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    auto in = open_in(path);
    std::map<std::string, std::string> out;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = strip_comment(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw FormatError(strformat("%s:%lld: expected 'key = value', got \"%s\"",
                                        path.c_str(), static_cast<long long>(lineno),
                                        body.c_str()));
        const std::string key = strip(body.substr(0, eq));
        const std::string value = strip(body.substr(eq + 1));
        if (key.empty() || value.empty())
            throw FormatError(strformat("%s:%lld: empty key or value", path.c_str(),
                                        static_cast<long long>(lineno)));
        out[key] = value;
    }
    return out;
}

}  // namespace pugcn
