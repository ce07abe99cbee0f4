#include "w4d/mesh_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace w4d {

namespace {

bool vertex_ok(const SurfacePatch& sp, std::size_t k) {
    if (!sp.mask.empty() && sp.mask[k]) return false;
    for (int c = 0; c < 4; ++c)
        if (!std::isfinite(sp.X[c][k])) return false;
    return true;
}

// two triangles per grid quad; faces touching excluded vertices are dropped
template <class Emit>
MeshStats for_faces(const SurfacePatch& sp, Emit&& emit) {
    const Grid& g = sp.grid;
    MeshStats st;
    st.vertices = g.size();
    for (int j = 0; j + 1 < g.ny; ++j)
        for (int i = 0; i + 1 < g.nx; ++i) {
            const std::size_t a = g.idx(i, j), b = g.idx(i + 1, j), c = g.idx(i + 1, j + 1), d = g.idx(i, j + 1);
            const bool ok = vertex_ok(sp, a) && vertex_ok(sp, b) && vertex_ok(sp, c) && vertex_ok(sp, d);
            if (!ok) {
                st.omitted_faces += 2;
                continue;
            }
            emit(a, b, c), emit(a, c, d);
            st.faces += 2;
        }
    return st;
}

void put_le(std::ostream& os, float v) {
    auto u = std::bit_cast<std::uint32_t>(v);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap32(u);
    os.write(reinterpret_cast<const char*>(&u), 4);
}

void put_le(std::ostream& os, std::int32_t v) {
    auto u = std::bit_cast<std::uint32_t>(v);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap32(u);
    os.write(reinterpret_cast<const char*>(&u), 4);
}

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t u = 0;
    is.read(reinterpret_cast<char*>(&u), 4);
    if (!is) throw Error("read_ply: truncated file");
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap32(u);
    return u;
}

}  // namespace

MeshStats write_obj(const SurfacePatch& sp, const std::string& path, const ObjProjection& proj) {
    const Grid& g = sp.grid;
    int colour = 3;
    if (!proj.stereographic) {
        bool used[4] = {false, false, false, false};
        for (int a : proj.axes) {
            if (a < 0 || a > 3 || used[a]) throw Error("write_obj: axes must be three distinct indices in 0..3");
            used[a] = true;
        }
        for (int c = 0; c < 4; ++c)
            if (!used[c]) colour = c;
    } else if (!(proj.radius > 0)) {
        throw Error("write_obj: stereographic projection needs a positive radius");
    }
    std::ofstream os(path);
    if (!os) throw Error("write_obj: cannot open " + path);
    double lo = 1e300, hi = -1e300;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (vertex_ok(sp, k)) lo = std::min(lo, sp.X[colour][k]), hi = std::max(hi, sp.X[colour][k]);
    const double span = hi > lo ? hi - lo : 1.0;
    char buf[256];
    os << "# w4d surface patch " << g.nx << "x" << g.ny << "\n";
    std::snprintf(buf, sizeof buf, "# colour = X%d, range [%.17g, %.17g]\n", colour + 1, lo, hi);
    os << buf;
    for (std::size_t k = 0; k < g.size(); ++k) {
        double v[3] = {0, 0, 0}, col = 0;
        if (vertex_ok(sp, k)) {
            if (proj.stereographic) {
                const double den = proj.radius - sp.X[3][k];
                for (int c = 0; c < 3; ++c) v[c] = proj.radius * sp.X[c][k] / den;
            } else {
                for (int c = 0; c < 3; ++c) v[c] = sp.X[proj.axes[c]][k];
            }
            col = (sp.X[colour][k] - lo) / span;
        }
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g %.6f %.6f %.6f\n", v[0], v[1], v[2], col, col, col);
        os << buf;
    }
    const auto st = for_faces(sp, [&](std::size_t a, std::size_t b, std::size_t c) {
        os << "f " << a + 1 << ' ' << b + 1 << ' ' << c + 1 << '\n';
    });
    if (!os) throw Error("write_obj: write failed for " + path);
    return st;
}

MeshStats write_ply(const SurfacePatch& sp, const rfield* H2, const std::string& path) {
    const Grid& g = sp.grid;
    if (H2 && H2->size() != g.size()) throw Error("write_ply: H2 has wrong size");
    std::vector<std::array<std::size_t, 3>> faces;
    const auto st = for_faces(sp, [&](std::size_t a, std::size_t b, std::size_t c) { faces.push_back({a, b, c}); });
    if (g.size() > std::size_t(std::numeric_limits<std::int32_t>::max())) throw Error("write_ply: mesh too large");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("write_ply: cannot open " + path);
    os << "ply\nformat binary_little_endian 1.0\ncomment w4d surface patch\n"
       << "element vertex " << g.size() << "\n"
       << "property float x\nproperty float y\nproperty float z\nproperty float w\nproperty float H2\n"
       << "element face " << faces.size() << "\n"
       << "property list uchar int vertex_indices\nend_header\n";
    for (std::size_t k = 0; k < g.size(); ++k) {
        const bool ok = vertex_ok(sp, k);
        for (int c = 0; c < 4; ++c) put_le(os, ok ? float(sp.X[c][k]) : 0.0f);
        put_le(os, (ok && H2) ? float((*H2)[k]) : 0.0f);
    }
    for (const auto& f : faces) {
        const unsigned char three = 3;
        os.write(reinterpret_cast<const char*>(&three), 1);
        for (auto v : f) put_le(os, std::int32_t(v));
    }
    if (!os) throw Error("write_ply: write failed for " + path);
    return st;
}

PlyData read_ply(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("read_ply: cannot open " + path);
    std::string line;
    std::size_t nv = 0, nf = 0;
    int props = 0;
    bool le = false;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string w;
        ls >> w;
        if (w == "format") {
            std::string f;
            ls >> f;
            le = f == "binary_little_endian";
        } else if (w == "element") {
            std::string e;
            ls >> e;
            (e == "vertex" ? nv : nf) = 0;
            ls >> (e == "vertex" ? nv : nf);
        } else if (w == "property" && nf == 0) {
            ++props;
        } else if (w == "end_header") {
            break;
        }
    }
    if (!le) throw Error("read_ply: only binary_little_endian files written by write_ply are supported");
    if (props != 5) throw Error("read_ply: expected 5 float vertex properties");
    PlyData d;
    d.vertices.resize(nv);
    for (auto& v : d.vertices)
        for (auto& x : v) x = std::bit_cast<float>(get_u32(is));
    d.faces.resize(nf);
    for (auto& f : d.faces) {
        unsigned char cnt = 0;
        is.read(reinterpret_cast<char*>(&cnt), 1);
        if (!is || cnt != 3) throw Error("read_ply: non-triangle face");
        for (auto& v : f) v = std::bit_cast<std::int32_t>(get_u32(is));
    }
    return d;
}

}  // namespace w4d
