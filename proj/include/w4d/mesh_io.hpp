// Grid-patch mesh export: OBJ (3D projection + scalar colour) and binary PLY.
#pragma once

#include <string>

#include "w4d/immersion.hpp"

namespace w4d {

struct MeshStats {
    std::size_t vertices = 0, faces = 0, omitted_faces = 0;
};

// axes: which three coordinates become x,y,z; the remaining one is the colour.
// stereographic: Y_i = R X_i / (R - X_4), i = 1..3, colour X_4 (R > 0).
struct ObjProjection {
    std::array<int, 3> axes{0, 1, 2};
    bool stereographic = false;
    double radius = 1.0;
};

MeshStats write_obj(const SurfacePatch& sp, const std::string& path, const ObjProjection& proj = {});
// vertex properties x y z w H2 (float32); H2 may be null (written as 0)
MeshStats write_ply(const SurfacePatch& sp, const rfield* H2, const std::string& path);

struct PlyData {
    std::vector<std::array<float, 5>> vertices;
    std::vector<std::array<int, 3>> faces;
};
PlyData read_ply(const std::string& path);

}  // namespace w4d
