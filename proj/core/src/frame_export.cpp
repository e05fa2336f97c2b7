#include "brittle/frame_export.hpp"

#include <algorithm>
#include <filesystem>

#include "brittle/error.hpp"
#include "brittle/mesh_io.hpp"

namespace brittle {

std::vector<SurfaceTriangle> surface_triangles(const TetMesh& mesh, const Fragments& frags) {
    static const int kFaces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    std::vector<SurfaceTriangle> out;
    for (ElemId e = 0; e < static_cast<ElemId>(mesh.elements.size()); ++e) {
        const Element& elem = mesh.elements[e];
        if (!elem.alive) continue;
        for (int f = 0; f < 4; ++f) {
            const NodeId a = elem.nodes[kFaces[f][0]];
            const NodeId b = elem.nodes[kFaces[f][1]];
            const NodeId c = elem.nodes[kFaces[f][2]];
            const auto it = mesh.face_map.find(make_face_key(a, b, c));
            if (it == mesh.face_map.end()) continue;
            if (it->second[1] != kInvalidId) continue;  // interior face

            SurfaceTriangle tri;
            tri.nodes = {a, b, c};
            tri.fragment = frags.element_fragment[e];
            // Outward winding: normal away from the opposite corner.
            const Vec3& pa = mesh.node(a).world_pos;
            const Vec3 n = cross(mesh.node(b).world_pos - pa, mesh.node(c).world_pos - pa);
            if (dot(n, mesh.node(elem.nodes[f]).world_pos - pa) > 0.0)
                std::swap(tri.nodes[1], tri.nodes[2]);
            out.push_back(tri);
        }
    }
    return out;
}

namespace {

std::string frame_path(const std::string& dir, const char* stem, int index, const char* ext) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_%06d.%s", stem, index, ext);
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace

std::string export_frame(const TetMesh& mesh, const ExportSettings& settings, int index,
                         double time) {
    std::filesystem::create_directories(settings.directory);
    const Fragments frags = mesh.fragments();
    std::vector<SurfaceTriangle> tris = surface_triangles(mesh, frags);
    std::stable_sort(tris.begin(), tris.end(),
                     [](const SurfaceTriangle& l, const SurfaceTriangle& r) {
                         return l.fragment < r.fragment;
                     });

    const std::string path = frame_path(settings.directory, "frame", index, "obj");
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ValidationError("cannot write frame: " + path);
    std::fprintf(f, "# t=%.17g nodes=%zu elems=%zu fragments=%zu\n", time,
                 mesh.live_node_count(), mesh.live_element_count(), frags.count);

    // Emit vertices on first use, in triangle order.
    std::vector<int> obj_index(mesh.nodes.size(), 0);
    int next_vertex = 1;
    for (const SurfaceTriangle& t : tris)
        for (NodeId n : t.nodes)
            if (obj_index[n] == 0) {
                const Vec3& p = mesh.node(n).world_pos;
                std::fprintf(f, "v %.17g %.17g %.17g\n", p.x, p.y, p.z);
                obj_index[n] = next_vertex++;
            }
    std::int32_t current_fragment = -1;
    for (const SurfaceTriangle& t : tris) {
        if (t.fragment != current_fragment) {
            current_fragment = t.fragment;
            std::fprintf(f, "o fragment_%d\n", current_fragment);
        }
        std::fprintf(f, "f %d %d %d\n", obj_index[t.nodes[0]], obj_index[t.nodes[1]],
                     obj_index[t.nodes[2]]);
    }
    std::fclose(f);

    if (settings.dump_state)
        write_state(frame_path(settings.directory, "state", index, "txt"), mesh, time);
    return path;
}

CsvLog::CsvLog(const std::string& path) {
    file_ = std::fopen(path.c_str(), "w");
    if (!file_) throw ValidationError("cannot write csv: " + path);
    std::fprintf(file_, "time,kinetic,elastic,nodes,elements,fragments\n");
}

CsvLog::~CsvLog() { close(); }

void CsvLog::close() {
    if (file_) {
        std::fclose(file_);
        file_ = nullptr;
    }
}

void CsvLog::row(const EnergyReport& r) {
    std::fprintf(file_, "%.17g,%.17g,%.17g,%zu,%zu,%zu\n", r.time, r.kinetic, r.elastic,
                 r.node_count, r.element_count, r.fragment_count);
}

}  // namespace brittle
