#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "brittle/mesh.hpp"
#include "brittle/sim.hpp"

namespace brittle {

struct SurfaceTriangle {
    std::array<NodeId, 3> nodes;  // outward wound in world space
    std::int32_t fragment = 0;
};

// Faces incident to exactly one element, tagged with their fragment.
std::vector<SurfaceTriangle> surface_triangles(const TetMesh& mesh, const Fragments& frags);

struct ExportSettings {
    std::string directory;
    bool dump_state = false;
};

// Writes frame_%06d.obj (vertices + per-fragment face groups) and optionally
// state_%06d.txt.  Returns the obj path.
std::string export_frame(const TetMesh& mesh, const ExportSettings& settings, int index,
                         double time);

class CsvLog {
  public:
    CsvLog() = default;
    explicit CsvLog(const std::string& path);
    ~CsvLog();
    CsvLog(const CsvLog&) = delete;
    CsvLog& operator=(const CsvLog&) = delete;

    void row(const EnergyReport& report);
    void close();

  private:
    std::FILE* file_ = nullptr;
};

}  // namespace brittle
