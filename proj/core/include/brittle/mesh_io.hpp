#pragma once

#include <string>

#include "brittle/mesh.hpp"

namespace brittle {

// Line-oriented mesh format:
//
//   tetmesh v1
//   nodes N
//   x y z            (N lines, material coordinates, meters)
//   elems M
//   a b c d          (M lines, zero-based node indices, positive orientation)
//
// Blank lines and '#' comments are ignored.  World positions are initialized
// to the material positions.  Throws ParseError with a line number on
// malformed input, ValidationError on negative orientation (naming the
// element), duplicate elements or degenerate geometry.
TetMesh parse_mesh(const std::string& path);

void write_mesh(const std::string& path, const TetMesh& mesh);

// Full state dump for restarts: node material/world/velocity plus element
// connectivity and material indices ("tetstate v1").
void write_state(const std::string& path, const TetMesh& mesh, double time);
TetMesh parse_state(const std::string& path, double* time_out = nullptr);

}  // namespace brittle
