#pragma once

#include <array>

#include "brittle/mesh.hpp"
#include "brittle/vec3.hpp"

namespace brittle {

// Which stress feeds the tensile/compressive decomposition.  The default
// splits the full stress (elastic + viscous); elastic_stress restricts the
// split to the strain-driven part.
enum class SplitSource {
    total_stress,
    elastic_stress,
};

struct ElementForces {
    std::array<Vec3, 4> total;        // f_i, internal force on each node
    std::array<Vec3, 4> tensile;      // f_i+ from the positive stress part
    std::array<Vec3, 4> compressive;  // f_i- = f_i - f_i+
};

// Per-element nodal forces: f_i = -2 vol sum_j p_j (b_i^T sigma b_j) where
// b_i is row i of beta restricted to its first three columns.  This is the
// exact negative gradient of the element potential with respect to node
// positions (elastic part) and velocities (damping part).
ElementForces element_forces(const Element& e, const TetMesh& mesh,
                             SplitSource split = SplitSource::total_stress);

struct AssemblyConfig {
    Vec3 gravity;
    SplitSource split_source = SplitSource::total_stress;
};

// Zero per-node force accumulators and the tensile/compressive scratch sets.
void clear_step_state(TetMesh& mesh);

// Accumulate internal forces plus gravity into node force accumulators and
// fill the per-node force sets consumed by the fracture pass.
void assemble(TetMesh& mesh, const AssemblyConfig& cfg);

// Rebuild the force scratch sets of a subset of nodes from their incident
// elements (used after remeshing invalidates them).  Does not touch the force
// accumulators.
void rebuild_force_sets(TetMesh& mesh, const std::vector<NodeId>& nodes_to_update,
                        SplitSource split);

}  // namespace brittle
