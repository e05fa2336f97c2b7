#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "brittle/mesh.hpp"
#include "brittle/vec3.hpp"

namespace brittle {

struct FractureEvent;

struct SnapThresholds {
    double distance = 0.005;       // m, plane-to-node snap distance
    double angle = 0.1;            // rad, plane-to-node-line snap angle
    double volume_floor = kVolumeFloor;
};

// One edge cut: the plane crosses edge (a, b) at parameter t, measured from a
// in world space.  Material position, world position and velocity of the new
// node interpolate with the same t.  Boundary cuts (edges surrounded only by
// elements incident to the split node) produce a co-located twin so the
// discontinuity can pass through the edge.
struct EdgeCut {
    NodeId a = kInvalidId, b = kInvalidId;
    double t = 0.0;
    Vec3 material_pos, world_pos, velocity;
    bool boundary = false;
    NodeId created = kInvalidId;       // node used by the positive side
    NodeId created_twin = kInvalidId;  // negative side, boundary cuts only
    // Audit record of the snap tests the surviving cut passed.
    double dist_a = 0.0, dist_b = 0.0, angle_a = 0.0, angle_b = 0.0;
};

struct ElementOp {
    enum Kind { reassign_positive, reassign_negative, subdivide };
    Kind kind = subdivide;
    ElemId parent = kInvalidId;
    std::vector<std::array<NodeId, 4>> child_nodes;  // resolved after apply
    std::vector<ElemId> children;
};

struct SplitPlan {
    NodeId origin = kInvalidId;
    NodeId node_positive = kInvalidId;  // n+
    NodeId node_negative = kInvalidId;  // n-
    Vec3 plane_point;
    Vec3 plane_normal;
    std::vector<EdgeCut> cuts;
    std::vector<ElementOp> ops;
};

struct CutPoint {
    double t = 0.0;
    Vec3 material_pos, world_pos, velocity;
};

// Plane-segment intersection in world space.  Returns nothing when the edge
// does not straddle the plane or runs nearly parallel to it.
std::optional<CutPoint> cut_edge(const Node& a, const Node& b, const Vec3& plane_point,
                                 const Vec3& plane_normal);

// Apply a fracture event: duplicate the node into n+/n-, subdivide intersected
// incident elements, reassign the rest by side, split face/edge neighbors for
// consistency, then recompute masses and basis matrices.  The whole plan is
// validated before any mutation; on abort the mesh is untouched and nullopt
// is returned (reason goes to *warnings).
std::optional<SplitPlan> split_node(TetMesh& mesh, const FractureEvent& event,
                                    const SnapThresholds& thresholds,
                                    std::ostream* warnings = nullptr);

}  // namespace brittle
