#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "brittle/mesh.hpp"
#include "brittle/vec3.hpp"

namespace brittle {

enum class CollisionMethod {
    node_penetration,
    overlap_volume,
};

struct GroundPlane {
    Vec3 point;            // any point on the plane
    Vec3 normal{0, 0, 1};  // unit, pointing out of the ground
};

struct CollisionConfig {
    bool enabled = true;
    CollisionMethod method = CollisionMethod::node_penetration;
    double stiffness = 1e6;          // N/m, node penetration penalty
    double volume_stiffness = 1e10;  // N/m^3, overlap volume penalty
    double damping = 0.0;            // 1/s scale on depth-proportional normal damping
    bool ground_enabled = false;
    GroundPlane ground;
    double ground_stiffness = 1e6;
    double ground_damping = 0.0;
};

// One application point of a contact: all force applications of a contact sum
// to zero force and zero moment for element-element pairs.
struct NodeForce {
    NodeId node = kInvalidId;
    Vec3 force;
};

struct Contact {
    std::vector<NodeForce> applications;
    Vec3 point;  // world application point of the penalty force
};

// Penalty forces for nodes below the ground plane: stiffness * depth along
// the normal plus a depth-scaled damping term (so the force stays continuous
// as depth -> 0).
std::vector<Contact> ground_forces(const TetMesh& mesh, const GroundPlane& ground,
                                   double stiffness, double damping);

// Node-penetration criterion: a node inside a foreign element is pushed out
// along the nearest face normal; the reaction is spread over the penetrated
// element by the barycentric weights of the penetration point.
std::vector<Contact> node_penetration_forces(const TetMesh& mesh,
                                             std::span<const std::pair<ElemId, ElemId>> pairs,
                                             double stiffness, double damping);

// Overlap-volume criterion with node-penetration fallback when one element is
// completely contained in the other.
std::vector<Contact> overlap_volume_forces(const TetMesh& mesh,
                                           std::span<const std::pair<ElemId, ElemId>> pairs,
                                           double volume_stiffness, double node_stiffness,
                                           double damping);

void apply_contacts(TetMesh& mesh, std::span<const Contact> contacts);

// Clipped intersection of two tetrahedra.
struct TetOverlap {
    double volume = 0.0;
    Vec3 centroid;
    // Sum of area-weighted outward normals over the boundary pieces
    // contributed by the first tetrahedron; zero magnitude means one tet is
    // contained in the other and the direction is undefined.
    Vec3 direction_a;
    bool contained = false;
};
TetOverlap clip_tets(const std::array<Vec3, 4>& a, const std::array<Vec3, 4>& b);

struct Aabb {
    Vec3 lo{1e300, 1e300, 1e300};
    Vec3 hi{-1e300, -1e300, -1e300};
    void grow(const Vec3& p);
    void grow(const Aabb& b);
    bool overlaps(const Aabb& o) const;
};

// Binary AABB tree over elements, refit per step and rebuilt after remeshing.
// The traversal front from the previous query is kept and re-expanded, so
// coherent steps skip most of the descent.
class Bvh {
  public:
    void build(const TetMesh& mesh);
    void refit(const TetMesh& mesh);
    bool empty() const { return tree_.empty(); }
    std::size_t element_count() const { return leaf_count_; }

    // Candidate element pairs whose boxes overlap, excluding pairs sharing a
    // node and same-fragment pairs of an unfractured body.
    std::vector<std::pair<ElemId, ElemId>> collect_pairs(const TetMesh& mesh,
                                                         const Fragments& frags);

  private:
    struct TreeNode {
        Aabb box;
        std::int32_t left = -1, right = -1;
        ElemId elem = kInvalidId;
    };
    std::int32_t build_range(const TetMesh& mesh, std::vector<ElemId>& elems, std::size_t begin,
                             std::size_t end);
    void refit_node(const TetMesh& mesh, std::int32_t idx);

    std::vector<TreeNode> tree_;
    std::int32_t root_ = -1;
    std::size_t leaf_count_ = 0;
    std::vector<std::pair<std::int32_t, std::int32_t>> front_;
};

Aabb element_bounds(const TetMesh& mesh, ElemId e);

}  // namespace brittle
