#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "brittle/material.hpp"
#include "brittle/vec3.hpp"

namespace brittle {

using NodeId = std::int32_t;
using ElemId = std::int32_t;
inline constexpr std::int32_t kInvalidId = -1;

// Elements thinner than this in material volume are rejected at load and
// trigger snapping during remeshing.
inline constexpr double kVolumeFloor = 1e-12;
// Basis matrices worse conditioned than this mark the element degenerate.
inline constexpr double kBetaConditionLimit = 1e8;

struct Node {
    Vec3 material_pos;  // immutable except when the node is created by remeshing
    Vec3 world_pos;
    Vec3 velocity;
    double mass = 0.0;
    Vec3 force;  // per-step accumulator
    bool fixed = false;
    std::int32_t body = 0;
    bool alive = true;

    // Per-step fracture scratch: tensile / compressive contributions of the
    // incident elements, plus the material governing the toughness test
    // (element with the largest tensile contribution).
    std::vector<Vec3> tensile_set;
    std::vector<Vec3> compressive_set;
    double max_tensile_norm2 = 0.0;
    std::int32_t governing_material = 0;
};

struct Element {
    std::array<NodeId, 4> nodes{kInvalidId, kInvalidId, kInvalidId, kInvalidId};
    Mat4 beta;           // inverse of the material-coordinate vertex matrix
    double volume = 0.0; // rest (material frame) volume
    std::int32_t material = 0;
    bool alive = true;
};

struct FaceKey {
    std::array<NodeId, 3> n;  // sorted ascending
    bool operator==(const FaceKey& o) const { return n == o.n; }
};

struct FaceKeyHash {
    std::size_t operator()(const FaceKey& f) const {
        std::size_t h = 1469598103934665603ull;
        for (NodeId id : f.n) {
            h ^= static_cast<std::size_t>(id) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

FaceKey make_face_key(NodeId a, NodeId b, NodeId c);

// Inverse of the column matrix [(m_i; 1)]; rows are the linear shape-function
// coefficients.  Throws DegenerateElementError when the tet is coplanar or the
// condition estimate exceeds kBetaConditionLimit.
Mat4 compute_beta(const Vec3& m1, const Vec3& m2, const Vec3& m3, const Vec3& m4);

// Signed volume, positive for correctly oriented elements.
double element_volume(const Vec3& m1, const Vec3& m2, const Vec3& m3, const Vec3& m4);

// Smallest vertex-to-opposite-face height; drives the dt stability heuristic.
double min_height(const Vec3& m1, const Vec3& m2, const Vec3& m3, const Vec3& m4);

struct Fragments {
    std::size_t count = 0;
    std::vector<std::int32_t> element_fragment;         // by element id, -1 for dead
    std::unordered_map<std::int32_t, std::size_t> body_fragment_count;
};

// Tetrahedral mesh with stable integer handles.  Nodes and elements are
// created and retired through free-lists so references survive remeshing.
// Single writer; concurrent reads are fine between mutations.
struct TetMesh {
    std::vector<Node> nodes;
    std::vector<Element> elements;
    std::vector<Material> materials;

    // face -> up to 2 incident elements; second slot kInvalidId when boundary
    std::unordered_map<FaceKey, std::array<ElemId, 2>, FaceKeyHash> face_map;
    std::vector<std::vector<ElemId>> node_elements;

    std::vector<NodeId> free_nodes;
    std::vector<ElemId> free_elements;

    NodeId add_node(const Node& n);
    // Computes beta and volume; registers adjacency.  Throws on degeneracy.
    ElemId add_element(const std::array<NodeId, 4>& nodes, std::int32_t material);
    void remove_element(ElemId e);
    void retire_node(NodeId n);
    // Swap one corner for another (same material position); beta and volume
    // are preserved, adjacency is rewritten.
    void replace_corner(ElemId e, NodeId old_node, NodeId new_node);

    const Node& node(NodeId id) const { return nodes[id]; }
    Node& node(NodeId id) { return nodes[id]; }
    const Element& element(ElemId id) const { return elements[id]; }
    Element& element(ElemId id) { return elements[id]; }

    std::size_t live_node_count() const;
    std::size_t live_element_count() const;

    // All live elements containing both endpoints.
    std::vector<ElemId> elements_with_edge(NodeId a, NodeId b) const;

    // b = beta * (u; 1); components sum to 1.
    std::array<double, 4> barycentric(ElemId e, const Vec3& u) const;

    // Node mass = sum of incident rho*vol/4.  Nodes with no live incident
    // elements keep their previous mass (orphan fragments keep inertia).
    void assemble_masses();
    void recompute_masses(const std::vector<NodeId>& nodes_to_update);

    double total_mass() const;          // over rho*vol of live elements
    double total_volume() const;
    Vec3 total_momentum() const;        // sum of node mass*velocity

    // Connected components of the element-node graph.
    Fragments fragments() const;

    // Face-sharing audit + handle consistency.  Throws ValidationError.
    void validate_topology() const;

  private:
    void register_faces(ElemId e);
    void unregister_faces(ElemId e);
};

}  // namespace brittle
