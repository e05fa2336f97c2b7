#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "brittle/femforce.hpp"
#include "brittle/mesh.hpp"
#include "brittle/remesh.hpp"
#include "brittle/tensor3.hpp"

namespace brittle {

struct FractureEvent {
    NodeId node = kInvalidId;
    Vec3 plane_normal;       // unit, world frame
    double magnitude = 0.0;  // largest positive eigenvalue of the separation tensor
};

// sigma = 1/2 (-m(f+) + sum m(f in tensile) + m(f-) - sum m(f in compressive))
// where f+ / f- are the set sums.  Immune to any single unbalanced action.
SymTensor3 separation_tensor(std::span<const Vec3> tensile_set,
                             std::span<const Vec3> compressive_set);

// Largest-eigenvalue test against the toughness tau.  Returns an event when
// the node should split; only the largest plane is reported, the node is
// re-examined after remeshing.
std::optional<FractureEvent> evaluate_node(const Node& n, double tau);

struct FractureConfig {
    bool enabled = true;
    int max_splits_per_step = 32;
    int stride = 1;  // run the pass every stride-th step
    SnapThresholds snap;
    SplitSource split_source = SplitSource::total_stress;
};

// Process super-threshold nodes in descending magnitude, applying each split
// immediately and recomputing the force sets of affected nodes before the
// next pick.  Failed splits are skipped with a warning.  Returns the applied
// events in order.
std::vector<FractureEvent> fracture_pass(TetMesh& mesh, const FractureConfig& cfg,
                                         std::ostream* warnings = nullptr);

}  // namespace brittle
