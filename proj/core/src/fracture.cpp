#include "brittle/fracture.hpp"

#include <algorithm>
#include <map>
#include <ostream>

namespace brittle {

SymTensor3 separation_tensor(std::span<const Vec3> tensile_set,
                             std::span<const Vec3> compressive_set) {
    Vec3 tensile_sum, compressive_sum;
    SymTensor3 acc;
    for (const Vec3& f : tensile_set) {
        tensile_sum += f;
        acc += m_of(f);
    }
    for (const Vec3& f : compressive_set) {
        compressive_sum += f;
        acc -= m_of(f);
    }
    acc -= m_of(tensile_sum);
    acc += m_of(compressive_sum);
    return acc * 0.5;
}

std::optional<FractureEvent> evaluate_node(const Node& n, double tau) {
    if (n.tensile_set.empty() && n.compressive_set.empty()) return std::nullopt;
    const SymTensor3 sep = separation_tensor(n.tensile_set, n.compressive_set);
    const EigenSystem3 eig = sym_eigen(sep);
    if (!(eig.values[0] > tau)) return std::nullopt;
    FractureEvent ev;
    ev.plane_normal = eig.vectors[0];
    ev.magnitude = eig.values[0];
    return ev;
}

std::vector<FractureEvent> fracture_pass(TetMesh& mesh, const FractureConfig& cfg,
                                         std::ostream* warnings) {
    std::vector<FractureEvent> applied;
    if (!cfg.enabled) return applied;

    // Candidate map keyed by node id: deterministic iteration, cheap updates.
    std::map<NodeId, FractureEvent> candidates;
    auto evaluate_into = [&](NodeId id) {
        candidates.erase(id);
        const Node& n = mesh.node(id);
        if (!n.alive) return;
        const double tau = mesh.materials[n.governing_material].tau;
        if (auto ev = evaluate_node(n, tau)) {
            ev->node = id;
            candidates.emplace(id, *ev);
        }
    };
    for (NodeId id = 0; id < static_cast<NodeId>(mesh.nodes.size()); ++id)
        if (mesh.node(id).alive) evaluate_into(id);

    std::vector<NodeId> skipped;
    while (static_cast<int>(applied.size()) < cfg.max_splits_per_step && !candidates.empty()) {
        // Largest magnitude wins; ties go to the lower node id.
        auto best = candidates.begin();
        for (auto it = std::next(candidates.begin()); it != candidates.end(); ++it)
            if (it->second.magnitude > best->second.magnitude) best = it;
        const FractureEvent event = best->second;

        auto plan = split_node(mesh, event, cfg.snap, warnings);
        if (!plan) {
            // Skip this node for the rest of the pass.
            skipped.push_back(event.node);
            candidates.erase(best);
            continue;
        }
        applied.push_back(event);

        // Refresh the force sets of every node whose incident elements
        // changed, then re-test those nodes (n+ and n- included).
        std::vector<NodeId> affected{plan->node_positive, plan->node_negative};
        for (const EdgeCut& c : plan->cuts) {
            affected.push_back(c.created);
            if (c.created_twin != kInvalidId) affected.push_back(c.created_twin);
        }
        for (const ElementOp& op : plan->ops)
            for (const auto& child : op.child_nodes)
                for (NodeId n : child) affected.push_back(n);
        std::sort(affected.begin(), affected.end());
        affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
        affected.erase(std::remove_if(affected.begin(), affected.end(),
                                      [&](NodeId n) { return !mesh.node(n).alive; }),
                       affected.end());

        rebuild_force_sets(mesh, affected, cfg.split_source);
        candidates.erase(event.node);
        for (NodeId n : affected) {
            if (std::find(skipped.begin(), skipped.end(), n) != skipped.end()) continue;
            evaluate_into(n);
        }
    }
    return applied;
}

}  // namespace brittle
