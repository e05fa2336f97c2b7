#include "brittle/femforce.hpp"

#include <algorithm>

#include "brittle/continuum.hpp"
#include "brittle/tensor3.hpp"

namespace brittle {

namespace {

// f_i = -2 vol sum_j (b_i^T sigma b_j) p_j, the exact negative gradient of
// the element potential (eta + kappa) * vol with respect to node positions
// and velocities for the strain convention used here (no 1/2 in the strain).
std::array<Vec3, 4> nodal_forces(const Element& e, const TetMesh& mesh, const SymTensor3& sigma) {
    Vec3 b[4];
    for (int i = 0; i < 4; ++i) b[i] = {e.beta(i, 0), e.beta(i, 1), e.beta(i, 2)};
    Vec3 sb[4];
    for (int i = 0; i < 4; ++i) sb[i] = sigma.apply(b[i]);
    const double scale = -2.0 * e.volume;
    std::array<Vec3, 4> f{};
    for (int i = 0; i < 4; ++i) {
        Vec3 acc;
        for (int j = 0; j < 4; ++j)
            acc += dot(sb[i], b[j]) * mesh.node(e.nodes[j]).world_pos;
        f[i] = scale * acc;
    }
    return f;
}

}  // namespace

ElementForces element_forces(const Element& e, const TetMesh& mesh, SplitSource split) {
    const DeformationState ds = deformation_partials(e, mesh);
    const SymTensor3 eps = green_strain(ds);
    const SymTensor3 nu = strain_rate(ds);
    const StressState s = stress(eps, nu, mesh.materials[e.material]);

    ElementForces out;
    out.total = nodal_forces(e, mesh, s.total);
    const SymTensor3& split_stress =
        split == SplitSource::total_stress ? s.total : s.elastic;
    const SymTensor3 positive = split_tensor(split_stress).positive;
    out.tensile = nodal_forces(e, mesh, positive);
    for (int i = 0; i < 4; ++i) out.compressive[i] = out.total[i] - out.tensile[i];
    return out;
}

void clear_step_state(TetMesh& mesh) {
    for (Node& n : mesh.nodes) {
        if (!n.alive) continue;
        n.force = {};
        n.tensile_set.clear();
        n.compressive_set.clear();
        n.max_tensile_norm2 = 0.0;
        n.governing_material = 0;
    }
}

namespace {

void push_contribution(Node& n, const Vec3& tensile, const Vec3& compressive,
                       std::int32_t material) {
    n.tensile_set.push_back(tensile);
    n.compressive_set.push_back(compressive);
    const double mag = norm2(tensile);
    if (mag > n.max_tensile_norm2) {
        n.max_tensile_norm2 = mag;
        n.governing_material = material;
    }
}

}  // namespace

void assemble(TetMesh& mesh, const AssemblyConfig& cfg) {
    for (ElemId id = 0; id < static_cast<ElemId>(mesh.elements.size()); ++id) {
        Element& e = mesh.elements[id];
        if (!e.alive) continue;
        const ElementForces f = element_forces(e, mesh, cfg.split_source);
        for (int i = 0; i < 4; ++i) {
            Node& n = mesh.node(e.nodes[i]);
            n.force += f.total[i];
            push_contribution(n, f.tensile[i], f.compressive[i], e.material);
        }
    }
    for (Node& n : mesh.nodes)
        if (n.alive) n.force += n.mass * cfg.gravity;
}

void rebuild_force_sets(TetMesh& mesh, const std::vector<NodeId>& nodes_to_update,
                        SplitSource split) {
    for (NodeId id : nodes_to_update) {
        Node& n = mesh.node(id);
        n.tensile_set.clear();
        n.compressive_set.clear();
        n.max_tensile_norm2 = 0.0;
        n.governing_material = 0;
    }
    // Every element incident to a dirty node, visited once in id order.
    std::vector<ElemId> elems;
    for (NodeId id : nodes_to_update)
        for (ElemId e : mesh.node_elements[id]) elems.push_back(e);
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());

    std::vector<bool> dirty(mesh.nodes.size(), false);
    for (NodeId id : nodes_to_update) dirty[id] = true;

    for (ElemId id : elems) {
        const Element& e = mesh.elements[id];
        if (!e.alive) continue;
        const ElementForces f = element_forces(e, mesh, split);
        for (int i = 0; i < 4; ++i) {
            if (!dirty[e.nodes[i]]) continue;
            push_contribution(mesh.node(e.nodes[i]), f.tensile[i], f.compressive[i], e.material);
        }
    }
}

}  // namespace brittle
