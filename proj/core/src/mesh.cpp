#include "brittle/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "brittle/error.hpp"

namespace brittle {

void validate_material(const Material& m) {
    auto bad = [](const std::string& what) { throw ValidationError("material: " + what); };
    if (!(m.mu > 0.0)) bad("mu must be > 0");
    if (!(m.rho > 0.0)) bad("rho must be > 0");
    if (!(m.tau > 0.0)) bad("tau must be > 0");
    if (!(m.lambda >= 0.0)) bad("lambda must be >= 0");
    if (!(m.phi >= 0.0)) bad("phi must be >= 0");
    if (!(m.psi >= 0.0)) bad("psi must be >= 0");
}

FaceKey make_face_key(NodeId a, NodeId b, NodeId c) {
    FaceKey f{{a, b, c}};
    std::sort(f.n.begin(), f.n.end());
    return f;
}

double element_volume(const Vec3& m1, const Vec3& m2, const Vec3& m3, const Vec3& m4) {
    return dot(cross(m2 - m1, m3 - m1), m4 - m1) / 6.0;
}

Mat4 compute_beta(const Vec3& m1, const Vec3& m2, const Vec3& m3, const Vec3& m4) {
    Mat4 m;
    const Vec3* pts[4] = {&m1, &m2, &m3, &m4};
    for (int c = 0; c < 4; ++c) {
        m(0, c) = pts[c]->x;
        m(1, c) = pts[c]->y;
        m(2, c) = pts[c]->z;
        m(3, c) = 1.0;
    }
    Mat4 beta;
    double cond = 0.0;
    if (!invert_mat4(m, beta, &cond))
        throw DegenerateElementError("compute_beta: coplanar element");
    if (!(cond <= kBetaConditionLimit))
        throw DegenerateElementError("compute_beta: ill-conditioned element (cond ~ " +
                                     std::to_string(cond) + ")");
    return beta;
}

double min_height(const Vec3& m1, const Vec3& m2, const Vec3& m3, const Vec3& m4) {
    const Vec3* p[4] = {&m1, &m2, &m3, &m4};
    const double vol = std::abs(element_volume(m1, m2, m3, m4));
    double h = std::numeric_limits<double>::infinity();
    static const int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    for (const auto& f : faces) {
        const double area =
            0.5 * norm(cross(*p[f[1]] - *p[f[0]], *p[f[2]] - *p[f[0]]));
        if (area > 0.0) h = std::min(h, 3.0 * vol / area);
    }
    return h;
}

NodeId TetMesh::add_node(const Node& n) {
    NodeId id;
    if (!free_nodes.empty()) {
        id = free_nodes.back();
        free_nodes.pop_back();
        nodes[id] = n;
    } else {
        id = static_cast<NodeId>(nodes.size());
        nodes.push_back(n);
        node_elements.emplace_back();
    }
    nodes[id].alive = true;
    node_elements[id].clear();
    return id;
}

void TetMesh::retire_node(NodeId n) {
    nodes[n].alive = false;
    nodes[n].tensile_set.clear();
    nodes[n].compressive_set.clear();
    node_elements[n].clear();
    free_nodes.push_back(n);
}

ElemId TetMesh::add_element(const std::array<NodeId, 4>& corner, std::int32_t material) {
    Element e;
    e.nodes = corner;
    e.material = material;
    const Vec3& a = nodes[corner[0]].material_pos;
    const Vec3& b = nodes[corner[1]].material_pos;
    const Vec3& c = nodes[corner[2]].material_pos;
    const Vec3& d = nodes[corner[3]].material_pos;
    e.volume = element_volume(a, b, c, d);
    if (!(e.volume >= kVolumeFloor))
        throw DegenerateElementError("add_element: volume " + std::to_string(e.volume) +
                                     " below floor");
    e.beta = compute_beta(a, b, c, d);

    ElemId id;
    if (!free_elements.empty()) {
        id = free_elements.back();
        free_elements.pop_back();
        elements[id] = e;
    } else {
        id = static_cast<ElemId>(elements.size());
        elements.push_back(e);
    }
    for (NodeId n : corner) node_elements[n].push_back(id);
    register_faces(id);
    return id;
}

void TetMesh::remove_element(ElemId e) {
    unregister_faces(e);
    for (NodeId n : elements[e].nodes) {
        auto& list = node_elements[n];
        list.erase(std::remove(list.begin(), list.end(), e), list.end());
    }
    elements[e].alive = false;
    free_elements.push_back(e);
}

void TetMesh::replace_corner(ElemId e, NodeId old_node, NodeId new_node) {
    unregister_faces(e);
    auto& corner = elements[e].nodes;
    for (NodeId& n : corner)
        if (n == old_node) n = new_node;
    auto& list = node_elements[old_node];
    list.erase(std::remove(list.begin(), list.end(), e), list.end());
    node_elements[new_node].push_back(e);
    register_faces(e);
    // beta and volume depend only on material positions, which are identical
    // for the replacement node.
}

void TetMesh::register_faces(ElemId e) {
    const auto& n = elements[e].nodes;
    static const int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    for (const auto& f : faces) {
        const FaceKey key = make_face_key(n[f[0]], n[f[1]], n[f[2]]);
        auto [it, inserted] = face_map.try_emplace(key, std::array<ElemId, 2>{e, kInvalidId});
        if (!inserted) {
            auto& slot = it->second;
            if (slot[0] == kInvalidId) slot[0] = e;
            else if (slot[1] == kInvalidId) slot[1] = e;
            else throw ValidationError("face shared by more than 2 elements");
        }
    }
}

void TetMesh::unregister_faces(ElemId e) {
    const auto& n = elements[e].nodes;
    static const int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    for (const auto& f : faces) {
        const FaceKey key = make_face_key(n[f[0]], n[f[1]], n[f[2]]);
        auto it = face_map.find(key);
        if (it == face_map.end()) continue;
        auto& slot = it->second;
        if (slot[0] == e) slot[0] = slot[1];
        else if (slot[1] != e) continue;
        slot[1] = kInvalidId;
        if (slot[0] == kInvalidId) face_map.erase(it);
    }
}

std::size_t TetMesh::live_node_count() const {
    std::size_t c = 0;
    for (const Node& n : nodes)
        if (n.alive) ++c;
    return c;
}

std::size_t TetMesh::live_element_count() const {
    std::size_t c = 0;
    for (const Element& e : elements)
        if (e.alive) ++c;
    return c;
}

std::vector<ElemId> TetMesh::elements_with_edge(NodeId a, NodeId b) const {
    std::vector<ElemId> out;
    for (ElemId e : node_elements[a]) {
        const auto& n = elements[e].nodes;
        if (std::find(n.begin(), n.end(), b) != n.end()) out.push_back(e);
    }
    return out;
}

std::array<double, 4> TetMesh::barycentric(ElemId e, const Vec3& u) const {
    return elements[e].beta * std::array<double, 4>{u.x, u.y, u.z, 1.0};
}

void TetMesh::assemble_masses() {
    std::vector<double> acc(nodes.size(), 0.0);
    std::vector<bool> touched(nodes.size(), false);
    for (const Element& e : elements) {
        if (!e.alive) continue;
        const double share = materials[e.material].rho * e.volume / 4.0;
        for (NodeId n : e.nodes) {
            acc[n] += share;
            touched[n] = true;
        }
    }
    // Nodes with no live incident elements keep their previous mass.
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].alive && touched[i]) nodes[i].mass = acc[i];
}

void TetMesh::recompute_masses(const std::vector<NodeId>& nodes_to_update) {
    for (NodeId id : nodes_to_update) {
        if (!nodes[id].alive) continue;
        if (node_elements[id].empty()) continue;  // orphan keeps inertia
        double m = 0.0;
        for (ElemId e : node_elements[id])
            m += materials[elements[e].material].rho * elements[e].volume / 4.0;
        nodes[id].mass = m;
    }
}

double TetMesh::total_mass() const {
    double m = 0.0;
    for (const Element& e : elements)
        if (e.alive) m += materials[e.material].rho * e.volume;
    return m;
}

double TetMesh::total_volume() const {
    double v = 0.0;
    for (const Element& e : elements)
        if (e.alive) v += e.volume;
    return v;
}

Vec3 TetMesh::total_momentum() const {
    Vec3 p;
    for (const Node& n : nodes)
        if (n.alive) p += n.mass * n.velocity;
    return p;
}

namespace {
struct UnionFind {
    std::vector<std::int32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::int32_t find(std::int32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[b] = a;
    }
};
}  // namespace

Fragments TetMesh::fragments() const {
    Fragments out;
    out.element_fragment.assign(elements.size(), -1);
    UnionFind uf(elements.size());
    std::vector<ElemId> last_seen(nodes.size(), kInvalidId);
    for (ElemId e = 0; e < static_cast<ElemId>(elements.size()); ++e) {
        if (!elements[e].alive) continue;
        for (NodeId n : elements[e].nodes) {
            if (last_seen[n] != kInvalidId) uf.unite(last_seen[n], e);
            last_seen[n] = e;
        }
    }
    std::unordered_map<std::int32_t, std::int32_t> root_to_fragment;
    for (ElemId e = 0; e < static_cast<ElemId>(elements.size()); ++e) {
        if (!elements[e].alive) continue;
        const std::int32_t root = uf.find(e);
        auto [it, inserted] =
            root_to_fragment.try_emplace(root, static_cast<std::int32_t>(root_to_fragment.size()));
        out.element_fragment[e] = it->second;
        if (inserted) ++out.body_fragment_count[nodes[elements[e].nodes[0]].body];
    }
    out.count = root_to_fragment.size();
    return out;
}

void TetMesh::validate_topology() const {
    for (ElemId e = 0; e < static_cast<ElemId>(elements.size()); ++e) {
        if (!elements[e].alive) continue;
        const auto& n = elements[e].nodes;
        for (NodeId id : n) {
            if (id < 0 || id >= static_cast<NodeId>(nodes.size()) || !nodes[id].alive)
                throw ValidationError("element " + std::to_string(e) + " references a retired node");
            const auto& list = node_elements[id];
            if (std::find(list.begin(), list.end(), e) == list.end())
                throw ValidationError("node_elements inconsistent for element " + std::to_string(e));
        }
        static const int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
        for (const auto& f : faces) {
            const FaceKey key = make_face_key(n[f[0]], n[f[1]], n[f[2]]);
            auto it = face_map.find(key);
            if (it == face_map.end())
                throw ValidationError("face_map missing a live face of element " + std::to_string(e));
            if (it->second[0] != e && it->second[1] != e)
                throw ValidationError("face_map does not list element " + std::to_string(e));
        }
    }
    for (const auto& [key, slot] : face_map) {
        for (ElemId e : slot) {
            if (e == kInvalidId) continue;
            if (!elements[e].alive)
                throw ValidationError("face_map references retired element " + std::to_string(e));
        }
        if (slot[0] == kInvalidId)
            throw ValidationError("face_map entry with no elements");
    }
}

}  // namespace brittle
