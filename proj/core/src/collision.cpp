#include "brittle/collision.hpp"

#include <algorithm>
#include <cmath>

namespace brittle {

namespace {

constexpr int kElemFaces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};

// World-space barycentric coordinates of x in the tet (p0..p3).
// Returns false when the world tet is degenerate.
bool world_barycentric(const std::array<Vec3, 4>& p, const Vec3& x, std::array<double, 4>& b) {
    Mat3 m;
    m.set_col(0, p[1] - p[0]);
    m.set_col(1, p[2] - p[0]);
    m.set_col(2, p[3] - p[0]);
    const double d = det(m);
    if (std::abs(d) < 1e-300) return false;
    const Vec3 r = x - p[0];
    // Cramer solve.
    Mat3 m1 = m, m2 = m, m3 = m;
    m1.set_col(0, r);
    m2.set_col(1, r);
    m3.set_col(2, r);
    b[1] = det(m1) / d;
    b[2] = det(m2) / d;
    b[3] = det(m3) / d;
    b[0] = 1.0 - b[1] - b[2] - b[3];
    return true;
}

std::array<Vec3, 4> world_corners(const TetMesh& mesh, ElemId e) {
    const auto& n = mesh.element(e).nodes;
    return {mesh.node(n[0]).world_pos, mesh.node(n[1]).world_pos, mesh.node(n[2]).world_pos,
            mesh.node(n[3]).world_pos};
}

Vec3 interpolate_velocity(const TetMesh& mesh, ElemId e, const std::array<double, 4>& b) {
    const auto& n = mesh.element(e).nodes;
    Vec3 v;
    for (int i = 0; i < 4; ++i) v += b[i] * mesh.node(n[i]).velocity;
    return v;
}

// Penalty force of a point inside an element, along the outward normal of the
// nearest face.
bool penetration_penalty(const std::array<Vec3, 4>& p, const Vec3& x, double stiffness,
                         double damping, const Vec3& v_rel, Vec3& force_out) {
    // Nearest face: largest (least negative) signed distance along outward
    // face normals.
    double best = -1e300;
    Vec3 best_normal;
    for (int f = 0; f < 4; ++f) {
        const Vec3& a = p[kElemFaces[f][0]];
        Vec3 n = cross(p[kElemFaces[f][1]] - a, p[kElemFaces[f][2]] - a);
        const double len = norm(n);
        if (len <= 0.0) continue;
        n = n / len;
        if (dot(n, p[f] - a) > 0.0) n = -n;  // point away from the opposite corner
        const double d = dot(n, x - a);      // <= 0 while inside
        if (d > best) {
            best = d;
            best_normal = n;
        }
    }
    if (best == -1e300) return false;
    const double depth = -best;
    if (depth <= 0.0) return false;
    const double vn = dot(v_rel, best_normal);
    force_out = (stiffness * depth - damping * depth * vn) * best_normal;
    return true;
}

void add_pair_contact(const TetMesh& mesh, ElemId penetrated, const Vec3& point,
                      const Vec3& force, NodeId carrier,
                      const std::array<double, 4>& bary, std::vector<Contact>& out) {
    Contact c;
    c.point = point;
    c.applications.push_back({carrier, force});
    const auto& n = mesh.element(penetrated).nodes;
    for (int i = 0; i < 4; ++i)
        c.applications.push_back({n[i], -bary[i] * force});
    out.push_back(std::move(c));
}

}  // namespace

std::vector<Contact> ground_forces(const TetMesh& mesh, const GroundPlane& ground,
                                   double stiffness, double damping) {
    std::vector<Contact> out;
    for (NodeId id = 0; id < static_cast<NodeId>(mesh.nodes.size()); ++id) {
        const Node& n = mesh.node(id);
        if (!n.alive) continue;
        const double depth = -dot(ground.normal, n.world_pos - ground.point);
        if (depth <= 0.0) continue;
        const double vn = dot(n.velocity, ground.normal);
        Contact c;
        c.point = n.world_pos;
        c.applications.push_back(
            {id, (stiffness * depth - damping * depth * vn) * ground.normal});
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Contact> node_penetration_forces(const TetMesh& mesh,
                                             std::span<const std::pair<ElemId, ElemId>> pairs,
                                             double stiffness, double damping) {
    std::vector<Contact> out;
    for (const auto& [ea, eb] : pairs) {
        for (int dir = 0; dir < 2; ++dir) {
            const ElemId probe = dir == 0 ? ea : eb;
            const ElemId target = dir == 0 ? eb : ea;
            const auto p = world_corners(mesh, target);
            for (NodeId id : mesh.element(probe).nodes) {
                const Node& n = mesh.node(id);
                std::array<double, 4> bary;
                if (!world_barycentric(p, n.world_pos, bary)) continue;
                bool inside = true;
                for (double b : bary)
                    if (b < 0.0) inside = false;
                if (!inside) continue;
                const Vec3 v_rel = n.velocity - interpolate_velocity(mesh, target, bary);
                Vec3 force;
                if (!penetration_penalty(p, n.world_pos, stiffness, damping, v_rel, force))
                    continue;
                add_pair_contact(mesh, target, n.world_pos, force, id, bary, out);
            }
        }
    }
    return out;
}

// --- tetrahedron clipping ----------------------------------------------------

namespace {

struct ClipFace {
    std::vector<Vec3> pts;
    int source;  // 0: boundary piece of tet A, 1: cap from a clip plane of B
};

// Sutherland-Hodgman clip of a polygon against dot(n, x - p) <= 0.
std::vector<Vec3> clip_polygon(const std::vector<Vec3>& poly, const Vec3& p, const Vec3& n,
                               std::vector<Vec3>* boundary_hits) {
    std::vector<Vec3> out;
    const std::size_t count = poly.size();
    for (std::size_t i = 0; i < count; ++i) {
        const Vec3& cur = poly[i];
        const Vec3& nxt = poly[(i + 1) % count];
        const double dc = dot(n, cur - p);
        const double dn = dot(n, nxt - p);
        if (dc <= 0.0) out.push_back(cur);
        if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
            const double t = dc / (dc - dn);
            const Vec3 hit = cur + t * (nxt - cur);
            out.push_back(hit);
            if (boundary_hits) boundary_hits->push_back(hit);
        }
    }
    return out;
}

void tet_planes(const std::array<Vec3, 4>& t, std::array<std::pair<Vec3, Vec3>, 4>& planes) {
    for (int f = 0; f < 4; ++f) {
        const Vec3& a = t[kElemFaces[f][0]];
        Vec3 n = cross(t[kElemFaces[f][1]] - a, t[kElemFaces[f][2]] - a);
        if (dot(n, t[f] - a) > 0.0) n = -n;  // outward
        planes[f] = {a, n};
    }
}

}  // namespace

TetOverlap clip_tets(const std::array<Vec3, 4>& a, const std::array<Vec3, 4>& b) {
    TetOverlap result;

    std::vector<ClipFace> faces;
    for (int f = 0; f < 4; ++f) {
        Vec3 p0 = a[kElemFaces[f][0]], p1 = a[kElemFaces[f][1]], p2 = a[kElemFaces[f][2]];
        // Wind outward (normal away from the opposite corner) so the
        // divergence-theorem volume below is signed consistently.
        if (dot(cross(p1 - p0, p2 - p0), a[f] - p0) > 0.0) std::swap(p1, p2);
        faces.push_back({{p0, p1, p2}, 0});
    }

    std::array<std::pair<Vec3, Vec3>, 4> planes;
    tet_planes(b, planes);

    for (const auto& [pp, pn] : planes) {
        const double len = norm(pn);
        if (len <= 0.0) return result;
        const Vec3 n = pn / len;
        std::vector<ClipFace> next;
        std::vector<Vec3> hits;
        for (const ClipFace& face : faces) {
            std::vector<Vec3> clipped = clip_polygon(face.pts, pp, n, &hits);
            if (clipped.size() >= 3) next.push_back({std::move(clipped), face.source});
        }
        // Cap polygon: order the plane hits around their centroid.
        if (hits.size() >= 3) {
            Vec3 centroid;
            for (const Vec3& h : hits) centroid += h;
            centroid = centroid / static_cast<double>(hits.size());
            Vec3 e1 = normalized(cross(n, std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0}));
            const Vec3 e2 = cross(n, e1);
            std::sort(hits.begin(), hits.end(), [&](const Vec3& l, const Vec3& r) {
                const Vec3 dl = l - centroid, dr = r - centroid;
                return std::atan2(dot(dl, e2), dot(dl, e1)) < std::atan2(dot(dr, e2), dot(dr, e1));
            });
            // Drop duplicate hits (each clip plane crossing is recorded once
            // per polygon edge, so shared edges appear twice).
            std::vector<Vec3> cap;
            for (const Vec3& h : hits)
                if (cap.empty() || norm(h - cap.back()) > 1e-12) cap.push_back(h);
            while (cap.size() > 1 && norm(cap.front() - cap.back()) <= 1e-12) cap.pop_back();
            if (cap.size() >= 3) next.push_back({std::move(cap), 1});
        }
        faces = std::move(next);
        if (faces.empty()) return result;
    }

    // Volume and centroid by divergence theorem over triangulated faces,
    // relative to a local origin for conditioning.
    Vec3 origin;
    std::size_t npts = 0;
    for (const ClipFace& f : faces) {
        for (const Vec3& p : f.pts) origin += p;
        npts += f.pts.size();
    }
    if (npts == 0) return result;
    origin = origin / static_cast<double>(npts);

    double vol6 = 0.0;
    Vec3 moment;  // 6 * integral of (x - origin) dV, accumulated per apex tet
    Vec3 dir_a;
    double area_total = 0.0;
    for (const ClipFace& f : faces) {
        Vec3 face_normal_acc;
        for (std::size_t i = 1; i + 1 < f.pts.size(); ++i) {
            const Vec3 p0 = f.pts[0] - origin;
            const Vec3 p1 = f.pts[i] - origin;
            const Vec3 p2 = f.pts[i + 1] - origin;
            const double v6 = dot(p0, cross(p1, p2));  // 6 * vol of (origin, p0, p1, p2)
            vol6 += v6;
            moment += (v6 / 4.0) * (p0 + p1 + p2);
            face_normal_acc += 0.5 * cross(p1 - p0, p2 - p0);
        }
        area_total += norm(face_normal_acc);
        if (f.source == 0) dir_a += face_normal_acc;
    }
    if (!(vol6 > 0.0)) return result;

    result.volume = vol6 / 6.0;
    result.centroid = origin + moment / vol6;
    result.direction_a = dir_a;
    result.contained = norm(dir_a) < 1e-9 * std::max(area_total, 1e-300);
    return result;
}

std::vector<Contact> overlap_volume_forces(const TetMesh& mesh,
                                           std::span<const std::pair<ElemId, ElemId>> pairs,
                                           double volume_stiffness, double node_stiffness,
                                           double damping) {
    std::vector<Contact> out;
    for (const auto& [ea, eb] : pairs) {
        const auto pa = world_corners(mesh, ea);
        const auto pb = world_corners(mesh, eb);
        const TetOverlap overlap = clip_tets(pa, pb);
        if (overlap.volume <= 0.0) continue;
        if (overlap.contained) {
            const std::pair<ElemId, ElemId> one[1] = {{ea, eb}};
            auto fallback = node_penetration_forces(mesh, one, node_stiffness, damping);
            out.insert(out.end(), fallback.begin(), fallback.end());
            continue;
        }
        // The boundary of A inside B points into B; push A the opposite way.
        const Vec3 n = normalized(overlap.direction_a);
        std::array<double, 4> ba, bb;
        if (!world_barycentric(pa, overlap.centroid, ba)) continue;
        if (!world_barycentric(pb, overlap.centroid, bb)) continue;
        Vec3 v_rel = interpolate_velocity(mesh, ea, ba) - interpolate_velocity(mesh, eb, bb);
        const double vn = dot(v_rel, n);
        const Vec3 force = (-volume_stiffness * overlap.volume - damping * overlap.volume * vn) * n;
        Contact c;
        c.point = overlap.centroid;
        const auto& na = mesh.element(ea).nodes;
        const auto& nb = mesh.element(eb).nodes;
        for (int i = 0; i < 4; ++i) c.applications.push_back({na[i], ba[i] * force});
        for (int i = 0; i < 4; ++i) c.applications.push_back({nb[i], -bb[i] * force});
        out.push_back(std::move(c));
    }
    return out;
}

void apply_contacts(TetMesh& mesh, std::span<const Contact> contacts) {
    for (const Contact& c : contacts)
        for (const NodeForce& nf : c.applications) mesh.node(nf.node).force += nf.force;
}

// --- broadphase ---------------------------------------------------------------

void Aabb::grow(const Vec3& p) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    hi.z = std::max(hi.z, p.z);
}

void Aabb::grow(const Aabb& b) {
    grow(b.lo);
    grow(b.hi);
}

bool Aabb::overlaps(const Aabb& o) const {
    return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y &&
           lo.z <= o.hi.z && o.lo.z <= hi.z;
}

Aabb element_bounds(const TetMesh& mesh, ElemId e) {
    Aabb box;
    for (NodeId n : mesh.element(e).nodes) box.grow(mesh.node(n).world_pos);
    return box;
}

std::int32_t Bvh::build_range(const TetMesh& mesh, std::vector<ElemId>& elems, std::size_t begin,
                              std::size_t end) {
    const std::int32_t idx = static_cast<std::int32_t>(tree_.size());
    tree_.emplace_back();
    if (end - begin == 1) {
        tree_[idx].elem = elems[begin];
        tree_[idx].box = element_bounds(mesh, elems[begin]);
        return idx;
    }
    Aabb centroid_box;
    for (std::size_t i = begin; i < end; ++i) {
        const Aabb b = element_bounds(mesh, elems[i]);
        centroid_box.grow((b.lo + b.hi) * 0.5);
    }
    const Vec3 extent = centroid_box.hi - centroid_box.lo;
    int axis = 0;
    if (extent.y > extent.x) axis = 1;
    if (extent.z > extent[axis]) axis = 2;
    const std::size_t mid = (begin + end) / 2;
    std::nth_element(elems.begin() + begin, elems.begin() + mid, elems.begin() + end,
                     [&](ElemId l, ElemId r) {
                         const Aabb bl = element_bounds(mesh, l), br = element_bounds(mesh, r);
                         const double cl = (bl.lo[axis] + bl.hi[axis]) * 0.5;
                         const double cr = (br.lo[axis] + br.hi[axis]) * 0.5;
                         if (cl != cr) return cl < cr;
                         return l < r;
                     });
    const std::int32_t left = build_range(mesh, elems, begin, mid);
    const std::int32_t right = build_range(mesh, elems, mid, end);
    tree_[idx].left = left;
    tree_[idx].right = right;
    tree_[idx].box = tree_[left].box;
    tree_[idx].box.grow(tree_[right].box);
    return idx;
}

void Bvh::build(const TetMesh& mesh) {
    tree_.clear();
    front_.clear();
    root_ = -1;
    std::vector<ElemId> elems;
    for (ElemId e = 0; e < static_cast<ElemId>(mesh.elements.size()); ++e)
        if (mesh.elements[e].alive) elems.push_back(e);
    leaf_count_ = elems.size();
    if (elems.empty()) return;
    root_ = build_range(mesh, elems, 0, elems.size());
    front_.emplace_back(root_, root_);
}

void Bvh::refit_node(const TetMesh& mesh, std::int32_t idx) {
    TreeNode& n = tree_[idx];
    if (n.elem != kInvalidId) {
        n.box = element_bounds(mesh, n.elem);
        return;
    }
    refit_node(mesh, n.left);
    refit_node(mesh, n.right);
    n.box = tree_[n.left].box;
    n.box.grow(tree_[n.right].box);
}

void Bvh::refit(const TetMesh& mesh) {
    if (root_ >= 0) refit_node(mesh, root_);
}

std::vector<std::pair<ElemId, ElemId>> Bvh::collect_pairs(const TetMesh& mesh,
                                                          const Fragments& frags) {
    std::vector<std::pair<ElemId, ElemId>> out;
    if (root_ < 0) return out;

    auto admissible = [&](ElemId ea, ElemId eb) {
        const auto& na = mesh.element(ea).nodes;
        const auto& nb = mesh.element(eb).nodes;
        for (NodeId a : na)
            for (NodeId b : nb)
                if (a == b) return false;
        const std::int32_t body_a = mesh.node(na[0]).body;
        const std::int32_t body_b = mesh.node(nb[0]).body;
        if (body_a == body_b) {
            // Same-body contacts only once the body has fractured apart.
            auto it = frags.body_fragment_count.find(body_a);
            if (it == frags.body_fragment_count.end() || it->second < 2) return false;
            if (frags.element_fragment[ea] == frags.element_fragment[eb]) return false;
        }
        return true;
    };

    // Expand the cached front: stale overlapping entries descend, separated
    // entries stay parked where they are.
    std::vector<std::pair<std::int32_t, std::int32_t>> stack = std::move(front_);
    front_.clear();
    if (stack.empty()) stack.emplace_back(root_, root_);

    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        const TreeNode& a = tree_[x];
        const TreeNode& b = tree_[y];
        if (x == y) {
            if (a.elem != kInvalidId) continue;
            stack.emplace_back(a.left, a.left);
            stack.emplace_back(a.right, a.right);
            stack.emplace_back(a.left, a.right);
            continue;
        }
        if (!a.box.overlaps(b.box)) {
            front_.emplace_back(x, y);
            continue;
        }
        if (a.elem != kInvalidId && b.elem != kInvalidId) {
            front_.emplace_back(x, y);
            if (admissible(a.elem, b.elem))
                out.emplace_back(std::min(a.elem, b.elem), std::max(a.elem, b.elem));
            continue;
        }
        if (a.elem == kInvalidId) {
            stack.emplace_back(a.left, y);
            stack.emplace_back(a.right, y);
        } else {
            stack.emplace_back(x, b.left);
            stack.emplace_back(x, b.right);
        }
    }

    // A bloated front costs more than it saves; reset and let the next query
    // re-descend.
    if (front_.size() > 4 * leaf_count_ + 16) {
        front_.clear();
        front_.emplace_back(root_, root_);
    }

    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace brittle
