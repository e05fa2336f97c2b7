#include "brittle/remesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>

#include "brittle/error.hpp"
#include "brittle/fracture.hpp"

namespace brittle {

std::optional<CutPoint> cut_edge(const Node& a, const Node& b, const Vec3& plane_point,
                                 const Vec3& plane_normal) {
    const double da = dot(plane_normal, a.world_pos - plane_point);
    const double db = dot(plane_normal, b.world_pos - plane_point);
    if (!(da * db < 0.0)) return std::nullopt;  // endpoints must straddle
    const Vec3 dir = b.world_pos - a.world_pos;
    const double len = norm(dir);
    if (std::abs(dot(plane_normal, dir)) < 1e-12 * len) return std::nullopt;  // near parallel
    CutPoint cp;
    cp.t = da / (da - db);
    cp.material_pos = a.material_pos + cp.t * (b.material_pos - a.material_pos);
    cp.world_pos = a.world_pos + cp.t * (b.world_pos - a.world_pos);
    cp.velocity = a.velocity + cp.t * (b.velocity - a.velocity);
    return cp;
}

namespace {

// Plan-time node reference: >= 0 is an existing NodeId, < 0 indexes the
// planner's new-node records.  Existing nodes order before new ones so the
// "lowest index" triangulation rules prefer original mesh nodes.
using PlanNode = std::int32_t;

PlanNode plan_new(int record_index) { return -1 - record_index; }
bool is_new(PlanNode v) { return v < 0; }
int new_index(PlanNode v) { return -1 - v; }

bool key_less(PlanNode a, PlanNode b) {
    const bool na = is_new(a), nb = is_new(b);
    if (na != nb) return nb;
    if (!na) return a < b;
    return new_index(a) < new_index(b);
}

struct Tri {
    PlanNode v[3];
    bool contains(PlanNode p) const { return v[0] == p || v[1] == p || v[2] == p; }
};

struct PlanTet {
    std::array<PlanNode, 4> n;
};

struct NewNodeRec {
    Vec3 material_pos, world_pos, velocity;
    bool fixed = false;
    std::int32_t body = 0;
    NodeId resolved = kInvalidId;
};

constexpr int kFaces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};

struct PlanAbort {
    std::string why;
};

struct Planner {
    TetMesh& mesh;
    const SnapThresholds& th;
    NodeId origin;
    Vec3 p0, normal;

    std::vector<NewNodeRec> new_nodes;  // [0] = n+, [1] = n-
    std::unordered_map<NodeId, int> side_of;

    struct CutInfo {
        int record = -1;       // index into plan cuts
        int main_new = -1;     // new-node record of the cut node
        int twin_new = -1;     // record of the co-located twin, boundary cuts only
    };
    std::map<std::pair<NodeId, NodeId>, CutInfo> cut_of_edge;

    std::vector<EdgeCut> cuts;

    struct PendingOp {
        ElementOp::Kind kind;
        ElemId parent;
        std::vector<PlanTet> children;
    };
    std::vector<PendingOp> pending;

    Planner(TetMesh& m, const SnapThresholds& t, NodeId n, const Vec3& nrm)
        : mesh(m), th(t), origin(n), p0(m.node(n).world_pos), normal(nrm) {
        side_of[origin] = 0;
    }

    [[noreturn]] void abort(const std::string& why) const { throw PlanAbort{why}; }

    double signed_distance(NodeId n) const {
        return dot(normal, mesh.node(n).world_pos - p0);
    }

    // Snap test: a node counts as lying on the plane when it is closer than
    // the distance threshold, or when the line from the origin node to it
    // makes less than the angle threshold with the plane.
    int side(NodeId n) {
        auto it = side_of.find(n);
        if (it != side_of.end()) return it->second;
        const double d = signed_distance(n);
        const double len = norm(mesh.node(n).world_pos - p0);
        int s;
        if (std::abs(d) < th.distance) s = 0;
        else if (len > 0.0 &&
                 std::asin(std::clamp(std::abs(d) / len, 0.0, 1.0)) < th.angle) s = 0;
        else s = d > 0.0 ? 1 : -1;
        side_of.emplace(n, s);
        return s;
    }

    static std::pair<NodeId, NodeId> edge_key(NodeId a, NodeId b) {
        return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    }

    PlanNode cut_node(NodeId a, NodeId b) const {
        auto it = cut_of_edge.find(edge_key(a, b));
        if (it == cut_of_edge.end()) return kInvalidId;
        return plan_new(it->second.main_new);
    }

    bool has_cut(NodeId a, NodeId b) const {
        return cut_of_edge.count(edge_key(a, b)) != 0;
    }

    Vec3 material_pos(PlanNode v) const {
        return is_new(v) ? new_nodes[new_index(v)].material_pos : mesh.node(v).material_pos;
    }
    Vec3 world_pos(PlanNode v) const {
        return is_new(v) ? new_nodes[new_index(v)].world_pos : mesh.node(v).world_pos;
    }

    // --- face triangulation -------------------------------------------------
    // Deterministic and driven only by node identity, so the two elements
    // sharing a face always produce the same triangle set.

    void quad_tris(PlanNode c0, PlanNode c1, PlanNode c2, PlanNode c3,
                   std::vector<Tri>& out) const {
        const PlanNode c[4] = {c0, c1, c2, c3};
        int k = 0;
        for (int i = 1; i < 4; ++i)
            if (key_less(c[i], c[k])) k = i;
        out.push_back({c[k], c[(k + 1) & 3], c[(k + 2) & 3]});
        out.push_back({c[k], c[(k + 2) & 3], c[(k + 3) & 3]});
    }

    void triangulate_face(NodeId f0, NodeId f1, NodeId f2, std::vector<Tri>& out) const {
        const PlanNode q01 = cut_node(f0, f1);
        const PlanNode q02 = cut_node(f0, f2);
        const PlanNode q12 = cut_node(f1, f2);
        const int n = (q01 != kInvalidId) + (q02 != kInvalidId) + (q12 != kInvalidId);
        if (n == 0) {
            out.push_back({f0, f1, f2});
            return;
        }
        if (n == 1) {
            // Cut edge splits off the opposite vertex.
            if (q01 != kInvalidId) {
                out.push_back({q01, f1, f2});
                out.push_back({f0, q01, f2});
            } else if (q02 != kInvalidId) {
                out.push_back({q02, f2, f1});
                out.push_back({f0, q02, f1});
            } else {
                out.push_back({q12, f2, f0});
                out.push_back({f1, q12, f0});
            }
            return;
        }
        if (n == 2) {
            // The two cut edges share the minority vertex.
            NodeId m, a, b;
            PlanNode qa, qb;
            if (q01 == kInvalidId) { m = f2; a = f0; b = f1; qa = q02; qb = q12; }
            else if (q02 == kInvalidId) { m = f1; a = f0; b = f2; qa = q01; qb = q12; }
            else { m = f0; a = f1; b = f2; qa = q01; qb = q02; }
            out.push_back({m, qa, qb});
            quad_tris(a, qa, qb, b, out);
            return;
        }
        abort("face with three cut edges");
    }

    // --- element subdivision -------------------------------------------------

    int corner_side_sum(const Tri& t) {
        int sum = 0;
        for (PlanNode v : t.v)
            if (!is_new(v)) sum += side(v);
        return sum;
    }

    // Map a plan node into one side of the discontinuity.
    PlanNode map_for_side(PlanNode v, int sign) const {
        if (!is_new(v)) {
            if (v == origin) return plan_new(sign > 0 ? 0 : 1);
            return v;
        }
        const int rec = new_index(v);
        // Boundary cut twins: record pairs are registered in cut_of_edge.
        for (const auto& [key, info] : cut_of_edge) {
            if (info.main_new == rec && info.twin_new >= 0 && sign < 0)
                return plan_new(info.twin_new);
        }
        return v;
    }

    std::vector<Tri> cut_polygon(const std::array<NodeId, 4>& corners,
                                 const std::vector<PlanNode>& elem_cuts) {
        std::vector<PlanNode> poly;
        for (NodeId c : corners)
            if (side(c) == 0) poly.push_back(c);
        for (PlanNode q : elem_cuts) poly.push_back(q);
        if (poly.size() < 3) abort("cut polygon with fewer than 3 vertices");

        // Cyclic order around the polygon centroid in the plane basis.
        Vec3 e1 = cross(normal, std::abs(normal.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0});
        e1 = normalized(e1);
        const Vec3 e2 = cross(normal, e1);
        Vec3 centroid;
        for (PlanNode v : poly) centroid += world_pos(v);
        centroid = centroid / static_cast<double>(poly.size());
        std::vector<std::pair<double, PlanNode>> order;
        for (PlanNode v : poly) {
            const Vec3 d = world_pos(v) - centroid;
            order.emplace_back(std::atan2(dot(d, e2), dot(d, e1)), v);
        }
        std::sort(order.begin(), order.end(), [](const auto& l, const auto& r) {
            if (l.first != r.first) return l.first < r.first;
            return key_less(l.second, r.second);
        });

        // Fan from the lowest-key polygon vertex.
        int k = 0;
        for (int i = 1; i < static_cast<int>(order.size()); ++i)
            if (key_less(order[i].second, order[k].second)) k = i;
        std::vector<Tri> tris;
        const int n = static_cast<int>(order.size());
        for (int i = 1; i + 1 < n; ++i)
            tris.push_back({order[k].second, order[(k + i) % n].second,
                            order[(k + i + 1) % n].second});
        return tris;
    }

    // Split an element whose corners all have known sides into the two pieces
    // separated by the plane.  Used for every element incident to the origin
    // node (its origin corner maps to n+/n-) and for neighbors cut clean
    // through (3- and 4-edge cuts).
    std::vector<PlanTet> subdivide_by_plane(const std::array<NodeId, 4>& corners,
                                            const std::vector<PlanNode>& elem_cuts) {
        std::vector<Tri> face_tris[4];
        for (int f = 0; f < 4; ++f)
            triangulate_face(corners[kFaces[f][0]], corners[kFaces[f][1]],
                             corners[kFaces[f][2]], face_tris[f]);
        const std::vector<Tri> polygon = cut_polygon(corners, elem_cuts);

        std::vector<PlanTet> children;
        for (int sign : {+1, -1}) {
            // Piece vertex set: corners on this side or on the plane, plus cuts.
            std::vector<PlanNode> verts;
            for (NodeId c : corners)
                if (side(c) == 0 || side(c) == sign) verts.push_back(c);
            if (verts.empty()) abort("plane piece without corners");
            // Apex: lowest-key existing corner of the piece.
            PlanNode apex = verts[0];
            for (PlanNode v : verts)
                if (key_less(v, apex)) apex = v;

            std::vector<Tri> piece_tris;
            for (int f = 0; f < 4; ++f) {
                for (const Tri& t : face_tris[f]) {
                    const int s = corner_side_sum(t);
                    if (s == 0) {
                        // Faces lying in the plane belong to both pieces and
                        // split along the discontinuity via the mapping below.
                        bool all_flat = true;
                        for (PlanNode v : t.v)
                            if (!is_new(v) && side(v) != 0) all_flat = false;
                        if (!all_flat) abort("ambiguous face triangle side");
                        piece_tris.push_back(t);
                    } else if ((s > 0) == (sign > 0)) {
                        piece_tris.push_back(t);
                    }
                }
            }
            for (const Tri& t : polygon) piece_tris.push_back(t);

            for (const Tri& t : piece_tris) {
                if (t.contains(apex)) continue;
                PlanTet tet;
                tet.n = {map_for_side(apex, sign), map_for_side(t.v[0], sign),
                         map_for_side(t.v[1], sign), map_for_side(t.v[2], sign)};
                children.push_back(tet);
            }
        }
        return children;
    }

    // Conforming subdivision of a neighbor element around the cut nodes on its
    // edges.  The children all share faces with each other; no discontinuity
    // is introduced.  Fan from the first vertex that sees every triangle of
    // each face it lies on.
    std::vector<PlanTet> subdivide_neighbor(ElemId eid) {
        const std::array<NodeId, 4>& corners = mesh.element(eid).nodes;

        std::vector<PlanNode> elem_cuts;
        struct FaceInfo {
            std::vector<Tri> tris;
            std::vector<PlanNode> on_face;  // corners + cut nodes lying on it
        };
        FaceInfo faces[4];
        for (int f = 0; f < 4; ++f) {
            const NodeId a = corners[kFaces[f][0]];
            const NodeId b = corners[kFaces[f][1]];
            const NodeId c = corners[kFaces[f][2]];
            triangulate_face(a, b, c, faces[f].tris);
            faces[f].on_face = {a, b, c};
            for (auto [u, v] : {std::pair{a, b}, std::pair{a, c}, std::pair{b, c}}) {
                const PlanNode q = cut_node(u, v);
                if (q != kInvalidId) faces[f].on_face.push_back(q);
            }
        }
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                const PlanNode q = cut_node(corners[i], corners[j]);
                if (q != kInvalidId) elem_cuts.push_back(q);
            }

        std::vector<PlanNode> candidates(corners.begin(), corners.end());
        candidates.insert(candidates.end(), elem_cuts.begin(), elem_cuts.end());
        std::sort(candidates.begin(), candidates.end(), key_less);

        for (PlanNode apex : candidates) {
            bool ok = true;
            for (int f = 0; f < 4 && ok; ++f) {
                const auto& on = faces[f].on_face;
                if (std::find(on.begin(), on.end(), apex) == on.end()) continue;
                for (const Tri& t : faces[f].tris)
                    if (!t.contains(apex)) { ok = false; break; }
            }
            if (!ok) continue;
            std::vector<PlanTet> children;
            for (int f = 0; f < 4; ++f)
                for (const Tri& t : faces[f].tris) {
                    if (t.contains(apex)) continue;
                    children.push_back({{apex, t.v[0], t.v[1], t.v[2]}});
                }
            if (!children.empty()) return children;
        }

        // No fan apex: the element is cut clean through (3 or 4 cut edges),
        // which forces a strict side for every corner.
        for (NodeId c : corners)
            if (side(c) == 0) abort("neighbor cut pattern without a conforming subdivision");
        return subdivide_by_plane(corners, elem_cuts);
    }
};

double plan_tet_volume(const Planner& pl, const PlanTet& t) {
    return element_volume(pl.material_pos(t.n[0]), pl.material_pos(t.n[1]),
                          pl.material_pos(t.n[2]), pl.material_pos(t.n[3]));
}

}  // namespace

std::optional<SplitPlan> split_node(TetMesh& mesh, const FractureEvent& event,
                                    const SnapThresholds& th, std::ostream* warnings) {
    auto fail = [&](const std::string& why) -> std::optional<SplitPlan> {
        if (warnings)
            *warnings << "split_node: node " << event.node << " skipped: " << why << '\n';
        return std::nullopt;
    };

    const NodeId n0 = event.node;
    if (n0 < 0 || n0 >= static_cast<NodeId>(mesh.nodes.size()) || !mesh.node(n0).alive)
        return fail("node does not exist");
    const double nlen = norm(event.plane_normal);
    if (!(nlen > 0.0) || !is_finite(event.plane_normal)) return fail("bad plane normal");

    try {
        Planner pl(mesh, th, n0, event.plane_normal / nlen);

        std::vector<ElemId> incident = mesh.node_elements[n0];
        std::sort(incident.begin(), incident.end());
        if (incident.empty()) return fail("orphan node");
        std::set<ElemId> incident_set(incident.begin(), incident.end());

        // n+ / n- records: same material position, world position and velocity.
        const Node& origin_node = mesh.node(n0);
        for (int i = 0; i < 2; ++i)
            pl.new_nodes.push_back({origin_node.material_pos, origin_node.world_pos,
                                    origin_node.velocity, origin_node.fixed,
                                    origin_node.body, kInvalidId});

        // Classify incident elements and collect the straddling edges.
        struct Classified {
            ElemId elem;
            bool intersected;
            int reassign_side;
        };
        std::vector<Classified> classified;
        int plus_count = 0, minus_count = 0, intersect_count = 0;
        for (ElemId e : incident) {
            std::array<NodeId, 3> other{};
            int k = 0;
            for (NodeId c : mesh.element(e).nodes)
                if (c != n0) other[k++] = c;
            bool has_p = false, has_m = false;
            for (NodeId c : other) {
                const int s = pl.side(c);
                has_p |= s > 0;
                has_m |= s < 0;
            }
            if (has_p && has_m) {
                classified.push_back({e, true, 0});
                ++intersect_count;
                for (int i = 0; i < 3; ++i)
                    for (int j = i + 1; j < 3; ++j)
                        if (pl.side(other[i]) * pl.side(other[j]) < 0)
                            pl.cut_of_edge.try_emplace(Planner::edge_key(other[i], other[j]));
            } else {
                // Side of the centroid of the three non-origin corners.
                const Vec3 centroid = (mesh.node(other[0]).world_pos +
                                       mesh.node(other[1]).world_pos +
                                       mesh.node(other[2]).world_pos) / 3.0;
                const int s = dot(pl.normal, centroid - pl.p0) < 0.0 ? -1 : +1;
                classified.push_back({e, false, s});
                (s > 0 ? plus_count : minus_count) += 1;
            }
        }
        if (intersect_count == 0 && (plus_count == 0 || minus_count == 0))
            return fail("all incident elements on one side, no discontinuity would result");

        // Solve each cut edge once; boundary edges get a co-located twin.
        for (auto& [key, info] : pl.cut_of_edge) {
            const Node& a = mesh.node(key.first);
            const Node& b = mesh.node(key.second);
            const auto cp = cut_edge(a, b, pl.p0, pl.normal);
            if (!cp) return fail("degenerate edge-plane intersection");

            EdgeCut rec;
            rec.a = key.first;
            rec.b = key.second;
            rec.t = cp->t;
            rec.material_pos = cp->material_pos;
            rec.world_pos = cp->world_pos;
            rec.velocity = cp->velocity;
            rec.dist_a = std::abs(dot(pl.normal, a.world_pos - pl.p0));
            rec.dist_b = std::abs(dot(pl.normal, b.world_pos - pl.p0));
            const double la = norm(a.world_pos - pl.p0), lb = norm(b.world_pos - pl.p0);
            rec.angle_a = la > 0 ? std::asin(std::clamp(rec.dist_a / la, 0.0, 1.0)) : 0.0;
            rec.angle_b = lb > 0 ? std::asin(std::clamp(rec.dist_b / lb, 0.0, 1.0)) : 0.0;

            bool boundary = true;
            for (ElemId e : mesh.elements_with_edge(key.first, key.second))
                if (!incident_set.count(e)) boundary = false;
            rec.boundary = boundary;

            info.main_new = static_cast<int>(pl.new_nodes.size());
            pl.new_nodes.push_back({cp->material_pos, cp->world_pos, cp->velocity,
                                    a.fixed && b.fixed, a.body, kInvalidId});
            if (boundary) {
                info.twin_new = static_cast<int>(pl.new_nodes.size());
                pl.new_nodes.push_back(pl.new_nodes.back());
            }
            info.record = static_cast<int>(pl.cuts.size());
            pl.cuts.push_back(rec);
        }

        // Build subdivision plans. Incident elements first, in id order.
        for (const Classified& c : classified) {
            if (!c.intersected) {
                pl.pending.push_back({c.reassign_side > 0 ? ElementOp::reassign_positive
                                                          : ElementOp::reassign_negative,
                                      c.elem, {}});
                continue;
            }
            const auto& corners = mesh.element(c.elem).nodes;
            std::vector<PlanNode> elem_cuts;
            for (int i = 0; i < 4; ++i)
                for (int j = i + 1; j < 4; ++j) {
                    const PlanNode q = pl.cut_node(corners[i], corners[j]);
                    if (q != kInvalidId) elem_cuts.push_back(q);
                }
            pl.pending.push_back({ElementOp::subdivide, c.elem,
                                  pl.subdivide_by_plane(corners, elem_cuts)});
        }

        // Neighbor consistency: any non-incident element holding a cut edge
        // must be subdivided with the existing cut nodes.
        std::set<ElemId> neighbor_set;
        for (const auto& [key, info] : pl.cut_of_edge)
            for (ElemId e : mesh.elements_with_edge(key.first, key.second))
                if (!incident_set.count(e)) neighbor_set.insert(e);
        for (ElemId e : neighbor_set)
            pl.pending.push_back({ElementOp::subdivide, e, pl.subdivide_neighbor(e)});

        // ---- validation: no mutation happens unless everything passes ----
        for (auto& op : pl.pending) {
            for (PlanTet& t : op.children) {
                double vol = plan_tet_volume(pl, t);
                if (vol < 0) {
                    std::swap(t.n[2], t.n[3]);
                    vol = -vol;
                }
                if (!(vol >= th.volume_floor))
                    return fail("subdivision would create a sub-floor-volume element");
                try {
                    compute_beta(pl.material_pos(t.n[0]), pl.material_pos(t.n[1]),
                                 pl.material_pos(t.n[2]), pl.material_pos(t.n[3]));
                } catch (const DegenerateElementError&) {
                    return fail("subdivision would create an ill-conditioned element");
                }
            }
        }

        // Face occupancy audit over the plan: no face may end up with more
        // than two incident elements.
        {
            using PlanFace = std::array<PlanNode, 3>;
            auto plan_face = [](PlanNode a, PlanNode b, PlanNode c) {
                PlanFace f{a, b, c};
                std::sort(f.begin(), f.end(), key_less);
                return f;
            };
            std::map<PlanFace, int> occupancy;
            auto base_count = [&](const PlanFace& f) {
                for (PlanNode v : f)
                    if (is_new(v)) return 0;
                const auto it = mesh.face_map.find(make_face_key(f[0], f[1], f[2]));
                if (it == mesh.face_map.end()) return 0;
                return (it->second[0] != kInvalidId) + (it->second[1] != kInvalidId);
            };
            auto bump = [&](const PlanFace& f, int delta) {
                auto [it, inserted] = occupancy.try_emplace(f, base_count(f));
                it->second += delta;
            };
            for (const auto& op : pl.pending) {
                const auto& old = mesh.element(op.parent).nodes;
                for (const auto& fc : kFaces)
                    bump(plan_face(old[fc[0]], old[fc[1]], old[fc[2]]), -1);
                if (op.kind == ElementOp::subdivide) {
                    for (const PlanTet& t : op.children)
                        for (const auto& fc : kFaces)
                            bump(plan_face(t.n[fc[0]], t.n[fc[1]], t.n[fc[2]]), +1);
                } else {
                    const int sign = op.kind == ElementOp::reassign_positive ? +1 : -1;
                    for (const auto& fc : kFaces)
                        bump(plan_face(pl.map_for_side(old[fc[0]], sign),
                                       pl.map_for_side(old[fc[1]], sign),
                                       pl.map_for_side(old[fc[2]], sign)), +1);
                }
            }
            for (const auto& [face, count] : occupancy)
                if (count > 2) return fail("subdivision would over-share a face");
        }

        // ---- apply ----
        SplitPlan plan;
        plan.origin = n0;
        plan.plane_point = pl.p0;
        plan.plane_normal = pl.normal;

        for (NewNodeRec& rec : pl.new_nodes) {
            Node n;
            n.material_pos = rec.material_pos;
            n.world_pos = rec.world_pos;
            n.velocity = rec.velocity;
            n.fixed = rec.fixed;
            n.body = rec.body;
            rec.resolved = mesh.add_node(n);
        }
        plan.node_positive = pl.new_nodes[0].resolved;
        plan.node_negative = pl.new_nodes[1].resolved;
        for (auto& [key, info] : pl.cut_of_edge) {
            EdgeCut& rec = pl.cuts[info.record];
            rec.created = pl.new_nodes[info.main_new].resolved;
            if (info.twin_new >= 0) rec.created_twin = pl.new_nodes[info.twin_new].resolved;
        }
        plan.cuts = pl.cuts;

        auto resolve = [&](PlanNode v) -> NodeId {
            return is_new(v) ? pl.new_nodes[new_index(v)].resolved : v;
        };

        std::vector<NodeId> affected{plan.node_positive, plan.node_negative};
        for (const EdgeCut& c : plan.cuts) {
            affected.push_back(c.created);
            if (c.created_twin != kInvalidId) affected.push_back(c.created_twin);
        }

        // All subdivide parents are removed before any child is added so a
        // recycled element id can never collide with a pending parent.
        std::vector<std::int32_t> parent_material(pl.pending.size(), 0);
        for (std::size_t i = 0; i < pl.pending.size(); ++i) {
            const auto& op = pl.pending[i];
            if (op.kind != ElementOp::subdivide) continue;
            parent_material[i] = mesh.element(op.parent).material;
            for (NodeId c : mesh.element(op.parent).nodes)
                if (c != n0) affected.push_back(c);
            mesh.remove_element(op.parent);
        }
        for (const auto& op : pl.pending) {
            if (op.kind == ElementOp::subdivide) continue;
            const NodeId replacement = op.kind == ElementOp::reassign_positive
                                           ? plan.node_positive
                                           : plan.node_negative;
            mesh.replace_corner(op.parent, n0, replacement);
        }
        for (std::size_t i = 0; i < pl.pending.size(); ++i) {
            const auto& op = pl.pending[i];
            ElementOp out;
            out.kind = op.kind;
            out.parent = op.parent;
            if (op.kind == ElementOp::subdivide) {
                for (const PlanTet& t : op.children) {
                    const std::array<NodeId, 4> resolved{resolve(t.n[0]), resolve(t.n[1]),
                                                         resolve(t.n[2]), resolve(t.n[3])};
                    out.child_nodes.push_back(resolved);
                    out.children.push_back(mesh.add_element(resolved, parent_material[i]));
                }
            } else {
                out.child_nodes.push_back(mesh.element(op.parent).nodes);
                out.children.push_back(op.parent);
            }
            plan.ops.push_back(std::move(out));
        }

        mesh.retire_node(n0);

        std::sort(affected.begin(), affected.end());
        affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
        mesh.recompute_masses(affected);

        return plan;
    } catch (const PlanAbort& a) {
        return fail(a.why);
    }
}

}  // namespace brittle
