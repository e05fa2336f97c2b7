#include "brittle/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brittle/continuum.hpp"
#include "brittle/error.hpp"
#include "brittle/femforce.hpp"

namespace brittle {

namespace {

Vec3 acceleration(const Node& n) {
    if (!(n.mass > 0.0))
        throw ConfigError("integrate: zero-mass node encountered");
    return n.force / n.mass;
}

}  // namespace

void integrate_euler(TetMesh& mesh, double dt) {
    for (Node& n : mesh.nodes) {
        if (!n.alive) continue;
        if (n.fixed) {
            n.velocity = {};
            continue;
        }
        const Vec3 a = acceleration(n);
        const Vec3 v_old = n.velocity;
        n.velocity += a * dt;
        n.world_pos += v_old * dt;
    }
}

void integrate_taylor2(TetMesh& mesh, double dt) {
    for (Node& n : mesh.nodes) {
        if (!n.alive) continue;
        if (n.fixed) {
            n.velocity = {};
            continue;
        }
        const Vec3 a = acceleration(n);
        n.world_pos += n.velocity * dt + a * (0.5 * dt * dt);
        n.velocity += a * dt;
    }
}

EnergyReport energies(const TetMesh& mesh, double time) {
    EnergyReport r;
    r.time = time;
    for (const Node& n : mesh.nodes)
        if (n.alive) r.kinetic += 0.5 * n.mass * norm2(n.velocity);
    for (const Element& e : mesh.elements) {
        if (!e.alive) continue;
        const DeformationState ds = deformation_partials(e, mesh);
        const SymTensor3 eps = green_strain(ds);
        const SymTensor3 nu = strain_rate(ds);
        const StressState s = stress(eps, nu, mesh.materials[e.material]);
        r.elastic += potential_densities(eps, nu, s.elastic, s.viscous).elastic * e.volume;
    }
    r.node_count = mesh.live_node_count();
    r.element_count = mesh.live_element_count();
    r.fragment_count = mesh.fragments().count;
    return r;
}

double stable_dt_estimate(const TetMesh& mesh) {
    double dt = std::numeric_limits<double>::infinity();
    for (const Element& e : mesh.elements) {
        if (!e.alive) continue;
        const Material& m = mesh.materials[e.material];
        const double stiff = m.lambda + 2.0 * m.mu;
        if (!(stiff > 0.0)) continue;
        const double h = min_height(mesh.node(e.nodes[0]).material_pos,
                                    mesh.node(e.nodes[1]).material_pos,
                                    mesh.node(e.nodes[2]).material_pos,
                                    mesh.node(e.nodes[3]).material_pos);
        dt = std::min(dt, h * std::sqrt(m.rho / stiff));
    }
    return dt;
}

Simulation::Simulation(TetMesh mesh, const SimConfig& cfg, std::ostream* warnings)
    : mesh_(std::move(mesh)), cfg_(cfg), warnings_(warnings) {
    if (!(cfg_.dt > 0.0)) throw ConfigError("sim: dt must be > 0");
    if (!(cfg_.duration >= 0.0)) throw ConfigError("sim: duration must be >= 0");
    fragments_ = mesh_.fragments();
}

namespace {

// Non-finite state would otherwise surface as eigensolver failures deep in
// the force pass; report it as the divergence it is.
void check_finite(const TetMesh& mesh, std::int64_t step_index) {
    double worst = 0.0;
    NodeId worst_node = kInvalidId;
    bool bad = false;
    for (NodeId id = 0; id < static_cast<NodeId>(mesh.nodes.size()); ++id) {
        const Node& n = mesh.node(id);
        if (!n.alive) continue;
        if (!is_finite(n.world_pos) || !is_finite(n.velocity)) bad = true;
        const double mag = std::max(norm(n.world_pos), norm(n.velocity));
        if (!(mag <= worst)) {
            worst = mag;
            worst_node = id;
        }
    }
    if (bad)
        throw DivergedError("simulation diverged at step " + std::to_string(step_index) +
                            ", worst node " + std::to_string(worst_node));
}

}  // namespace

EnergyReport Simulation::step() {
    check_finite(mesh_, step_index_);
    try {
        return step_inner();
    } catch (const InvalidInputError& e) {
        // Overflowing stresses surface as non-finite kernel inputs.
        throw DivergedError("simulation diverged at step " + std::to_string(step_index_) +
                            ": " + e.what());
    }
}

EnergyReport Simulation::step_inner() {
    clear_step_state(mesh_);
    assemble(mesh_, {cfg_.gravity, cfg_.fracture.split_source});

    if (cfg_.collision.enabled) {
        if (cfg_.collision.ground_enabled) {
            const auto contacts = ground_forces(mesh_, cfg_.collision.ground,
                                                cfg_.collision.ground_stiffness,
                                                cfg_.collision.ground_damping);
            apply_contacts(mesh_, contacts);
        }
        if (bvh_dirty_ || step_index_ % 64 == 0) {
            bvh_.build(mesh_);
            bvh_dirty_ = false;
        } else {
            bvh_.refit(mesh_);
        }
        const auto pairs = bvh_.collect_pairs(mesh_, fragments_);
        if (!pairs.empty()) {
            const auto contacts =
                cfg_.collision.method == CollisionMethod::node_penetration
                    ? node_penetration_forces(mesh_, pairs, cfg_.collision.stiffness,
                                              cfg_.collision.damping)
                    : overlap_volume_forces(mesh_, pairs, cfg_.collision.volume_stiffness,
                                            cfg_.collision.stiffness, cfg_.collision.damping);
            apply_contacts(mesh_, contacts);
        }
    }

    if (cfg_.integrator == Integrator::euler) integrate_euler(mesh_, cfg_.dt);
    else integrate_taylor2(mesh_, cfg_.dt);

    last_events_.clear();
    if (cfg_.fracture.enabled &&
        (cfg_.fracture.stride <= 1 || step_index_ % cfg_.fracture.stride == 0)) {
        last_events_ = fracture_pass(mesh_, cfg_.fracture, warnings_);
        if (!last_events_.empty()) {
            bvh_dirty_ = true;  // leaf membership changed
            fragments_ = mesh_.fragments();
        }
    }

    ++step_index_;
    time_ += cfg_.dt;
    check_finite(mesh_, step_index_);
    return energy_report();
}

}  // namespace brittle
