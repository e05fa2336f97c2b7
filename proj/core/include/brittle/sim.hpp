#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "brittle/collision.hpp"
#include "brittle/fracture.hpp"
#include "brittle/mesh.hpp"

namespace brittle {

enum class Integrator {
    euler,    // v += a dt, then p += v_old dt
    taylor2,  // p += v dt + a dt^2 / 2, then v += a dt
};

struct SimConfig {
    double dt = 1e-4;       // s
    double duration = 1.0;  // s
    Integrator integrator = Integrator::taylor2;
    Vec3 gravity;
    FractureConfig fracture;
    CollisionConfig collision;
};

struct EnergyReport {
    double time = 0.0;
    double kinetic = 0.0;  // J
    double elastic = 0.0;  // J
    std::size_t node_count = 0;
    std::size_t element_count = 0;
    std::size_t fragment_count = 0;
};

// Explicit integrators over the current force accumulators.  Fixed nodes keep
// their position, with velocity zeroed.  Throws ConfigError on a zero-mass
// free node.
void integrate_euler(TetMesh& mesh, double dt);
void integrate_taylor2(TetMesh& mesh, double dt);

EnergyReport energies(const TetMesh& mesh, double time);

// dt heuristic: min over elements of height * sqrt(rho / (lambda + 2 mu)).
double stable_dt_estimate(const TetMesh& mesh);

// The per-step pipeline: assemble internal + external forces, integrate,
// fracture pass, cache upkeep.  Owns the broadphase tree and its rebuild
// cadence (refit per step, rebuild after remeshing or every 64 steps).
class Simulation {
  public:
    Simulation(TetMesh mesh, const SimConfig& cfg, std::ostream* warnings = nullptr);

    // Advance one dt.  Throws DivergedError (naming the step and the worst
    // node) when the state stops being finite.
    EnergyReport step();

    EnergyReport energy_report() const { return energies(mesh_, time_); }

    const TetMesh& mesh() const { return mesh_; }
    TetMesh& mesh() { return mesh_; }
    const SimConfig& config() const { return cfg_; }
    double time() const { return time_; }
    std::int64_t step_index() const { return step_index_; }
    const std::vector<FractureEvent>& last_events() const { return last_events_; }

  private:
    EnergyReport step_inner();

    TetMesh mesh_;
    SimConfig cfg_;
    std::ostream* warnings_;
    Bvh bvh_;
    Fragments fragments_;
    bool bvh_dirty_ = true;
    double time_ = 0.0;
    std::int64_t step_index_ = 0;
    std::vector<FractureEvent> last_events_;
};

}  // namespace brittle
