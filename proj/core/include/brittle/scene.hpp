#pragma once

#include <string>
#include <vector>

#include "brittle/material.hpp"
#include "brittle/mesh.hpp"
#include "brittle/sim.hpp"

namespace brittle {

// Node constraint selector, evaluated on initial world positions.
struct FixedSelector {
    enum class Kind { none, axis_compare, box };
    Kind kind = Kind::none;
    int axis = 2;
    bool less = true;
    double value = 0.0;
    Vec3 lo, hi;

    bool matches(const Vec3& p) const {
        switch (kind) {
            case Kind::none: return false;
            case Kind::axis_compare: return less ? p[axis] < value : p[axis] > value;
            case Kind::box:
                return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
                       p.z >= lo.z && p.z <= hi.z;
        }
        return false;
    }
};

struct BodySpec {
    std::string mesh_path;  // resolved relative to the scene file
    Material material;
    Vec3 translate;
    Vec3 rotate_axis{0, 0, 1};
    double rotate_angle = 0.0;  // rad, about the origin
    Vec3 velocity;
    FixedSelector fixed;
};

struct OutputConfig {
    double frames_per_second = 60.0;
    bool dump_state = false;
    std::string csv_name = "energy.csv";
};

struct Scene {
    std::vector<BodySpec> bodies;
    SimConfig sim;
    OutputConfig io;
};

// Line-oriented "section.key = value" text; '#' comments; unknown keys are
// rejected.  Material values are validated and every referenced mesh file
// must exist.
Scene parse_scene(const std::string& path);

// Serialize with every key explicit; parse_scene(write_scene(s)) == s.
void write_scene(const std::string& path, const Scene& scene);

// Load every body, apply its transform / velocity / fixed selector, and merge
// into one mesh with per-body materials and lumped masses assembled.
TetMesh build_world(const Scene& scene);

}  // namespace brittle
