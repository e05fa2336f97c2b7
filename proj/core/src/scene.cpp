#include "brittle/scene.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "brittle/error.hpp"
#include "brittle/mesh_io.hpp"

namespace brittle {

namespace {

struct KeyValue {
    std::string value;
    int line = 0;
    bool used = false;
};

struct SceneText {
    std::string path;
    std::map<std::string, KeyValue> entries;

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        const auto it = entries.find(key);
        throw ParseError(path, it == entries.end() ? 0 : it->second.line, key + ": " + what);
    }

    bool has(const std::string& key) const { return entries.count(key) != 0; }

    std::string raw(const std::string& key, const std::string& fallback) {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        it->second.used = true;
        return it->second.value;
    }

    std::string require(const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end())
            throw ParseError(path, 0, "missing required key '" + key + "'");
        it->second.used = true;
        return it->second.value;
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        return parse_number(key, raw(key, ""));
    }

    double require_number(const std::string& key) { return parse_number(key, require(key)); }

    double parse_number(const std::string& key, const std::string& text) {
        std::istringstream ss(text);
        double v;
        std::string extra;
        if (!(ss >> v) || (ss >> extra)) fail(key, "expected one number, got '" + text + "'");
        return v;
    }

    Vec3 vec(const std::string& key, const Vec3& fallback) {
        if (!has(key)) return fallback;
        std::istringstream ss(raw(key, ""));
        Vec3 v;
        std::string extra;
        if (!(ss >> v.x >> v.y >> v.z) || (ss >> extra)) fail(key, "expected 3 numbers");
        return v;
    }

    bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const std::string v = raw(key, "");
        if (v == "true" || v == "1" || v == "on") return true;
        if (v == "false" || v == "0" || v == "off") return false;
        fail(key, "expected true/false");
    }
};

SceneText read_scene_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scene: " + path);
    SceneText text;
    text.path = path;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const auto eq = raw.find('=');
        if (eq == std::string::npos) {
            if (raw.find_first_not_of(" \t\r") != std::string::npos)
                throw ParseError(path, line, "expected 'key = value'");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(raw.substr(0, eq));
        const std::string value = trim(raw.substr(eq + 1));
        if (key.empty()) throw ParseError(path, line, "empty key");
        if (!text.entries.emplace(key, KeyValue{value, line, false}).second)
            throw ParseError(path, line, "duplicate key '" + key + "'");
    }
    return text;
}

FixedSelector parse_fixed(SceneText& text, const std::string& key) {
    FixedSelector sel;
    if (!text.has(key)) return sel;
    std::istringstream ss(text.raw(key, ""));
    std::string word;
    ss >> word;
    if (word == "none") return sel;
    if (word == "box") {
        sel.kind = FixedSelector::Kind::box;
        std::string extra;
        if (!(ss >> sel.lo.x >> sel.lo.y >> sel.lo.z >> sel.hi.x >> sel.hi.y >> sel.hi.z) ||
            (ss >> extra))
            text.fail(key, "expected 'box x0 y0 z0 x1 y1 z1'");
        return sel;
    }
    if (word == "x" || word == "y" || word == "z") {
        sel.kind = FixedSelector::Kind::axis_compare;
        sel.axis = word[0] - 'x';
        std::string op;
        std::string extra;
        if (!(ss >> op >> sel.value) || (ss >> extra) || (op != "<" && op != ">"))
            text.fail(key, "expected '<axis> < value' or '<axis> > value'");
        sel.less = op == "<";
        return sel;
    }
    text.fail(key, "expected none | box ... | x/y/z < value");
}

Material parse_material(SceneText& text, const std::string& prefix, const Material& base,
                        bool require_all) {
    Material m = base;
    auto field = [&](const std::string& name, double& slot) {
        const std::string key = prefix + "." + name;
        if (require_all) slot = text.require_number(key);
        else slot = text.number(key, slot);
    };
    field("lambda", m.lambda);
    field("mu", m.mu);
    field("phi", m.phi);
    field("psi", m.psi);
    field("rho", m.rho);
    field("tau", m.tau);
    return m;
}

}  // namespace

Scene parse_scene(const std::string& path) {
    SceneText text = read_scene_text(path);
    Scene scene;

    const Material base = parse_material(text, "material", Material{}, true);
    try {
        validate_material(base);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }

    scene.sim.dt = text.require_number("sim.dt");
    scene.sim.duration = text.require_number("sim.duration");
    if (!(scene.sim.dt > 0.0)) text.fail("sim.dt", "must be > 0");
    if (!(scene.sim.duration >= 0.0)) text.fail("sim.duration", "must be >= 0");
    const std::string integrator = text.raw("sim.integrator", "taylor2");
    if (integrator == "euler") scene.sim.integrator = Integrator::euler;
    else if (integrator == "taylor2") scene.sim.integrator = Integrator::taylor2;
    else text.fail("sim.integrator", "expected euler or taylor2");
    scene.sim.gravity = text.vec("sim.gravity", {});

    scene.sim.fracture.enabled = text.flag("fracture.enabled", true);
    scene.sim.fracture.max_splits_per_step =
        static_cast<int>(text.number("fracture.max_splits_per_step", 32));
    scene.sim.fracture.stride = static_cast<int>(text.number("fracture.stride", 1));
    scene.sim.fracture.snap.distance = text.number("fracture.snap_distance", 0.005);
    scene.sim.fracture.snap.angle = text.number("fracture.snap_angle", 0.1);
    scene.sim.fracture.snap.volume_floor = text.number("fracture.volume_floor", kVolumeFloor);
    if (!(scene.sim.fracture.snap.volume_floor >= 0.0))
        text.fail("fracture.volume_floor", "must be >= 0");
    scene.sim.fracture.split_source = text.flag("fracture.elastic_only_split", false)
                                          ? SplitSource::elastic_stress
                                          : SplitSource::total_stress;
    if (scene.sim.fracture.max_splits_per_step < 0)
        text.fail("fracture.max_splits_per_step", "must be >= 0");
    if (scene.sim.fracture.stride < 1) text.fail("fracture.stride", "must be >= 1");
    if (!(scene.sim.fracture.snap.distance >= 0.0))
        text.fail("fracture.snap_distance", "must be >= 0");
    if (!(scene.sim.fracture.snap.angle >= 0.0)) text.fail("fracture.snap_angle", "must be >= 0");

    scene.sim.collision.enabled = text.flag("collision.enabled", true);
    const std::string method = text.raw("collision.method", "node_penetration");
    if (method == "node_penetration")
        scene.sim.collision.method = CollisionMethod::node_penetration;
    else if (method == "overlap_volume")
        scene.sim.collision.method = CollisionMethod::overlap_volume;
    else text.fail("collision.method", "expected node_penetration or overlap_volume");
    scene.sim.collision.stiffness = text.number("collision.stiffness", 1e6);
    scene.sim.collision.volume_stiffness = text.number("collision.volume_stiffness", 1e10);
    scene.sim.collision.damping = text.number("collision.damping", 0.0);
    scene.sim.collision.ground_enabled = text.flag("collision.ground_enabled", false);
    scene.sim.collision.ground.point = {0, 0, text.number("collision.ground_height", 0.0)};
    scene.sim.collision.ground.normal =
        normalized(text.vec("collision.ground_normal", {0, 0, 1}));
    scene.sim.collision.ground_stiffness = text.number("collision.ground_stiffness", 1e6);
    scene.sim.collision.ground_damping = text.number("collision.ground_damping", 0.0);

    scene.io.frames_per_second = text.number("io.frames_per_second", 60.0);
    if (!(scene.io.frames_per_second > 0.0)) text.fail("io.frames_per_second", "must be > 0");
    scene.io.dump_state = text.flag("io.dump_state", false);
    scene.io.csv_name = text.raw("io.csv", "energy.csv");

    const std::filesystem::path scene_dir = std::filesystem::path(path).parent_path();
    for (int i = 0;; ++i) {
        const std::string prefix = "body" + std::to_string(i);
        if (!text.has(prefix + ".mesh")) break;
        BodySpec body;
        const std::string mesh_rel = text.require(prefix + ".mesh");
        body.mesh_path = (scene_dir / mesh_rel).string();
        if (!std::filesystem::exists(body.mesh_path))
            text.fail(prefix + ".mesh", "mesh file not found: " + body.mesh_path);
        body.material = parse_material(text, prefix, base, false);
        try {
            validate_material(body.material);
        } catch (const ValidationError& e) {
            throw ValidationError(path + ": " + prefix + ": " + e.what());
        }
        body.translate = text.vec(prefix + ".translate", {});
        if (text.has(prefix + ".rotate")) {
            std::istringstream ss(text.raw(prefix + ".rotate", ""));
            std::string extra;
            if (!(ss >> body.rotate_axis.x >> body.rotate_axis.y >> body.rotate_axis.z >>
                  body.rotate_angle) ||
                (ss >> extra))
                text.fail(prefix + ".rotate", "expected 'ax ay az angle_rad'");
            const double len = norm(body.rotate_axis);
            if (!(len > 0.0)) text.fail(prefix + ".rotate", "zero axis");
            body.rotate_axis = body.rotate_axis / len;
        }
        body.velocity = text.vec(prefix + ".velocity", {});
        body.fixed = parse_fixed(text, prefix + ".fixed");
        scene.bodies.push_back(std::move(body));
    }
    if (scene.bodies.empty())
        throw ValidationError(path + ": a scene needs at least one body (body0.mesh = ...)");

    for (const auto& [key, kv] : text.entries)
        if (!kv.used) throw ParseError(path, kv.line, "unknown key '" + key + "'");
    return scene;
}

void write_scene(const std::string& path, const Scene& scene) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ValidationError("cannot write scene: " + path);
    auto num = [&](const char* key, double v) { std::fprintf(f, "%s = %.17g\n", key, v); };
    auto vec = [&](const char* key, const Vec3& v) {
        std::fprintf(f, "%s = %.17g %.17g %.17g\n", key, v.x, v.y, v.z);
    };
    auto flag = [&](const char* key, bool v) {
        std::fprintf(f, "%s = %s\n", key, v ? "true" : "false");
    };

    const Material& m = scene.bodies.front().material;  // base defaults come from body 0
    num("material.lambda", m.lambda);
    num("material.mu", m.mu);
    num("material.phi", m.phi);
    num("material.psi", m.psi);
    num("material.rho", m.rho);
    num("material.tau", m.tau);

    num("sim.dt", scene.sim.dt);
    num("sim.duration", scene.sim.duration);
    std::fprintf(f, "sim.integrator = %s\n",
                 scene.sim.integrator == Integrator::euler ? "euler" : "taylor2");
    vec("sim.gravity", scene.sim.gravity);

    flag("fracture.enabled", scene.sim.fracture.enabled);
    num("fracture.max_splits_per_step", scene.sim.fracture.max_splits_per_step);
    num("fracture.stride", scene.sim.fracture.stride);
    num("fracture.snap_distance", scene.sim.fracture.snap.distance);
    num("fracture.snap_angle", scene.sim.fracture.snap.angle);
    num("fracture.volume_floor", scene.sim.fracture.snap.volume_floor);
    flag("fracture.elastic_only_split",
         scene.sim.fracture.split_source == SplitSource::elastic_stress);

    flag("collision.enabled", scene.sim.collision.enabled);
    std::fprintf(f, "collision.method = %s\n",
                 scene.sim.collision.method == CollisionMethod::node_penetration
                     ? "node_penetration"
                     : "overlap_volume");
    num("collision.stiffness", scene.sim.collision.stiffness);
    num("collision.volume_stiffness", scene.sim.collision.volume_stiffness);
    num("collision.damping", scene.sim.collision.damping);
    flag("collision.ground_enabled", scene.sim.collision.ground_enabled);
    num("collision.ground_height", scene.sim.collision.ground.point.z);
    vec("collision.ground_normal", scene.sim.collision.ground.normal);
    num("collision.ground_stiffness", scene.sim.collision.ground_stiffness);
    num("collision.ground_damping", scene.sim.collision.ground_damping);

    num("io.frames_per_second", scene.io.frames_per_second);
    flag("io.dump_state", scene.io.dump_state);
    std::fprintf(f, "io.csv = %s\n", scene.io.csv_name.c_str());

    for (std::size_t i = 0; i < scene.bodies.size(); ++i) {
        const BodySpec& b = scene.bodies[i];
        const std::string p = "body" + std::to_string(i);
        // Paths were resolved at parse time; absolute paths re-resolve to
        // themselves regardless of where this file lands.
        std::fprintf(f, "%s.mesh = %s\n", p.c_str(),
                     std::filesystem::absolute(b.mesh_path).string().c_str());
        num((p + ".lambda").c_str(), b.material.lambda);
        num((p + ".mu").c_str(), b.material.mu);
        num((p + ".phi").c_str(), b.material.phi);
        num((p + ".psi").c_str(), b.material.psi);
        num((p + ".rho").c_str(), b.material.rho);
        num((p + ".tau").c_str(), b.material.tau);
        vec((p + ".translate").c_str(), b.translate);
        std::fprintf(f, "%s.rotate = %.17g %.17g %.17g %.17g\n", p.c_str(), b.rotate_axis.x,
                     b.rotate_axis.y, b.rotate_axis.z, b.rotate_angle);
        vec((p + ".velocity").c_str(), b.velocity);
        switch (b.fixed.kind) {
            case FixedSelector::Kind::none:
                std::fprintf(f, "%s.fixed = none\n", p.c_str());
                break;
            case FixedSelector::Kind::axis_compare:
                std::fprintf(f, "%s.fixed = %c %c %.17g\n", p.c_str(), "xyz"[b.fixed.axis],
                             b.fixed.less ? '<' : '>', b.fixed.value);
                break;
            case FixedSelector::Kind::box:
                std::fprintf(f, "%s.fixed = box %.17g %.17g %.17g %.17g %.17g %.17g\n",
                             p.c_str(), b.fixed.lo.x, b.fixed.lo.y, b.fixed.lo.z, b.fixed.hi.x,
                             b.fixed.hi.y, b.fixed.hi.z);
                break;
        }
    }
    std::fclose(f);
}

TetMesh build_world(const Scene& scene) {
    TetMesh world;
    for (std::size_t b = 0; b < scene.bodies.size(); ++b) {
        const BodySpec& spec = scene.bodies[b];
        TetMesh part = parse_mesh(spec.mesh_path);
        const Mat3 rot = axis_angle_rotation(spec.rotate_axis, spec.rotate_angle);

        world.materials.push_back(spec.material);
        std::vector<NodeId> remap(part.nodes.size(), kInvalidId);
        for (NodeId i = 0; i < static_cast<NodeId>(part.nodes.size()); ++i) {
            const Node& src = part.nodes[i];
            if (!src.alive) continue;
            Node n;
            n.material_pos = src.material_pos;
            n.world_pos = rot * src.material_pos + spec.translate;
            n.velocity = spec.velocity;
            n.body = static_cast<std::int32_t>(b);
            n.fixed = spec.fixed.matches(n.world_pos);
            remap[i] = world.add_node(n);
        }
        for (const Element& e : part.elements) {
            if (!e.alive) continue;
            world.add_element({remap[e.nodes[0]], remap[e.nodes[1]], remap[e.nodes[2]],
                               remap[e.nodes[3]]},
                              static_cast<std::int32_t>(b));
        }
    }
    world.assemble_masses();
    return world;
}

}  // namespace brittle
