#include "brittle/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "brittle/error.hpp"

namespace brittle {

namespace {

// Sequential token reader that tracks line numbers and skips comments.
struct LineReader {
    std::ifstream in;
    std::string path;
    int line_number = 0;

    explicit LineReader(const std::string& p) : in(p), path(p) {
        if (!in) throw ValidationError("cannot open file: " + p);
    }

    // Next non-empty, non-comment line.
    bool next(std::string& out) {
        std::string raw;
        while (std::getline(in, raw)) {
            ++line_number;
            const auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            std::size_t start = raw.find_first_not_of(" \t\r");
            if (start == std::string::npos) continue;
            out = raw.substr(start);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(path, line_number, what);
    }

    std::string expect(const std::string& what) {
        std::string line;
        if (!next(line)) fail("unexpected end of file, expected " + what);
        return line;
    }
};

std::size_t parse_count(LineReader& r, const std::string& keyword) {
    std::istringstream ss(r.expect(keyword + " count"));
    std::string word;
    long long count = -1;
    if (!(ss >> word >> count) || word != keyword || count < 0)
        r.fail("expected '" + keyword + " N'");
    std::string extra;
    if (ss >> extra) r.fail("trailing tokens after '" + keyword + "'");
    return static_cast<std::size_t>(count);
}

void parse_nodes(LineReader& r, TetMesh& mesh, bool with_state) {
    const std::size_t n = parse_count(r, "nodes");
    for (std::size_t i = 0; i < n; ++i) {
        std::istringstream ss(r.expect("a node line"));
        Node node;
        if (with_state) {
            int fixed = 0;
            if (!(ss >> node.material_pos.x >> node.material_pos.y >> node.material_pos.z >>
                  node.world_pos.x >> node.world_pos.y >> node.world_pos.z >>
                  node.velocity.x >> node.velocity.y >> node.velocity.z >> fixed >> node.body))
                r.fail("malformed state node line");
            node.fixed = fixed != 0;
        } else {
            if (!(ss >> node.material_pos.x >> node.material_pos.y >> node.material_pos.z))
                r.fail("malformed node line, expected 3 reals");
            node.world_pos = node.material_pos;
        }
        std::string extra;
        if (ss >> extra) r.fail("trailing tokens on node line");
        if (!is_finite(node.material_pos)) r.fail("non-finite node coordinates");
        mesh.add_node(node);
    }
}

void parse_elems(LineReader& r, TetMesh& mesh, bool with_state) {
    const std::size_t m = parse_count(r, "elems");
    std::set<std::array<NodeId, 4>> seen;
    for (std::size_t i = 0; i < m; ++i) {
        std::istringstream ss(r.expect("an element line"));
        std::array<long long, 4> idx{};
        std::int32_t material = 0;
        if (!(ss >> idx[0] >> idx[1] >> idx[2] >> idx[3]))
            r.fail("malformed element line, expected 4 indices");
        if (with_state && !(ss >> material)) r.fail("missing material index");
        std::string extra;
        if (ss >> extra) r.fail("trailing tokens on element line");

        std::array<NodeId, 4> nodes;
        for (int k = 0; k < 4; ++k) {
            if (idx[k] < 0 || idx[k] >= static_cast<long long>(mesh.nodes.size()))
                r.fail("node index out of range: " + std::to_string(idx[k]));
            nodes[k] = static_cast<NodeId>(idx[k]);
        }
        std::array<NodeId, 4> key = nodes;
        std::sort(key.begin(), key.end());
        if (key[0] == key[1] || key[1] == key[2] || key[2] == key[3])
            r.fail("element repeats a node");
        if (!seen.insert(key).second)
            throw ValidationError(r.path + ": duplicate element " + std::to_string(i));

        const double vol = element_volume(mesh.node(nodes[0]).material_pos,
                                          mesh.node(nodes[1]).material_pos,
                                          mesh.node(nodes[2]).material_pos,
                                          mesh.node(nodes[3]).material_pos);
        if (vol <= 0.0)
            throw ValidationError(r.path + ": element " + std::to_string(i) +
                                  " has non-positive orientation (volume " +
                                  std::to_string(vol) + ")");
        try {
            mesh.add_element(nodes, material);
        } catch (const DegenerateElementError& err) {
            throw ValidationError(r.path + ": element " + std::to_string(i) + ": " + err.what());
        }
    }
}

}  // namespace

TetMesh parse_mesh(const std::string& path) {
    LineReader r(path);
    if (r.expect("header") != "tetmesh v1") r.fail("expected header 'tetmesh v1'");
    TetMesh mesh;
    parse_nodes(r, mesh, false);
    parse_elems(r, mesh, false);
    std::string extra;
    if (r.next(extra)) r.fail("trailing content after element list");
    mesh.validate_topology();
    return mesh;
}

namespace {

void write_reals(FILE* f, std::initializer_list<double> vals) {
    bool first = true;
    for (double v : vals) {
        std::fprintf(f, first ? "%.17g" : " %.17g", v);
        first = false;
    }
    std::fputc('\n', f);
}

struct FileHandle {
    FILE* f;
    explicit FileHandle(const std::string& path) : f(std::fopen(path.c_str(), "w")) {
        if (!f) throw ValidationError("cannot open for writing: " + path);
    }
    ~FileHandle() {
        if (f) std::fclose(f);
    }
};

// Dead slots are skipped, so ids are compacted on write.
std::vector<NodeId> node_remap(const TetMesh& mesh) {
    std::vector<NodeId> remap(mesh.nodes.size(), kInvalidId);
    NodeId next = 0;
    for (NodeId i = 0; i < static_cast<NodeId>(mesh.nodes.size()); ++i)
        if (mesh.nodes[i].alive) remap[i] = next++;
    return remap;
}

}  // namespace

void write_mesh(const std::string& path, const TetMesh& mesh) {
    FileHandle fh(path);
    const std::vector<NodeId> remap = node_remap(mesh);
    std::fprintf(fh.f, "tetmesh v1\n");
    std::fprintf(fh.f, "nodes %zu\n", mesh.live_node_count());
    for (const Node& n : mesh.nodes)
        if (n.alive) write_reals(fh.f, {n.material_pos.x, n.material_pos.y, n.material_pos.z});
    std::fprintf(fh.f, "elems %zu\n", mesh.live_element_count());
    for (const Element& e : mesh.elements) {
        if (!e.alive) continue;
        std::fprintf(fh.f, "%d %d %d %d\n", remap[e.nodes[0]], remap[e.nodes[1]],
                     remap[e.nodes[2]], remap[e.nodes[3]]);
    }
}

void write_state(const std::string& path, const TetMesh& mesh, double time) {
    FileHandle fh(path);
    const std::vector<NodeId> remap = node_remap(mesh);
    std::fprintf(fh.f, "tetstate v1\n");
    std::fprintf(fh.f, "time %.17g\n", time);
    std::fprintf(fh.f, "nodes %zu\n", mesh.live_node_count());
    for (const Node& n : mesh.nodes) {
        if (!n.alive) continue;
        std::fprintf(fh.f, "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %d %d\n",
                     n.material_pos.x, n.material_pos.y, n.material_pos.z, n.world_pos.x,
                     n.world_pos.y, n.world_pos.z, n.velocity.x, n.velocity.y, n.velocity.z,
                     n.fixed ? 1 : 0, n.body);
    }
    std::fprintf(fh.f, "elems %zu\n", mesh.live_element_count());
    for (const Element& e : mesh.elements) {
        if (!e.alive) continue;
        std::fprintf(fh.f, "%d %d %d %d %d\n", remap[e.nodes[0]], remap[e.nodes[1]],
                     remap[e.nodes[2]], remap[e.nodes[3]], e.material);
    }
}

TetMesh parse_state(const std::string& path, double* time_out) {
    LineReader r(path);
    if (r.expect("header") != "tetstate v1") r.fail("expected header 'tetstate v1'");
    {
        std::istringstream ss(r.expect("time"));
        std::string word;
        double t = 0.0;
        if (!(ss >> word >> t) || word != "time") r.fail("expected 'time T'");
        if (time_out) *time_out = t;
    }
    TetMesh mesh;
    parse_nodes(r, mesh, true);
    parse_elems(r, mesh, true);
    std::string extra;
    if (r.next(extra)) r.fail("trailing content after element list");
    mesh.validate_topology();
    return mesh;
}

}  // namespace brittle
