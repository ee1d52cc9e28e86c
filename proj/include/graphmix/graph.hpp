#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <mutex>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphmix/rng.hpp"

namespace graphmix {

// dist_G(u,v) = +infinity for disconnected pairs. Any comparison dist >= d is
// true for the sentinel; use dist_at_least instead of raw >=.
inline constexpr int kUnreachable = -1;

inline bool dist_at_least(int dist, int d) { return dist == kUnreachable || dist >= d; }

// Undirected loopless graph on dense vertex ids 0..n-1.
// Invariants: sorted duplicate-free adjacency, symmetric, no self-loops.
struct Graph {
    int n = 0;
    std::vector<std::vector<int>> adjacency;
    std::string label;

    int degree(int v) const { return int(adjacency[v].size()); }

    int max_degree() const {
        int best = 0;
        for (const auto &row : adjacency) best = std::max<int>(best, int(row.size()));
        return best;
    }

    long long edge_count() const {
        long long twice = 0;
        for (const auto &row : adjacency) twice += static_cast<long long>(row.size());
        return twice / 2;
    }

    bool has_edge(int u, int v) const {
        const auto &row = adjacency[u];
        return std::binary_search(row.begin(), row.end(), v);
    }

    // Builds from an edge list: validates ranges, rejects self-loops,
    // symmetrizes and deduplicates.
    static Graph from_edges(int n, const std::vector<std::pair<int, int>> &edges,
                            std::string label = {}) {
        if (n < 0) throw std::invalid_argument("graph order must be non-negative");
        Graph g;
        g.n = n;
        g.label = std::move(label);
        g.adjacency.assign(std::size_t(n), {});
        for (const auto &[u, v] : edges) {
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw std::invalid_argument("edge endpoint out of range");
            if (u == v) throw std::invalid_argument("self-loops are not allowed");
            g.adjacency[std::size_t(u)].push_back(v);
            g.adjacency[std::size_t(v)].push_back(u);
        }
        for (auto &row : g.adjacency) {
            std::sort(row.begin(), row.end());
            row.erase(std::unique(row.begin(), row.end()), row.end());
        }
        return g;
    }

    // Full invariant audit, used by tests and the loader.
    void check_invariants() const {
        if (int(adjacency.size()) != n) throw std::logic_error("adjacency size mismatch");
        for (int v = 0; v < n; ++v) {
            const auto &row = adjacency[std::size_t(v)];
            if (!std::is_sorted(row.begin(), row.end()))
                throw std::logic_error("adjacency row not sorted");
            if (std::adjacent_find(row.begin(), row.end()) != row.end())
                throw std::logic_error("duplicate neighbor");
            for (int u : row) {
                if (u < 0 || u >= n) throw std::logic_error("neighbor out of range");
                if (u == v) throw std::logic_error("self-loop");
                if (!has_edge(u, v)) throw std::logic_error("asymmetric edge");
            }
        }
    }
};

// BFS distances from one source; kUnreachable marks other components.
struct DistanceRow {
    int source = 0;
    std::vector<int> dist;

    bool reachable(int v) const { return dist[std::size_t(v)] != kUnreachable; }
    bool at_least(int v, int d) const { return dist_at_least(dist[std::size_t(v)], d); }
};

inline DistanceRow distances_from(const Graph &g, int source) {
    if (source < 0 || source >= g.n) throw std::invalid_argument("source vertex out of range");
    DistanceRow row;
    row.source = source;
    row.dist.assign(std::size_t(g.n), kUnreachable);
    row.dist[std::size_t(source)] = 0;
    std::queue<int> queue;
    queue.push(source);
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop();
        const int du = row.dist[std::size_t(u)];
        for (int v : g.adjacency[std::size_t(u)]) {
            if (row.dist[std::size_t(v)] == kUnreachable) {
                row.dist[std::size_t(v)] = du + 1;
                queue.push(v);
            }
        }
    }
    return row;
}

// Generator descriptor. Also produced from CLI shorthand such as "path:10",
// "torus:20x20", "grid:3x4", "cliques:5,3", "er:10:0.25:7".
struct GraphSpec {
    enum class Kind { Path, Cycle, Grid, CliqueUnion, ErdosRenyi };

    Kind kind = Kind::Path;
    int n = 1;
    int rows = 1, cols = 1;
    bool wrap = false;
    std::vector<int> sizes;
    double p = 0.0;
    std::uint64_t seed = 0;

    static GraphSpec path(int n) { return {Kind::Path, n, 1, 1, false, {}, 0.0, 0}; }
    static GraphSpec cycle(int n) { return {Kind::Cycle, n, 1, 1, false, {}, 0.0, 0}; }
    static GraphSpec grid(int rows, int cols, bool wrap = false) {
        return {Kind::Grid, rows * cols, rows, cols, wrap, {}, 0.0, 0};
    }
    static GraphSpec torus(int rows, int cols) { return grid(rows, cols, true); }
    static GraphSpec clique_union(std::vector<int> sizes) {
        GraphSpec s;
        s.kind = Kind::CliqueUnion;
        s.sizes = std::move(sizes);
        s.n = 0;
        for (int k : s.sizes) s.n += k;
        return s;
    }
    static GraphSpec erdos_renyi(int n, double p, std::uint64_t seed) {
        GraphSpec s;
        s.kind = Kind::ErdosRenyi;
        s.n = n;
        s.p = p;
        s.seed = seed;
        return s;
    }

    std::string shorthand() const {
        std::ostringstream out;
        switch (kind) {
            case Kind::Path: out << "path:" << n; break;
            case Kind::Cycle: out << "cycle:" << n; break;
            case Kind::Grid:
                out << (wrap ? "torus:" : "grid:") << rows << "x" << cols;
                break;
            case Kind::CliqueUnion:
                out << "cliques:";
                for (std::size_t i = 0; i < sizes.size(); ++i)
                    out << (i ? "," : "") << sizes[i];
                break;
            case Kind::ErdosRenyi: out << "er:" << n << ":" << p << ":" << seed; break;
        }
        return out.str();
    }

    static GraphSpec from_shorthand(const std::string &text);
};

inline GraphSpec GraphSpec::from_shorthand(const std::string &text) {
    const auto bad = [&]() -> std::invalid_argument {
        return std::invalid_argument("unrecognized graph shorthand: \"" + text + "\"");
    };
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw bad();
    const std::string kind = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);
    try {
        if (kind == "path") return path(std::stoi(rest));
        if (kind == "cycle") return cycle(std::stoi(rest));
        if (kind == "grid" || kind == "torus") {
            const auto x = rest.find('x');
            if (x == std::string::npos) throw bad();
            return grid(std::stoi(rest.substr(0, x)), std::stoi(rest.substr(x + 1)),
                        kind == "torus");
        }
        if (kind == "cliques") {
            std::vector<int> sizes;
            std::stringstream ss(rest);
            std::string item;
            while (std::getline(ss, item, ',')) sizes.push_back(std::stoi(item));
            if (sizes.empty()) throw bad();
            return clique_union(std::move(sizes));
        }
        if (kind == "edgeless") return erdos_renyi(std::stoi(rest), 0.0, 0);
        if (kind == "er") {
            std::stringstream ss(rest);
            std::string a, b, c;
            if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':')) throw bad();
            std::uint64_t seed = 0;
            if (std::getline(ss, c, ':')) seed = std::stoull(c);
            return erdos_renyi(std::stoi(a), std::stod(b), seed);
        }
    } catch (const std::invalid_argument &) {
        throw bad();
    } catch (const std::out_of_range &) {
        throw bad();
    }
    throw bad();
}

inline Graph generate_graph(const GraphSpec &spec) {
    std::vector<std::pair<int, int>> edges;
    switch (spec.kind) {
        case GraphSpec::Kind::Path: {
            if (spec.n < 1) throw std::invalid_argument("path requires n >= 1");
            for (int i = 0; i + 1 < spec.n; ++i) edges.emplace_back(i, i + 1);
            return Graph::from_edges(spec.n, edges, spec.shorthand());
        }
        case GraphSpec::Kind::Cycle: {
            if (spec.n < 1) throw std::invalid_argument("cycle requires n >= 1");
            for (int i = 0; i < spec.n; ++i) {
                const int j = (i + 1) % spec.n;
                if (i != j) edges.emplace_back(i, j);
            }
            return Graph::from_edges(spec.n, edges, spec.shorthand());
        }
        case GraphSpec::Kind::Grid: {
            if (spec.rows < 1 || spec.cols < 1)
                throw std::invalid_argument("grid requires rows, cols >= 1");
            const int rows = spec.rows, cols = spec.cols;
            const auto id = [cols](int r, int c) { return r * cols + c; };
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) {
                    if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
                    else if (spec.wrap && cols > 1) edges.emplace_back(id(r, c), id(r, 0));
                    if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
                    else if (spec.wrap && rows > 1) edges.emplace_back(id(r, c), id(0, c));
                }
            }
            return Graph::from_edges(rows * cols, edges, spec.shorthand());
        }
        case GraphSpec::Kind::CliqueUnion: {
            int n = 0;
            for (int k : spec.sizes) {
                if (k < 1) throw std::invalid_argument("clique sizes must be >= 1");
                n += k;
            }
            if (spec.sizes.empty()) throw std::invalid_argument("clique_union requires sizes");
            int base = 0;
            for (int k : spec.sizes) {
                for (int i = 0; i < k; ++i)
                    for (int j = i + 1; j < k; ++j) edges.emplace_back(base + i, base + j);
                base += k;
            }
            return Graph::from_edges(n, edges, spec.shorthand());
        }
        case GraphSpec::Kind::ErdosRenyi: {
            if (spec.n < 1) throw std::invalid_argument("erdos_renyi requires n >= 1");
            if (!(spec.p >= 0.0 && spec.p <= 1.0))
                throw std::invalid_argument("erdos_renyi requires p in [0,1]");
            // Per-pair coin keyed by (seed, u, v): order-independent and
            // reproducible regardless of how the graph is assembled.
            for (int u = 0; u < spec.n; ++u)
                for (int v = u + 1; v < spec.n; ++v)
                    if (uniform01_at(spec.seed, StreamTag::kEdgeCoin, std::uint64_t(u),
                                     std::uint64_t(v)) < spec.p)
                        edges.emplace_back(u, v);
            return Graph::from_edges(spec.n, edges, spec.shorthand());
        }
    }
    throw std::invalid_argument("unknown graph spec kind");
}

// Edge-list document: first line "n m", then m lines "u v". Duplicate edges
// are tolerated and deduplicated; self-loops and bad indices are hard errors
// that name the offending line.
inline Graph load_graph(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    const auto parse_error = [&](const std::string &why) -> std::runtime_error {
        return std::runtime_error("edge-list parse error at line " + std::to_string(line_no) +
                                  ": " + why);
    };

    if (!std::getline(in, line)) {
        line_no = 1;
        throw parse_error("missing header");
    }
    line_no = 1;
    long long n = 0, m = 0;
    {
        std::istringstream ls(line);
        std::string extra;
        if (!(ls >> n >> m) || (ls >> extra)) throw parse_error("expected \"n m\"");
        if (n < 0 || m < 0) throw parse_error("negative count");
    }
    std::vector<std::pair<int, int>> edges;
    edges.reserve(std::size_t(m));
    for (long long e = 0; e < m; ++e) {
        if (!std::getline(in, line)) {
            ++line_no;
            throw parse_error("expected " + std::to_string(m) + " edges, got " +
                              std::to_string(e));
        }
        ++line_no;
        std::istringstream ls(line);
        long long u = 0, v = 0;
        std::string extra;
        if (!(ls >> u >> v) || (ls >> extra)) throw parse_error("expected \"u v\"");
        if (u < 0 || u >= n || v < 0 || v >= n) throw parse_error("vertex index out of range");
        if (u == v) throw parse_error("self-loop");
        edges.emplace_back(int(u), int(v));
    }
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string extra;
        if (ls >> extra) throw parse_error("trailing content after edge list");
    }
    return Graph::from_edges(int(n), edges);
}

inline std::string to_edge_list(const Graph &g) {
    std::ostringstream out;
    out << g.n << " " << g.edge_count() << "\n";
    for (int u = 0; u < g.n; ++u)
        for (int v : g.adjacency[std::size_t(u)])
            if (u < v) out << u << " " << v << "\n";
    return out.str();
}

// G^p: same vertices, edge {u,v} iff 1 <= dist_G(u,v) <= p.
// BFS is truncated at depth p.
inline Graph power_graph(const Graph &g, int p) {
    if (p < 1) throw std::invalid_argument("power graph requires p >= 1");
    std::vector<std::pair<int, int>> edges;
    std::vector<int> depth(std::size_t(g.n), -1);
    std::vector<int> touched;
    for (int s = 0; s < g.n; ++s) {
        depth[std::size_t(s)] = 0;
        touched.assign(1, s);
        std::queue<int> queue;
        queue.push(s);
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop();
            const int du = depth[std::size_t(u)];
            if (du == p) continue;
            for (int v : g.adjacency[std::size_t(u)]) {
                if (depth[std::size_t(v)] == -1) {
                    depth[std::size_t(v)] = du + 1;
                    touched.push_back(v);
                    queue.push(v);
                }
            }
        }
        for (int v : touched)
            if (v > s) edges.emplace_back(s, v);
        for (int v : touched) depth[std::size_t(v)] = -1;
    }
    Graph out = Graph::from_edges(g.n, edges, g.label);
    return out;
}

// Lazy per-source BFS rows, safe for concurrent shared reads.
class DistanceCache {
  public:
    explicit DistanceCache(const Graph &g) : g_(&g), rows_(std::size_t(g.n)) {}

    std::shared_ptr<const DistanceRow> row(int source) const {
        if (source < 0 || source >= g_->n)
            throw std::invalid_argument("source vertex out of range");
        std::lock_guard<std::mutex> lock(mutex_);
        auto &slot = rows_[std::size_t(source)];
        if (!slot) slot = std::make_shared<DistanceRow>(distances_from(*g_, source));
        return slot;
    }

    int distance(int u, int v) const { return row(u)->dist[std::size_t(v)]; }

    const Graph &graph() const { return *g_; }

  private:
    const Graph *g_;
    mutable std::mutex mutex_;
    mutable std::vector<std::shared_ptr<const DistanceRow>> rows_;
};

inline constexpr int kAllPairsVertexLimit = 20000;

// O(n^2) memory; refused at scales where that stops being a desk job.
inline std::vector<std::vector<int>> all_pairs_distances(const Graph &g) {
    if (g.n > kAllPairsVertexLimit)
        throw std::invalid_argument("all-pairs distances refused above " +
                                    std::to_string(kAllPairsVertexLimit) + " vertices");
    std::vector<std::vector<int>> out;
    out.reserve(std::size_t(g.n));
    for (int v = 0; v < g.n; ++v) out.push_back(distances_from(g, v).dist);
    return out;
}

}  // namespace graphmix
