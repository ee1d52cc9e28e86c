#include <catch2/catch_amalgamated.hpp>

#include "graphmix/graph.hpp"
#include "graphmix/rng.hpp"

using namespace graphmix;

TEST_CASE("philox 4x32-10 known-answer vector") {
    // Random123 reference: counter (0,0,0,0), key (0,0).
    const auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    REQUIRE(out[0] == 0x6627e8d5u);
    REQUIRE(out[1] == 0xe169c58du);
    REQUIRE(out[2] == 0xbc57ac4cu);
    REQUIRE(out[3] == 0x9b00dbd8u);
}

TEST_CASE("counter streams are reproducible and tag-separated") {
    CounterStream a(42, StreamTag::kFieldNoise, 7, 3);
    CounterStream b(42, StreamTag::kFieldNoise, 7, 3);
    for (int i = 0; i < 16; ++i) REQUIRE(a.next_u64() == b.next_u64());

    CounterStream c(42, StreamTag::kGame, 7, 3);
    CounterStream d(42, StreamTag::kFieldNoise, 7, 3);
    bool all_equal = true;
    for (int i = 0; i < 16; ++i) all_equal = all_equal && (c.next_u64() == d.next_u64());
    REQUIRE_FALSE(all_equal);

    CounterStream u(9, StreamTag::kTest, 0, 0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.next_double();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
    }
}

TEST_CASE("path generator") {
    const Graph g = generate_graph(GraphSpec::path(4));
    g.check_invariants();
    REQUIRE(g.n == 4);
    REQUIRE(g.edge_count() == 3);
    REQUIRE(g.has_edge(0, 1));
    REQUIRE(g.has_edge(1, 2));
    REQUIRE(g.has_edge(2, 3));
    REQUIRE_FALSE(g.has_edge(0, 2));

    const Graph single = generate_graph(GraphSpec::path(1));
    REQUIRE(single.n == 1);
    REQUIRE(single.edge_count() == 0);
}

TEST_CASE("torus 3x3 is 4-regular with 18 edges") {
    const Graph g = generate_graph(GraphSpec::grid(3, 3, true));
    g.check_invariants();
    REQUIRE(g.n == 9);
    REQUIRE(g.edge_count() == 18);
    for (int v = 0; v < g.n; ++v) REQUIRE(g.degree(v) == 4);
}

TEST_CASE("erdos renyi p=0 is edgeless and generation is deterministic") {
    const Graph empty = generate_graph(GraphSpec::erdos_renyi(10, 0.0, 7));
    REQUIRE(empty.n == 10);
    REQUIRE(empty.edge_count() == 0);

    const Graph a = generate_graph(GraphSpec::erdos_renyi(40, 0.3, 123));
    const Graph b = generate_graph(GraphSpec::erdos_renyi(40, 0.3, 123));
    REQUIRE(a.adjacency == b.adjacency);
    const Graph c = generate_graph(GraphSpec::erdos_renyi(40, 0.3, 124));
    REQUIRE(a.adjacency != c.adjacency);

    const Graph full = generate_graph(GraphSpec::erdos_renyi(12, 1.0, 5));
    REQUIRE(full.edge_count() == 66);
}

TEST_CASE("generator parameter errors") {
    REQUIRE_THROWS_AS(generate_graph(GraphSpec::path(0)), std::invalid_argument);
    REQUIRE_THROWS_AS(generate_graph(GraphSpec::erdos_renyi(5, 1.5, 0)), std::invalid_argument);
    REQUIRE_THROWS_AS(generate_graph(GraphSpec::erdos_renyi(5, -0.1, 0)), std::invalid_argument);
    REQUIRE_THROWS_AS(generate_graph(GraphSpec::clique_union({3, 0})), std::invalid_argument);
}

TEST_CASE("edge-list loader") {
    const Graph path3 = load_graph("3 2\n0 1\n1 2\n");
    REQUIRE(path3.adjacency == generate_graph(GraphSpec::path(3)).adjacency);

    const Graph edgeless = load_graph("2 0\n");
    REQUIRE(edgeless.n == 2);
    REQUIRE(edgeless.edge_count() == 0);

    // Duplicates tolerated, symmetrized.
    const Graph dup = load_graph("3 3\n0 1\n1 0\n1 2\n");
    REQUIRE(dup.edge_count() == 2);

    REQUIRE_THROWS_WITH(load_graph("2 1\n0 0\n"), Catch::Matchers::ContainsSubstring("line 2"));
    REQUIRE_THROWS_WITH(load_graph("2 1\n0 5\n"), Catch::Matchers::ContainsSubstring("line 2"));
    REQUIRE_THROWS_WITH(load_graph("2 1\nzap\n"), Catch::Matchers::ContainsSubstring("line 2"));
    REQUIRE_THROWS_AS(load_graph("junk\n"), std::runtime_error);
    REQUIRE_THROWS_AS(load_graph("3 4\n0 1\n"), std::runtime_error);
}

TEST_CASE("edge-list round trip") {
    const Graph g = generate_graph(GraphSpec::erdos_renyi(25, 0.2, 9));
    const Graph reloaded = load_graph(to_edge_list(g));
    REQUIRE(reloaded.adjacency == g.adjacency);
}

TEST_CASE("BFS distances") {
    const Graph cycle6 = generate_graph(GraphSpec::cycle(6));
    const DistanceRow row = distances_from(cycle6, 0);
    REQUIRE(row.dist == std::vector<int>{0, 1, 2, 3, 2, 1});

    const Graph path4 = generate_graph(GraphSpec::path(4));
    REQUIRE(distances_from(path4, 0).dist == std::vector<int>{0, 1, 2, 3});

    const Graph cliques = generate_graph(GraphSpec::clique_union({2, 2}));
    const DistanceRow split = distances_from(cliques, 0);
    REQUIRE(split.dist == std::vector<int>{0, 1, kUnreachable, kUnreachable});
    REQUIRE_FALSE(split.reachable(2));
    REQUIRE(split.at_least(2, 1000));  // unreachable compares as infinite

    REQUIRE_THROWS_AS(distances_from(path4, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(distances_from(path4, -1), std::invalid_argument);
}

TEST_CASE("distance symmetry on random graphs") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const int n = 50 + int(seed) * 50;
        const Graph g = generate_graph(GraphSpec::erdos_renyi(n, 0.03, seed));
        const auto all = all_pairs_distances(g);
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) REQUIRE(all[u][v] == all[v][u]);
    }
}

TEST_CASE("power graphs") {
    const Graph path4 = generate_graph(GraphSpec::path(4));
    const Graph p1 = power_graph(path4, 1);
    REQUIRE(p1.adjacency == path4.adjacency);

    const Graph p2 = power_graph(path4, 2);
    REQUIRE(p2.edge_count() == 5);
    REQUIRE(p2.has_edge(0, 2));
    REQUIRE(p2.has_edge(1, 3));
    REQUIRE_FALSE(p2.has_edge(0, 3));

    const Graph c5 = generate_graph(GraphSpec::cycle(5));
    const Graph k5 = power_graph(c5, 2);
    REQUIRE(k5.edge_count() == 10);

    REQUIRE_THROWS_AS(power_graph(path4, 0), std::invalid_argument);
}

TEST_CASE("power graph edge monotonicity") {
    const Graph g = generate_graph(GraphSpec::erdos_renyi(30, 0.08, 11));
    Graph prev = power_graph(g, 1);
    for (int p = 2; p <= 5; ++p) {
        const Graph next = power_graph(g, p);
        for (int u = 0; u < g.n; ++u)
            for (int v : prev.adjacency[std::size_t(u)]) REQUIRE(next.has_edge(u, v));
        prev = next;
    }
}

TEST_CASE("distance cache matches direct BFS") {
    const Graph g = generate_graph(GraphSpec::grid(5, 7));
    DistanceCache cache(g);
    for (int v : {0, 6, 17, 34}) REQUIRE(cache.row(v)->dist == distances_from(g, v).dist);
    REQUIRE(cache.distance(0, 34) == 10);
}

TEST_CASE("all-pairs guard") {
    Graph huge;
    huge.n = kAllPairsVertexLimit + 1;
    huge.adjacency.resize(std::size_t(huge.n));
    REQUIRE_THROWS_WITH(all_pairs_distances(huge),
                        Catch::Matchers::ContainsSubstring("20000"));
}

TEST_CASE("graph shorthand round trip") {
    for (const std::string text :
         {"path:10", "cycle:600", "grid:3x4", "torus:20x20", "cliques:5,3,2", "er:10:0.25:7"}) {
        const GraphSpec spec = GraphSpec::from_shorthand(text);
        const GraphSpec again = GraphSpec::from_shorthand(spec.shorthand());
        REQUIRE(generate_graph(spec).adjacency == generate_graph(again).adjacency);
    }
    REQUIRE_THROWS_AS(GraphSpec::from_shorthand("blorp:3"), std::invalid_argument);
    REQUIRE_THROWS_AS(GraphSpec::from_shorthand("path"), std::invalid_argument);
}
