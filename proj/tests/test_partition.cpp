#include <catch2/catch_amalgamated.hpp>

#include "graphmix/exact_lp.hpp"
#include "graphmix/graph.hpp"
#include "graphmix/partition.hpp"

#include "lp_oracle.hpp"

using namespace graphmix;

namespace {

// Brute-force exact chromatic number by backtracking (test oracle).
bool colorable(const Graph &g, int k, std::vector<int> &color, int v) {
    if (v == g.n) return true;
    for (int c = 0; c < k; ++c) {
        bool ok = true;
        for (int u : g.adjacency[std::size_t(v)])
            if (u < v && color[std::size_t(u)] == c) ok = false;
        if (!ok) continue;
        color[std::size_t(v)] = c;
        if (colorable(g, k, color, v + 1)) return true;
        color[std::size_t(v)] = -1;
    }
    return false;
}

int chromatic_number_bruteforce(const Graph &g) {
    for (int k = 1; k <= g.n; ++k) {
        std::vector<int> color(std::size_t(g.n), -1);
        if (colorable(g, k, color, 0)) return k;
    }
    return g.n;
}

WeightedStableFamily mod3_family_on_path10() {
    WeightedStableFamily fam;
    fam.d = 3;
    fam.graph_n = 10;
    fam.subsets = {{0, 3, 6, 9}, {1, 4, 7}, {2, 5, 8}};
    fam.weights = {Rational(1), Rational(1), Rational(1)};
    return fam;
}

}  // namespace

TEST_CASE("validate: residue classes mod 3 on path(10) form a 3-stable partition") {
    const Graph g = generate_graph(GraphSpec::path(10));
    const auto report = validate_partition(g, mod3_family_on_path10());
    REQUIRE(report.valid);
    REQUIRE(report.weight_sum == 3);
    REQUIRE(report.worst_coverage_deviation == 0);
}

TEST_CASE("validate: the same family declared with d=4 is invalid") {
    const Graph g = generate_graph(GraphSpec::path(10));
    auto fam = mod3_family_on_path10();
    fam.d = 4;
    const auto report = validate_partition(g, fam);
    REQUIRE_FALSE(report.valid);
    bool found_stability = false;
    for (const auto &violation : report.violations)
        if (violation.kind == Violation::Kind::Stability) found_stability = true;
    REQUIRE(found_stability);
}

TEST_CASE("validate: C5 half-weight 2-stable family covers exactly") {
    const Graph g = generate_graph(GraphSpec::cycle(5));
    WeightedStableFamily fam;
    fam.d = 2;
    fam.graph_n = 5;
    fam.subsets = {{0, 2}, {1, 3}, {2, 4}, {0, 3}, {1, 4}};
    fam.weights.assign(5, Rational(1, 2));
    const auto report = validate_partition(g, fam);
    REQUIRE(report.valid);
    REQUIRE(report.weight_sum == Rational(5, 2));
}

TEST_CASE("validate: parameter and coverage errors") {
    const Graph g = generate_graph(GraphSpec::path(10));
    auto fam = mod3_family_on_path10();
    fam.graph_n = 9;
    REQUIRE_THROWS_AS(validate_partition(g, fam), std::invalid_argument);

    fam = mod3_family_on_path10();
    fam.weights[1] = Rational(1, 2);  // vertex 1 covered by 1/2 only
    const auto report = validate_partition(g, fam);
    REQUIRE_FALSE(report.valid);
    REQUIRE(report.worst_coverage_deviation == Rational(1, 2));
    bool has_coverage = false, has_sum = false;
    for (const auto &violation : report.violations) {
        if (violation.kind == Violation::Kind::Coverage) has_coverage = true;
        if (violation.kind == Violation::Kind::SumIdentity) has_sum = true;
    }
    REQUIRE(has_coverage);
    REQUIRE(has_sum);
}

TEST_CASE("residue partition on paths") {
    const auto fam = residue_partition(GraphSpec::path(10), 3);
    REQUIRE(fam.subsets.size() == 3);
    std::vector<std::size_t> sizes;
    for (const auto &s : fam.subsets) sizes.push_back(s.size());
    std::sort(sizes.begin(), sizes.end());
    REQUIRE(sizes == std::vector<std::size_t>{3, 3, 4});
    REQUIRE(weight_sum(fam) == 3);
    REQUIRE(validate_partition(generate_graph(GraphSpec::path(10)), fam).valid);

    // d > n degenerates to singletons: weight_sum = min(d, n).
    const auto singles = residue_partition(GraphSpec::path(4), 9);
    REQUIRE(weight_sum(singles) == 4);
    REQUIRE(validate_partition(generate_graph(GraphSpec::path(4)), singles).valid);
}

TEST_CASE("residue partition on torus 6x6 with d=3 has weight sum d^2") {
    const GraphSpec spec = GraphSpec::torus(6, 6);
    const auto fam = residue_partition(spec, 3);
    REQUIRE(fam.subsets.size() == 9);
    REQUIRE(weight_sum(fam) == 9);
    REQUIRE(validate_partition(generate_graph(spec), fam).valid);
}

TEST_CASE("residue partition divisibility preconditions") {
    REQUIRE_THROWS_WITH(residue_partition(GraphSpec::cycle(10), 4),
                        Catch::Matchers::ContainsSubstring("greedy_power_coloring"));
    REQUIRE_THROWS_AS(residue_partition(GraphSpec::torus(6, 8), 3), std::invalid_argument);
    REQUIRE_THROWS_AS(residue_partition(GraphSpec::erdos_renyi(5, 0.5, 1), 2),
                      std::invalid_argument);
    // cycle with d | n works, including the wraparound classes
    const auto fam = residue_partition(GraphSpec::cycle(12), 4);
    REQUIRE(weight_sum(fam) == 4);
    REQUIRE(validate_partition(generate_graph(GraphSpec::cycle(12)), fam).valid);
}

TEST_CASE("residue weight sums are monotone in d") {
    Rational prev = 0;
    for (int d = 1; d <= 10; ++d) {
        const auto w = weight_sum(residue_partition(GraphSpec::path(30), d));
        REQUIRE(w >= prev);
        prev = w;
    }
    prev = 0;
    for (int d : {1, 2, 3, 6}) {
        const auto w = weight_sum(residue_partition(GraphSpec::torus(6, 6), d));
        REQUIRE(w >= prev);
        prev = w;
    }
}

TEST_CASE("greedy power coloring on path(10), d=3 matches the exact chromatic number") {
    const Graph g = generate_graph(GraphSpec::path(10));
    const int exact = chromatic_number_bruteforce(power_graph(g, 2));
    REQUIRE(exact == 3);
    const auto fam = greedy_power_coloring(g, 3, ColoringStrategy::Dsatur);
    REQUIRE(weight_sum(fam) == exact);
    REQUIRE(validate_partition(g, fam).valid);
}

TEST_CASE("greedy power coloring trivial cases") {
    const Graph k5 = generate_graph(GraphSpec::clique_union({5}));
    const auto singletons = greedy_power_coloring(k5, 2, ColoringStrategy::Dsatur);
    REQUIRE(singletons.subsets.size() == 5);
    REQUIRE(weight_sum(singletons) == 5);

    const Graph edgeless = generate_graph(GraphSpec::erdos_renyi(10, 0.0, 1));
    for (int d : {1, 2, 5}) {
        const auto fam = greedy_power_coloring(edgeless, d, ColoringStrategy::Dsatur);
        REQUIRE(fam.subsets.size() == 1);
        REQUIRE(weight_sum(fam) == 1);
    }

    const Graph any = generate_graph(GraphSpec::erdos_renyi(12, 0.4, 3));
    const auto whole = greedy_power_coloring(any, 1, ColoringStrategy::Dsatur);
    REQUIRE(whole.subsets.size() == 1);
    REQUIRE(weight_sum(whole) == 1);

    REQUIRE_THROWS_AS(greedy_power_coloring(any, 0, ColoringStrategy::Dsatur),
                      std::invalid_argument);
}

TEST_CASE("greedy power coloring is deterministic and valid on random graphs") {
    for (std::uint64_t seed : {5ull, 6ull, 7ull}) {
        const Graph g = generate_graph(GraphSpec::erdos_renyi(24, 0.15, seed));
        for (const auto strategy : {ColoringStrategy::Dsatur, ColoringStrategy::LargestFirst}) {
            for (int d : {2, 3}) {
                const auto a = greedy_power_coloring(g, d, strategy);
                const auto b = greedy_power_coloring(g, d, strategy);
                REQUIRE(a.subsets == b.subsets);
                REQUIRE(a.weights == b.weights);
                REQUIRE(validate_partition(g, a).valid);
            }
        }
    }
}

TEST_CASE("cross-definition agreement: d-stable on g iff 2-stable on the power graph") {
    const Graph g = generate_graph(GraphSpec::erdos_renyi(14, 0.2, 17));
    for (int d : {2, 3, 4}) {
        const Graph power = power_graph(g, d - 1);
        auto fam = greedy_power_coloring(g, d, ColoringStrategy::Dsatur);
        REQUIRE(validate_partition(g, fam).valid);
        auto as2 = fam;
        as2.d = 2;
        REQUIRE(validate_partition(power, as2).valid);

        // Perturb: merge two subsets with a close pair; both routes must reject.
        if (fam.subsets.size() >= 2 && power.edge_count() > 0) {
            auto broken = fam;
            auto merged = broken.subsets[0];
            merged.insert(merged.end(), broken.subsets[1].begin(), broken.subsets[1].end());
            std::sort(merged.begin(), merged.end());
            bool has_close_pair = false;
            for (std::size_t i = 0; i < merged.size() && !has_close_pair; ++i)
                for (std::size_t j = i + 1; j < merged.size(); ++j)
                    if (power.has_edge(merged[i], merged[j])) has_close_pair = true;
            if (has_close_pair) {
                broken.subsets[0] = merged;
                broken.subsets.erase(broken.subsets.begin() + 1);
                broken.weights.erase(broken.weights.begin() + 1);
                const bool bad_on_g = !validate_partition(g, broken).valid;
                auto broken2 = broken;
                broken2.d = 2;
                const bool bad_on_power = !validate_partition(power, broken2).valid;
                REQUIRE(bad_on_g);
                REQUIRE(bad_on_power);
            }
        }
    }
}

TEST_CASE("exact fractional chromatic: C5 at d=2 is 5/2") {
    const Graph c5 = generate_graph(GraphSpec::cycle(5));
    const auto result = exact_fractional_chromatic(c5, 2);
    REQUIRE(result.value == Rational(5, 2));
    const auto report = validate_partition(c5, result.witness);
    REQUIRE(report.valid);
    REQUIRE(report.weight_sum == Rational(5, 2));
    REQUIRE(lp_oracle::fractional_chromatic_bruteforce(c5, 2) == Rational(5, 2));
}

TEST_CASE("exact fractional chromatic: trivial instances") {
    const Graph k4 = generate_graph(GraphSpec::clique_union({4}));
    REQUIRE(exact_fractional_chromatic(k4, 2).value == 4);

    const Graph edgeless = generate_graph(GraphSpec::erdos_renyi(6, 0.0, 1));
    REQUIRE(exact_fractional_chromatic(edgeless, 2).value == 1);

    const Graph big = generate_graph(GraphSpec::path(17));
    REQUIRE_THROWS_WITH(exact_fractional_chromatic(big, 2),
                        Catch::Matchers::ContainsSubstring("16"));
}

TEST_CASE("sandwich and oracle agreement on a random corpus") {
    int checked = 0;
    for (std::uint64_t seed = 1; checked < 12 && seed < 60; ++seed) {
        const int n = 5 + int(seed % 5);
        const Graph g = generate_graph(GraphSpec::erdos_renyi(n, 0.35, seed));
        for (int d : {1, 2, 3}) {
            const Graph power = d >= 2 ? power_graph(g, d - 1) : Graph::from_edges(g.n, {});
            std::vector<std::vector<int>> sets;
            try {
                sets = maximal_stable_sets(power, kExactLpStableSetLimit);
            } catch (const std::invalid_argument &) {
                continue;
            }
            if (lp_oracle::dual_enumeration_cost(g.n, sets.size()) > 2e6) continue;
            const auto exact = exact_fractional_chromatic(g, d);
            const auto greedy = greedy_power_coloring(g, d, ColoringStrategy::Dsatur);
            REQUIRE(exact.value >= 1);
            REQUIRE(exact.value <= weight_sum(greedy));
            REQUIRE(exact.value == lp_oracle::fractional_chromatic_bruteforce(g, d));
            REQUIRE(validate_partition(g, exact.witness).valid);
            ++checked;
        }
    }
    REQUIRE(checked >= 12);
}

TEST_CASE("weight_sum is exact for fractional weights") {
    WeightedStableFamily fam;
    fam.d = 1;
    fam.graph_n = 3;
    fam.subsets = {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
    fam.weights = {Rational(1, 3), Rational(1, 3), Rational(1, 3)};
    REQUIRE(weight_sum(fam) == 1);
    REQUIRE(validate_partition(generate_graph(GraphSpec::path(3)), fam).valid);
}
