#pragma once

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphmix/graph.hpp"
#include "graphmix/rational.hpp"

namespace graphmix {

// Weighted family {(w_k, S_k)} of d-stable subsets. A valid family is a
// d-stable fractional partition: every subset has pairwise graph distance
// >= d and the weights covering each vertex sum to exactly 1.
struct WeightedStableFamily {
    int d = 1;
    int graph_n = 0;
    std::vector<std::vector<int>> subsets;
    std::vector<Rational> weights;

    std::size_t size() const { return subsets.size(); }
};

inline Rational weight_sum(const WeightedStableFamily &fam) {
    Rational total = 0;
    for (const auto &w : fam.weights) total += w;
    return total;
}

struct Violation {
    enum class Kind {
        SubsetOutOfRange,
        NonPositiveWeight,
        Stability,
        PowerGraphCrossCheck,
        Coverage,
        SumIdentity,
    };
    Kind kind;
    int subset = -1;                // offending subset index, -1 if n/a
    std::vector<int> vertices;      // offending vertices (truncated)
    std::string detail;
};

inline const char *violation_kind_name(Violation::Kind kind) {
    switch (kind) {
        case Violation::Kind::SubsetOutOfRange: return "subset_out_of_range";
        case Violation::Kind::NonPositiveWeight: return "non_positive_weight";
        case Violation::Kind::Stability: return "stability";
        case Violation::Kind::PowerGraphCrossCheck: return "power_graph_cross_check";
        case Violation::Kind::Coverage: return "coverage";
        case Violation::Kind::SumIdentity: return "sum_identity";
    }
    return "unknown";
}

struct ValidationReport {
    bool valid = false;
    std::vector<Violation> violations;
    Rational weight_sum = 0;
    Rational worst_coverage_deviation = 0;  // max over v of |coverage(v) - 1|
};

// Checks d-stability twice (BFS distances on g, and stability in G^{d-1}),
// exact coverage, weight positivity, and the sum identity
// sum_k w_k |S_k| = n.
inline ValidationReport validate_partition(const Graph &g, const WeightedStableFamily &fam) {
    if (fam.graph_n != g.n)
        throw std::invalid_argument("family refers to a graph of order " +
                                    std::to_string(fam.graph_n) + ", got " +
                                    std::to_string(g.n));
    if (fam.d < 1) throw std::invalid_argument("family distance parameter must be >= 1");
    if (fam.subsets.size() != fam.weights.size())
        throw std::invalid_argument("subsets/weights length mismatch");

    ValidationReport report;
    const int d = fam.d;

    for (std::size_t k = 0; k < fam.subsets.size(); ++k) {
        if (fam.weights[k] <= 0) {
            report.violations.push_back({Violation::Kind::NonPositiveWeight, int(k), {},
                                         "weight " + to_fraction_string(fam.weights[k])});
        }
        for (int v : fam.subsets[k]) {
            if (v < 0 || v >= g.n) {
                report.violations.push_back(
                    {Violation::Kind::SubsetOutOfRange, int(k), {v}, "vertex out of range"});
                return report;  // indices unusable below
            }
        }
    }

    // Route 1: pairwise BFS distances must be >= d within each subset.
    DistanceCache cache(g);
    for (std::size_t k = 0; k < fam.subsets.size(); ++k) {
        const auto &subset = fam.subsets[k];
        for (std::size_t i = 0; i < subset.size(); ++i) {
            const auto row = cache.row(subset[i]);
            for (std::size_t j = i + 1; j < subset.size(); ++j) {
                if (subset[i] == subset[j]) {
                    report.violations.push_back({Violation::Kind::Stability, int(k),
                                                 {subset[i]},
                                                 "duplicate vertex in subset"});
                    continue;
                }
                if (!row->at_least(subset[j], d)) {
                    report.violations.push_back(
                        {Violation::Kind::Stability, int(k), {subset[i], subset[j]},
                         "distance " + std::to_string(row->dist[std::size_t(subset[j])]) +
                             " < " + std::to_string(d)});
                }
            }
        }
    }

    // Route 2: the d-stable subsets of G are exactly the stable subsets of
    // G^{d-1}; both routes must agree.
    if (d >= 2) {
        const Graph power = power_graph(g, d - 1);
        for (std::size_t k = 0; k < fam.subsets.size(); ++k) {
            const auto &subset = fam.subsets[k];
            bool stable_in_power = true;
            for (std::size_t i = 0; i < subset.size() && stable_in_power; ++i)
                for (std::size_t j = i + 1; j < subset.size(); ++j)
                    if (power.has_edge(subset[i], subset[j])) {
                        stable_in_power = false;
                        break;
                    }
            bool flagged = false;
            for (const auto &viol : report.violations)
                if (viol.kind == Violation::Kind::Stability && viol.subset == int(k))
                    flagged = true;
            if (stable_in_power == flagged) {
                report.violations.push_back({Violation::Kind::PowerGraphCrossCheck, int(k), {},
                                             "BFS and power-graph stability disagree"});
            }
        }
    }

    // Exact coverage: sum of weights at each vertex must equal 1.
    std::vector<Rational> coverage(std::size_t(g.n), Rational(0));
    for (std::size_t k = 0; k < fam.subsets.size(); ++k)
        for (int v : fam.subsets[k]) coverage[std::size_t(v)] += fam.weights[k];
    std::vector<int> uncovered;
    for (int v = 0; v < g.n; ++v) {
        const Rational dev = coverage[std::size_t(v)] > 1 ? coverage[std::size_t(v)] - 1
                                                          : Rational(1) - coverage[std::size_t(v)];
        if (dev > report.worst_coverage_deviation) report.worst_coverage_deviation = dev;
        if (coverage[std::size_t(v)] != 1 && uncovered.size() < 16) uncovered.push_back(v);
    }
    if (report.worst_coverage_deviation != 0) {
        report.violations.push_back({Violation::Kind::Coverage, -1, uncovered,
                                     "coverage != 1 at " + std::to_string(uncovered.size()) +
                                         "+ vertices"});
    }

    report.weight_sum = weight_sum(fam);

    // sum_k w_k n_k = n, exactly.
    Rational weighted_sizes = 0;
    for (std::size_t k = 0; k < fam.subsets.size(); ++k)
        weighted_sizes += fam.weights[k] * int(fam.subsets[k].size());
    if (weighted_sizes != g.n) {
        report.violations.push_back({Violation::Kind::SumIdentity, -1, {},
                                     "sum w_k |S_k| = " + to_fraction_string(weighted_sizes) +
                                         " != " + std::to_string(g.n)});
    }

    report.valid = report.violations.empty();
    return report;
}

namespace detail {

inline WeightedStableFamily family_from_buckets(int d, int n,
                                                std::vector<std::vector<int>> buckets) {
    WeightedStableFamily fam;
    fam.d = d;
    fam.graph_n = n;
    for (auto &bucket : buckets) {
        if (bucket.empty()) continue;
        std::sort(bucket.begin(), bucket.end());
        fam.subsets.push_back(std::move(bucket));
        fam.weights.emplace_back(1);
    }
    return fam;
}

}  // namespace detail

// Residue-class construction: indices mod d on paths/cycles, coordinate pairs
// mod d on grids/tori. Weight sums realize the chain value d and the grid
// value d^2.
inline WeightedStableFamily residue_partition(const GraphSpec &spec, int d) {
    if (d < 1) throw std::invalid_argument("residue partition requires d >= 1");
    switch (spec.kind) {
        case GraphSpec::Kind::Path: {
            if (spec.n < 1) throw std::invalid_argument("path requires n >= 1");
            std::vector<std::vector<int>> buckets(static_cast<std::size_t>(d));
            for (int i = 0; i < spec.n; ++i) buckets[std::size_t(i % d)].push_back(i);
            return detail::family_from_buckets(d, spec.n, std::move(buckets));
        }
        case GraphSpec::Kind::Cycle: {
            if (spec.n < 1) throw std::invalid_argument("cycle requires n >= 1");
            if (spec.n % d != 0)
                throw std::invalid_argument(
                    "residue classes on a cycle need d | n (wraparound breaks stability); "
                    "use greedy_power_coloring instead");
            std::vector<std::vector<int>> buckets(static_cast<std::size_t>(d));
            for (int i = 0; i < spec.n; ++i) buckets[std::size_t(i % d)].push_back(i);
            return detail::family_from_buckets(d, spec.n, std::move(buckets));
        }
        case GraphSpec::Kind::Grid: {
            if (spec.rows < 1 || spec.cols < 1)
                throw std::invalid_argument("grid requires rows, cols >= 1");
            if (spec.wrap && (spec.rows % d != 0 || spec.cols % d != 0))
                throw std::invalid_argument(
                    "residue classes on a torus need d | rows and d | cols; "
                    "use greedy_power_coloring instead");
            std::vector<std::vector<int>> buckets(std::size_t(d) * std::size_t(d));
            for (int r = 0; r < spec.rows; ++r)
                for (int c = 0; c < spec.cols; ++c)
                    buckets[std::size_t(r % d) * std::size_t(d) + std::size_t(c % d)].push_back(
                        r * spec.cols + c);
            return detail::family_from_buckets(d, spec.rows * spec.cols, std::move(buckets));
        }
        default:
            throw std::invalid_argument(
                "residue construction is defined for path, cycle, grid and torus specs");
    }
}

enum class ColoringStrategy { Dsatur, LargestFirst };

inline ColoringStrategy coloring_strategy_from_name(const std::string &name) {
    if (name == "dsatur") return ColoringStrategy::Dsatur;
    if (name == "largest_first") return ColoringStrategy::LargestFirst;
    throw std::invalid_argument("unknown coloring strategy: " + name);
}

namespace detail {

// DSATUR on an explicit graph. Ties broken by lowest vertex id, colors by
// lowest feasible id, so the result is reproducible.
inline std::vector<int> dsatur_coloring(const Graph &g) {
    const int n = g.n;
    std::vector<int> color(std::size_t(n), -1);
    std::vector<std::vector<char>> neighbor_has(static_cast<std::size_t>(n));
    std::vector<int> saturation(std::size_t(n), 0);
    for (int step = 0; step < n; ++step) {
        int pick = -1;
        for (int v = 0; v < n; ++v) {
            if (color[std::size_t(v)] != -1) continue;
            if (pick == -1 || saturation[std::size_t(v)] > saturation[std::size_t(pick)]) pick = v;
        }
        auto &used = neighbor_has[std::size_t(pick)];
        int c = 0;
        while (c < int(used.size()) && used[std::size_t(c)]) ++c;
        color[std::size_t(pick)] = c;
        for (int u : g.adjacency[std::size_t(pick)]) {
            if (color[std::size_t(u)] != -1) continue;
            auto &mark = neighbor_has[std::size_t(u)];
            if (c >= int(mark.size())) mark.resize(std::size_t(c) + 1, 0);
            if (!mark[std::size_t(c)]) {
                mark[std::size_t(c)] = 1;
                ++saturation[std::size_t(u)];
            }
        }
    }
    return color;
}

inline std::vector<int> largest_first_coloring(const Graph &g) {
    const int n = g.n;
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) order[std::size_t(v)] = v;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return g.degree(a) > g.degree(b);
    });
    std::vector<int> color(std::size_t(n), -1);
    std::vector<char> used;
    for (int v : order) {
        used.assign(used.size(), 0);
        for (int u : g.adjacency[std::size_t(v)]) {
            const int cu = color[std::size_t(u)];
            if (cu >= 0) {
                if (cu >= int(used.size())) used.resize(std::size_t(cu) + 1, 0);
                used[std::size_t(cu)] = 1;
            }
        }
        int c = 0;
        while (c < int(used.size()) && used[std::size_t(c)]) ++c;
        color[std::size_t(v)] = c;
    }
    return color;
}

}  // namespace detail

// Proper coloring of G^{d-1}: each color class is d-stable in G, all weights
// are 1, so weight_sum = number of colors. d = 1 returns the whole vertex set
// (every subset is 1-stable).
inline WeightedStableFamily greedy_power_coloring(const Graph &g, int d,
                                                  ColoringStrategy strategy) {
    if (d < 1) throw std::invalid_argument("greedy_power_coloring requires d >= 1");
    if (g.n == 0) return {d, 0, {}, {}};
    if (d == 1) {
        std::vector<int> all(std::size_t(g.n));
        for (int v = 0; v < g.n; ++v) all[std::size_t(v)] = v;
        WeightedStableFamily fam;
        fam.d = 1;
        fam.graph_n = g.n;
        fam.subsets.push_back(std::move(all));
        fam.weights.emplace_back(1);
        return fam;
    }
    const Graph power = power_graph(g, d - 1);
    const std::vector<int> color = strategy == ColoringStrategy::Dsatur
                                       ? detail::dsatur_coloring(power)
                                       : detail::largest_first_coloring(power);
    const int ncolors = 1 + *std::max_element(color.begin(), color.end());
    std::vector<std::vector<int>> buckets(static_cast<std::size_t>(ncolors));
    for (int v = 0; v < g.n; ++v) buckets[std::size_t(color[std::size_t(v)])].push_back(v);
    return detail::family_from_buckets(d, g.n, std::move(buckets));
}

}  // namespace graphmix
