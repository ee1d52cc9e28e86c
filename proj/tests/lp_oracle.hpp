#pragma once

// Test-only oracles for the partitions module. Everything here is kept
// independent of the implementation path it checks: its own BFS, its own
// subset enumeration, and a dual-vertex LP enumeration instead of simplex.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "graphmix/graph.hpp"
#include "graphmix/rational.hpp"

namespace lp_oracle {

using graphmix::Graph;
using graphmix::Rational;

inline std::vector<int> bfs_row(const Graph &g, int source) {
    std::vector<int> dist(std::size_t(g.n), -1);
    dist[std::size_t(source)] = 0;
    std::queue<int> q;
    q.push(source);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : g.adjacency[std::size_t(u)])
            if (dist[std::size_t(v)] == -1) {
                dist[std::size_t(v)] = dist[std::size_t(u)] + 1;
                q.push(v);
            }
    }
    return dist;
}

// Pairwise "distance >= d" table, with disconnected pairs counting as far.
inline std::vector<std::vector<bool>> far_table(const Graph &g, int d) {
    std::vector<std::vector<bool>> far(std::size_t(g.n), std::vector<bool>(std::size_t(g.n)));
    for (int u = 0; u < g.n; ++u) {
        const auto dist = bfs_row(g, u);
        for (int v = 0; v < g.n; ++v)
            far[std::size_t(u)][std::size_t(v)] = dist[std::size_t(v)] == -1 ||
                                                  dist[std::size_t(v)] >= d;
    }
    return far;
}

// Maximal d-stable subsets by exhaustive bitmask enumeration (n <= 20).
inline std::vector<std::uint32_t> maximal_d_stable_masks(const Graph &g, int d) {
    const auto far = far_table(g, d);
    const int n = g.n;
    std::vector<std::uint32_t> close_mask(std::size_t(n), 0);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v && !far[std::size_t(u)][std::size_t(v)])
                close_mask[std::size_t(u)] |= (1u << v);
    std::vector<std::uint32_t> sets;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        bool stable = true;
        for (int v = 0; v < n && stable; ++v)
            if ((mask >> v) & 1u) stable = (close_mask[std::size_t(v)] & mask) == 0;
        if (!stable) continue;
        bool maximal = true;
        for (int u = 0; u < n && maximal; ++u)
            if (!((mask >> u) & 1u)) maximal = (close_mask[std::size_t(u)] & mask) != 0;
        if (maximal) sets.push_back(mask);
    }
    return sets;
}

// Exact solve of the square rational system M y = 1. Returns nullopt when
// singular.
inline std::optional<std::vector<Rational>> solve_ones(std::vector<std::vector<Rational>> M) {
    const std::size_t k = M.size();
    std::vector<Rational> rhs(k, Rational(1));
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        while (pivot < k && M[pivot][col] == 0) ++pivot;
        if (pivot == k) return std::nullopt;
        std::swap(M[pivot], M[col]);
        std::swap(rhs[pivot], rhs[col]);
        const Rational inv = Rational(1) / M[col][col];
        for (auto &x : M[col]) x *= inv;
        rhs[col] *= inv;
        for (std::size_t row = 0; row < k; ++row) {
            if (row == col || M[row][col] == 0) continue;
            const Rational f = M[row][col];
            for (std::size_t j = 0; j < k; ++j) M[row][j] -= f * M[col][j];
            rhs[row] -= f * rhs[col];
        }
    }
    return rhs;
}

// Cost estimate of the exhaustive enumeration below; lets corpus generators
// reject instances that would blow the test budget.
inline double dual_enumeration_cost(int n, std::size_t n_sets) {
    double total = 0.0;
    for (int s = 1; s <= n; ++s) {
        // C(n_sets, s) * s^3
        double combos = 1.0;
        for (int i = 0; i < s; ++i) combos *= double(n_sets - std::size_t(i)) / double(i + 1);
        total += combos * double(s) * double(s) * double(s);
    }
    return total;
}

// Brute-force fractional d-chromatic number via exhaustive rational vertex
// enumeration of the dual packing LP
//     max 1.y   s.t.  sum_{v in S} y_v <= 1 for every maximal d-stable S,
//                     y >= 0.
// Every dual vertex is determined by its support plus |support| tight rows;
// all combinations are enumerated and checked exactly.
inline Rational fractional_chromatic_bruteforce(const Graph &g, int d) {
    const auto sets = maximal_d_stable_masks(g, d);
    const int n = g.n;
    Rational best = 0;

    std::vector<int> support;
    std::vector<std::size_t> row_choice;

    const auto feasible_value = [&](const std::vector<Rational> &y_support) -> std::optional<Rational> {
        for (const auto &y : y_support)
            if (y < 0) return std::nullopt;
        for (std::uint32_t set : sets) {
            Rational total = 0;
            for (std::size_t i = 0; i < support.size(); ++i)
                if ((set >> support[i]) & 1u) total += y_support[i];
            if (total > 1) return std::nullopt;
        }
        Rational value = 0;
        for (const auto &y : y_support) value += y;
        return value;
    };

    const std::size_t m = sets.size();

    // Iterate supports (nonzero coordinates), then |support|-subsets of rows.
    for (std::uint32_t support_mask = 1; support_mask < (1u << n); ++support_mask) {
        support.clear();
        for (int v = 0; v < n; ++v)
            if ((support_mask >> v) & 1u) support.push_back(v);
        const std::size_t s = support.size();
        if (s > m) continue;

        row_choice.resize(s);
        for (std::size_t i = 0; i < s; ++i) row_choice[i] = i;
        const auto next_combination = [&]() {
            std::size_t i = s;
            while (i > 0) {
                --i;
                if (row_choice[i] != i + m - s) {
                    ++row_choice[i];
                    for (std::size_t j = i + 1; j < s; ++j) row_choice[j] = row_choice[j - 1] + 1;
                    return true;
                }
            }
            return false;
        };
        do {
            std::vector<std::vector<Rational>> M(s, std::vector<Rational>(s, Rational(0)));
            for (std::size_t r = 0; r < s; ++r)
                for (std::size_t i = 0; i < s; ++i)
                    if ((sets[row_choice[r]] >> support[i]) & 1u) M[r][i] = 1;
            if (const auto y = solve_ones(std::move(M))) {
                const bool positive = std::all_of(y->begin(), y->end(),
                                                  [](const Rational &v) { return v > 0; });
                if (positive) {
                    if (const auto value = feasible_value(*y)) {
                        if (*value > best) best = *value;
                    }
                }
            }
        } while (next_combination());
    }
    return best;
}

}  // namespace lp_oracle
