#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphmix/graph.hpp"
#include "graphmix/partition.hpp"
#include "graphmix/rational.hpp"

namespace graphmix {

inline constexpr int kExactLpVertexLimit = 16;
inline constexpr std::size_t kExactLpStableSetLimit = 200;

namespace detail {

// Dense two-phase primal simplex over exact rationals. Bland's rule on both
// the entering and the leaving variable, so the walk over basic feasible
// solutions terminates without any tolerance.
//
// Solves  min c.x  s.t.  A x >= b,  x >= 0   with b >= 0.
struct ExactSimplex {
    int m, n;                                   // constraints, structural vars
    std::vector<std::vector<Rational>> tableau; // m rows of B^{-1}[A -I I | b]
    std::vector<int> basis;

    ExactSimplex(const std::vector<std::vector<Rational>> &a, const std::vector<Rational> &b)
        : m(int(a.size())), n(a.empty() ? 0 : int(a[0].size())) {
        const int total = n + 2 * m;  // x, surplus, artificial
        tableau.assign(std::size_t(m), std::vector<Rational>(std::size_t(total) + 1, Rational(0)));
        basis.resize(std::size_t(m));
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) tableau[std::size_t(i)][std::size_t(j)] = a[std::size_t(i)][std::size_t(j)];
            tableau[std::size_t(i)][std::size_t(n + i)] = -1;      // surplus
            tableau[std::size_t(i)][std::size_t(n + m + i)] = 1;   // artificial
            tableau[std::size_t(i)].back() = b[std::size_t(i)];
            basis[std::size_t(i)] = n + m + i;
        }
    }

    void pivot(int row, int col) {
        auto &prow = tableau[std::size_t(row)];
        const Rational inv = Rational(1) / prow[std::size_t(col)];
        for (auto &cell : prow) cell *= inv;
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            auto &target = tableau[std::size_t(i)];
            const Rational factor = target[std::size_t(col)];
            if (factor == 0) continue;
            for (std::size_t j = 0; j < target.size(); ++j) target[j] -= factor * prow[j];
        }
        basis[std::size_t(row)] = col;
    }

    // Runs simplex iterations against the given cost vector; columns with
    // banned[j] set can never enter.
    void minimize(const std::vector<Rational> &cost, const std::vector<char> &banned) {
        const int total = n + 2 * m;
        while (true) {
            int enter = -1;
            for (int j = 0; j < total && enter == -1; ++j) {
                if (banned[std::size_t(j)]) continue;
                bool basic = false;
                for (int i = 0; i < m; ++i)
                    if (basis[std::size_t(i)] == j) basic = true;
                if (basic) continue;
                Rational reduced = cost[std::size_t(j)];
                for (int i = 0; i < m; ++i)
                    reduced -= cost[std::size_t(basis[std::size_t(i)])] *
                               tableau[std::size_t(i)][std::size_t(j)];
                if (reduced < 0) enter = j;
            }
            if (enter == -1) return;
            int leave = -1;
            Rational best_ratio = 0;
            for (int i = 0; i < m; ++i) {
                const Rational &aij = tableau[std::size_t(i)][std::size_t(enter)];
                if (aij <= 0) continue;
                const Rational ratio = tableau[std::size_t(i)].back() / aij;
                if (leave == -1 || ratio < best_ratio ||
                    (ratio == best_ratio && basis[std::size_t(i)] < basis[std::size_t(leave)])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave == -1) throw std::runtime_error("covering LP unbounded (broken input)");
            pivot(leave, enter);
        }
    }

    Rational objective(const std::vector<Rational> &cost) const {
        Rational value = 0;
        for (int i = 0; i < m; ++i)
            value += cost[std::size_t(basis[std::size_t(i)])] * tableau[std::size_t(i)].back();
        return value;
    }

    // After phase 1 an artificial can linger in the basis at level zero; a
    // later pivot could then push it positive. Degenerate pivots move them
    // out; an all-zero row is redundant and harmless.
    void drive_out_artificials() {
        for (int i = 0; i < m; ++i) {
            if (basis[std::size_t(i)] < n + m) continue;
            for (int j = 0; j < n + m; ++j) {
                if (tableau[std::size_t(i)][std::size_t(j)] != 0) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }
};

}  // namespace detail

// min 1.w  s.t.  sum_{k: v in S_k} w_k >= 1 for every vertex v,  w >= 0,
// solved exactly. Returns the optimal weights.
struct CoverLpResult {
    Rational value;
    std::vector<Rational> weights;
};

inline CoverLpResult solve_min_cover_lp(const std::vector<std::vector<int>> &sets,
                                        int n_vertices) {
    const int m = n_vertices;
    const int n = int(sets.size());
    std::vector<std::vector<Rational>> a(std::size_t(m),
                                         std::vector<Rational>(std::size_t(n), Rational(0)));
    for (int k = 0; k < n; ++k)
        for (int v : sets[std::size_t(k)]) a[std::size_t(v)][std::size_t(k)] = 1;
    for (int v = 0; v < m; ++v) {
        bool covered = false;
        for (int k = 0; k < n && !covered; ++k) covered = a[std::size_t(v)][std::size_t(k)] == 1;
        if (!covered)
            throw std::invalid_argument("vertex " + std::to_string(v) + " is in no set; LP infeasible");
    }
    const std::vector<Rational> b(std::size_t(m), Rational(1));

    detail::ExactSimplex simplex(a, b);
    const int total = n + 2 * m;

    // Phase 1: drive artificials to zero.
    std::vector<Rational> phase1(std::size_t(total), Rational(0));
    for (int j = n + m; j < total; ++j) phase1[std::size_t(j)] = 1;
    std::vector<char> banned(std::size_t(total), 0);
    simplex.minimize(phase1, banned);
    if (simplex.objective(phase1) != 0)
        throw std::runtime_error("covering LP infeasible (should be impossible with maximal sets)");
    simplex.drive_out_artificials();

    // Phase 2: original objective, artificials banned.
    std::vector<Rational> phase2(std::size_t(total), Rational(0));
    for (int j = 0; j < n; ++j) phase2[std::size_t(j)] = 1;
    for (int j = n + m; j < total; ++j) banned[std::size_t(j)] = 1;
    simplex.minimize(phase2, banned);

    CoverLpResult result;
    result.weights.assign(std::size_t(n), Rational(0));
    for (int i = 0; i < m; ++i) {
        const int var = simplex.basis[std::size_t(i)];
        if (var < n) result.weights[std::size_t(var)] = simplex.tableau[std::size_t(i)].back();
    }
    result.value = 0;
    for (const auto &w : result.weights) result.value += w;
    return result;
}

// All maximal stable sets of g, by exhaustive bitmask enumeration (n <= 16).
inline std::vector<std::vector<int>> maximal_stable_sets(const Graph &g, std::size_t cap) {
    if (g.n > kExactLpVertexLimit)
        throw std::invalid_argument("stable-set enumeration limited to " +
                                    std::to_string(kExactLpVertexLimit) + " vertices");
    const int n = g.n;
    std::vector<std::uint32_t> adj(std::size_t(n), 0);
    for (int v = 0; v < n; ++v)
        for (int u : g.adjacency[std::size_t(v)]) adj[std::size_t(v)] |= (1u << u);
    std::vector<std::vector<int>> sets;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        bool stable = true;
        for (int v = 0; v < n && stable; ++v)
            if ((mask >> v) & 1u) stable = (adj[std::size_t(v)] & mask) == 0;
        if (!stable) continue;
        bool maximal = true;
        for (int u = 0; u < n && maximal; ++u)
            if (!((mask >> u) & 1u)) maximal = (adj[std::size_t(u)] & mask) != 0;
        if (!maximal) continue;
        std::vector<int> members;
        for (int v = 0; v < n; ++v)
            if ((mask >> v) & 1u) members.push_back(v);
        sets.push_back(std::move(members));
        if (sets.size() > cap)
            throw std::invalid_argument("more than " + std::to_string(cap) +
                                        " maximal stable sets; exact LP refused");
    }
    return sets;
}

namespace detail {

// Converts an optimal fractional cover into a fractional partition without
// increasing the weight sum: over-covered vertices are removed from the
// lowest-weight sets first, splitting a set when only part of its weight is
// in excess.
inline void shrink_cover_to_partition(std::vector<std::vector<int>> &sets,
                                      std::vector<Rational> &weights, int n_vertices) {
    const auto contains = [](const std::vector<int> &set, int v) {
        return std::binary_search(set.begin(), set.end(), v);
    };
    for (int v = 0; v < n_vertices; ++v) {
        Rational coverage = 0;
        for (std::size_t k = 0; k < sets.size(); ++k)
            if (weights[k] > 0 && contains(sets[k], v)) coverage += weights[k];
        Rational excess = coverage - 1;
        while (excess > 0) {
            std::size_t pick = sets.size();
            for (std::size_t k = 0; k < sets.size(); ++k) {
                if (weights[k] <= 0 || !contains(sets[k], v)) continue;
                if (pick == sets.size() || weights[k] < weights[pick]) pick = k;
            }
            if (pick == sets.size()) throw std::logic_error("over-coverage bookkeeping broke");
            std::vector<int> without;
            without.reserve(sets[pick].size() - 1);
            for (int u : sets[pick])
                if (u != v) without.push_back(u);
            if (weights[pick] <= excess) {
                excess -= weights[pick];
                sets[pick] = std::move(without);
            } else {
                // Split: keep (w - excess) on the original set, move the
                // excess onto the copy that drops v.
                weights[pick] -= excess;
                if (!without.empty()) {
                    sets.push_back(std::move(without));
                    weights.push_back(excess);
                }
                excess = 0;
            }
        }
    }
    // Drop empty sets and zero weights, merge duplicate subsets.
    std::vector<std::vector<int>> out_sets;
    std::vector<Rational> out_weights;
    for (std::size_t k = 0; k < sets.size(); ++k) {
        if (weights[k] <= 0 || sets[k].empty()) continue;
        bool merged = false;
        for (std::size_t j = 0; j < out_sets.size() && !merged; ++j)
            if (out_sets[j] == sets[k]) {
                out_weights[j] += weights[k];
                merged = true;
            }
        if (!merged) {
            out_sets.push_back(sets[k]);
            out_weights.push_back(weights[k]);
        }
    }
    sets = std::move(out_sets);
    weights = std::move(out_weights);
}

}  // namespace detail

struct FractionalChromaticResult {
    Rational value;
    WeightedStableFamily witness;
};

// chi_f^(d) = chi_f(G^{d-1}), computed exactly on small graphs: enumerate the
// maximal stable sets of the power graph and solve the fractional covering LP
// in rational arithmetic. The witness is shrunk to an exact partition with
// the same weight sum.
inline FractionalChromaticResult exact_fractional_chromatic(const Graph &g, int d,
                                                            int max_vertices = kExactLpVertexLimit) {
    if (d < 1) throw std::invalid_argument("exact_fractional_chromatic requires d >= 1");
    if (max_vertices > kExactLpVertexLimit) max_vertices = kExactLpVertexLimit;
    if (g.n > max_vertices)
        throw std::invalid_argument("exact fractional chromatic number refused above " +
                                    std::to_string(max_vertices) + " vertices");
    if (g.n == 0) return {Rational(0), WeightedStableFamily{d, 0, {}, {}}};

    const Graph power = d >= 2 ? power_graph(g, d - 1) : Graph::from_edges(g.n, {});
    const auto sets = maximal_stable_sets(power, kExactLpStableSetLimit);
    auto lp = solve_min_cover_lp(sets, g.n);

    std::vector<std::vector<int>> chosen;
    std::vector<Rational> chosen_weights;
    for (std::size_t k = 0; k < sets.size(); ++k) {
        if (lp.weights[k] > 0) {
            chosen.push_back(sets[k]);
            chosen_weights.push_back(lp.weights[k]);
        }
    }
    detail::shrink_cover_to_partition(chosen, chosen_weights, g.n);

    FractionalChromaticResult result;
    result.value = lp.value;
    result.witness.d = d;
    result.witness.graph_n = g.n;
    result.witness.subsets = std::move(chosen);
    result.witness.weights = std::move(chosen_weights);
    return result;
}

}  // namespace graphmix
