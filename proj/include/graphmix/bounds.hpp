#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphmix/mixing.hpp"

namespace graphmix {

namespace detail {

inline void check_common(long long n, double delta) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
}

inline void check_phi_w(double phi_d, double w) {
    if (!(phi_d >= 0.0)) throw std::invalid_argument("phi_d must be >= 0 (or infinite)");
    if (!(w >= 1.0)) throw std::invalid_argument("weight sum must be >= 1");
}

}  // namespace detail

// Upper-tail deviation of the empirical mean of a (G,phi)-mixing process with
// values in an interval of length Delta, using a partition of weight sum W:
//   phi_d + Delta * sqrt(W log(1/delta) / (2n)).
// With W = 1 and phi = 0 this is exactly the Hoeffding deviation.
inline double concentration_bound(long long n, double delta, double Delta, double phi_d,
                                  double W) {
    detail::check_common(n, delta);
    if (!(Delta > 0.0)) throw std::invalid_argument("Delta must be > 0");
    detail::check_phi_w(phi_d, W);
    if (phi_d == kInfinite) return kInfinite;
    return phi_d + Delta * std::sqrt(W * std::log(1.0 / delta) / (2.0 * double(n)));
}

// Chernoff tail behind the bound above: for t > phi_d,
//   P(mean >= t) <= exp(-(2n/W) (t - phi_d)^2 / Delta^2).
// Evaluating it at concentration_bound's output returns delta.
inline double tail_probability(long long n, double Delta, double W, double phi_d, double t) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(Delta > 0.0)) throw std::invalid_argument("Delta must be > 0");
    detail::check_phi_w(phi_d, W);
    if (!(t > phi_d)) throw std::invalid_argument("tail bound is only valid for t > phi_d");
    const double z = (t - phi_d) / Delta;
    return std::exp(-(2.0 * double(n) / W) * z * z);
}

// PAC-Bayes generalization excess for i.i.d. data with losses in [0,1]:
//   sqrt((3 KL + 9)/n) + sqrt(log(1/delta)/(2n)).
inline double pacbayes_bound_iid(long long n, double delta, double kl) {
    detail::check_common(n, delta);
    if (!(kl >= 0.0)) throw std::invalid_argument("KL must be >= 0 (or infinite)");
    return (std::sqrt(3.0 * kl + 9.0) + std::sqrt(0.5 * std::log(1.0 / delta))) *
           std::sqrt(1.0 / double(n));
}

// Graph-mixing counterpart:
//   phi_d + (sqrt(3 KL + 9) + sqrt(log(1/delta)/2)) sqrt(W/n).
// Coincides with the i.i.d. bound term by term when W = 1, phi_d = 0.
inline double pacbayes_bound_graph(long long n, double delta, double kl, double phi_d,
                                   double W) {
    detail::check_common(n, delta);
    if (!(kl >= 0.0)) throw std::invalid_argument("KL must be >= 0 (or infinite)");
    detail::check_phi_w(phi_d, W);
    if (phi_d == kInfinite || kl == kInfinite) return kInfinite;
    return phi_d + (std::sqrt(3.0 * kl + 9.0) + std::sqrt(0.5 * std::log(1.0 / delta))) *
                       std::sqrt(W / double(n));
}

// Geometric-mixing tuning rule d = ceil(tau log(C n)), clamped to [1, n].
inline int tune_d_geometric(double C, double tau, long long n) {
    if (!(C > 0.0) || !(tau > 0.0)) throw std::invalid_argument("C and tau must be > 0");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    const double raw = std::ceil(tau * std::log(C * double(n)));
    long long d = raw < 1.0 ? 1 : (long long)(raw);
    if (d > n) d = n;
    return int(d);
}

struct BoundEntry {
    int d = 0;
    double phi = 0.0;
    double weight_sum = 1.0;
    double value = kInfinite;
};

struct BoundReport {
    std::string kind;
    long long n = 0;
    double delta = 0.0;
    double Delta = 0.0;
    std::vector<BoundEntry> table;
    std::optional<int> best_d;  // empty: no finite bound among the candidates
    double value = kInfinite;
};

// min over candidate d of the concentration bound, skipping entries with an
// infinite profile value. Ties break toward smaller d. weight_sums lists
// (d, W_d) pairs from certified partitions.
inline BoundReport best_concentration_bound(long long n, double delta, double Delta,
                                            const MixingProfile &profile,
                                            const std::vector<std::pair<int, double>> &weight_sums) {
    detail::check_common(n, delta);
    if (!(Delta > 0.0)) throw std::invalid_argument("Delta must be > 0");
    if (weight_sums.empty()) throw std::invalid_argument("no candidate d supplied");
    BoundReport report;
    report.kind = "concentration_min_d";
    report.n = n;
    report.delta = delta;
    report.Delta = Delta;
    auto candidates = weight_sums;
    std::sort(candidates.begin(), candidates.end());
    for (const auto &[d, w] : candidates) {
        if (d < 1) throw std::invalid_argument("candidate d must be >= 1");
        BoundEntry entry;
        entry.d = d;
        entry.phi = profile.value(d);
        entry.weight_sum = w;
        entry.value = concentration_bound(n, delta, Delta, entry.phi, w);
        report.table.push_back(entry);
        if (entry.value < report.value) {
            report.value = entry.value;
            report.best_d = d;
        }
    }
    return report;
}

}  // namespace graphmix
