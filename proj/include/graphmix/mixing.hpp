#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphmix/graph.hpp"
#include "graphmix/rng.hpp"

namespace graphmix {

// +infinity is a first-class profile value: it propagates through sums and
// disqualifies a distance in minimization.
inline constexpr double kInfinite = std::numeric_limits<double>::infinity();

// Non-negative non-increasing sequence phi = (phi_d)_{d>=1}.
// threshold: classical dependency-graph behaviour (cap up to d_star, then 0);
// geometric: C e^{-d/tau}; algebraic: C d^{-r}.
struct MixingProfile {
    enum class Kind { Zero, Threshold, Geometric, Algebraic, Table };

    Kind kind = Kind::Zero;
    int d_star = 0;
    double cap = 0.0;
    double coeff = 0.0;  // C
    double tau = 1.0;
    double power = 1.0;  // r
    std::vector<double> table;

    static MixingProfile zero() { return {}; }

    static MixingProfile threshold(int d_star, double cap) {
        if (d_star < 0) throw std::invalid_argument("threshold d_star must be >= 0");
        if (!(cap >= 0.0)) throw std::invalid_argument("threshold cap must be >= 0 or infinite");
        MixingProfile p;
        p.kind = Kind::Threshold;
        p.d_star = d_star;
        p.cap = cap;
        return p;
    }

    static MixingProfile geometric(double C, double tau) {
        if (!(C > 0.0) || !(tau > 0.0))
            throw std::invalid_argument("geometric mixing requires C > 0 and tau > 0");
        MixingProfile p;
        p.kind = Kind::Geometric;
        p.coeff = C;
        p.tau = tau;
        return p;
    }

    static MixingProfile algebraic(double C, double r) {
        if (!(C > 0.0) || !(r > 0.0))
            throw std::invalid_argument("algebraic mixing requires C > 0 and r > 0");
        MixingProfile p;
        p.kind = Kind::Algebraic;
        p.coeff = C;
        p.power = r;
        return p;
    }

    static MixingProfile from_table(std::vector<double> values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!(values[i] >= 0.0))
                throw std::invalid_argument("profile table values must be >= 0");
            if (i > 0 && values[i] > values[i - 1])
                throw std::invalid_argument("profile table must be non-increasing");
        }
        MixingProfile p;
        p.kind = Kind::Table;
        p.table = std::move(values);
        return p;
    }

    double value(int d) const {
        if (d < 1) throw std::invalid_argument("phi is indexed by d >= 1");
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::Threshold: return d <= d_star ? cap : 0.0;
            case Kind::Geometric: return coeff * std::exp(-double(d) / tau);
            case Kind::Algebraic: return coeff * std::pow(double(d), -power);
            case Kind::Table:
                if (table.empty()) return 0.0;
                return table[std::min(std::size_t(d) - 1, table.size() - 1)];
        }
        return 0.0;
    }
};

inline double phi_value(const MixingProfile &profile, int d) { return profile.value(d); }

// Bounded marginal / noise descriptor: continuous uniform on [lo, hi] or the
// uniform distribution over an explicit finite level set.
struct NoiseSpec {
    enum class Kind { Uniform, Levels };

    Kind kind = Kind::Uniform;
    double lo = 0.0, hi = 1.0;
    std::vector<double> levels;

    static NoiseSpec uniform(double lo, double hi) {
        if (!(lo < hi)) throw std::invalid_argument("uniform noise requires lo < hi");
        NoiseSpec s;
        s.kind = Kind::Uniform;
        s.lo = lo;
        s.hi = hi;
        return s;
    }

    static NoiseSpec uniform_levels(std::vector<double> values) {
        if (values.empty()) throw std::invalid_argument("level set must be non-empty");
        NoiseSpec s;
        s.kind = Kind::Levels;
        s.levels = std::move(values);
        s.lo = *std::min_element(s.levels.begin(), s.levels.end());
        s.hi = *std::max_element(s.levels.begin(), s.levels.end());
        return s;
    }

    bool discrete() const { return kind == Kind::Levels; }

    double mean() const {
        if (kind == Kind::Uniform) return 0.5 * (lo + hi);
        double sum = 0.0;
        for (double v : levels) sum += v;
        return sum / double(levels.size());
    }

    double draw(CounterStream &stream) const {
        const double u = stream.next_double();
        if (kind == Kind::Uniform) return lo + u * (hi - lo);
        const auto idx = std::min(std::size_t(u * double(levels.size())), levels.size() - 1);
        return levels[idx];
    }
};

// Bounded post-map applied to the local average.
struct ValueTransform {
    enum class Kind { Identity, Affine };

    Kind kind = Kind::Identity;
    double scale = 1.0, shift = 0.0;

    static ValueTransform identity() { return {}; }

    static ValueTransform affine(double scale, double shift) {
        if (scale == 0.0) throw std::invalid_argument("affine transform requires scale != 0");
        ValueTransform t;
        t.kind = Kind::Affine;
        t.scale = scale;
        t.shift = shift;
        return t;
    }

    double apply(double x) const { return kind == Kind::Identity ? x : scale * x + shift; }
};

// Generative per-vertex models:
//   iid              independent draws from the marginal;
//   local_average    X_v = T(mean of noise over the radius-r ball around v);
//   distance_weighted X_v = clip(sum_u alpha^dist(u,v) xi_u / normalizer),
//                     diagnostics only, no certified profile.
struct FieldModel {
    enum class Kind { Iid, LocalAverage, DistanceWeighted };

    Kind kind = Kind::Iid;
    NoiseSpec noise = NoiseSpec::uniform(0.0, 1.0);
    int radius = 0;
    ValueTransform transform = ValueTransform::identity();
    double alpha = 0.5;
    double clip_lo = 0.0, clip_hi = 1.0;

    static FieldModel iid(NoiseSpec marginal) {
        FieldModel m;
        m.kind = Kind::Iid;
        m.noise = std::move(marginal);
        return m;
    }

    static FieldModel local_average(int radius, NoiseSpec noise,
                                    ValueTransform transform = ValueTransform::identity()) {
        if (radius < 0) throw std::invalid_argument("local_average requires radius >= 0");
        FieldModel m;
        m.kind = Kind::LocalAverage;
        m.radius = radius;
        m.noise = std::move(noise);
        m.transform = transform;
        return m;
    }

    static FieldModel distance_weighted(double alpha, double clip_lo, double clip_hi,
                                        NoiseSpec noise) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("distance_weighted requires alpha in (0,1)");
        if (!(clip_lo < clip_hi)) throw std::invalid_argument("clip interval must be non-empty");
        FieldModel m;
        m.kind = Kind::DistanceWeighted;
        m.alpha = alpha;
        m.clip_lo = clip_lo;
        m.clip_hi = clip_hi;
        m.noise = std::move(noise);
        return m;
    }

    // Interval [lo, lo + Delta] every sampled value lies in.
    std::pair<double, double> value_range() const {
        switch (kind) {
            case Kind::Iid: return {noise.lo, noise.hi};
            case Kind::LocalAverage: {
                const double a = transform.apply(noise.lo);
                const double b = transform.apply(noise.hi);
                return {std::min(a, b), std::max(a, b)};
            }
            case Kind::DistanceWeighted: return {clip_lo, clip_hi};
        }
        return {0.0, 1.0};
    }

    double range_length() const {
        const auto [lo, hi] = value_range();
        return hi - lo;
    }

    std::string tag() const {
        std::ostringstream out;
        switch (kind) {
            case Kind::Iid: out << "iid"; break;
            case Kind::LocalAverage: out << "local_average:r=" << radius; break;
            case Kind::DistanceWeighted: out << "distance_weighted:alpha=" << alpha; break;
        }
        return out.str();
    }
};

struct Sample {
    std::vector<double> values;
    std::string model_tag;
    std::uint64_t seed = 0;
    long long trial = 0;
};

inline MixingProfile theoretical_profile(const FieldModel &model) {
    switch (model.kind) {
        case FieldModel::Kind::Iid: return MixingProfile::zero();
        case FieldModel::Kind::LocalAverage: {
            if (model.radius == 0) return MixingProfile::zero();
            // Beyond distance 2r the noise balls of X_v and of everything in
            // F_{v,d} are disjoint, so the centered conditional mean is 0;
            // below that we certify only the crude cap Delta.
            return MixingProfile::threshold(2 * model.radius, model.range_length());
        }
        case FieldModel::Kind::DistanceWeighted:
            throw std::invalid_argument(
                "distance_weighted has no certified profile; use empirical diagnostics");
    }
    throw std::invalid_argument("unknown field model");
}

// Samples a FieldModel on a fixed graph. Neighborhoods and exact means are
// precomputed once; sampling is then pure in (seed, trial).
class FieldSampler {
  public:
    enum class MeanProvenance { ExactClosedForm, MonteCarloOracle };

    FieldSampler(const Graph &g, FieldModel model)
        : graph_(&g), model_(std::move(model)) {
        if (model_.kind == FieldModel::Kind::LocalAverage) {
            neighborhoods_.resize(std::size_t(g.n));
            for (int v = 0; v < g.n; ++v) {
                const DistanceRow row = distances_from(g, v);
                for (int u = 0; u < g.n; ++u)
                    if (row.reachable(u) && row.dist[std::size_t(u)] <= model_.radius)
                        neighborhoods_[std::size_t(v)].push_back(u);
            }
        } else if (model_.kind == FieldModel::Kind::DistanceWeighted) {
            if (g.n > 4000)
                throw std::invalid_argument(
            "distance_weighted keeps dense per-vertex weights; refused above 4000 vertices");
            dw_weights_.resize(std::size_t(g.n));
            for (int v = 0; v < g.n; ++v) {
                const DistanceRow row = distances_from(g, v);
                double normalizer = 0.0;
                auto &weights = dw_weights_[std::size_t(v)];
                weights.assign(std::size_t(g.n), 0.0);
                for (int u = 0; u < g.n; ++u) {
                    if (!row.reachable(u)) continue;  // alpha^inf = 0
                    const double w = std::pow(model_.alpha, double(row.dist[std::size_t(u)]));
                    weights[std::size_t(u)] = w;
                    normalizer += w;
                }
                for (auto &w : weights) w /= normalizer;
            }
        }
        compute_means();
    }

    const Graph &graph() const { return *graph_; }
    const FieldModel &model() const { return model_; }
    const std::vector<double> &vertex_means() const { return means_; }
    MeanProvenance mean_provenance() const { return mean_provenance_; }
    double mean_standard_error() const { return mean_standard_error_; }

    std::vector<double> sample_noise(std::uint64_t seed, long long trial) const {
        std::vector<double> noise(std::size_t(graph_->n));
        for (int v = 0; v < graph_->n; ++v) {
            CounterStream stream(seed, StreamTag::kFieldNoise, std::uint64_t(trial),
                                 std::uint64_t(v));
            noise[std::size_t(v)] = model_.noise.draw(stream);
        }
        return noise;
    }

    Sample from_noise(const std::vector<double> &noise, std::uint64_t seed,
                      long long trial) const {
        Sample sample;
        sample.model_tag = model_.tag();
        sample.seed = seed;
        sample.trial = trial;
        sample.values.resize(std::size_t(graph_->n));
        const auto [range_lo, range_hi] = model_.value_range();
        for (int v = 0; v < graph_->n; ++v) {
            double x = 0.0;
            switch (model_.kind) {
                case FieldModel::Kind::Iid: x = noise[std::size_t(v)]; break;
                case FieldModel::Kind::LocalAverage: {
                    const auto &ball = neighborhoods_[std::size_t(v)];
                    double sum = 0.0;
                    for (int u : ball) sum += noise[std::size_t(u)];
                    x = model_.transform.apply(sum / double(ball.size()));
                    break;
                }
                case FieldModel::Kind::DistanceWeighted: {
                    const auto &weights = dw_weights_[std::size_t(v)];
                    double sum = 0.0;
                    for (int u = 0; u < graph_->n; ++u) sum += weights[std::size_t(u)] * noise[std::size_t(u)];
                    x = std::clamp(sum, model_.clip_lo, model_.clip_hi);
                    break;
                }
            }
            if (!(x >= range_lo - 1e-12 && x <= range_hi + 1e-12))
                throw std::logic_error("sampled value escaped the declared range");
            sample.values[std::size_t(v)] = std::clamp(x, range_lo, range_hi);
        }
        return sample;
    }

    Sample sample(std::uint64_t seed, long long trial) const {
        return from_noise(sample_noise(seed, trial), seed, trial);
    }

    // Exact marginal distribution of X_v as (value, probability) pairs.
    // Available for discrete noise with a small enough configuration count;
    // callers fall back to the Monte Carlo oracle otherwise.
    std::optional<std::vector<std::pair<double, double>>> value_distribution(int v) const {
        if (!model_.noise.discrete()) return std::nullopt;
        const auto &levels = model_.noise.levels;
        if (model_.kind == FieldModel::Kind::Iid) {
            std::vector<std::pair<double, double>> dist;
            const double p = 1.0 / double(levels.size());
            for (double level : levels) dist.emplace_back(level, p);
            return collapse(dist);
        }
        if (model_.kind != FieldModel::Kind::LocalAverage) return std::nullopt;
        const auto &ball = neighborhoods_[std::size_t(v)];
        const std::size_t k = levels.size();
        double configs = std::pow(double(k), double(ball.size()));
        if (configs > double(1u << 20)) return std::nullopt;
        std::vector<std::size_t> digits(ball.size(), 0);
        const double p = 1.0 / configs;
        std::vector<std::pair<double, double>> dist;
        while (true) {
            double sum = 0.0;
            for (std::size_t i = 0; i < ball.size(); ++i) sum += levels[digits[i]];
            dist.emplace_back(model_.transform.apply(sum / double(ball.size())), p);
            std::size_t pos = 0;
            while (pos < digits.size()) {
                if (++digits[pos] < k) break;
                digits[pos] = 0;
                ++pos;
            }
            if (pos == digits.size()) break;
        }
        return collapse(dist);
    }

    // P(X_v >= theta), exact when the model admits it.
    std::optional<double> exact_upper_prob(int v, double theta) const {
        if (model_.kind == FieldModel::Kind::Iid && !model_.noise.discrete()) {
            const double lo = model_.noise.lo, hi = model_.noise.hi;
            if (theta <= lo) return 1.0;
            if (theta > hi) return 0.0;
            return (hi - theta) / (hi - lo);
        }
        const auto dist = value_distribution(v);
        if (!dist) return std::nullopt;
        double p = 0.0;
        for (const auto &[value, prob] : *dist)
            if (value >= theta) p += prob;
        return p;
    }

  private:
    static std::vector<std::pair<double, double>> collapse(
        std::vector<std::pair<double, double>> dist) {
        std::sort(dist.begin(), dist.end());
        std::vector<std::pair<double, double>> out;
        for (const auto &[value, prob] : dist) {
            if (!out.empty() && out.back().first == value) out.back().second += prob;
            else out.emplace_back(value, prob);
        }
        return out;
    }

    void compute_means() {
        means_.assign(std::size_t(graph_->n), 0.0);
        const double noise_mean = model_.noise.mean();
        switch (model_.kind) {
            case FieldModel::Kind::Iid:
                std::fill(means_.begin(), means_.end(), noise_mean);
                mean_provenance_ = MeanProvenance::ExactClosedForm;
                return;
            case FieldModel::Kind::LocalAverage:
                // Identity/affine transforms commute with expectation.
                for (int v = 0; v < graph_->n; ++v)
                    means_[std::size_t(v)] = model_.transform.apply(noise_mean);
                mean_provenance_ = MeanProvenance::ExactClosedForm;
                return;
            case FieldModel::Kind::DistanceWeighted: {
                // Clipping is nonlinear: 1e6-draw oracle, standard error recorded.
                const long long draws = 1000000;
                std::vector<double> sum(std::size_t(graph_->n), 0.0);
                std::vector<double> sumsq(std::size_t(graph_->n), 0.0);
                for (long long t = 0; t < draws; ++t) {
                    const Sample s = sample(0x6f7261636cULL, t);
                    for (int v = 0; v < graph_->n; ++v) {
                        sum[std::size_t(v)] += s.values[std::size_t(v)];
                        sumsq[std::size_t(v)] += s.values[std::size_t(v)] * s.values[std::size_t(v)];
                    }
                }
                double worst_se = 0.0;
                for (int v = 0; v < graph_->n; ++v) {
                    means_[std::size_t(v)] = sum[std::size_t(v)] / double(draws);
                    const double var = sumsq[std::size_t(v)] / double(draws) -
                                       means_[std::size_t(v)] * means_[std::size_t(v)];
                    worst_se = std::max(worst_se, std::sqrt(std::max(0.0, var) / double(draws)));
                }
                mean_provenance_ = MeanProvenance::MonteCarloOracle;
                mean_standard_error_ = worst_se;
                return;
            }
        }
    }

    const Graph *graph_;
    FieldModel model_;
    std::vector<std::vector<int>> neighborhoods_;
    std::vector<std::vector<double>> dw_weights_;
    std::vector<double> means_;
    MeanProvenance mean_provenance_ = MeanProvenance::ExactClosedForm;
    double mean_standard_error_ = 0.0;
};

inline Sample sample_field(const Graph &g, const FieldModel &model, std::uint64_t seed,
                           long long trial) {
    return FieldSampler(g, model).sample(seed, trial);
}

// Empirical dependence diagnostic: max |covariance| over sampled vertex pairs
// at distance >= d, with the Monte Carlo standard error of the maximizing
// pair. Two passes keep memory flat.
struct MaxCovReport {
    bool has_pair = false;
    double max_abs_cov = 0.0;
    double standard_error = 0.0;
    std::pair<int, int> argmax_pair{-1, -1};
    int pairs_checked = 0;
    long long trials = 0;
};

inline MaxCovReport empirical_max_cov(const Graph &g, const FieldModel &model, int d,
                                      long long trials, std::uint64_t seed) {
    if (trials < 100) throw std::invalid_argument("empirical_max_cov requires trials >= 100");
    if (d < 1) throw std::invalid_argument("empirical_max_cov requires d >= 1");
    constexpr std::size_t kPairCap = 1000;

    std::vector<std::pair<int, int>> pairs;
    std::size_t qualifying = 0;
    for (int v = 0; v < g.n; ++v) {
        const DistanceRow row = distances_from(g, v);
        for (int u = v + 1; u < g.n; ++u) {
            if (!row.at_least(u, d)) continue;
            ++qualifying;
            if (pairs.size() < kPairCap) {
                pairs.emplace_back(v, u);
            } else {
                // Reservoir step keyed by the pair id: deterministic in seed.
                const std::uint64_t slot = CounterStream(seed, StreamTag::kPairPick,
                                                         std::uint64_t(v), std::uint64_t(u))
                                               .next_u64() %
                                           qualifying;
                if (slot < kPairCap) pairs[std::size_t(slot)] = {v, u};
            }
        }
    }

    MaxCovReport report;
    report.trials = trials;
    report.pairs_checked = int(pairs.size());
    if (pairs.empty()) return report;  // "no qualifying pair"
    report.has_pair = true;

    FieldSampler sampler(g, model);
    std::vector<double> mean(std::size_t(g.n), 0.0);
    for (long long t = 0; t < trials; ++t) {
        const Sample s = sampler.sample(seed, t);
        for (int v = 0; v < g.n; ++v) mean[std::size_t(v)] += s.values[std::size_t(v)];
    }
    for (auto &m : mean) m /= double(trials);

    std::vector<double> cov(pairs.size(), 0.0), covsq(pairs.size(), 0.0);
    for (long long t = 0; t < trials; ++t) {
        const Sample s = sampler.sample(seed, t);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto [u, v] = pairs[i];
            const double q = (s.values[std::size_t(u)] - mean[std::size_t(u)]) *
                             (s.values[std::size_t(v)] - mean[std::size_t(v)]);
            cov[i] += q;
            covsq[i] += q * q;
        }
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double c = cov[i] / double(trials);
        if (std::abs(c) >= std::abs(report.max_abs_cov)) {
            report.max_abs_cov = std::abs(c);
            report.argmax_pair = pairs[i];
            const double var = covsq[i] / double(trials) - c * c;
            report.standard_error = std::sqrt(std::max(0.0, var) / double(trials));
        }
    }
    return report;
}

}  // namespace graphmix
