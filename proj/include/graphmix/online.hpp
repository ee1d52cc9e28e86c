#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphmix/graph.hpp"
#include "graphmix/partition.hpp"
#include "graphmix/rational.hpp"

namespace graphmix {

// Finite hypothesis class with loss in [0,1] and a recorded population-loss
// vector. The adversary's outcome map g_t(w) = L(w) - loss(w, Z_t) needs L,
// so the game engine carries it explicitly.
struct FiniteHypothesisSetting {
    int m = 0;
    std::function<double(int, double)> loss;  // (hypothesis index, instance value)
    std::vector<double> population_loss;

    enum class Provenance { Synthetic, ExactClosedForm, ExactEnumeration, MonteCarloOracle };
    Provenance provenance = Provenance::Synthetic;
    double oracle_standard_error = 0.0;

    double loss_at(int w, double z) const {
        const double value = loss(w, z);
        if (!(value >= 0.0 && value <= 1.0))
            throw std::logic_error("loss left [0,1] at hypothesis " + std::to_string(w));
        return value;
    }

    void check() const {
        if (m < 1) throw std::invalid_argument("hypothesis class must be non-empty");
        if (int(population_loss.size()) != m)
            throw std::invalid_argument("population loss vector length mismatch");
        if (!loss) throw std::invalid_argument("loss function missing");
    }
};

// Point on the simplex over hypotheses.
struct DistributionOverW {
    std::vector<double> p;

    int size() const { return int(p.size()); }

    void check() const {
        double total = 0.0;
        for (double x : p) {
            if (!(x >= 0.0)) throw std::invalid_argument("negative probability");
            total += x;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("probabilities sum to " + std::to_string(total));
    }

    static DistributionOverW uniform(int m) {
        if (m < 1) throw std::invalid_argument("empty support");
        return {std::vector<double>(std::size_t(m), 1.0 / double(m))};
    }

    static DistributionOverW point_mass(int m, int w) {
        if (w < 0 || w >= m) throw std::invalid_argument("point mass out of range");
        std::vector<double> p(std::size_t(m), 0.0);
        p[std::size_t(w)] = 1.0;
        return {std::move(p)};
    }
};

inline double dot(const std::vector<double> &a, const std::vector<double> &b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) total += a[i] * b[i];
    return total;
}

// One play of the game: ordering maps round t to vertex ordering[t].
// shelter_d constrains which past outcomes an action may read; d = 1 is the
// unconstrained game. A family with matching d is required for d > 1
// composites and is validated at construction.
struct GameConfig {
    const Graph *graph = nullptr;
    std::vector<int> ordering;
    int shelter_d = 1;
    const WeightedStableFamily *family = nullptr;

    static std::vector<int> natural_ordering(int n) {
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        return order;
    }

    static std::vector<int> shuffled_ordering(int n, std::uint64_t seed) {
        std::vector<int> order = natural_ordering(n);
        CounterStream stream(seed, StreamTag::kOrdering, 0, 0);
        for (int i = n - 1; i > 0; --i) {
            const auto j = std::size_t(stream.next_u64() % std::uint64_t(i + 1));
            std::swap(order[std::size_t(i)], order[j]);
        }
        return order;
    }

    void check() const {
        if (!graph) throw std::invalid_argument("game config has no graph");
        if (shelter_d < 1) throw std::invalid_argument("shelter_d must be >= 1");
        if (int(ordering.size()) != graph->n)
            throw std::invalid_argument("ordering length != graph order");
        std::vector<char> seen(std::size_t(graph->n), 0);
        for (int v : ordering) {
            if (v < 0 || v >= graph->n) throw std::invalid_argument("ordering vertex out of range");
            if (seen[std::size_t(v)]) throw std::invalid_argument("ordering repeats a vertex");
            seen[std::size_t(v)] = 1;
        }
    }
};

struct RoundRecord {
    int round = 0;
    int vertex = 0;
    std::vector<double> action;   // pi_t
    std::vector<double> outcome;  // g_t over W
    double cost = 0.0;            // -<pi_t, g_t>
    std::vector<int> reads;       // earlier rounds this action depended on
};

struct Transcript {
    int m = 0;
    std::vector<RoundRecord> rounds;
    double cumulative_payoff = 0.0;  // M = sum_t <pi_t, g_t> = -sum of costs
};

// Behavioral learner interface. next_action must be a deterministic function
// of the observations delivered so far; reads reports which rounds those are.
class Learner {
  public:
    struct Act {
        std::vector<double> action;
        std::vector<int> reads;
    };

    virtual ~Learner() = default;
    virtual Act next_action(int round, int vertex) = 0;
    virtual void observe(int round, int vertex, const std::vector<double> &outcome) = 0;
};

// Exponentially weighted averaging over the outcome history:
//   action proportional to prior(w) exp(-eta sum of observed costs c(w)),
// with per-round expert cost c(w) = -g(w). eta = 0 plays the prior forever.
class EwaLearner final : public Learner {
  public:
    EwaLearner(DistributionOverW prior, double eta) : eta_(eta) {
        prior.check();
        if (!(eta >= 0.0)) throw std::invalid_argument("eta must be >= 0");
        log_prior_.reserve(prior.p.size());
        for (double p : prior.p)
            log_prior_.push_back(p > 0.0 ? std::log(p) : -kInfiniteLog);
        cumulative_gain_.assign(prior.p.size(), 0.0);
    }

    Act next_action(int, int) override {
        const std::size_t m = log_prior_.size();
        std::vector<double> logw(m);
        for (std::size_t w = 0; w < m; ++w)
            logw[w] = log_prior_[w] + eta_ * cumulative_gain_[w];
        const double peak = *std::max_element(logw.begin(), logw.end());
        double total = 0.0;
        std::vector<double> action(m);
        for (std::size_t w = 0; w < m; ++w) {
            action[w] = std::exp(logw[w] - peak);
            total += action[w];
        }
        for (auto &a : action) a /= total;
        return {std::move(action), observed_rounds_};
    }

    void observe(int round, int, const std::vector<double> &outcome) override {
        if (outcome.size() != cumulative_gain_.size())
            throw std::invalid_argument("outcome dimension mismatch");
        for (std::size_t w = 0; w < outcome.size(); ++w) cumulative_gain_[w] += outcome[w];
        observed_rounds_.push_back(round);
    }

  private:
    static constexpr double kInfiniteLog = 1e300;
    double eta_;
    std::vector<double> log_prior_;
    std::vector<double> cumulative_gain_;
    std::vector<int> observed_rounds_;
};

inline std::unique_ptr<Learner> make_ewa(DistributionOverW prior, double eta) {
    return std::make_unique<EwaLearner>(std::move(prior), eta);
}

// Appendix-style sheltered composite: one independent base learner per subset
// S_k; the action at vertex v is the weight-w_k convex mixture of the actions
// of the copies with v in S_k, and an outcome at u is delivered only to
// copies whose subset contains u.
class ShelteredLearner final : public Learner {
  public:
    using BaseFactory = std::function<std::unique_ptr<Learner>(std::size_t)>;

    ShelteredLearner(const BaseFactory &base_factory, const WeightedStableFamily &fam,
                     const GameConfig &config) {
        config.check();
        if (fam.d != config.shelter_d)
            throw std::invalid_argument("family distance parameter != config shelter_d");
        const ValidationReport report = validate_partition(*config.graph, fam);
        if (!report.valid)
            throw std::invalid_argument("family failed validation: " +
                                        std::string(violation_kind_name(report.violations[0].kind)));
        family_ = fam;
        const int n = config.graph->n;
        membership_.assign(std::size_t(n), {});
        for (std::size_t k = 0; k < fam.subsets.size(); ++k) {
            copies_.push_back(base_factory(k));
            if (!copies_.back()) throw std::invalid_argument("base factory returned null");
            weights_.push_back(to_double(fam.weights[k]));
            for (int v : fam.subsets[k]) membership_[std::size_t(v)].push_back(k);
        }
        delivered_.assign(copies_.size(), {});
        sub_actions_.assign(copies_.size(), {});
    }

    Act next_action(int round, int vertex) override {
        const auto &owners = membership_[std::size_t(vertex)];
        if (owners.empty()) throw std::logic_error("vertex not covered by any subset");
        Act act;
        std::vector<int> reads;
        for (std::size_t k : owners) {
            Learner::Act sub = copies_[k]->next_action(round, vertex);
            sub_actions_[k].emplace_back(round, sub.action);
            if (act.action.empty()) act.action.assign(sub.action.size(), 0.0);
            for (std::size_t w = 0; w < sub.action.size(); ++w)
                act.action[w] += weights_[k] * sub.action[w];
            reads.insert(reads.end(), delivered_[k].begin(), delivered_[k].end());
        }
        std::sort(reads.begin(), reads.end());
        reads.erase(std::unique(reads.begin(), reads.end()), reads.end());
        act.reads = std::move(reads);
        return act;
    }

    void observe(int round, int vertex, const std::vector<double> &outcome) override {
        for (std::size_t k : membership_[std::size_t(vertex)]) {
            copies_[k]->observe(round, vertex, outcome);
            delivered_[k].push_back(round);
        }
    }

    // Per-copy action log: (round, action) for every round the copy acted.
    const std::vector<std::vector<std::pair<int, std::vector<double>>>> &sub_actions() const {
        return sub_actions_;
    }

    const WeightedStableFamily &family() const { return family_; }

  private:
    WeightedStableFamily family_;
    std::vector<std::unique_ptr<Learner>> copies_;
    std::vector<double> weights_;
    std::vector<std::vector<std::size_t>> membership_;
    std::vector<std::vector<int>> delivered_;
    std::vector<std::vector<std::pair<int, std::vector<double>>>> sub_actions_;
};

inline std::unique_ptr<ShelteredLearner> make_sheltered(
    const ShelteredLearner::BaseFactory &base_factory, const WeightedStableFamily &fam,
    const GameConfig &config) {
    return std::make_unique<ShelteredLearner>(base_factory, fam, config);
}

// Runs the n-round game. All learner access is mediated here; afterwards the
// access log is audited against the d-exterior U_{v,d} = {u : dist(u,v) >= d}
// independently of how the learner routed outcomes internally.
inline Transcript play_game(const FiniteHypothesisSetting &setting, const GameConfig &config,
                            Learner &learner, const std::vector<double> &data) {
    setting.check();
    config.check();
    const Graph &g = *config.graph;
    if (int(data.size()) != g.n)
        throw std::invalid_argument("data length != graph order");

    Transcript transcript;
    transcript.m = setting.m;
    transcript.rounds.reserve(std::size_t(g.n));

    for (int t = 0; t < g.n; ++t) {
        const int vertex = config.ordering[std::size_t(t)];
        Learner::Act act = learner.next_action(t, vertex);
        if (int(act.action.size()) != setting.m)
            throw std::logic_error("action dimension mismatch");
        DistributionOverW{act.action}.check();

        RoundRecord record;
        record.round = t;
        record.vertex = vertex;
        record.action = std::move(act.action);
        record.reads = std::move(act.reads);
        record.outcome.resize(std::size_t(setting.m));
        const double z = data[std::size_t(vertex)];
        for (int w = 0; w < setting.m; ++w)
            record.outcome[std::size_t(w)] =
                setting.population_loss[std::size_t(w)] - setting.loss_at(w, z);
        const double payoff = dot(record.action, record.outcome);
        record.cost = -payoff;
        transcript.cumulative_payoff += payoff;
        transcript.rounds.push_back(std::move(record));
        learner.observe(t, vertex, transcript.rounds.back().outcome);
    }

    // Shelter audit. Unreachable under a correct composite construction.
    DistanceCache cache(g);
    for (const auto &record : transcript.rounds) {
        for (int s : record.reads) {
            if (s < 0 || s >= record.round)
                throw std::runtime_error("access audit: round " + std::to_string(record.round) +
                                         " read a non-past round");
            const int source = config.ordering[std::size_t(s)];
            if (!dist_at_least(cache.distance(source, record.vertex), config.shelter_d))
                throw std::runtime_error(
                    "access audit: round " + std::to_string(record.round) + " at vertex " +
                    std::to_string(record.vertex) + " read vertex " + std::to_string(source) +
                    " inside the " + std::to_string(config.shelter_d) + "-exterior");
        }
    }
    return transcript;
}

// R(Q) = sum_t (<Q, g_t> - <pi_t, g_t>), from the stored outcome vectors.
inline double regret_of(const Transcript &transcript, const DistributionOverW &comparator) {
    comparator.check();
    if (comparator.size() != transcript.m)
        throw std::invalid_argument("comparator dimension mismatch");
    double regret = 0.0;
    for (const auto &record : transcript.rounds)
        regret += dot(comparator.p, record.outcome) - dot(record.action, record.outcome);
    return regret;
}

// Concave base regret bounds F(T) the composite construction scales by
// W F(n/W).
struct RegretBoundForm {
    enum class Kind { SqrtScaled, Ewa, ParamFree };

    Kind kind = Kind::SqrtScaled;
    double c = 1.0;
    double kl = 0.0;
    double eta = 1.0;

    static RegretBoundForm sqrt_scaled(double c) {
        if (!(c >= 0.0)) throw std::invalid_argument("scale must be >= 0");
        RegretBoundForm f;
        f.kind = Kind::SqrtScaled;
        f.c = c;
        return f;
    }

    static RegretBoundForm ewa(double kl, double eta) {
        if (!(kl >= 0.0)) throw std::invalid_argument("KL must be >= 0");
        if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
        RegretBoundForm f;
        f.kind = Kind::Ewa;
        f.kl = kl;
        f.eta = eta;
        return f;
    }

    static RegretBoundForm param_free(double kl) {
        if (!(kl >= 0.0)) throw std::invalid_argument("KL must be >= 0");
        RegretBoundForm f;
        f.kind = Kind::ParamFree;
        f.kl = kl;
        return f;
    }

    double value_at(double T) const {
        switch (kind) {
            case Kind::SqrtScaled: return c * std::sqrt(T);
            case Kind::Ewa: return kl / eta + eta * T / 2.0;
            case Kind::ParamFree: return std::sqrt(3.0 * (3.0 + kl) * T);
        }
        return 0.0;
    }
};

// W F(n / W): the sheltered-composite regret guarantee.
inline double sheltered_regret_bound(double weight_sum, const RegretBoundForm &form,
                                     long long n) {
    if (!(weight_sum >= 1.0)) throw std::invalid_argument("weight sum must be >= 1");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    return weight_sum * form.value_at(double(n) / weight_sum);
}

}  // namespace graphmix
