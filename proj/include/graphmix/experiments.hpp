#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "graphmix/bounds.hpp"
#include "graphmix/exact_lp.hpp"
#include "graphmix/graph.hpp"
#include "graphmix/mixing.hpp"
#include "graphmix/online.hpp"
#include "graphmix/partition.hpp"

namespace graphmix {

// Gibbs posterior: probs proportional to prior(w) exp(-beta_n * losses(w)),
// where beta_n is the total inverse temperature (beta times sample size).
// beta_n = 0 returns the prior; beta_n = inf returns uniform over the argmin
// set of the losses.
inline DistributionOverW gibbs_posterior(const DistributionOverW &prior,
                                         const std::vector<double> &losses, double beta_n) {
    prior.check();
    if (losses.size() != prior.p.size())
        throw std::invalid_argument("losses length != prior support size");
    if (!(beta_n >= 0.0)) throw std::invalid_argument("inverse temperature must be >= 0");
    const std::size_t m = losses.size();
    DistributionOverW post;
    post.p.assign(m, 0.0);
    if (beta_n == kInfinite) {
        double best = kInfinite;
        for (std::size_t w = 0; w < m; ++w)
            if (prior.p[w] > 0.0) best = std::min(best, losses[w]);
        double total = 0.0;
        for (std::size_t w = 0; w < m; ++w)
            if (prior.p[w] > 0.0 && losses[w] == best) total += prior.p[w];
        for (std::size_t w = 0; w < m; ++w)
            if (prior.p[w] > 0.0 && losses[w] == best) post.p[w] = prior.p[w] / total;
        return post;
    }
    std::vector<double> logw(m, -1e300);
    double peak = -1e300;
    for (std::size_t w = 0; w < m; ++w) {
        if (prior.p[w] <= 0.0) continue;
        logw[w] = std::log(prior.p[w]) - beta_n * losses[w];
        peak = std::max(peak, logw[w]);
    }
    double total = 0.0;
    for (std::size_t w = 0; w < m; ++w) {
        if (prior.p[w] <= 0.0) continue;
        post.p[w] = std::exp(logw[w] - peak);
        total += post.p[w];
    }
    for (auto &p : post.p) p /= total;
    return post;
}

// KL(p | q) with 0 log 0 = 0; infinite when p charges a null set of q.
inline double kl_divergence(const DistributionOverW &p, const DistributionOverW &q) {
    p.check();
    q.check();
    if (p.p.size() != q.p.size()) throw std::invalid_argument("KL dimension mismatch");
    double kl = 0.0;
    for (std::size_t w = 0; w < p.p.size(); ++w) {
        if (p.p[w] == 0.0) continue;
        if (q.p[w] == 0.0) return kInfinite;
        kl += p.p[w] * std::log(p.p[w] / q.p[w]);
    }
    return std::max(0.0, kl);
}

struct WilsonInterval {
    double lower = 0.0;
    double upper = 1.0;
};

// 95% score interval for a binomial rate.
inline WilsonInterval wilson_interval(long long successes, long long trials,
                                      double z = 1.959963984540054) {
    if (trials < 1) throw std::invalid_argument("wilson interval needs trials >= 1");
    if (successes < 0 || successes > trials) throw std::invalid_argument("bad success count");
    const double n = double(trials);
    const double phat = double(successes) / n;
    const double z2 = z * z;
    const double center = (phat + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double margin =
        z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    return {std::max(0.0, center - margin), std::min(1.0, center + margin)};
}

// Threshold predictors on a scalar field value:
//   loss(w, z) = |1{z >= theta_w} - 1{z >= theta_star}|.
// Losses are per-vertex functions of the local field, so the loss process
// inherits the field's mixing profile verbatim.
struct ThresholdHypothesesSpec {
    int m = 8;
    double theta_lo = 0.0;
    double theta_hi = 1.0;
    double label_threshold = 0.5;  // theta_star

    std::vector<double> thetas() const {
        if (m < 1) throw std::invalid_argument("hypothesis count must be >= 1");
        std::vector<double> grid(std::size_t(m));
        if (m == 1) {
            grid[0] = 0.5 * (theta_lo + theta_hi);
        } else {
            for (int w = 0; w < m; ++w)
                grid[std::size_t(w)] =
                    theta_lo + (theta_hi - theta_lo) * double(w) / double(m - 1);
        }
        return grid;
    }
};

// Builds the finite hypothesis setting from a field sampler; L(w) comes from
// the exact marginal distribution when the model admits one, else from a
// 10^6-draw oracle whose standard error is recorded and budgeted as slack.
inline FiniteHypothesisSetting make_threshold_setting(const FieldSampler &sampler,
                                                      const ThresholdHypothesesSpec &spec,
                                                      int representative_vertex = 0) {
    const auto thetas = spec.thetas();
    const double theta_star = spec.label_threshold;
    FiniteHypothesisSetting setting;
    setting.m = spec.m;
    setting.loss = [thetas, theta_star](int w, double z) {
        const double predicted = z >= thetas[std::size_t(w)] ? 1.0 : 0.0;
        const double label = z >= theta_star ? 1.0 : 0.0;
        return std::abs(predicted - label);
    };
    setting.population_loss.assign(std::size_t(spec.m), 0.0);

    const auto upper_star = sampler.exact_upper_prob(representative_vertex, theta_star);
    bool exact = upper_star.has_value();
    if (exact) {
        for (int w = 0; w < spec.m; ++w) {
            const auto upper_w =
                sampler.exact_upper_prob(representative_vertex, thetas[std::size_t(w)]);
            if (!upper_w) {
                exact = false;
                break;
            }
            // Threshold events are nested, so the disagreement probability is
            // the gap between the two upper probabilities.
            setting.population_loss[std::size_t(w)] = std::abs(*upper_w - *upper_star);
        }
    }
    if (exact) {
        setting.provenance = sampler.model().noise.discrete()
                                 ? FiniteHypothesisSetting::Provenance::ExactEnumeration
                                 : FiniteHypothesisSetting::Provenance::ExactClosedForm;
        return setting;
    }

    const long long draws = 1000000;
    std::vector<double> sum(std::size_t(spec.m), 0.0), sumsq(std::size_t(spec.m), 0.0);
    for (long long t = 0; t < draws; ++t) {
        const Sample s = sampler.sample(0x706f704cULL, t);
        const double z = s.values[std::size_t(representative_vertex)];
        for (int w = 0; w < spec.m; ++w) {
            const double v = setting.loss(w, z);
            sum[std::size_t(w)] += v;
            sumsq[std::size_t(w)] += v * v;
        }
    }
    double worst_se = 0.0;
    for (int w = 0; w < spec.m; ++w) {
        const double mean = sum[std::size_t(w)] / double(draws);
        setting.population_loss[std::size_t(w)] = mean;
        const double var = sumsq[std::size_t(w)] / double(draws) - mean * mean;
        worst_se = std::max(worst_se, std::sqrt(std::max(0.0, var) / double(draws)));
    }
    setting.provenance = FiniteHypothesisSetting::Provenance::MonteCarloOracle;
    setting.oracle_standard_error = worst_se;
    return setting;
}

enum class ProfileSource { Theoretical, Declared };
enum class PartitionSource { Residue, Greedy, Explicit };
enum class DSelection { Fixed, Tuned };

// Everything one certification run needs; serialized as a JSON document.
struct ExperimentConfig {
    GraphSpec graph = GraphSpec::path(1);
    FieldModel field = FieldModel::iid(NoiseSpec::uniform(0.0, 1.0));

    ProfileSource profile_source = ProfileSource::Theoretical;
    MixingProfile declared_profile;  // used when profile_source == Declared

    PartitionSource partition_source = PartitionSource::Residue;
    ColoringStrategy greedy_strategy = ColoringStrategy::Dsatur;
    std::optional<WeightedStableFamily> explicit_family;
    std::vector<int> d_candidates;  // for the min-over-d scan; defaulted when empty

    DSelection d_selection = DSelection::Fixed;
    int fixed_d = 1;

    ThresholdHypothesesSpec hypotheses;
    std::vector<double> prior;  // empty: uniform
    double beta = 0.0;          // Gibbs inverse temperature; scale used is beta * n
    double delta = 0.05;
    long long trials = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    long long audit_trials = 0;
    double learner_eta = 0.5;
    bool allow_uncertified = false;
};

struct TrialOutcome {
    long long trial = 0;
    double target = 0.0;  // empirical mean, or L(P_hat)
    double bound = 0.0;
    bool violated = false;
    double kl = 0.0;
    double empirical_loss = 0.0;
    double population_loss = 0.0;
};

struct CertificationReport {
    std::string kind;
    long long trials = 0;
    long long violations = 0;
    double rate = 0.0;
    WilsonInterval wilson;
    double delta = 0.0;
    double slack = 0.0;          // oracle slack added to the bound
    bool certified_profile = true;
    BoundReport bound_table;     // concentration runs
    int chosen_d = 1;            // generalization runs
    double weight_sum_used = 1.0;
    double phi_d_used = 0.0;
    double audit_max_gap = 0.0;  // worst |(L - Lhat) - (R + M)/n| over audits
    long long audited = 0;
    std::vector<std::string> warnings;
    std::vector<TrialOutcome> outcomes;
    double runtime_seconds = 0.0;  // excluded from serialized artifacts

    bool passed(double threshold) const { return wilson.upper <= threshold; }
};

namespace detail {

// Deterministic parallel map: results land in trial order regardless of the
// number of workers.
template <typename Fn>
void parallel_trials(long long trials, int threads, const Fn &fn) {
    threads = std::max(1, threads);
    if (threads == 1 || trials < 2) {
        for (long long t = 0; t < trials; ++t) fn(t);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(threads));
    for (int worker = 0; worker < threads; ++worker) {
        pool.emplace_back([=]() {
            for (long long t = worker; t < trials; t += threads) fn(t);
        });
    }
    for (auto &th : pool) th.join();
}

inline bool vertex_transitive_by_kind(const GraphSpec &spec) {
    switch (spec.kind) {
        case GraphSpec::Kind::Cycle: return true;
        case GraphSpec::Kind::Grid: return spec.wrap;
        case GraphSpec::Kind::CliqueUnion:
            return std::all_of(spec.sizes.begin(), spec.sizes.end(),
                               [&](int s) { return s == spec.sizes.front(); });
        case GraphSpec::Kind::ErdosRenyi: return spec.p == 0.0;
        case GraphSpec::Kind::Path: return spec.n <= 2;
    }
    return false;
}

inline MixingProfile resolve_profile(const ExperimentConfig &cfg, bool loss_level,
                                     CertificationReport &report) {
    if (cfg.profile_source == ProfileSource::Declared) {
        report.certified_profile = false;
        report.warnings.push_back("profile declared by config, not certified");
        return cfg.declared_profile;
    }
    if (loss_level) {
        // Losses are per-vertex functions of the field and bounded in [0,1],
        // so they mix with the field's independence threshold and cap 1.
        switch (cfg.field.kind) {
            case FieldModel::Kind::Iid: return MixingProfile::zero();
            case FieldModel::Kind::LocalAverage:
                if (cfg.field.radius == 0) return MixingProfile::zero();
                return MixingProfile::threshold(2 * cfg.field.radius, 1.0);
            default: break;
        }
        throw std::invalid_argument(
            "no certified loss-level profile for this field model; declare one explicitly");
    }
    return theoretical_profile(cfg.field);
}

inline WeightedStableFamily resolve_family(const ExperimentConfig &cfg, const Graph &g, int d) {
    switch (cfg.partition_source) {
        case PartitionSource::Residue: return residue_partition(cfg.graph, d);
        case PartitionSource::Greedy: return greedy_power_coloring(g, d, cfg.greedy_strategy);
        case PartitionSource::Explicit:
            if (!cfg.explicit_family) throw std::invalid_argument("explicit family missing");
            if (cfg.explicit_family->d != d)
                throw std::invalid_argument("explicit family has d=" +
                                            std::to_string(cfg.explicit_family->d) +
                                            ", run needs d=" + std::to_string(d));
            return *cfg.explicit_family;
    }
    throw std::invalid_argument("unknown partition source");
}

// Candidate d values for the min-over-d scan, honoring the partition source's
// preconditions.
inline std::vector<int> candidate_ds(const ExperimentConfig &cfg, const Graph &g) {
    if (!cfg.d_candidates.empty()) return cfg.d_candidates;
    std::vector<int> ds;
    const int cap = std::min(g.n, 64);
    if (cfg.partition_source == PartitionSource::Residue) {
        for (int d = 1; d <= cap; ++d) {
            switch (cfg.graph.kind) {
                case GraphSpec::Kind::Cycle:
                    if (cfg.graph.n % d == 0) ds.push_back(d);
                    break;
                case GraphSpec::Kind::Grid:
                    if (!cfg.graph.wrap || (cfg.graph.rows % d == 0 && cfg.graph.cols % d == 0))
                        ds.push_back(d);
                    break;
                default: ds.push_back(d); break;
            }
        }
    } else if (cfg.partition_source == PartitionSource::Explicit) {
        ds.push_back(cfg.explicit_family ? cfg.explicit_family->d : 1);
    } else {
        for (int d = 1; d <= std::min(cap, 8); ++d) ds.push_back(d);
    }
    return ds;
}

}  // namespace detail

// Monte Carlo check of the concentration guarantee: per trial, sample the
// field, center by the recorded exact/oracle means, and compare the empirical
// mean against the min-over-d bound. Deterministic given the seed.
inline CertificationReport verify_concentration(const ExperimentConfig &cfg) {
    const auto started = std::chrono::steady_clock::now();
    if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
    const Graph g = generate_graph(cfg.graph);

    CertificationReport report;
    report.kind = "verify_concentration";
    report.trials = cfg.trials;
    report.delta = cfg.delta;

    const MixingProfile profile = detail::resolve_profile(cfg, /*loss_level=*/false, report);
    if (cfg.profile_source == ProfileSource::Declared && !cfg.allow_uncertified)
        throw std::invalid_argument(
            "declared profile is uncertified; set allow_uncertified to proceed");

    FieldSampler sampler(g, cfg.field);
    if (sampler.mean_provenance() == FieldSampler::MeanProvenance::MonteCarloOracle) {
        report.slack = 3.0 * sampler.mean_standard_error();
        report.warnings.push_back("centering means from Monte Carlo oracle; slack added");
    }
    if (cfg.field.kind != FieldModel::Kind::Iid &&
        !detail::vertex_transitive_by_kind(cfg.graph))
        report.warnings.push_back(
            "graph is not vertex-transitive by construction; marginals may differ across vertices");

    std::vector<std::pair<int, double>> weight_sums;
    for (int d : detail::candidate_ds(cfg, g)) {
        const WeightedStableFamily fam = detail::resolve_family(cfg, g, d);
        weight_sums.emplace_back(d, to_double(weight_sum(fam)));
    }
    report.bound_table =
        best_concentration_bound(g.n, cfg.delta, cfg.field.range_length(), profile, weight_sums);
    if (!report.bound_table.best_d)
        report.warnings.push_back("no finite bound among candidate d values");
    const double bound = report.bound_table.value + report.slack;

    const auto &means = sampler.vertex_means();
    report.outcomes.assign(std::size_t(cfg.trials), {});
    detail::parallel_trials(cfg.trials, cfg.threads, [&](long long trial) {
        const Sample sample = sampler.sample(cfg.seed, trial);
        double mean = 0.0;
        for (int v = 0; v < g.n; ++v)
            mean += sample.values[std::size_t(v)] - means[std::size_t(v)];
        mean /= double(g.n);
        TrialOutcome outcome;
        outcome.trial = trial;
        outcome.target = mean;
        outcome.bound = bound;
        outcome.violated = mean > bound;
        report.outcomes[std::size_t(trial)] = outcome;
    });

    for (const auto &outcome : report.outcomes)
        if (outcome.violated) ++report.violations;
    report.rate = double(report.violations) / double(report.trials);
    report.wilson = wilson_interval(report.violations, report.trials);
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

// Monte Carlo check of the graph-mixing PAC-Bayes guarantee for the Gibbs
// posterior, with an optional audit that replays the sheltered game and
// asserts the online-to-PAC identity on the realized transcript.
inline CertificationReport run_generalization(const ExperimentConfig &cfg) {
    const auto started = std::chrono::steady_clock::now();
    if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
    const Graph g = generate_graph(cfg.graph);
    const long long n = g.n;

    CertificationReport report;
    report.kind = "run_generalization";
    report.trials = cfg.trials;
    report.delta = cfg.delta;

    const MixingProfile profile = detail::resolve_profile(cfg, /*loss_level=*/true, report);
    if (cfg.profile_source == ProfileSource::Declared && !cfg.allow_uncertified)
        throw std::invalid_argument(
            "declared profile is uncertified; set allow_uncertified to proceed");
    if (cfg.field.kind != FieldModel::Kind::Iid &&
        !detail::vertex_transitive_by_kind(cfg.graph)) {
        if (!cfg.allow_uncertified)
            throw std::invalid_argument(
                "identical marginals are only guaranteed on vertex-transitive graphs; "
                "set allow_uncertified to proceed");
        report.warnings.push_back("marginals not certified identical on this graph");
        report.certified_profile = false;
    }

    const int d = cfg.d_selection == DSelection::Fixed
                      ? cfg.fixed_d
                      : [&] {
                            if (profile.kind != MixingProfile::Kind::Geometric)
                                throw std::invalid_argument(
                                    "tuned d selection needs a geometric profile");
                            return tune_d_geometric(profile.coeff, profile.tau, n);
                        }();
    if (d < 1 || d > g.n) throw std::invalid_argument("d out of range");
    report.chosen_d = d;
    report.phi_d_used = profile.value(d);

    const WeightedStableFamily family = detail::resolve_family(cfg, g, d);
    {
        const ValidationReport validation = validate_partition(g, family);
        if (!validation.valid)
            throw std::invalid_argument("partition for the run failed validation");
        report.weight_sum_used = to_double(validation.weight_sum);
    }

    FieldSampler sampler(g, cfg.field);
    const FiniteHypothesisSetting setting = make_threshold_setting(sampler, cfg.hypotheses);
    if (setting.provenance == FiniteHypothesisSetting::Provenance::MonteCarloOracle) {
        report.slack = 3.0 * setting.oracle_standard_error;
        report.warnings.push_back("population losses from Monte Carlo oracle; slack added");
    }

    DistributionOverW prior = cfg.prior.empty() ? DistributionOverW::uniform(cfg.hypotheses.m)
                                                : DistributionOverW{cfg.prior};
    prior.check();

    report.outcomes.assign(std::size_t(cfg.trials), {});
    const double beta_n = cfg.beta * double(n);
    detail::parallel_trials(cfg.trials, cfg.threads, [&](long long trial) {
        const Sample sample = sampler.sample(cfg.seed, trial);
        std::vector<double> empirical(std::size_t(setting.m), 0.0);
        for (int v = 0; v < g.n; ++v) {
            const double z = sample.values[std::size_t(v)];
            for (int w = 0; w < setting.m; ++w)
                empirical[std::size_t(w)] += setting.loss_at(w, z);
        }
        for (auto &e : empirical) e /= double(n);

        const DistributionOverW posterior = gibbs_posterior(prior, empirical, beta_n);
        TrialOutcome outcome;
        outcome.trial = trial;
        outcome.kl = kl_divergence(posterior, prior);
        outcome.empirical_loss = dot(posterior.p, empirical);
        outcome.population_loss = dot(posterior.p, setting.population_loss);
        outcome.target = outcome.population_loss;
        outcome.bound = outcome.empirical_loss +
                        pacbayes_bound_graph(n, cfg.delta, outcome.kl, report.phi_d_used,
                                             report.weight_sum_used) +
                        report.slack;
        outcome.violated = outcome.target > outcome.bound;
        report.outcomes[std::size_t(trial)] = outcome;
    });

    // Audit mode: replay the sheltered game on the first few trials and check
    // the decomposition identity with the realized regret and payoff.
    const long long audits = std::min(cfg.audit_trials, cfg.trials);
    for (long long trial = 0; trial < audits; ++trial) {
        const Sample sample = sampler.sample(cfg.seed, trial);
        GameConfig game;
        game.graph = &g;
        game.ordering = GameConfig::natural_ordering(g.n);
        game.shelter_d = d;
        game.family = &family;

        std::unique_ptr<Learner> learner;
        if (d == 1) {
            learner = make_ewa(prior, cfg.learner_eta);
        } else {
            learner = make_sheltered(
                [&](std::size_t) { return make_ewa(prior, cfg.learner_eta); }, family, game);
        }
        const Transcript transcript = play_game(setting, game, *learner, sample.values);

        std::vector<double> empirical(std::size_t(setting.m), 0.0);
        for (int v = 0; v < g.n; ++v)
            for (int w = 0; w < setting.m; ++w)
                empirical[std::size_t(w)] += setting.loss_at(w, sample.values[std::size_t(v)]);
        for (auto &e : empirical) e /= double(n);
        const DistributionOverW posterior = gibbs_posterior(prior, empirical, beta_n);

        const double regret = regret_of(transcript, posterior);
        const double lhs = dot(posterior.p, setting.population_loss) - dot(posterior.p, empirical);
        const double rhs = (regret + transcript.cumulative_payoff) / double(n);
        report.audit_max_gap = std::max(report.audit_max_gap, std::abs(lhs - rhs));
    }
    report.audited = audits;

    for (const auto &outcome : report.outcomes)
        if (outcome.violated) ++report.violations;
    report.rate = double(report.violations) / double(report.trials);
    report.wilson = wilson_interval(report.violations, report.trials);
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace graphmix
