#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphmix/bounds.hpp"
#include "graphmix/experiments.hpp"
#include "graphmix/graph.hpp"
#include "graphmix/mixing.hpp"
#include "graphmix/online.hpp"
#include "graphmix/partition.hpp"

namespace graphmix {

using Json = nlohmann::json;

// Infinity is encoded as the string "inf" (JSON has no inf literal).
inline Json json_number(double x) {
    if (x == kInfinite) return Json("inf");
    return Json(x);
}

inline double number_from_json(const Json &j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kInfinite;
        throw std::invalid_argument("expected a number or \"inf\"");
    }
    return j.get<double>();
}

// ---- graph specs ----------------------------------------------------------

inline Json to_json(const GraphSpec &spec) {
    switch (spec.kind) {
        case GraphSpec::Kind::Path: return {{"kind", "path"}, {"n", spec.n}};
        case GraphSpec::Kind::Cycle: return {{"kind", "cycle"}, {"n", spec.n}};
        case GraphSpec::Kind::Grid:
            return {{"kind", "grid"}, {"rows", spec.rows}, {"cols", spec.cols}, {"wrap", spec.wrap}};
        case GraphSpec::Kind::CliqueUnion: return {{"kind", "clique_union"}, {"sizes", spec.sizes}};
        case GraphSpec::Kind::ErdosRenyi:
            return {{"kind", "erdos_renyi"}, {"n", spec.n}, {"p", spec.p}, {"seed", spec.seed}};
    }
    throw std::invalid_argument("unknown graph spec kind");
}

inline GraphSpec graph_spec_from_json(const Json &j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "path") return GraphSpec::path(j.at("n").get<int>());
    if (kind == "cycle") return GraphSpec::cycle(j.at("n").get<int>());
    if (kind == "grid")
        return GraphSpec::grid(j.at("rows").get<int>(), j.at("cols").get<int>(),
                               j.value("wrap", false));
    if (kind == "clique_union")
        return GraphSpec::clique_union(j.at("sizes").get<std::vector<int>>());
    if (kind == "erdos_renyi")
        return GraphSpec::erdos_renyi(j.at("n").get<int>(), j.at("p").get<double>(),
                                      j.value("seed", std::uint64_t(0)));
    throw std::invalid_argument("unknown graph spec kind: " + kind);
}

// ---- partitions ------------------------------------------------------------

inline Json to_json(const WeightedStableFamily &fam) {
    Json weights = Json::array();
    for (const auto &w : fam.weights) weights.push_back(to_fraction_string(w));
    return {{"d", fam.d}, {"graph_n", fam.graph_n}, {"subsets", fam.subsets}, {"weights", weights}};
}

inline WeightedStableFamily family_from_json(const Json &j) {
    WeightedStableFamily fam;
    fam.d = j.at("d").get<int>();
    fam.graph_n = j.at("graph_n").get<int>();
    fam.subsets = j.at("subsets").get<std::vector<std::vector<int>>>();
    for (const auto &w : j.at("weights")) {
        if (w.is_string()) fam.weights.push_back(parse_fraction(w.get<std::string>()));
        else fam.weights.push_back(Rational(w.get<long long>()));
    }
    if (fam.weights.size() != fam.subsets.size())
        throw std::invalid_argument("family subsets/weights mismatch");
    return fam;
}

inline Json to_json(const ValidationReport &report) {
    Json violations = Json::array();
    for (const auto &violation : report.violations)
        violations.push_back({{"kind", violation_kind_name(violation.kind)},
                              {"subset", violation.subset},
                              {"vertices", violation.vertices},
                              {"detail", violation.detail}});
    return {{"valid", report.valid},
            {"violations", violations},
            {"weight_sum", to_fraction_string(report.weight_sum)},
            {"worst_coverage_deviation", to_fraction_string(report.worst_coverage_deviation)}};
}

// ---- mixing ----------------------------------------------------------------

inline Json to_json(const NoiseSpec &noise) {
    if (noise.kind == NoiseSpec::Kind::Uniform)
        return {{"kind", "uniform"}, {"lo", noise.lo}, {"hi", noise.hi}};
    return {{"kind", "levels"}, {"values", noise.levels}};
}

inline NoiseSpec noise_from_json(const Json &j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform")
        return NoiseSpec::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
    if (kind == "levels")
        return NoiseSpec::uniform_levels(j.at("values").get<std::vector<double>>());
    throw std::invalid_argument("unknown noise kind: " + kind);
}

inline Json to_json(const ValueTransform &t) {
    if (t.kind == ValueTransform::Kind::Identity) return {{"kind", "identity"}};
    return {{"kind", "affine"}, {"scale", t.scale}, {"shift", t.shift}};
}

inline ValueTransform transform_from_json(const Json &j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "identity") return ValueTransform::identity();
    if (kind == "affine")
        return ValueTransform::affine(j.at("scale").get<double>(), j.at("shift").get<double>());
    throw std::invalid_argument("unknown transform kind: " + kind);
}

inline Json to_json(const FieldModel &model) {
    switch (model.kind) {
        case FieldModel::Kind::Iid: return {{"kind", "iid"}, {"marginal", to_json(model.noise)}};
        case FieldModel::Kind::LocalAverage:
            return {{"kind", "local_average"},
                    {"radius", model.radius},
                    {"noise", to_json(model.noise)},
                    {"transform", to_json(model.transform)}};
        case FieldModel::Kind::DistanceWeighted:
            return {{"kind", "distance_weighted"},
                    {"alpha", model.alpha},
                    {"clip", {model.clip_lo, model.clip_hi}},
                    {"noise", to_json(model.noise)}};
    }
    throw std::invalid_argument("unknown field model kind");
}

inline FieldModel field_from_json(const Json &j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "iid") return FieldModel::iid(noise_from_json(j.at("marginal")));
    if (kind == "local_average")
        return FieldModel::local_average(
            j.at("radius").get<int>(), noise_from_json(j.at("noise")),
            j.contains("transform") ? transform_from_json(j.at("transform"))
                                    : ValueTransform::identity());
    if (kind == "distance_weighted") {
        const auto clip = j.at("clip").get<std::vector<double>>();
        if (clip.size() != 2) throw std::invalid_argument("clip must be [lo, hi]");
        return FieldModel::distance_weighted(j.at("alpha").get<double>(), clip[0], clip[1],
                                             noise_from_json(j.at("noise")));
    }
    throw std::invalid_argument("unknown field model kind: " + kind);
}

inline Json to_json(const MixingProfile &profile) {
    switch (profile.kind) {
        case MixingProfile::Kind::Zero: return {{"kind", "zero"}};
        case MixingProfile::Kind::Threshold:
            return {{"kind", "threshold"}, {"d_star", profile.d_star},
                    {"cap", json_number(profile.cap)}};
        case MixingProfile::Kind::Geometric:
            return {{"kind", "geometric"}, {"C", profile.coeff}, {"tau", profile.tau}};
        case MixingProfile::Kind::Algebraic:
            return {{"kind", "algebraic"}, {"C", profile.coeff}, {"r", profile.power}};
        case MixingProfile::Kind::Table: return {{"kind", "table"}, {"values", profile.table}};
    }
    throw std::invalid_argument("unknown profile kind");
}

inline MixingProfile profile_from_json(const Json &j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return MixingProfile::zero();
    if (kind == "threshold")
        return MixingProfile::threshold(j.at("d_star").get<int>(),
                                        number_from_json(j.at("cap")));
    if (kind == "geometric")
        return MixingProfile::geometric(j.at("C").get<double>(), j.at("tau").get<double>());
    if (kind == "algebraic")
        return MixingProfile::algebraic(j.at("C").get<double>(), j.at("r").get<double>());
    if (kind == "table") return MixingProfile::from_table(j.at("values").get<std::vector<double>>());
    throw std::invalid_argument("unknown profile kind: " + kind);
}

// ---- bounds ----------------------------------------------------------------

inline Json to_json(const BoundReport &report) {
    Json table = Json::array();
    for (const auto &entry : report.table)
        table.push_back({{"d", entry.d},
                         {"phi", json_number(entry.phi)},
                         {"weight_sum", entry.weight_sum},
                         {"value", json_number(entry.value)}});
    Json j = {{"kind", report.kind}, {"n", report.n},      {"delta", report.delta},
              {"Delta", report.Delta}, {"table", table},   {"value", json_number(report.value)}};
    j["best_d"] = report.best_d ? Json(*report.best_d) : Json(nullptr);
    return j;
}

// ---- transcripts -----------------------------------------------------------

inline Json to_json(const Transcript &transcript) {
    Json rounds = Json::array();
    for (const auto &record : transcript.rounds)
        rounds.push_back({{"t", record.round},
                          {"vertex", record.vertex},
                          {"action", record.action},
                          {"outcome", record.outcome},
                          {"cost", record.cost},
                          {"reads", record.reads}});
    return {{"m", transcript.m}, {"M", transcript.cumulative_payoff}, {"rounds", rounds}};
}

inline std::string transcript_csv(const Transcript &transcript) {
    std::ostringstream out;
    out << "round,vertex,cost,cumulative_M\n";
    double cumulative = 0.0;
    for (const auto &record : transcript.rounds) {
        cumulative += -record.cost;
        out << record.round << "," << record.vertex << "," << Json(record.cost).dump() << ","
            << Json(cumulative).dump() << "\n";
    }
    return out.str();
}

// ---- experiment configs ----------------------------------------------------

inline Json to_json(const ExperimentConfig &cfg) {
    Json j;
    j["graph"] = to_json(cfg.graph);
    j["field"] = to_json(cfg.field);
    if (cfg.profile_source == ProfileSource::Theoretical) {
        j["profile"] = {{"source", "theoretical"}};
    } else {
        j["profile"] = {{"source", "declared"}, {"profile", to_json(cfg.declared_profile)}};
    }
    switch (cfg.partition_source) {
        case PartitionSource::Residue: j["partition"] = {{"source", "residue"}}; break;
        case PartitionSource::Greedy:
            j["partition"] = {{"source", "greedy"},
                              {"strategy", cfg.greedy_strategy == ColoringStrategy::Dsatur
                                               ? "dsatur"
                                               : "largest_first"}};
            break;
        case PartitionSource::Explicit:
            j["partition"] = {{"source", "explicit"}, {"family", to_json(*cfg.explicit_family)}};
            break;
    }
    if (!cfg.d_candidates.empty()) j["d_candidates"] = cfg.d_candidates;
    j["d"] = cfg.d_selection == DSelection::Fixed
                 ? Json{{"mode", "fixed"}, {"value", cfg.fixed_d}}
                 : Json{{"mode", "tuned"}};
    j["hypotheses"] = {{"m", cfg.hypotheses.m},
                       {"theta_lo", cfg.hypotheses.theta_lo},
                       {"theta_hi", cfg.hypotheses.theta_hi},
                       {"label_threshold", cfg.hypotheses.label_threshold}};
    j["prior"] = cfg.prior.empty() ? Json("uniform") : Json(cfg.prior);
    j["beta"] = json_number(cfg.beta);
    j["delta"] = cfg.delta;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["audit_trials"] = cfg.audit_trials;
    j["learner_eta"] = cfg.learner_eta;
    j["allow_uncertified"] = cfg.allow_uncertified;
    return j;
}

inline ExperimentConfig experiment_config_from_json(const Json &j) {
    ExperimentConfig cfg;
    cfg.graph = graph_spec_from_json(j.at("graph"));
    cfg.field = field_from_json(j.at("field"));
    if (j.contains("profile")) {
        const std::string source = j.at("profile").at("source").get<std::string>();
        if (source == "theoretical") {
            cfg.profile_source = ProfileSource::Theoretical;
        } else if (source == "declared") {
            cfg.profile_source = ProfileSource::Declared;
            cfg.declared_profile = profile_from_json(j.at("profile").at("profile"));
        } else {
            throw std::invalid_argument("unknown profile source: " + source);
        }
    }
    if (j.contains("partition")) {
        const std::string source = j.at("partition").at("source").get<std::string>();
        if (source == "residue") {
            cfg.partition_source = PartitionSource::Residue;
        } else if (source == "greedy") {
            cfg.partition_source = PartitionSource::Greedy;
            cfg.greedy_strategy = coloring_strategy_from_name(
                j.at("partition").value("strategy", std::string("dsatur")));
        } else if (source == "explicit") {
            cfg.partition_source = PartitionSource::Explicit;
            cfg.explicit_family = family_from_json(j.at("partition").at("family"));
        } else {
            throw std::invalid_argument("unknown partition source: " + source);
        }
    }
    if (j.contains("d_candidates"))
        cfg.d_candidates = j.at("d_candidates").get<std::vector<int>>();
    if (j.contains("d")) {
        const std::string mode = j.at("d").at("mode").get<std::string>();
        if (mode == "fixed") {
            cfg.d_selection = DSelection::Fixed;
            cfg.fixed_d = j.at("d").at("value").get<int>();
        } else if (mode == "tuned") {
            cfg.d_selection = DSelection::Tuned;
        } else {
            throw std::invalid_argument("unknown d mode: " + mode);
        }
    }
    if (j.contains("hypotheses")) {
        const auto &h = j.at("hypotheses");
        cfg.hypotheses.m = h.at("m").get<int>();
        cfg.hypotheses.theta_lo = h.value("theta_lo", 0.0);
        cfg.hypotheses.theta_hi = h.value("theta_hi", 1.0);
        cfg.hypotheses.label_threshold = h.value("label_threshold", 0.5);
    }
    if (j.contains("prior") && !j.at("prior").is_string())
        cfg.prior = j.at("prior").get<std::vector<double>>();
    if (j.contains("beta")) cfg.beta = number_from_json(j.at("beta"));
    if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<long long>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("audit_trials")) cfg.audit_trials = j.at("audit_trials").get<long long>();
    if (j.contains("learner_eta")) cfg.learner_eta = j.at("learner_eta").get<double>();
    if (j.contains("allow_uncertified"))
        cfg.allow_uncertified = j.at("allow_uncertified").get<bool>();
    return cfg;
}

// ---- certification reports --------------------------------------------------

// runtime_seconds stays out of the artifact so identical runs serialize
// byte-identically.
inline Json to_json(const CertificationReport &report) {
    Json j;
    j["kind"] = report.kind;
    j["trials"] = report.trials;
    j["violations"] = report.violations;
    j["rate"] = report.rate;
    j["wilson"] = {{"lower", report.wilson.lower}, {"upper", report.wilson.upper}};
    j["delta"] = report.delta;
    j["slack"] = report.slack;
    j["certified_profile"] = report.certified_profile;
    j["warnings"] = report.warnings;
    if (report.kind == "verify_concentration") {
        j["bound"] = to_json(report.bound_table);
    } else {
        j["chosen_d"] = report.chosen_d;
        j["weight_sum"] = report.weight_sum_used;
        j["phi_d"] = json_number(report.phi_d_used);
        j["audited"] = report.audited;
        j["audit_max_gap"] = report.audit_max_gap;
    }
    return j;
}

inline std::string outcomes_csv(const CertificationReport &report) {
    std::ostringstream out;
    out << "trial,target,bound,violated\n";
    for (const auto &outcome : report.outcomes)
        out << outcome.trial << "," << Json(outcome.target).dump() << ","
            << Json(outcome.bound).dump() << "," << (outcome.violated ? 1 : 0) << "\n";
    return out.str();
}

inline std::string sample_csv(const Sample &sample) {
    std::ostringstream out;
    out << "vertex,value\n";
    for (std::size_t v = 0; v < sample.values.size(); ++v)
        out << v << "," << Json(sample.values[v]).dump() << "\n";
    return out.str();
}

// ---- atomic file output ------------------------------------------------------

// Partial artifacts are never left behind: write to a temp sibling, rename.
inline void write_file_atomic(const std::string &path, const std::string &content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << content;
        if (!out.good()) throw std::runtime_error("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

}  // namespace graphmix
