#pragma once

// JSON forms of decoder specs, experiment configs, run statistics, and failure records.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdiv/decoders.hpp"
#include "qdiv/dem.hpp"
#include "qdiv/fixtures.hpp"
#include "qdiv/harness.hpp"
#include "qdiv/problem.hpp"

namespace qdiv {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

template <class T>
T get_field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + ": field '" + key + "' has the wrong type (" + e.what() + ")");
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    return j.contains(key) ? get_field<T>(j, key, where) : fallback;
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + ": unknown field '" + key + "'");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Decoder specs

inline json to_json(const DecoderConfig& c) {
    return {{"rule", to_string(c.rule)}, {"alpha", c.alpha}, {"arith", c.arith.to_string()}, {"max_iters", c.max_iters}, {"early_stop", c.early_stop}};
}

inline DecoderConfig decoder_config_from_json(const json& j, const std::string& where = "decoder") {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    detail::reject_unknown(j, {"rule", "alpha", "arith", "max_iters", "early_stop"}, where);
    DecoderConfig c;
    try {
        c.rule = parse_update_rule(detail::get_or<std::string>(j, "rule", "min-sum", where));
        c.alpha = detail::get_or<double>(j, "alpha", 1.0, where);
        c.arith = Arithmetic::parse(detail::get_or<std::string>(j, "arith", "float64", where));
        c.max_iters = detail::get_or<int>(j, "max_iters", 10, where);
        c.early_stop = detail::get_or<bool>(j, "early_stop", true, where);
        c.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return c;
}

inline json to_json(const OsdConfig& c) {
    return {{"method", c.method == OsdMethod::osd0 ? "osd0" : "combination_sweep"},
            {"lambda", c.lambda},
            {"max_weight", c.max_weight},
            {"ordering", c.ordering == OsdOrdering::reliability ? "reliability" : "error_likelihood"}};
}

inline OsdConfig osd_config_from_json(const json& j, const std::string& where = "osd") {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    detail::reject_unknown(j, {"method", "lambda", "max_weight", "ordering"}, where);
    OsdConfig c;
    const auto method = detail::get_or<std::string>(j, "method", "combination_sweep", where);
    if (method == "osd0") {
        c.method = OsdMethod::osd0;
    } else if (method != "combination_sweep") {
        throw ConfigError(where + ": method must be \"osd0\" or \"combination_sweep\"");
    }
    c.lambda = detail::get_or<int>(j, "lambda", 1, where);
    c.max_weight = detail::get_or<std::size_t>(j, "max_weight", 60, where);
    const auto ordering = detail::get_or<std::string>(j, "ordering", "error_likelihood", where);
    if (ordering == "reliability") {
        c.ordering = OsdOrdering::reliability;
    } else if (ordering != "error_likelihood") {
        throw ConfigError(where + ": ordering must be \"error_likelihood\" or \"reliability\"");
    }
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return c;
}

inline json to_json(const DecoderSpec& spec) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, SingleSpec>) {
                return {{"kind", "single"}, {"bp", to_json(s.bp)}};
            } else if constexpr (std::is_same_v<T, BpOsdSpec>) {
                return {{"kind", "bp_osd"}, {"bp", to_json(s.bp)}, {"osd", to_json(s.osd)}};
            } else if constexpr (std::is_same_v<T, CascadeConfig>) {
                json members = json::array();
                for (const auto& m : s.members) members.push_back(m.to_string());
                return {{"kind", "cascade"}, {"members", members}, {"alpha", s.alpha}, {"max_iters", s.max_iters}};
            } else {
                json stages = json::array();
                for (const auto& st : s.stages) {
                    json nodes = json::array();
                    for (const auto& n : st.decoders) nodes.push_back({{"bp", to_json(n.bp)}, {"gamma", n.gamma}, {"uses_osd", n.uses_osd}});
                    stages.push_back({{"feedback_source", st.feedback_source}, {"decoders", nodes}});
                }
                return {{"kind", "tree"}, {"stages", stages}, {"osd", to_json(s.osd)}};
            }
        },
        spec);
}

/// A preset name string, or an object with "kind" in {single, bp_osd, cascade, tree}.
inline DecoderSpec decoder_spec_from_json(const json& j, const std::string& where = "decoder") {
    if (j.is_string()) {
        try {
            return decoder_preset(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    if (!j.is_object()) throw ConfigError(where + ": expected a preset name or an object");
    const auto kind = detail::get_field<std::string>(j, "kind", where);
    DecoderSpec spec;
    if (kind == "single") {
        detail::reject_unknown(j, {"kind", "bp"}, where);
        spec = SingleSpec{decoder_config_from_json(j.at("bp"), where + ".bp")};
    } else if (kind == "bp_osd") {
        detail::reject_unknown(j, {"kind", "bp", "osd"}, where);
        spec = BpOsdSpec{decoder_config_from_json(detail::get_field<json>(j, "bp", where), where + ".bp"),
                         osd_config_from_json(j.value("osd", json::object()), where + ".osd")};
    } else if (kind == "cascade") {
        detail::reject_unknown(j, {"kind", "members", "alpha", "max_iters"}, where);
        CascadeConfig c;
        for (const auto& m : detail::get_field<json>(j, "members", where)) {
            try {
                const auto a = Arithmetic::parse(m.get<std::string>());
                if (a.is_float()) throw ConfigError(where + ": cascade members must be fixed-point formats");
                c.members.push_back(*a.fixed);
            } catch (const json::exception&) {
                throw ConfigError(where + ": cascade members must be strings");
            }
        }
        c.alpha = detail::get_or<double>(j, "alpha", 0.75, where);
        c.max_iters = detail::get_or<int>(j, "max_iters", 20, where);
        spec = c;
    } else if (kind == "tree") {
        detail::reject_unknown(j, {"kind", "stages", "osd"}, where);
        TreeConfig t;
        std::size_t s = 0;
        for (const auto& st : detail::get_field<json>(j, "stages", where)) {
            const std::string sw = where + ".stages[" + std::to_string(s++) + "]";
            detail::reject_unknown(st, {"feedback_source", "decoders"}, sw);
            TreeStage stage;
            stage.feedback_source = detail::get_or<int>(st, "feedback_source", -1, sw);
            std::size_t i = 0;
            for (const auto& n : detail::get_field<json>(st, "decoders", sw)) {
                const std::string nw = sw + ".decoders[" + std::to_string(i++) + "]";
                detail::reject_unknown(n, {"bp", "gamma", "uses_osd"}, nw);
                stage.decoders.push_back({decoder_config_from_json(detail::get_field<json>(n, "bp", nw), nw + ".bp"),
                                          detail::get_or<double>(n, "gamma", 0.0, nw), detail::get_or<bool>(n, "uses_osd", false, nw)});
            }
            t.stages.push_back(std::move(stage));
        }
        t.osd = osd_config_from_json(j.value("osd", json::object()), where + ".osd");
        spec = std::move(t);
    } else {
        throw ConfigError(where + ": unknown kind '" + kind + "'");
    }
    try {
        validate(spec);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Experiment config

/// Everything needed to reproduce a run. Worker count and progress cadence are execution
/// settings: they never change results, so they are not part of the echoed config.
struct ExperimentConfig {
    std::string code;  // preset or fixture path; exclusive with dem
    std::string dem;   // .dem path
    std::string noise{"iid"};  // "iid" or "phenomenological" (code mode)
    double p{0.01};
    double p_meas{0.0};
    int rounds{1};
    json decoder = "tree_v1";
    std::uint32_t target_errors{100};
    std::string stop_on{"logical"};
    u128 max_frames{0};
    std::uint64_t seed{0};
    std::size_t batch_size{1024};
    bool capture_failures{false};
    std::size_t failure_cap{65536};
};

inline json to_json(const ExperimentConfig& c) {
    json j;
    j["format_version"] = kFormatVersion;
    if (!c.code.empty()) j["code"] = c.code;
    if (!c.dem.empty()) j["dem"] = c.dem;
    if (c.dem.empty()) {
        j["noise"] = c.noise;
        j["p"] = c.p;
        if (c.noise == "phenomenological") {
            j["p_meas"] = c.p_meas;
            j["rounds"] = c.rounds;
        }
    }
    j["decoder"] = c.decoder.is_string() ? c.decoder : to_json(decoder_spec_from_json(c.decoder));
    j["decoder_resolved"] = to_json(decoder_spec_from_json(c.decoder));
    j["target_errors"] = c.target_errors;
    j["stop_on"] = c.stop_on;
    j["max_frames"] = to_decimal(c.max_frames);
    j["seed"] = c.seed;
    j["batch_size"] = c.batch_size;
    j["capture_failures"] = c.capture_failures;
    j["failure_cap"] = c.failure_cap;
    return j;
}

inline ExperimentConfig experiment_from_json(const json& j) {
    const std::string where = "config";
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    detail::reject_unknown(j,
                           {"format_version", "code", "dem", "noise", "p", "p_meas", "rounds", "decoder", "decoder_resolved", "target_errors",
                            "stop_on", "max_frames", "seed", "batch_size", "capture_failures", "failure_cap"},
                           where);
    if (j.contains("format_version") && j.at("format_version") != kFormatVersion) {
        throw ConfigError("config: unsupported format_version " + j.at("format_version").dump());
    }
    ExperimentConfig c;
    c.code = detail::get_or<std::string>(j, "code", "", where);
    c.dem = detail::get_or<std::string>(j, "dem", "", where);
    c.noise = detail::get_or<std::string>(j, "noise", "iid", where);
    c.p = detail::get_or<double>(j, "p", c.p, where);
    c.p_meas = detail::get_or<double>(j, "p_meas", 0.0, where);
    c.rounds = detail::get_or<int>(j, "rounds", 1, where);
    if (j.contains("decoder")) c.decoder = j.at("decoder");
    c.target_errors = detail::get_or<std::uint32_t>(j, "target_errors", c.target_errors, where);
    c.stop_on = detail::get_or<std::string>(j, "stop_on", "logical", where);
    if (j.contains("max_frames")) {
        const auto& mf = j.at("max_frames");
        try {
            c.max_frames = mf.is_string() ? parse_u128(mf.get<std::string>()) : static_cast<u128>(mf.get<std::uint64_t>());
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: max_frames: ") + e.what());
        }
    }
    c.seed = detail::get_or<std::uint64_t>(j, "seed", 0, where);
    c.batch_size = detail::get_or<std::size_t>(j, "batch_size", c.batch_size, where);
    c.capture_failures = detail::get_or<bool>(j, "capture_failures", false, where);
    c.failure_cap = detail::get_or<std::size_t>(j, "failure_cap", c.failure_cap, where);
    return c;
}

/// Checks an experiment config without loading any files.
inline void validate(const ExperimentConfig& c) {
    if (c.code.empty() == c.dem.empty()) throw ConfigError("config: exactly one of 'code' and 'dem' must be set");
    if (c.dem.empty()) {
        if (c.noise != "iid" && c.noise != "phenomenological") throw ConfigError("config: noise must be \"iid\" or \"phenomenological\"");
        if (!(c.p >= 0.0 && c.p <= 0.5)) throw ConfigError("config: p must be in [0, 0.5]");
        if (!(c.p_meas >= 0.0 && c.p_meas <= 0.5)) throw ConfigError("config: p_meas must be in [0, 0.5]");
        if (c.rounds < 1) throw ConfigError("config: rounds must be >= 1");
    }
    (void)decoder_spec_from_json(c.decoder);
    if (c.target_errors > 65535) throw ConfigError("config: target_errors must be in [0, 65535]");
    if (c.stop_on != "logical" && c.stop_on != "physical") throw ConfigError("config: stop_on must be \"logical\" or \"physical\"");
    if (c.target_errors == 0 && c.max_frames == 0) throw ConfigError("config: set target_errors or max_frames");
    if (c.batch_size == 0) throw ConfigError("config: batch_size must be positive");
}

inline DecodingProblem build_problem(const ExperimentConfig& c) {
    validate(c);
    if (!c.dem.empty()) {
        return to_decoding_problem(parse_dem(read_text_file(c.dem)), std::filesystem::path(c.dem).filename().string());
    }
    const CssCode code = load_code(c.code);
    if (c.noise == "phenomenological") return phenomenological_problem(code, {c.p, c.p_meas, c.rounds});
    return code_capacity_problem(code, c.p);
}

inline RunConfig run_config(const ExperimentConfig& c, unsigned workers = 1) {
    validate(c);
    RunConfig r;
    r.decoder = decoder_spec_from_json(c.decoder);
    r.target_errors = c.target_errors;
    r.stop_on = c.stop_on == "physical" ? StopMetric::physical : StopMetric::logical;
    r.max_frames = c.max_frames;
    r.seed = c.seed;
    r.batch_size = c.batch_size;
    r.workers = workers;
    r.capture_failures = c.capture_failures;
    r.failure_cap = c.failure_cap;
    return r;
}

// ---------------------------------------------------------------------------
// Results

inline json stats_to_json(const RunStats& s) {
    json wins = json::array();
    for (const auto& [key, count] : s.wins) wins.push_back({{"stage", key.first}, {"index", key.second}, {"count", to_decimal(count)}});
    const auto [lo, hi] = wilson_interval(static_cast<double>(s.logical_errors), static_cast<double>(s.frames));
    return {{"frames", to_decimal(s.frames)},
            {"physical_errors", to_decimal(s.physical_errors)},
            {"logical_errors", to_decimal(s.logical_errors)},
            {"total_iterations", to_decimal(s.total_iterations)},
            {"latency_iterations", to_decimal(s.latency_iterations)},
            {"osd_calls", to_decimal(s.osd_calls)},
            {"unconverged", to_decimal(s.unconverged)},
            {"converged_but_wrong", to_decimal(s.converged_but_wrong)},
            {"syndrome_violations", to_decimal(s.syndrome_violations)},
            {"wins", wins},
            {"max_path_iterations", s.max_path_iterations},
            {"max_osd_path_iterations", s.max_osd_path_iterations},
            {"stopped_by", s.stopped_by},
            {"failures_captured", s.failures.size()},
            {"ler", s.ler()},
            {"ler_ci95", {lo, hi}},
            {"avg_iterations", s.avg_iterations()},
            {"osd_call_rate", s.osd_call_rate()}};
}

inline json problem_summary(const DecodingProblem& pb) {
    return {{"name", pb.name},
            {"checks", pb.h->rows()},
            {"columns", pb.columns()},
            {pb.observable_mode ? "observables" : "logicals", pb.logicals->rows()}};
}

/// Full results document. `metadata` (timings, worker count) is omitted when null so that
/// deterministic comparisons see identical bytes.
inline json results_document(const ExperimentConfig& cfg, const DecodingProblem& pb, const RunStats& s, const json& metadata = nullptr) {
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["config"] = to_json(cfg);
    doc["problem"] = problem_summary(pb);
    doc["stats"] = stats_to_json(s);
    if (!metadata.is_null()) doc["metadata"] = metadata;
    return doc;
}

inline json to_json(const FailureRecord& f) {
    json attempts = json::array();
    for (const auto& a : f.attempts) {
        attempts.push_back({{"stage", a.stage}, {"index", a.index}, {"label", a.label}, {"converged", a.converged}, {"iterations", a.iterations}, {"osd", a.osd}});
    }
    return {{"format_version", kFormatVersion},
            {"trial", f.trial},
            {"shard", f.shard},
            {"seed", f.seed},
            {"prng", f.prng},
            {"columns", f.columns},
            {"error", f.error_hex},
            {"checks", f.checks},
            {"syndrome", f.syndrome_hex},
            {"estimate", f.estimate_hex},
            {"decoder", f.decoder},
            {"winner_stage", f.winner_stage},
            {"winner_index", f.winner_index},
            {"converged", f.converged},
            {"attempts", attempts}};
}

inline FailureRecord failure_from_json(const json& j) {
    const std::string where = "failure record";
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    FailureRecord f;
    f.trial = detail::get_field<std::uint64_t>(j, "trial", where);
    f.shard = detail::get_or<std::uint64_t>(j, "shard", 0, where);
    f.seed = detail::get_field<std::uint64_t>(j, "seed", where);
    f.prng = detail::get_or<std::string>(j, "prng", Prng18::kAlgorithm, where);
    f.columns = detail::get_field<std::size_t>(j, "columns", where);
    f.error_hex = detail::get_field<std::string>(j, "error", where);
    f.checks = detail::get_field<std::size_t>(j, "checks", where);
    f.syndrome_hex = detail::get_field<std::string>(j, "syndrome", where);
    f.estimate_hex = detail::get_or<std::string>(j, "estimate", "", where);
    f.decoder = detail::get_or<std::string>(j, "decoder", "", where);
    f.winner_stage = detail::get_or<int>(j, "winner_stage", -1, where);
    f.winner_index = detail::get_or<int>(j, "winner_index", -1, where);
    f.converged = detail::get_or<bool>(j, "converged", false, where);
    if (j.contains("attempts")) {
        for (const auto& a : j.at("attempts")) {
            f.attempts.push_back({a.at("stage").get<int>(), a.at("index").get<int>(), a.at("label").get<std::string>(), a.at("converged").get<bool>(),
                                  a.at("iterations").get<int>(), a.at("osd").get<bool>()});
        }
    }
    return f;
}

}  // namespace qdiv
