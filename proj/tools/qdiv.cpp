// qdiv command-line tool: simulate, sweep, replay, import-dem, estimate-cycles, list-presets.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdiv/qdiv.hpp"

namespace {

using qdiv::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flags that override config-file values. Only flags actually given on the command line apply.
struct ExperimentFlags {
    std::string config_path;
    std::string code;
    std::string dem;
    std::string noise;
    double p{0.0};
    double p_meas{0.0};
    int rounds{1};
    std::string decoder;
    std::uint32_t target_errors{0};
    std::string stop_on;
    std::string max_frames;
    std::uint64_t seed{0};
    std::size_t batch_size{0};
    bool capture_failures{false};
    std::size_t failure_cap{0};

    std::map<std::string, CLI::Option*> opts;

    [[nodiscard]] bool given(const std::string& name) const {
        auto it = opts.find(name);
        return it != opts.end() && it->second->count() > 0;
    }
};

struct ExecFlags {
    unsigned workers{1};
    std::uint64_t progress_every{0};
    bool metadata{false};
};

void add_experiment_flags(CLI::App* app, ExperimentFlags& f, bool with_p) {
    f.opts["config"] = app->add_option("-c,--config", f.config_path, "JSON experiment config; flags override its values")->check(CLI::ExistingFile);
    f.opts["code"] = app->add_option("--code,--preset", f.code, "code preset name or .code fixture path");
    f.opts["dem"] = app->add_option("--dem", f.dem, "detector error model file");
    f.opts["noise"] = app->add_option("--noise", f.noise, "iid | phenomenological")->check(CLI::IsMember({"iid", "phenomenological"}));
    if (with_p) f.opts["p"] = app->add_option("--p", f.p, "physical error rate");
    f.opts["p_meas"] = app->add_option("--p-meas", f.p_meas, "measurement error rate (phenomenological)");
    f.opts["rounds"] = app->add_option("--rounds", f.rounds, "syndrome rounds (phenomenological)");
    f.opts["decoder"] = app->add_option("--decoder", f.decoder, "decoder preset name or inline JSON");
    f.opts["target_errors"] = app->add_option("--target-errors", f.target_errors, "stop after this many errors (0: frame cap only)");
    f.opts["stop_on"] = app->add_option("--stop-on", f.stop_on, "logical | physical")->check(CLI::IsMember({"logical", "physical"}));
    f.opts["max_frames"] = app->add_option("--max-frames", f.max_frames, "frame cap (0: unlimited)");
    f.opts["seed"] = app->add_option("--seed", f.seed, "master seed");
    f.opts["batch_size"] = app->add_option("--batch-size", f.batch_size, "frames per scheduling batch");
    f.opts["capture_failures"] = app->add_flag("--capture-failures", f.capture_failures, "record logical failures");
    f.opts["failure_cap"] = app->add_option("--failure-cap", f.failure_cap, "maximum failures recorded");
}

void add_exec_flags(CLI::App* app, ExecFlags& e) {
    app->add_option("-w,--workers", e.workers, "worker threads (results do not depend on this)")->check(CLI::PositiveNumber);
    app->add_option("--progress-every", e.progress_every, "log progress to stderr every N frames (0: off)");
    app->add_flag("--metadata", e.metadata, "add a metadata block with wall time, workers and timestamp");
}

json parse_decoder_flag(const std::string& text) {
    if (!text.empty() && text.front() == '{') {
        try {
            return json::parse(text);
        } catch (const json::exception& e) {
            throw qdiv::ConfigError(std::string("--decoder: malformed JSON: ") + e.what());
        }
    }
    return text;
}

json read_json_file(const std::string& path) {
    std::string text;
    try {
        text = qdiv::read_text_file(path);
    } catch (const std::exception& e) {
        throw qdiv::ConfigError(e.what());
    }
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw qdiv::ConfigError(path + ": malformed JSON: " + e.what());
    }
}

/// Applies the config file (if given) and then the explicit flags on top of `base`.
qdiv::ExperimentConfig effective_config(const ExperimentFlags& f, qdiv::ExperimentConfig base = {}) {
    qdiv::ExperimentConfig c = std::move(base);
    if (!f.config_path.empty()) c = qdiv::experiment_from_json(read_json_file(f.config_path));
    if (f.given("code")) {
        c.code = f.code;
        c.dem.clear();
    }
    if (f.given("dem")) {
        c.dem = f.dem;
        c.code.clear();
    }
    if (f.given("noise")) c.noise = f.noise;
    if (f.given("p")) c.p = f.p;
    if (f.given("p_meas")) c.p_meas = f.p_meas;
    if (f.given("rounds")) c.rounds = f.rounds;
    if (f.given("decoder")) c.decoder = parse_decoder_flag(f.decoder);
    if (f.given("target_errors")) c.target_errors = f.target_errors;
    if (f.given("stop_on")) c.stop_on = f.stop_on;
    if (f.given("max_frames")) {
        try {
            c.max_frames = qdiv::parse_u128(f.max_frames);
        } catch (const std::exception& e) {
            throw qdiv::ConfigError(std::string("--max-frames: ") + e.what());
        }
    }
    if (f.given("seed")) c.seed = f.seed;
    if (f.given("batch_size")) c.batch_size = f.batch_size;
    if (f.given("capture_failures")) c.capture_failures = f.capture_failures;
    if (f.given("failure_cap")) c.failure_cap = f.failure_cap;
    return c;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write '" + path + "'");
    out << text;
    if (!out) throw RuntimeFailure("write failed for '" + path + "'");
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

json metadata_block(const ExecFlags& e, double wall_seconds) {
    return {{"timestamp", utc_timestamp()}, {"wall_seconds", wall_seconds}, {"workers", e.workers}};
}

qdiv::RunConfig make_run_config(const qdiv::ExperimentConfig& c, const ExecFlags& e, const std::string& tag) {
    qdiv::RunConfig rc = qdiv::run_config(c, e.workers);
    rc.progress_every = e.progress_every;
    if (e.progress_every > 0) {
        rc.progress = [tag](qdiv::u128 frames, qdiv::u128 logical) {
            const double ler = frames == 0 ? 0.0 : static_cast<double>(logical) / static_cast<double>(frames);
            std::cerr << "progress" << tag << " frames=" << qdiv::to_decimal(frames) << " logical_errors=" << qdiv::to_decimal(logical)
                      << " ler=" << ler << '\n';
        };
    }
    return rc;
}

qdiv::DecodingProblem load_problem(const qdiv::ExperimentConfig& c) {
    try {
        return qdiv::build_problem(c);
    } catch (const qdiv::ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw qdiv::ConfigError(e.what());
    }
}

std::string failures_jsonl(const qdiv::ExperimentConfig& c, const std::vector<qdiv::FailureRecord>& failures) {
    std::string out = json{{"format_version", qdiv::kFormatVersion}, {"kind", "header"}, {"config", qdiv::to_json(c)}}.dump() + "\n";
    for (const auto& f : failures) {
        json j = qdiv::to_json(f);
        j["kind"] = "failure";
        out += j.dump() + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const ExperimentFlags& f, const ExecFlags& e, const std::string& out, const std::string& failures_out) {
    const auto cfg = effective_config(f);
    qdiv::validate(cfg);
    const auto pb = load_problem(cfg);
    const auto rc = make_run_config(cfg, e, "");
    const auto stats = qdiv::run(pb, rc);
    const json meta = e.metadata ? metadata_block(e, stats.wall_seconds) : json(nullptr);
    write_output(out, qdiv::results_document(cfg, pb, stats, meta).dump(2) + "\n");
    if (!failures_out.empty()) write_output(failures_out, failures_jsonl(cfg, stats.failures));
    return kExitOk;
}

std::vector<double> parse_p_list(const std::string& text) {
    std::vector<double> ps;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw qdiv::ConfigError("--p: '" + item + "' is not a number");
        ps.push_back(v);
    }
    if (ps.empty()) throw qdiv::ConfigError("--p: empty list");
    return ps;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

int cmd_sweep(const ExperimentFlags& f, const ExecFlags& e, const std::string& p_list, const std::string& out, const std::string& failures_out) {
    const auto base = effective_config(f);
    const auto ps = parse_p_list(p_list);
    std::string csv =
        "format_version,p,frames,physical_errors,logical_errors,ler,ler_ci_low,ler_ci_high,avg_iterations,osd_calls,osd_call_rate,"
        "unconverged,converged_but_wrong,syndrome_violations,max_path_iterations,stopped_by,config";
    if (e.metadata) csv += ",wall_seconds";
    csv += "\n";
    std::string failures;
    for (double p : ps) {
        auto cfg = base;
        cfg.p = p;
        if (!cfg.dem.empty()) {
            const auto at = cfg.dem.find("{p}");
            if (at == std::string::npos && ps.size() > 1) {
                throw qdiv::ConfigError("sweep: a DEM sweep needs a '{p}' placeholder in the dem path");
            }
            if (at != std::string::npos) cfg.dem.replace(at, 3, format_double(p));
        }
        qdiv::validate(cfg);
        const auto pb = load_problem(cfg);
        const auto stats = qdiv::run(pb, make_run_config(cfg, e, " p=" + format_double(p)));
        const auto [lo, hi] = qdiv::wilson_interval(static_cast<double>(stats.logical_errors), static_cast<double>(stats.frames));
        csv += std::to_string(qdiv::kFormatVersion) + "," + format_double(p) + "," + qdiv::to_decimal(stats.frames) + "," +
               qdiv::to_decimal(stats.physical_errors) + "," + qdiv::to_decimal(stats.logical_errors) + "," + format_double(stats.ler()) + "," +
               format_double(lo) + "," + format_double(hi) + "," + format_double(stats.avg_iterations()) + "," +
               qdiv::to_decimal(stats.osd_calls) + "," + format_double(stats.osd_call_rate()) + "," + qdiv::to_decimal(stats.unconverged) + "," +
               qdiv::to_decimal(stats.converged_but_wrong) + "," + qdiv::to_decimal(stats.syndrome_violations) + "," +
               std::to_string(stats.max_path_iterations) + "," + stats.stopped_by + "," + csv_quote(qdiv::to_json(cfg).dump());
        if (e.metadata) csv += "," + format_double(stats.wall_seconds);
        csv += "\n";
        if (!failures_out.empty()) failures += failures_jsonl(cfg, stats.failures);
    }
    write_output(out, csv);
    if (!failures_out.empty()) write_output(failures_out, failures);
    return kExitOk;
}

int cmd_replay(const std::string& failures_path, const ExperimentFlags& f, const std::string& out) {
    std::ifstream in(failures_path);
    if (!in) throw qdiv::ConfigError("cannot open failures file '" + failures_path + "'");
    std::optional<qdiv::ExperimentConfig> cfg;
    std::optional<qdiv::DecodingProblem> pb;
    std::optional<qdiv::DecoderSpec> spec;
    std::string report;
    std::string line;
    std::size_t lineno = 0;
    std::size_t records = 0;
    std::size_t still_failing = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = failures_path + ":" + std::to_string(lineno);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw qdiv::ConfigError(where + ": malformed JSON: " + e.what());
        }
        if (j.value("kind", std::string("failure")) == "header") {
            cfg = effective_config(f, qdiv::experiment_from_json(j.at("config")));
            pb.reset();
            continue;
        }
        if (!cfg) cfg = effective_config(f);
        if (!pb) {
            qdiv::validate(*cfg);
            pb = load_problem(*cfg);
            spec = qdiv::decoder_spec_from_json(cfg->decoder);
        }
        const auto rec = qdiv::failure_from_json(j);
        qdiv::ReplayOutcome r;
        try {
            r = qdiv::replay(rec, *pb, *spec);
        } catch (const std::invalid_argument& e) {
            throw RuntimeFailure(where + ": " + e.what());
        }
        ++records;
        if (r.cls.logical) ++still_failing;
        json o{{"format_version", qdiv::kFormatVersion},
               {"trial", rec.trial},
               {"decoder", qdiv::describe(*spec)},
               {"converged", r.decoded.result.converged},
               {"osd", r.decoded.osd_invoked},
               {"winner_stage", r.decoded.winner_stage},
               {"winner_index", r.decoded.winner_index},
               {"iterations", r.decoded.total_iterations},
               {"syndrome_ok", r.syndrome_ok},
               {"physical_error", r.cls.physical},
               {"logical_error", r.cls.logical}};
        report += o.dump() + "\n";
    }
    write_output(out, report);
    std::cerr << "replayed " << records << " records, " << still_failing << " still logical failures\n";
    return kExitOk;
}

int cmd_import_dem(const std::string& in_path, const std::string& out) {
    std::string text;
    try {
        text = qdiv::read_text_file(in_path);
    } catch (const std::exception& e) {
        throw qdiv::ConfigError(e.what());
    }
    std::vector<std::string> warnings;
    const auto dm = qdiv::canonicalize(qdiv::parse_dem(text, &warnings));
    for (const auto& w : warnings) std::cerr << in_path << ": warning: " << w << '\n';
    const auto pb = qdiv::to_decoding_problem(dm, std::filesystem::path(in_path).filename().string());
    std::cerr << in_path << ": " << dm.num_detectors << " detectors, " << dm.num_observables << " observables, " << dm.mechanisms.size()
              << " mechanisms (max detector degree " << [&] {
                     std::size_t mx = 0;
                     for (std::size_t r = 0; r < pb.h->rows(); ++r) mx = std::max(mx, pb.h->row(r).size());
                     return mx;
                 }() << ")\n";
    write_output(out, qdiv::serialize_dem(dm));
    return kExitOk;
}

int cmd_estimate_cycles(std::uint64_t ng, const std::vector<std::uint64_t>& lengths, const std::string& stats_path, const std::string& out) {
    std::vector<int> iterations;
    if (!stats_path.empty()) {
        for (const auto& v : read_json_file(stats_path).at("iterations")) iterations.push_back(v.get<int>());
    }
    json rows = json::array();
    for (auto n : lengths) {
        const auto est = qdiv::estimate_cycles(ng, n, iterations);
        json row{{"ng", ng},
                 {"n", n},
                 {"generation_cycles", est.generation_cycles},
                 {"noise_latency", est.noise_latency},
                 {"boundary_iterations", est.boundary_iterations}};
        if (!iterations.empty()) {
            std::size_t dec_bound = 0;
            for (auto b : est.bottleneck) dec_bound += b == qdiv::Bottleneck::decoder ? 1 : 0;
            row["total_cycles"] = est.total_cycles;
            row["decoder_bound_trials"] = dec_bound;
            row["trials"] = iterations.size();
        }
        rows.push_back(row);
    }
    write_output(out, json{{"format_version", qdiv::kFormatVersion}, {"estimates", rows}}.dump(2) + "\n");
    return kExitOk;
}

int cmd_list_presets() {
    std::cout << "codes:\n";
    for (const auto& name : qdiv::code_preset_names()) std::cout << "  " << name << '\n';
    std::cout << "decoders:\n";
    for (const auto& name : qdiv::decoder_preset_names()) {
        if (name == "q[T,F]") {
            std::cout << "  q[T,F]  (any fixed-point format, e.g. q[8,4])\n";
            continue;
        }
        std::cout << "  " << name << "  " << qdiv::describe(qdiv::decoder_preset(name)) << '\n';
    }
    std::cout << "dems:\n";
    const auto dir = qdiv::data_dir() / "dem";
    if (std::filesystem::is_directory(dir)) {
        std::vector<std::string> names;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.path().extension() == ".dem") names.push_back(entry.path().string());
        }
        std::sort(names.begin(), names.end());
        for (const auto& n : names) std::cout << "  " << n << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qdiv: quantum LDPC decoder emulator and Monte Carlo harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "qdiv 1.0");

    ExperimentFlags sim_flags;
    ExecFlags sim_exec;
    std::string sim_out;
    std::string sim_failures;
    auto* simulate = app.add_subcommand("simulate", "run one experiment and write a JSON results document");
    add_experiment_flags(simulate, sim_flags, true);
    add_exec_flags(simulate, sim_exec);
    simulate->add_option("-o,--out", sim_out, "results file (default: stdout)");
    simulate->add_option("--failures-out", sim_failures, "write captured failures as JSON lines");

    ExperimentFlags sweep_flags;
    ExecFlags sweep_exec;
    std::string sweep_p;
    std::string sweep_out;
    std::string sweep_failures;
    auto* sweep = app.add_subcommand("sweep", "run one experiment per physical error rate and write CSV");
    add_experiment_flags(sweep, sweep_flags, false);
    add_exec_flags(sweep, sweep_exec);
    sweep->add_option("--p", sweep_p, "comma-separated error rates; '{p}' in a dem path is replaced by each value")->required();
    sweep->add_option("-o,--out", sweep_out, "CSV file (default: stdout)");
    sweep->add_option("--failures-out", sweep_failures, "write captured failures as JSON lines");

    ExperimentFlags replay_flags;
    std::string replay_failures;
    std::string replay_out;
    auto* replay = app.add_subcommand("replay", "re-decode recorded failures, optionally with another decoder");
    replay->add_option("--failures", replay_failures, "failures file written by simulate or sweep")->required()->check(CLI::ExistingFile);
    add_experiment_flags(replay, replay_flags, true);
    replay->add_option("-o,--out", replay_out, "per-record outcomes as JSON lines (default: stdout)");

    std::string dem_in;
    std::string dem_out;
    auto* import_dem = app.add_subcommand("import-dem", "validate and canonicalize a detector error model");
    import_dem->add_option("input", dem_in, "input .dem file")->required();
    import_dem->add_option("-o,--out", dem_out, "canonical .dem output (default: stdout)");

    std::uint64_t ng = 40;
    std::vector<std::uint64_t> lengths;
    std::string iter_path;
    std::string cycles_out;
    auto* cycles = app.add_subcommand("estimate-cycles", "clock-cycle model of the pipelined emulator");
    cycles->add_option("--ng", ng, "noise generators")->check(CLI::PositiveNumber);
    cycles->add_option("--n", lengths, "code lengths")->required()->delimiter(',');
    cycles->add_option("--iterations", iter_path, "JSON file {\"iterations\": [...]} of per-trial BP iteration counts");
    cycles->add_option("-o,--out", cycles_out, "output file (default: stdout)");

    auto* list = app.add_subcommand("list-presets", "list code, decoder and DEM presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        std::cerr << app.help();
        return kExitConfig;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim_flags, sim_exec, sim_out, sim_failures);
        if (sweep->parsed()) return cmd_sweep(sweep_flags, sweep_exec, sweep_p, sweep_out, sweep_failures);
        if (replay->parsed()) return cmd_replay(replay_failures, replay_flags, replay_out);
        if (import_dem->parsed()) return cmd_import_dem(dem_in, dem_out);
        if (cycles->parsed()) return cmd_estimate_cycles(ng, lengths, iter_path, cycles_out);
        if (list->parsed()) return cmd_list_presets();
    } catch (const qdiv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const qdiv::DemParseError& e) {
        std::cerr << "dem error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}
