// Acceptance checks 1-9. Prints one PASS/FAIL line per criterion; exit status is nonzero if any fail.
// Usage: qdiv_acceptance [criterion numbers...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "qdiv/config.hpp"
#include "qdiv/dem.hpp"
#include "qdiv/fixtures.hpp"
#include "qdiv/harness.hpp"
#include "test_support.hpp"

using namespace qdiv;

namespace {

// Tolerances and budgets.
constexpr double kMarginalRelTol = 1e-9;
constexpr int kOsdInstances = 20;
constexpr std::uint64_t kConsistencyTrials = 100000;
constexpr std::uint64_t kQuantTrials = 100000;
constexpr double kQuantP = 0.05;
constexpr double kCascadeP = 0.06;
constexpr std::uint64_t kCascadeFrames = 10000;
constexpr std::uint64_t kCascadeMinErrors = 200;
constexpr std::uint64_t kTreeFrames = 5000;
constexpr double kTreeRatio = 1.5;
constexpr std::uint64_t kTreeMinBaselineErrors = 100;
constexpr double kOsdReductionHigh = 0.40;
constexpr double kOsdReductionLow = 0.80;
constexpr std::uint64_t kMinOsdCalls = 10;
constexpr int kOsdPathBound = 22;
constexpr int kClassifyCases = 1000;
constexpr std::uint64_t kShardFrames = 20000;
constexpr std::uint64_t kThroughputFrames = 200000;
constexpr double kThroughputFloor = 5e3;

struct Outcome {
    bool pass{false};
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::uint64_t u64(u128 v) { return static_cast<std::uint64_t>(v); }

unsigned workers() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

DecodingProblem load_dem_problem(const char* p) {
    const auto path = data_dir() / "dem" / (std::string("bb_72_12_6_r6_p") + p + ".dem");
    return to_decoding_problem(parse_dem(read_text_file(path)), path.filename().string());
}

RunStats run_frames(const DecodingProblem& pb, const DecoderSpec& spec, std::uint64_t frames, std::uint64_t seed, bool capture = false,
                    unsigned w = workers()) {
    RunConfig cfg;
    cfg.decoder = spec;
    cfg.target_errors = 0;
    cfg.max_frames = frames;
    cfg.seed = seed;
    cfg.workers = w;
    cfg.capture_failures = capture;
    cfg.failure_cap = std::numeric_limits<std::size_t>::max();
    return run(pb, cfg);
}

std::set<std::uint64_t> failure_trials(const RunStats& st) {
    std::set<std::uint64_t> out;
    for (const auto& f : st.failures) out.insert(f.trial);
    return out;
}

// 1. Sum-product on a cycle-free instance against brute-force marginals; full-order OSD-CS against exhaustive coset search.
Outcome oracle_equivalence() {
    const SparseBitMatrix tree(4, 8, {{0, 1, 2}, {2, 3, 4}, {4, 5}, {1, 6, 7}});
    const std::vector<double> p{0.05, 0.1, 0.2, 0.15, 0.3, 0.08, 0.12, 0.25};
    DecoderConfig sp;
    sp.rule = UpdateRule::sum_product;
    sp.max_iters = 12;
    sp.early_stop = false;
    const auto priors = init_priors(p);
    double worst = 0.0;
    for (std::uint64_t smask = 0; smask < 16; ++smask) {
        const auto s = test::bitvector_from_index(4, smask);
        std::vector<double> zero(8, 0.0), one(8, 0.0);
        for (std::uint64_t m = 0; m < 256; ++m) {
            const auto e = test::bitvector_from_index(8, m);
            if (!(mat_vec_mul(tree, e) == s)) continue;
            double w = 1.0;
            for (std::size_t j = 0; j < 8; ++j) w *= e.test(j) ? p[j] : 1.0 - p[j];
            for (std::size_t j = 0; j < 8; ++j) (e.test(j) ? one : zero)[j] += w;
        }
        const auto r = decode(tree, s, priors, sp);
        for (std::size_t j = 0; j < 8; ++j) {
            const double exact = std::log(zero[j] / one[j]);
            worst = std::max(worst, std::fabs(r.posterior_llrs[j] - exact) / std::max(1.0, std::fabs(exact)));
        }
    }

    std::mt19937_64 rng(2024);
    int osd_mismatch = 0;
    for (int inst = 0; inst < kOsdInstances; ++inst) {
        const std::size_t cols = 8 + rng() % 9;
        const std::size_t rows = 4 + rng() % (cols - 5);
        const auto h = test::to_sparse(test::random_dense(rows, cols, 0.3, rng), cols);
        std::uniform_real_distribution<double> pd(0.02, 0.3);
        std::vector<double> pr(cols);
        for (auto& x : pr) x = pd(rng);
        const auto s = mat_vec_mul(h, test::to_bitvector(test::random_bits(cols, 0.2, rng)));
        const auto ch = init_priors(pr);
        DecoderConfig ms;
        ms.alpha = 0.75;
        ms.max_iters = 5;
        const auto post = decode(h, s, ch, ms).posterior_llrs;
        OsdConfig cfg;
        cfg.lambda = static_cast<int>(cols);
        cfg.max_weight = cols;
        const auto got = osd_decode(h, s, post, ch.llrs, cfg);
        double best = std::numeric_limits<double>::infinity();
        BitVector best_x(cols);
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << cols); ++m) {
            const auto x = test::bitvector_from_index(cols, m);
            if (!(mat_vec_mul(h, x) == s)) continue;
            double w = 0.0;
            for (auto j : x.support()) w += ch.llrs[j];
            if (w < best) {
                best = w;
                best_x = x;
            }
        }
        if (!(got == best_x)) ++osd_mismatch;
    }
    return {worst <= kMarginalRelTol && osd_mismatch == 0,
            fmt("max relative LLR error %.2e (tol %.0e); OSD-CS mismatches %d/%d", worst, kMarginalRelTol, osd_mismatch, kOsdInstances)};
}

// 2. Every converged result satisfies H·ê = s.
Outcome syndrome_consistency() {
    const auto code = load_code("bb_72_12_6");
    const std::vector<std::string> presets{"tree_v1", "cascade_v1", "bp_osd_v1", "float64", "q[7,4]", "q[8,4]", "q[4,2]", "q[3,1]"};
    const std::vector<double> ps{0.001, 0.01, 0.05};
    const std::uint64_t per = (kConsistencyTrials + presets.size() * ps.size() - 1) / (presets.size() * ps.size());
    std::uint64_t trials = 0, converged = 0, violations = 0;
    for (double p : ps) {
        const auto pb = code_capacity_problem(code, p);
        for (const auto& name : presets) {
            const auto st = run_frames(pb, decoder_preset(name), per, 100);
            trials += u64(st.frames);
            converged += u64(st.frames - st.unconverged);
            violations += u64(st.syndrome_violations);
        }
    }
    return {violations == 0 && trials >= kConsistencyTrials,
            fmt("%llu trials, %llu converged, %llu violations", (unsigned long long)trials, (unsigned long long)converged,
                (unsigned long long)violations)};
}

// 3. q[8,4] and q[4,2] min-sum fail on different frames.
Outcome quantization_failure_sets() {
    const auto pb = code_capacity_problem(load_code("bb_72_12_6"), kQuantP);
    const auto a = failure_trials(run_frames(pb, decoder_preset("q[8,4]"), kQuantTrials, 31, true));
    const auto b = failure_trials(run_frames(pb, decoder_preset("q[4,2]"), kQuantTrials, 31, true));
    std::size_t only_a = 0, only_b = 0;
    for (auto t : a) only_a += !b.contains(t);
    for (auto t : b) only_b += !a.contains(t);
    return {only_a > 0 && only_b > 0,
            fmt("p=%.2f, %llu paired trials: q[8,4] %zu failures, q[4,2] %zu; only q[8,4] %zu, only q[4,2] %zu", kQuantP,
                (unsigned long long)kQuantTrials, a.size(), b.size(), only_a, only_b)};
}

// 4. cascade_v1 never loses to its best member and wins outright on some seed.
Outcome cascade_gain() {
    const auto pb = code_capacity_problem(load_code("bb_72_12_6"), kCascadeP);
    const auto cascade = cascade_v1();
    bool ok = true;
    int strict = 0;
    std::string detail = fmt("p=%.2f, %llu frames/seed:", kCascadeP, (unsigned long long)kCascadeFrames);
    for (std::uint64_t seed : {1, 2, 3}) {
        std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
        for (std::size_t i = 0; i < cascade.members.size(); ++i) {
            best = std::min(best, u64(run_frames(pb, SingleSpec{cascade.member_config(i)}, kCascadeFrames, seed).logical_errors));
        }
        const auto c = u64(run_frames(pb, cascade, kCascadeFrames, seed).logical_errors);
        ok = ok && best >= kCascadeMinErrors && c <= best;
        strict += c < best;
        detail += fmt(" seed %llu cascade %llu vs best member %llu;", (unsigned long long)seed, (unsigned long long)c, (unsigned long long)best);
    }
    return {ok && strict >= 1, detail};
}

// 5. tree_v1 against BP(100)+OSD-CS on circuit-level DEMs.
Outcome tree_vs_bp_osd() {
    const char* ps[] = {"0.001", "0.002", "0.003", "0.005"};
    const auto tree = tree_v1();
    const auto base = bp_osd_v1();
    std::string detail;
    bool a_ok = false, b_high = false, b_low = false;
    bool low_found = false;
    for (const char* p : ps) {
        const auto pb = load_dem_problem(p);
        const auto t = run_frames(pb, tree, kTreeFrames, 1);
        const auto b = run_frames(pb, base, kTreeFrames, 1);
        const double reduction = b.osd_calls == 0 ? 0.0 : 1.0 - static_cast<double>(t.osd_calls) / static_cast<double>(b.osd_calls);
        detail += fmt("p=%s LE tree %llu / bp+osd %llu, OSD calls %llu / %llu (-%.1f%%); ", p, (unsigned long long)u64(t.logical_errors),
                      (unsigned long long)u64(b.logical_errors), (unsigned long long)u64(t.osd_calls), (unsigned long long)u64(b.osd_calls),
                      100 * reduction);
        if (std::string(p) == "0.005") {
            a_ok = b.logical_errors >= kTreeMinBaselineErrors &&
                   static_cast<double>(t.logical_errors) <= kTreeRatio * static_cast<double>(b.logical_errors);
            b_high = reduction >= kOsdReductionHigh;
        }
        if (!low_found && b.osd_calls >= kMinOsdCalls) {
            low_found = true;
            b_low = reduction >= kOsdReductionLow;
        }
    }
    const auto code = load_code("bb_72_12_6");
    auto h = std::make_shared<const SparseBitMatrix>(code.hz);
    const int path = TreeDecoder(h, std::make_shared<const TannerGraph>(*h), tree).worst_case_osd_path_iterations();
    const bool c_ok = path <= kOsdPathBound;
    detail += fmt("(a) %s (b) %s/%s (c) OSD path %d %s", a_ok ? "ok" : "FAIL", b_high ? "ok" : "FAIL", b_low ? "ok" : "FAIL", path,
                  c_ok ? "ok" : "FAIL");
    return {a_ok && b_high && b_low && c_ok, detail};
}

// 6. Stabilizer-equivalent corrections are physical-but-not-logical; the rest are logical.
Outcome degenerate_classification() {
    std::mt19937_64 rng(6);
    std::size_t wrong = 0, cases = 0, codes = 0;
    for (const auto& name : code_preset_names()) {
        const auto code = load_code(name);
        ++codes;
        Gf2Span stabilizers(code.n);
        for (std::size_t r = 0; r < code.hx.rows(); ++r) stabilizers.insert(code.hx.row_vector(r));
        for (int c = 0; c < kClassifyCases; ++c) {
            BitVector residual(code.n);
            for (std::size_t r = 0; r < code.hx.rows(); ++r) {
                if (rng() & 1) residual ^= code.hx.row_vector(r);
            }
            if (c % 2 == 1 && code.lx.rows() > 0) residual ^= code.lx.row_vector(rng() % code.lx.rows());
            const auto e = test::to_bitvector(test::random_bits(code.n, 0.05, rng));
            const auto cls = classify(e, e ^ residual, code.lz);
            const bool physical = residual.any();
            const bool logical = !stabilizers.contains(residual);
            wrong += cls.physical != physical || cls.logical != logical;
            ++cases;
        }
    }
    return {wrong == 0 && codes > 0, fmt("%zu codes, %zu cases, %zu misclassified", codes, cases, wrong)};
}

// 7. Byte-identical statistics for 1, 2 and 8 workers; every captured failure replays.
Outcome determinism() {
    const auto pb = code_capacity_problem(load_code("bb_72_12_6"), 0.05);
    std::string ref;
    bool same = true;
    RunStats first;
    for (unsigned w : {1u, 2u, 8u}) {
        const auto st = run_frames(pb, tree_v1(), kShardFrames, 77, true, w);
        const auto text = stats_to_json(st).dump();
        if (ref.empty()) {
            ref = text;
            first = st;
        } else {
            same = same && text == ref;
        }
    }
    std::size_t reproduced = 0;
    for (const auto& f : first.failures) {
        const auto r = replay(f, pb, tree_v1());
        reproduced += r.cls.logical && r.decoded.result.error_estimate.to_hex() == f.estimate_hex;
    }
    return {same && reproduced == first.failures.size() && !first.failures.empty(),
            fmt("%llu frames, stats %s across workers {1,2,8}; replayed %zu/%zu failures", (unsigned long long)kShardFrames,
                same ? "identical" : "DIFFER", reproduced, first.failures.size())};
}

// 8. Noise-generation latency for the code lengths in use.
Outcome cycle_model() {
    const struct {
        std::uint64_t n;
        std::uint64_t cycles;
    } cases[] = {{126, 4}, {254, 7}, {442, 12}, {544, 14}, {714, 18}, {882, 23}, {1020, 26}};
    int bad = 0;
    std::string detail = "NG=40:";
    for (const auto& c : cases) {
        const auto e = estimate_cycles(40, c.n, {});
        bad += e.generation_cycles != c.cycles || e.noise_latency != c.cycles + 3;
        detail += fmt(" n=%llu->%llu+3", (unsigned long long)c.n, (unsigned long long)e.generation_cycles);
    }
    return {bad == 0, detail};
}

// 9. Single-worker decode throughput.
Outcome throughput() {
    const auto pb = code_capacity_problem(load_code("bb_72_12_6"), 0.001);
    const auto start = std::chrono::steady_clock::now();
    const auto st = run_frames(pb, tree_v1(), kThroughputFrames, 9, false, 1);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double rate = static_cast<double>(u64(st.frames)) / secs;
    return {rate >= kThroughputFloor, fmt("%.0f trials/s (floor %.0f), %llu frames in %.2f s", rate, kThroughputFloor,
                                          (unsigned long long)u64(st.frames), secs)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"oracle equivalence", oracle_equivalence},
        {"syndrome consistency", syndrome_consistency},
        {"quantization failure sets differ", quantization_failure_sets},
        {"cascade gain", cascade_gain},
        {"tree vs BP+OSD", tree_vs_bp_osd},
        {"degenerate classification", degenerate_classification},
        {"determinism and replay", determinism},
        {"cycle model", cycle_model},
        {"throughput", throughput},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.contains(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
