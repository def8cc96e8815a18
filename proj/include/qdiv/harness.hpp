#pragma once

// Monte Carlo engine: sample, decode, classify, count, stop at an exact trial.
//
// Trial i draws its noise from Prng18(seed, i), so results depend only on the trial index.
// Trials are decoded in fixed-size batches split across workers and folded back in index order;
// the run stops at the first trial at which the target is met, whatever the worker count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qdiv/decoders.hpp"
#include "qdiv/noise.hpp"
#include "qdiv/problem.hpp"

namespace qdiv {

using u128 = unsigned __int128;

inline std::string to_decimal(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

inline u128 parse_u128(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty integer");
    u128 v = 0;
    const u128 max = ~u128{0};
    for (char c : s) {
        if (c < '0' || c > '9') throw std::invalid_argument("invalid integer '" + std::string(s) + "'");
        const auto d = static_cast<unsigned>(c - '0');
        if (v > (max - d) / 10) throw std::out_of_range("integer '" + std::string(s) + "' exceeds 128 bits");
        v = v * 10 + d;
    }
    return v;
}

struct Classification {
    bool physical{false};
    bool logical{false};
    friend bool operator==(const Classification&, const Classification&) = default;
};

/// physical: ê ≠ e; logical: L·(e ⊕ ê) ≠ 0.
inline Classification classify(const BitVector& e, const BitVector& e_hat, const SparseBitMatrix& l) {
    if (e.size() != e_hat.size() || l.cols() != e.size()) throw std::invalid_argument("classify: length mismatch");
    Classification c;
    const BitVector r = e ^ e_hat;
    c.physical = r.any();
    if (c.physical) c.logical = mat_vec_mul(l, r).any();
    return c;
}

enum class StopMetric { logical, physical };

struct RunConfig {
    DecoderSpec decoder{tree_v1()};
    std::uint32_t target_errors{100};  // 0: run until max_frames
    StopMetric stop_on{StopMetric::logical};
    u128 max_frames{0};                // 0: unlimited
    std::uint64_t seed{0};
    std::size_t batch_size{1024};
    unsigned workers{1};
    bool capture_failures{false};
    std::size_t failure_cap{65536};
    std::uint64_t progress_every{0};  // frames between progress callbacks; 0 disables
    std::function<void(u128 frames, u128 logical_errors)> progress;

    void validate() const {
        qdiv::validate(decoder);
        if (target_errors > 65535) throw std::invalid_argument("run config: target_errors must fit in 16 bits");
        if (target_errors == 0 && max_frames == 0) throw std::invalid_argument("run config: neither a target nor a frame cap is set");
        if (batch_size == 0) throw std::invalid_argument("run config: batch_size must be positive");
        if (workers == 0) throw std::invalid_argument("run config: workers must be positive");
    }
};

struct AttemptRecord {
    int stage{0};
    int index{0};
    std::string label;
    bool converged{false};
    int iterations{0};
    bool osd{false};
    friend bool operator==(const AttemptRecord&, const AttemptRecord&) = default;
};

struct FailureRecord {
    std::uint64_t trial{0};
    std::uint64_t shard{0};  // batch index
    std::uint64_t seed{0};
    std::string prng{Prng18::kAlgorithm};
    std::size_t columns{0};
    std::string error_hex;
    std::size_t checks{0};
    std::string syndrome_hex;
    std::string estimate_hex;
    std::string decoder;
    int winner_stage{-1};
    int winner_index{-1};
    bool converged{false};
    std::vector<AttemptRecord> attempts;
    friend bool operator==(const FailureRecord&, const FailureRecord&) = default;
};

struct RunStats {
    u128 frames{0};
    u128 physical_errors{0};
    u128 logical_errors{0};
    u128 total_iterations{0};
    u128 latency_iterations{0};
    u128 osd_calls{0};
    u128 unconverged{0};          // no attempt matched the syndrome and no OSD ran
    u128 converged_but_wrong{0};  // syndrome matched, logical error
    u128 syndrome_violations{0};  // reported converged but H·ê ≠ s; always expected to be zero
    std::map<std::pair<int, int>, u128> wins;
    int max_path_iterations{0};
    int max_osd_path_iterations{0};
    std::string stopped_by;  // "target" or "max_frames"
    std::vector<FailureRecord> failures;
    double wall_seconds{0.0};  // metadata; excluded from deterministic output

    [[nodiscard]] double ler() const { return frames == 0 ? 0.0 : static_cast<double>(logical_errors) / static_cast<double>(frames); }
    [[nodiscard]] double avg_iterations() const {
        return frames == 0 ? 0.0 : static_cast<double>(total_iterations) / static_cast<double>(frames);
    }
    [[nodiscard]] double osd_call_rate() const { return frames == 0 ? 0.0 : static_cast<double>(osd_calls) / static_cast<double>(frames); }
};

/// Wilson score interval at 95% confidence.
inline std::pair<double, double> wilson_interval(double successes, double trials) {
    if (trials <= 0.0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const double phat = successes / trials;
    const double denom = 1.0 + z * z / trials;
    const double centre = (phat + z * z / (2.0 * trials)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials)) / denom;
    return {successes <= 0.0 ? 0.0 : std::max(0.0, centre - half), successes >= trials ? 1.0 : std::min(1.0, centre + half)};
}

struct TrialOutcome {
    BitVector error;
    BitVector syndrome;
    DiversityResult decoded;
    Classification cls;
    bool syndrome_ok{false};
};

/// Regenerates and decodes one trial.
inline TrialOutcome run_trial(const DecodingProblem& pb, Decoder& dec, const ChannelPriors& priors, std::uint64_t seed, std::uint64_t trial) {
    TrialOutcome t;
    Prng18 rng(seed, trial);
    t.error = sample_thresholds(pb.thresholds, rng);
    t.syndrome = mat_vec_mul(*pb.h, t.error);
    t.decoded = dec.decode(t.syndrome, priors);
    t.cls = classify(t.error, t.decoded.result.error_estimate, *pb.logicals);
    t.syndrome_ok = mat_vec_mul(*pb.h, t.decoded.result.error_estimate) == t.syndrome;
    return t;
}

namespace detail {

struct CompactOutcome {
    Classification cls;
    bool converged{false};
    bool syndrome_ok{false};
    bool osd{false};
    int total_iterations{0};
    int latency_iterations{0};
    int path_iterations{0};
    int winner_stage{-1};
    int winner_index{-1};
    std::optional<FailureRecord> failure;
};

inline FailureRecord make_failure(const TrialOutcome& t, const DecoderSpec& spec, std::uint64_t seed, std::uint64_t trial, std::uint64_t shard) {
    FailureRecord f;
    f.trial = trial;
    f.shard = shard;
    f.seed = seed;
    f.columns = t.error.size();
    f.error_hex = t.error.to_hex();
    f.checks = t.syndrome.size();
    f.syndrome_hex = t.syndrome.to_hex();
    f.estimate_hex = t.decoded.result.error_estimate.to_hex();
    f.decoder = describe(spec);
    f.winner_stage = t.decoded.winner_stage;
    f.winner_index = t.decoded.winner_index;
    f.converged = t.decoded.result.converged;
    for (const auto& a : t.decoded.attempts) f.attempts.push_back({a.stage, a.index, a.label, a.converged, a.iterations, a.osd});
    return f;
}

}  // namespace detail

inline RunStats run(const DecodingProblem& pb, const RunConfig& cfg) {
    pb.validate();
    cfg.validate();
    const bool noiseless = std::all_of(pb.thresholds.begin(), pb.thresholds.end(), [](std::uint32_t t) { return t == 0; });
    if (noiseless && cfg.target_errors > 0 && cfg.max_frames == 0) {
        throw std::invalid_argument("run: noise has zero probability everywhere, so the error target can never be reached; set max_frames");
    }
    const auto start = std::chrono::steady_clock::now();
    const ChannelPriors priors = init_priors(pb.prior_probabilities());
    std::vector<Decoder> decoders;
    decoders.reserve(cfg.workers);
    for (unsigned w = 0; w < cfg.workers; ++w) decoders.emplace_back(pb.h, cfg.decoder);

    RunStats st;
    std::vector<detail::CompactOutcome> batch(cfg.batch_size);
    std::uint64_t next_trial = 0;
    std::uint64_t next_progress = cfg.progress_every;
    bool done = false;

    auto work = [&](unsigned w, std::uint64_t first, std::size_t begin, std::size_t end, std::uint64_t shard) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::uint64_t trial = first + i;
            TrialOutcome t = run_trial(pb, decoders[w], priors, cfg.seed, trial);
            auto& o = batch[i];
            o.cls = t.cls;
            o.converged = t.decoded.result.converged;
            o.syndrome_ok = t.syndrome_ok;
            o.osd = t.decoded.osd_invoked;
            o.total_iterations = t.decoded.total_iterations;
            o.latency_iterations = t.decoded.latency_iterations;
            o.path_iterations = t.decoded.path_iterations;
            o.winner_stage = t.decoded.winner_stage;
            o.winner_index = t.decoded.winner_index;
            o.failure.reset();
            if (cfg.capture_failures && t.cls.logical) o.failure = detail::make_failure(t, cfg.decoder, cfg.seed, trial, shard);
        }
    };

    std::uint64_t shard = 0;
    while (!done) {
        std::size_t count = cfg.batch_size;
        if (cfg.max_frames != 0) {
            const u128 left = cfg.max_frames - st.frames;
            if (left == 0) {
                st.stopped_by = "max_frames";
                break;
            }
            if (left < count) count = static_cast<std::size_t>(left);
        }
        const std::uint64_t first = next_trial;
        if (cfg.workers == 1 || count < cfg.workers) {
            work(0, first, 0, count, shard);
        } else {
            std::vector<std::jthread> threads;
            const std::size_t per = (count + cfg.workers - 1) / cfg.workers;
            for (unsigned w = 0; w < cfg.workers; ++w) {
                const std::size_t b = std::min(count, w * per);
                const std::size_t e = std::min(count, b + per);
                if (b < e) threads.emplace_back(work, w, first, b, e, shard);
            }
        }

        for (std::size_t i = 0; i < count; ++i) {
            const auto& o = batch[i];
            ++st.frames;
            if (o.cls.physical) ++st.physical_errors;
            if (o.cls.logical) ++st.logical_errors;
            st.total_iterations += static_cast<u128>(o.total_iterations);
            st.latency_iterations += static_cast<u128>(o.latency_iterations);
            st.max_path_iterations = std::max(st.max_path_iterations, o.path_iterations);
            if (o.osd) {
                ++st.osd_calls;
                st.max_osd_path_iterations = std::max(st.max_osd_path_iterations, o.path_iterations);
            }
            if (!o.converged) ++st.unconverged;
            if (o.converged && !o.syndrome_ok) ++st.syndrome_violations;
            if (o.converged && o.syndrome_ok && o.cls.logical) ++st.converged_but_wrong;
            if (o.winner_stage >= 0) ++st.wins[{o.winner_stage, o.winner_index}];
            if (o.failure && st.failures.size() < cfg.failure_cap) st.failures.push_back(*o.failure);

            const u128 metric = cfg.stop_on == StopMetric::logical ? st.logical_errors : st.physical_errors;
            if (cfg.target_errors > 0 && metric >= cfg.target_errors) {
                st.stopped_by = "target";
                done = true;
                break;
            }
        }
        next_trial += count;
        ++shard;
        if (cfg.progress && cfg.progress_every > 0 && st.frames >= next_progress) {
            cfg.progress(st.frames, st.logical_errors);
            while (next_progress <= st.frames) next_progress += cfg.progress_every;
        }
        if (!done && cfg.max_frames != 0 && st.frames >= cfg.max_frames) {
            st.stopped_by = "max_frames";
            done = true;
        }
    }
    st.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return st;
}

struct ReplayOutcome {
    DiversityResult decoded;
    Classification cls;
    bool syndrome_ok{false};
};

/// Regenerates a recorded trial and decodes it with `spec`, which may differ from the recording decoder.
inline ReplayOutcome replay(const FailureRecord& rec, const DecodingProblem& pb, const DecoderSpec& spec) {
    pb.validate();
    if (rec.columns != pb.columns() || rec.checks != pb.h->rows()) {
        throw std::invalid_argument("replay: record has " + std::to_string(rec.columns) + " columns / " + std::to_string(rec.checks) +
                                    " checks, problem has " + std::to_string(pb.columns()) + " / " + std::to_string(pb.h->rows()));
    }
    if (rec.prng != Prng18::kAlgorithm) throw std::invalid_argument("replay: unknown generator '" + rec.prng + "'");
    Decoder dec(pb.h, spec);
    const ChannelPriors priors = init_priors(pb.prior_probabilities());
    TrialOutcome t = run_trial(pb, dec, priors, rec.seed, rec.trial);
    if (t.error.to_hex() != rec.error_hex) throw std::invalid_argument("replay: regenerated error does not match the record (different problem or noise)");
    if (t.syndrome.to_hex() != rec.syndrome_hex) throw std::invalid_argument("replay: regenerated syndrome does not match the record");
    return {std::move(t.decoded), t.cls, t.syndrome_ok};
}

enum class Bottleneck { noise_gen, decoder };

struct CycleEstimate {
    std::uint64_t noise_latency{0};          // ⌈n/NG⌉ + 3
    std::uint64_t generation_cycles{0};      // ⌈n/NG⌉
    std::uint64_t boundary_iterations{0};    // ⌈n/(2·NG)⌉
    std::uint64_t total_cycles{0};           // Σ max(noise, decoder) + fill
    std::vector<Bottleneck> bottleneck;      // per trial
};

/// Pipelined cycle count: the generator fills the next frame while the decoder works on the current one.
inline CycleEstimate estimate_cycles(std::uint64_t ng, std::uint64_t n, const std::vector<int>& iteration_counts) {
    if (ng < 1 || n < 1) throw std::invalid_argument("estimate_cycles: NG and n must be positive");
    CycleEstimate est;
    est.generation_cycles = (n + ng - 1) / ng;
    est.noise_latency = est.generation_cycles + 3;
    est.boundary_iterations = (n + 2 * ng - 1) / (2 * ng);
    est.total_cycles = iteration_counts.empty() ? 0 : est.noise_latency;
    for (int it : iteration_counts) {
        if (it < 0) throw std::invalid_argument("estimate_cycles: negative iteration count");
        const auto dec = 2 * static_cast<std::uint64_t>(it);
        est.bottleneck.push_back(dec > est.noise_latency ? Bottleneck::decoder : Bottleneck::noise_gen);
        est.total_cycles += std::max(dec, est.noise_latency);
    }
    return est;
}

}  // namespace qdiv
