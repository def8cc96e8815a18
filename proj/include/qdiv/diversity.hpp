#pragma once

// Diversity decoders: a prioritized cascade of quantized min-sum decoders, and a
// staged tree of BP implementations whose later stages re-weight the priors with
// an earlier stage's hard decision.

#include <algorithm>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdiv/bp.hpp"
#include "qdiv/osd.hpp"

namespace qdiv {

inline constexpr double kMixEpsilon = 1e-6;

/// p'_j = gamma·e_j + (1 - gamma)·p_j, clamped to [eps, 1 - eps].
inline ChannelPriors mix_priors(std::span<const double> p, const BitVector& e_hat, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("mix_priors: gamma must be in [0, 1]");
    if (p.size() != e_hat.size()) throw std::invalid_argument("mix_priors: length mismatch");
    std::vector<double> mixed(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double e = e_hat.test(j) ? 1.0 : 0.0;
        mixed[j] = std::clamp(gamma * e + (1.0 - gamma) * p[j], kMixEpsilon, 1.0 - kMixEpsilon);
    }
    return priors_from_probabilities(mixed);
}

struct Attempt {
    int stage{0};
    int index{0};
    std::string label;
    bool converged{false};  // BP convergence; an OSD fallback is reported through `osd`
    int iterations{0};
    bool osd{false};
    int path_iterations{0};  // BP iterations along the feedback chain ending here
};

struct DiversityResult {
    DecodeResult result;
    int winner_stage{-1};
    int winner_index{-1};
    std::vector<Attempt> attempts;  // ordered by (stage, index)
    bool osd_invoked{false};
    int total_iterations{0};    // BP iterations executed across all attempts
    int latency_iterations{0};  // BP iterations on the critical path when a stage's decoders run in parallel
    int path_iterations{0};     // BP iterations along the chain that produced `result`

    [[nodiscard]] bool has_winner() const noexcept { return winner_stage >= 0; }
};

// ---------------------------------------------------------------------------
// Quantization cascade

struct CascadeConfig {
    std::vector<FixedFormat> members;
    double alpha{0.75};
    int max_iters{20};

    void validate() const {
        if (members.empty()) throw std::invalid_argument("cascade config: member list is empty");
        member_config(0).validate();
    }

    [[nodiscard]] DecoderConfig member_config(std::size_t i) const {
        DecoderConfig cfg;
        cfg.rule = UpdateRule::min_sum;
        cfg.alpha = alpha;
        cfg.arith = Arithmetic{members.at(i)};
        cfg.max_iters = max_iters;
        return cfg;
    }

    friend bool operator==(const CascadeConfig&, const CascadeConfig&) = default;
};

/// q[7,4] → q[8,4] → q[4,2] → q[3,1].
inline CascadeConfig cascade_v1() {
    return {{FixedFormat::make(7, 4), FixedFormat::make(8, 4), FixedFormat::make(4, 2), FixedFormat::make(3, 1)}, 0.75, 20};
}

class CascadeDecoder {
public:
    CascadeDecoder(std::shared_ptr<const TannerGraph> graph, CascadeConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
        for (std::size_t i = 0; i < cfg_.members.size(); ++i) members_.emplace_back(graph, cfg_.member_config(i));
    }

    DiversityResult decode(const BitVector& syndrome, const ChannelPriors& priors) {
        DiversityResult out;
        std::optional<DecodeResult> first;
        for (std::size_t i = 0; i < members_.size(); ++i) {
            DecodeResult r = members_[i].decode(syndrome, priors);
            const int stage = static_cast<int>(i);
            out.total_iterations += r.iterations;
            out.attempts.push_back({stage, 0, members_[i].config().label(), r.converged, r.iterations, false, out.total_iterations});
            if (r.converged) {
                out.winner_stage = stage;
                out.winner_index = 0;
                out.result = std::move(r);
                break;
            }
            if (!first) first = std::move(r);
        }
        if (!out.has_winner()) out.result = std::move(*first);
        out.latency_iterations = out.total_iterations;
        out.path_iterations = out.total_iterations;
        return out;
    }

private:
    CascadeConfig cfg_;
    std::vector<BpDecoder> members_;
};

inline DiversityResult decode_cascade(const SparseBitMatrix& h, const BitVector& syndrome, const ChannelPriors& priors,
                                      const CascadeConfig& cfg) {
    if (syndrome.size() != h.rows() || priors.size() != h.cols()) throw std::invalid_argument("decode_cascade: dimension mismatch");
    CascadeDecoder dec(std::make_shared<const TannerGraph>(h), cfg);
    return dec.decode(syndrome, priors);
}

// ---------------------------------------------------------------------------
// BP-implementation tree

struct TreeNode {
    DecoderConfig bp;
    double gamma{0.0};
    bool uses_osd{false};

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeStage {
    std::vector<TreeNode> decoders;
    int feedback_source{-1};  // index into the previous stage whose hard decision seeds the mix

    friend bool operator==(const TreeStage&, const TreeStage&) = default;
};

struct TreeConfig {
    std::vector<TreeStage> stages;
    OsdConfig osd{};

    void validate() const {
        if (stages.empty()) throw std::invalid_argument("tree config: no stages");
        for (std::size_t s = 0; s < stages.size(); ++s) {
            const auto& st = stages[s];
            if (st.decoders.empty()) throw std::invalid_argument("tree config: stage " + std::to_string(s) + " has no decoders");
            if (s > 0 && (st.feedback_source < 0 || st.feedback_source >= static_cast<int>(stages[s - 1].decoders.size()))) {
                throw std::invalid_argument("tree config: stage " + std::to_string(s) + " feedback source out of range");
            }
            for (const auto& node : st.decoders) {
                node.bp.validate();
                if (!(node.gamma >= 0.0 && node.gamma <= 1.0)) throw std::invalid_argument("tree config: gamma must be in [0, 1]");
            }
        }
        osd.validate();
    }

    friend bool operator==(const TreeConfig&, const TreeConfig&) = default;
};

/// Sum-product(10) → {min-sum α=0.9, α=0.75}(10, γ=0.75) → {min-sum α=0.5 (10, γ=0.5), min-sum(2, γ=0.5)+OSD},
/// with the last stage seeded by the α=0.75 decoder.
inline TreeConfig tree_v1() {
    auto ms = [](double alpha, int iters) {
        DecoderConfig c;
        c.rule = UpdateRule::min_sum;
        c.alpha = alpha;
        c.max_iters = iters;
        return c;
    };
    DecoderConfig sp;
    sp.rule = UpdateRule::sum_product;
    sp.max_iters = 10;

    TreeConfig cfg;
    cfg.stages.push_back({{{sp, 0.0, false}}, -1});
    cfg.stages.push_back({{{ms(0.9, 10), 0.75, false}, {ms(0.75, 10), 0.75, false}}, 0});
    cfg.stages.push_back({{{ms(0.5, 10), 0.5, false}, {ms(0.75, 2), 0.5, true}}, 1});
    cfg.osd = OsdConfig{};
    return cfg;
}

class TreeDecoder {
public:
    TreeDecoder(std::shared_ptr<const SparseBitMatrix> h, std::shared_ptr<const TannerGraph> graph, TreeConfig cfg)
        : h_(std::move(h)), cfg_(std::move(cfg)) {
        cfg_.validate();
        for (const auto& st : cfg_.stages) {
            auto& row = decoders_.emplace_back();
            for (const auto& node : st.decoders) row.emplace_back(graph, node.bp);
        }
    }

    [[nodiscard]] const TreeConfig& config() const noexcept { return cfg_; }

    /// The longest feedback chain of BP iterations that ends in an OSD node.
    [[nodiscard]] int worst_case_osd_path_iterations() const {
        int best = -1;
        std::vector<int> prev;
        for (std::size_t s = 0; s < cfg_.stages.size(); ++s) {
            const auto& st = cfg_.stages[s];
            const int base = s == 0 ? 0 : prev[static_cast<std::size_t>(st.feedback_source)];
            std::vector<int> cur;
            for (const auto& node : st.decoders) {
                cur.push_back(base + node.bp.max_iters);
                if (node.uses_osd) best = std::max(best, cur.back());
            }
            prev = std::move(cur);
        }
        return best;
    }

    DiversityResult decode(const BitVector& syndrome, const ChannelPriors& priors) {
        DiversityResult out;
        std::optional<DecodeResult> first;
        std::vector<DecodeResult> prev_results;
        std::vector<int> prev_paths;

        for (std::size_t s = 0; s < cfg_.stages.size(); ++s) {
            const auto& st = cfg_.stages[s];
            std::vector<DecodeResult> results;
            std::vector<int> paths;
            int stage_latency = 0;
            const DecodeResult* seed = s == 0 ? nullptr : &prev_results[static_cast<std::size_t>(st.feedback_source)];
            const int base_path = s == 0 ? 0 : prev_paths[static_cast<std::size_t>(st.feedback_source)];

            for (std::size_t i = 0; i < st.decoders.size(); ++i) {
                const auto& node = st.decoders[i];
                DecodeResult r = seed == nullptr ? decoders_[s][i].decode(syndrome, priors)
                                                 : decoders_[s][i].decode(syndrome, mix_priors(priors.probabilities, seed->hard_decision, node.gamma));
                out.total_iterations += r.iterations;
                stage_latency = std::max(stage_latency, r.iterations);
                const int path = base_path + r.iterations;
                out.attempts.push_back({static_cast<int>(s), static_cast<int>(i), node.bp.label(), r.converged, r.iterations, false, path});
                if (r.converged) {
                    out.winner_stage = static_cast<int>(s);
                    out.winner_index = static_cast<int>(i);
                    out.latency_iterations += stage_latency;
                    out.path_iterations = path;
                    out.result = std::move(r);
                    return out;
                }
                if (!first) first = r;
                results.push_back(std::move(r));
                paths.push_back(path);
            }
            out.latency_iterations += stage_latency;

            for (std::size_t i = 0; i < st.decoders.size(); ++i) {
                if (!st.decoders[i].uses_osd) continue;
                DecodeResult& r = results[i];
                r.error_estimate = osd_decode(*h_, syndrome, r.posterior_llrs, priors.llrs, cfg_.osd);
                r.converged = true;
                for (auto& a : out.attempts) {
                    if (a.stage == static_cast<int>(s) && a.index == static_cast<int>(i)) a.osd = true;
                }
                out.osd_invoked = true;
                out.winner_stage = static_cast<int>(s);
                out.winner_index = static_cast<int>(i);
                out.path_iterations = paths[i];
                out.result = std::move(r);
                return out;
            }
            prev_results = std::move(results);
            prev_paths = std::move(paths);
        }
        out.result = std::move(*first);
        out.path_iterations = out.attempts.front().path_iterations;
        return out;
    }

private:
    std::shared_ptr<const SparseBitMatrix> h_;
    TreeConfig cfg_;
    std::vector<std::vector<BpDecoder>> decoders_;
};

inline DiversityResult decode_tree(const SparseBitMatrix& h, const BitVector& syndrome, const ChannelPriors& priors,
                                   const TreeConfig& cfg) {
    if (syndrome.size() != h.rows() || priors.size() != h.cols()) throw std::invalid_argument("decode_tree: dimension mismatch");
    auto hp = std::make_shared<const SparseBitMatrix>(h);
    TreeDecoder dec(hp, std::make_shared<const TannerGraph>(h), cfg);
    return dec.decode(syndrome, priors);
}

}  // namespace qdiv
