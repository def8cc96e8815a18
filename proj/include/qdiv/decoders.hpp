#pragma once

// Uniform front end over the decoder families used by the harness and the CLI.

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "qdiv/bp.hpp"
#include "qdiv/diversity.hpp"
#include "qdiv/osd.hpp"

namespace qdiv {

struct SingleSpec {
    DecoderConfig bp;
    friend bool operator==(const SingleSpec&, const SingleSpec&) = default;
};

/// BP followed by OSD on the BP posterior whenever BP fails to match the syndrome.
struct BpOsdSpec {
    DecoderConfig bp;
    OsdConfig osd;
    friend bool operator==(const BpOsdSpec&, const BpOsdSpec&) = default;
};

using DecoderSpec = std::variant<SingleSpec, BpOsdSpec, CascadeConfig, TreeConfig>;

/// Sum-product, 100 iterations, then OSD-CS(1, 60).
inline BpOsdSpec bp_osd_v1() {
    BpOsdSpec spec;
    spec.bp.rule = UpdateRule::sum_product;
    spec.bp.max_iters = 100;
    spec.osd = OsdConfig{};
    return spec;
}

inline std::vector<std::string> decoder_preset_names() { return {"tree_v1", "cascade_v1", "bp_osd_v1", "float64", "q[T,F]"}; }

/// Preset name, or an arithmetic string ("float64", "q[T,F]") for a single min-sum decoder
/// with the cascade's α and iteration budget.
inline DecoderSpec decoder_preset(std::string_view name) {
    if (name == "tree_v1") return tree_v1();
    if (name == "cascade_v1") return cascade_v1();
    if (name == "bp_osd_v1") return bp_osd_v1();
    if (name == "float64" || name.starts_with("q[")) {
        const auto c = cascade_v1();
        DecoderConfig cfg;
        cfg.rule = UpdateRule::min_sum;
        cfg.alpha = c.alpha;
        cfg.max_iters = c.max_iters;
        cfg.arith = Arithmetic::parse(name);
        return SingleSpec{cfg};
    }
    throw std::invalid_argument("unknown decoder preset '" + std::string(name) + "'");
}

inline void validate(const DecoderSpec& spec) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, SingleSpec>) {
                s.bp.validate();
            } else if constexpr (std::is_same_v<T, BpOsdSpec>) {
                s.bp.validate();
                s.osd.validate();
            } else {
                s.validate();
            }
        },
        spec);
}

inline std::string describe(const DecoderSpec& spec) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, SingleSpec>) {
                return s.bp.label();
            } else if constexpr (std::is_same_v<T, BpOsdSpec>) {
                return s.bp.label() + "+" + s.osd.label();
            } else if constexpr (std::is_same_v<T, CascadeConfig>) {
                std::string out = "cascade[";
                for (std::size_t i = 0; i < s.members.size(); ++i) out += (i ? "," : "") + s.members[i].to_string();
                return out + "]";
            } else {
                return "tree(" + std::to_string(s.stages.size()) + " stages)";
            }
        },
        spec);
}

/// One decoder instance per worker; owns its message buffers.
class Decoder {
public:
    Decoder(std::shared_ptr<const SparseBitMatrix> h, const DecoderSpec& spec) : h_(std::move(h)), spec_(spec) {
        if (!h_) throw std::invalid_argument("Decoder: null matrix");
        validate(spec_);
        auto graph = std::make_shared<const TannerGraph>(*h_);
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, SingleSpec>) {
                    impl_.template emplace<1>(graph, s.bp);
                } else if constexpr (std::is_same_v<T, BpOsdSpec>) {
                    impl_.template emplace<2>(graph, s.bp);
                } else if constexpr (std::is_same_v<T, CascadeConfig>) {
                    impl_.template emplace<3>(graph, s);
                } else {
                    impl_.template emplace<4>(h_, graph, s);
                }
            },
            spec_);
    }

    [[nodiscard]] const DecoderSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const SparseBitMatrix& matrix() const noexcept { return *h_; }

    DiversityResult decode(const BitVector& syndrome, const ChannelPriors& priors) {
        if (syndrome.size() != h_->rows() || priors.size() != h_->cols()) throw std::invalid_argument("Decoder: dimension mismatch");
        switch (impl_.index()) {
        case 1: return single(std::get<1>(impl_), syndrome, priors, nullptr);
        case 2: return single(std::get<2>(impl_), syndrome, priors, &std::get<BpOsdSpec>(spec_).osd);
        case 3: return std::get<3>(impl_).decode(syndrome, priors);
        case 4: return std::get<4>(impl_).decode(syndrome, priors);
        default: throw std::logic_error("Decoder: uninitialized");
        }
    }

private:
    DiversityResult single(BpDecoder& bp, const BitVector& syndrome, const ChannelPriors& priors, const OsdConfig* osd) {
        DiversityResult out;
        DecodeResult r = bp.decode(syndrome, priors);
        out.attempts.push_back({0, 0, bp.config().label(), r.converged, r.iterations, false, r.iterations});
        out.total_iterations = r.iterations;
        out.latency_iterations = r.iterations;
        out.path_iterations = r.iterations;
        if (!r.converged && osd != nullptr) {
            r.error_estimate = osd_decode(*h_, syndrome, r.posterior_llrs, priors.llrs, *osd);
            r.converged = true;
            out.attempts.back().osd = true;
            out.osd_invoked = true;
        }
        if (r.converged) {
            out.winner_stage = 0;
            out.winner_index = 0;
        }
        out.result = std::move(r);
        return out;
    }

    std::shared_ptr<const SparseBitMatrix> h_;
    DecoderSpec spec_;
    std::variant<std::monostate, BpDecoder, BpDecoder, CascadeDecoder, TreeDecoder> impl_;
};

}  // namespace qdiv
