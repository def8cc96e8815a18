#pragma once

// Syndrome-based belief propagation with a flooded schedule.
//
// Rules: sum-product and scaled min-sum. Arithmetic: double, or saturating q[T,F]
// where every message (channel, check-to-variable, variable-to-check, posterior)
// is a raw T-bit integer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "qdiv/gf2.hpp"
#include "qdiv/quant.hpp"

namespace qdiv {

enum class UpdateRule { sum_product, min_sum };

inline std::string to_string(UpdateRule rule) { return rule == UpdateRule::sum_product ? "sum-product" : "min-sum"; }

inline UpdateRule parse_update_rule(std::string_view text) {
    if (text == "sum-product" || text == "sp") return UpdateRule::sum_product;
    if (text == "min-sum" || text == "ms") return UpdateRule::min_sum;
    throw std::invalid_argument("unknown BP rule '" + std::string(text) + "' (expected \"sum-product\" or \"min-sum\")");
}

/// Magnitude cap for float messages: tanh inputs are clamped here and degree-1 checks emit it.
inline constexpr double kLlrCap = 30.0;

struct DecoderConfig {
    UpdateRule rule{UpdateRule::min_sum};
    double alpha{1.0};  // min-sum scaling; ignored by sum-product
    Arithmetic arith{};
    int max_iters{10};
    bool early_stop{true};

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("decoder config: alpha must be in (0, 1]");
        if (max_iters < 1 || max_iters > 255) throw std::invalid_argument("decoder config: max_iters must be in [1, 255]");
    }

    [[nodiscard]] std::string label() const {
        std::string s = rule == UpdateRule::sum_product ? "sp" : "ms";
        if (rule == UpdateRule::min_sum) {
            std::string a = std::to_string(alpha);
            a.erase(a.find_last_not_of('0') + 1);
            if (!a.empty() && a.back() == '.') a.pop_back();
            s += "(" + a + ")";
        }
        return s + "/" + arith.to_string() + "/" + std::to_string(max_iters);
    }

    friend bool operator==(const DecoderConfig&, const DecoderConfig&) = default;
};

struct ChannelPriors {
    std::vector<double> probabilities;
    std::vector<double> llrs;

    [[nodiscard]] std::size_t size() const noexcept { return llrs.size(); }
};

/// LLR ln((1-p)/p) for each p in (0, 1); no upper restriction so mixed priors can exceed 1/2.
inline ChannelPriors priors_from_probabilities(std::span<const double> p) {
    ChannelPriors out;
    out.probabilities.assign(p.begin(), p.end());
    out.llrs.resize(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (!(p[j] > 0.0 && p[j] < 1.0)) {
            throw std::invalid_argument("prior probability at column " + std::to_string(j) + " is " + std::to_string(p[j]) +
                                        ", outside (0, 1)");
        }
        out.llrs[j] = std::log((1.0 - p[j]) / p[j]);
    }
    return out;
}

/// Error-model priors; each p must lie in (0, 0.5).
inline ChannelPriors init_priors(std::span<const double> p) {
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (!(p[j] > 0.0 && p[j] < 0.5)) {
            throw std::invalid_argument("error probability at column " + std::to_string(j) + " is " + std::to_string(p[j]) +
                                        ", outside (0, 0.5)");
        }
    }
    return priors_from_probabilities(p);
}

struct DecodeResult {
    bool converged{false};
    BitVector error_estimate;
    int iterations{0};
    std::vector<double> posterior_llrs;
    BitVector hard_decision;
    bool saturated{false};  // fixed point only: some value was clipped to the format range
};

namespace detail {

struct FloatOps {
    using msg_t = double;
    double alpha{1.0};
    bool saturated{false};

    msg_t from_llr(double x) { return x; }
    [[nodiscard]] double to_double(msg_t m) const { return m; }
    [[nodiscard]] static msg_t magnitude(msg_t m) { return std::fabs(m); }
    [[nodiscard]] static msg_t cap() { return kLlrCap; }
    msg_t scale(msg_t mag) { return alpha * mag; }
    msg_t from_magnitude(double mag) { return mag; }
    msg_t add(msg_t a, msg_t b) { return a + b; }
};

struct FixedOps {
    using msg_t = std::int32_t;
    FixedFormat fmt;
    double alpha{1.0};
    bool saturated{false};

    msg_t from_llr(double x) {
        return static_cast<msg_t>(round_saturate(std::ldexp(x, fmt.frac_bits), fmt, &saturated));
    }
    [[nodiscard]] double to_double(msg_t m) const { return std::ldexp(static_cast<double>(m), -fmt.frac_bits); }
    [[nodiscard]] static std::int64_t magnitude(msg_t m) { return m < 0 ? -static_cast<std::int64_t>(m) : m; }
    [[nodiscard]] std::int64_t cap() const { return fmt.raw_max(); }
    msg_t scale(std::int64_t mag) { return static_cast<msg_t>(round_saturate(static_cast<double>(mag) * alpha, fmt, &saturated)); }
    msg_t from_magnitude(double mag) { return from_llr(mag); }
    msg_t add(msg_t a, msg_t b) {
        const std::int64_t sum = static_cast<std::int64_t>(a) + b;
        const std::int64_t sat = fmt.saturate(sum);
        if (sat != sum) saturated = true;
        return static_cast<msg_t>(sat);
    }
};

template <class Ops>
void min_sum_check(Ops& ops, const typename Ops::msg_t* in, typename Ops::msg_t* out, std::size_t deg, bool syndrome) {
    using msg_t = typename Ops::msg_t;
    if (deg == 1) {
        const msg_t m = ops.scale(ops.cap());
        out[0] = syndrome ? static_cast<msg_t>(-m) : m;
        return;
    }
    using mag_t = decltype(Ops::magnitude(in[0]));
    bool parity = syndrome;
    mag_t min1 = std::numeric_limits<mag_t>::max();
    mag_t min2 = min1;
    std::size_t argmin = 0;
    for (std::size_t j = 0; j < deg; ++j) {
        if (in[j] < 0) parity = !parity;
        const mag_t a = Ops::magnitude(in[j]);
        if (a < min1) {
            min2 = min1;
            min1 = a;
            argmin = j;
        } else if (a < min2) {
            min2 = a;
        }
    }
    const msg_t m1 = ops.scale(min1);
    const msg_t m2 = ops.scale(min2);
    for (std::size_t k = 0; k < deg; ++k) {
        const msg_t m = k == argmin ? m2 : m1;
        const bool negative = parity != (in[k] < 0);
        out[k] = negative ? static_cast<msg_t>(-m) : m;
    }
}

template <class Ops>
void sum_product_check(Ops& ops, const typename Ops::msg_t* in, typename Ops::msg_t* out, std::size_t deg, bool syndrome,
                       std::vector<double>& scratch) {
    using msg_t = typename Ops::msg_t;
    scratch.resize(2 * deg + 1);
    double* t = scratch.data();
    double* suffix = scratch.data() + deg;
    bool parity = syndrome;
    for (std::size_t j = 0; j < deg; ++j) {
        const double v = ops.to_double(in[j]);
        if (v < 0) parity = !parity;
        t[j] = std::tanh(std::min(std::fabs(v), kLlrCap) / 2.0);
    }
    suffix[deg] = 1.0;
    for (std::size_t j = deg; j-- > 0;) suffix[j] = suffix[j + 1] * t[j];
    double prefix = 1.0;
    for (std::size_t k = 0; k < deg; ++k) {
        const double prod = prefix * suffix[k + 1];
        prefix *= t[k];
        const double mag = prod >= 1.0 ? kLlrCap : 2.0 * std::atanh(prod);
        const msg_t m = ops.from_magnitude(mag);
        const bool negative = parity != (ops.to_double(in[k]) < 0);
        out[k] = negative ? static_cast<msg_t>(-m) : m;
    }
}

template <class Ops>
typename Ops::msg_t variable_node(Ops& ops, typename Ops::msg_t channel, const typename Ops::msg_t* in, typename Ops::msg_t* out,
                                  std::size_t deg) {
    using msg_t = typename Ops::msg_t;
    msg_t posterior = channel;
    for (std::size_t j = 0; j < deg; ++j) posterior = ops.add(posterior, in[j]);
    if constexpr (std::is_same_v<Ops, FloatOps>) {
        for (std::size_t k = 0; k < deg; ++k) out[k] = posterior - in[k];
    } else {
        // Saturation is not invertible, so each extrinsic sum is its own left-to-right chain.
        for (std::size_t k = 0; k < deg; ++k) {
            msg_t acc = channel;
            for (std::size_t j = 0; j < deg; ++j) {
                if (j != k) acc = ops.add(acc, in[j]);
            }
            out[k] = acc;
        }
    }
    return posterior;
}

}  // namespace detail

// Single-node updates on real-valued messages.

inline std::vector<double> check_update(std::span<const double> incoming, bool syndrome, UpdateRule rule, double alpha = 1.0) {
    if (incoming.empty()) throw std::invalid_argument("check_update: no incoming messages");
    std::vector<double> out(incoming.size());
    detail::FloatOps ops{alpha};
    if (rule == UpdateRule::min_sum) {
        detail::min_sum_check(ops, incoming.data(), out.data(), incoming.size(), syndrome);
    } else {
        std::vector<double> scratch;
        detail::sum_product_check(ops, incoming.data(), out.data(), incoming.size(), syndrome, scratch);
    }
    return out;
}

inline std::vector<QValue> check_update(std::span<const QValue> incoming, bool syndrome, UpdateRule rule, double alpha = 1.0) {
    if (incoming.empty()) throw std::invalid_argument("check_update: no incoming messages");
    const FixedFormat fmt = incoming.front().format;
    std::vector<std::int32_t> in(incoming.size());
    for (std::size_t j = 0; j < incoming.size(); ++j) {
        if (!(incoming[j].format == fmt)) throw std::invalid_argument("check_update: mixed formats");
        in[j] = static_cast<std::int32_t>(incoming[j].raw);
    }
    std::vector<std::int32_t> raw(incoming.size());
    detail::FixedOps ops{fmt, alpha};
    if (rule == UpdateRule::min_sum) {
        detail::min_sum_check(ops, in.data(), raw.data(), in.size(), syndrome);
    } else {
        std::vector<double> scratch;
        detail::sum_product_check(ops, in.data(), raw.data(), in.size(), syndrome, scratch);
    }
    std::vector<QValue> out(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) out[k] = {raw[k], fmt};
    return out;
}

template <class T>
struct VariableUpdate {
    std::vector<T> outgoing;
    T posterior;
};

inline VariableUpdate<double> variable_update(double channel, std::span<const double> incoming) {
    VariableUpdate<double> v{std::vector<double>(incoming.size()), 0.0};
    detail::FloatOps ops;
    v.posterior = detail::variable_node(ops, channel, incoming.data(), v.outgoing.data(), incoming.size());
    return v;
}

inline VariableUpdate<QValue> variable_update(QValue channel, std::span<const QValue> incoming) {
    const FixedFormat fmt = channel.format;
    std::vector<std::int32_t> in(incoming.size());
    for (std::size_t j = 0; j < incoming.size(); ++j) {
        if (!(incoming[j].format == fmt)) throw std::invalid_argument("variable_update: mixed formats");
        in[j] = static_cast<std::int32_t>(incoming[j].raw);
    }
    std::vector<std::int32_t> raw(in.size());
    detail::FixedOps ops{fmt};
    const auto post = detail::variable_node(ops, static_cast<std::int32_t>(channel.raw), in.data(), raw.data(), in.size());
    VariableUpdate<QValue> v{std::vector<QValue>(raw.size()), QValue{post, fmt}};
    for (std::size_t k = 0; k < raw.size(); ++k) v.outgoing[k] = {raw[k], fmt};
    return v;
}

/// Edge-indexed Tanner graph. Edges are numbered in row-major order of H; each
/// variable lists its edges by ascending check index.
class TannerGraph {
public:
    explicit TannerGraph(const SparseBitMatrix& h) : checks_(h.rows()), vars_(h.cols()) {
        check_offsets_.reserve(checks_ + 1);
        check_offsets_.push_back(0);
        edge_var_.reserve(h.nnz());
        for (std::size_t r = 0; r < checks_; ++r) {
            for (auto c : h.row(r)) edge_var_.push_back(c);
            check_offsets_.push_back(static_cast<std::uint32_t>(edge_var_.size()));
        }
        var_offsets_.assign(vars_ + 1, 0);
        for (auto v : edge_var_) ++var_offsets_[v + 1];
        for (std::size_t v = 0; v < vars_; ++v) var_offsets_[v + 1] += var_offsets_[v];
        var_edges_.resize(edge_var_.size());
        std::vector<std::uint32_t> fill(var_offsets_.begin(), var_offsets_.end() - 1);
        for (std::uint32_t e = 0; e < edge_var_.size(); ++e) var_edges_[fill[edge_var_[e]]++] = e;
    }

    [[nodiscard]] std::size_t checks() const noexcept { return checks_; }
    [[nodiscard]] std::size_t vars() const noexcept { return vars_; }
    [[nodiscard]] std::size_t edges() const noexcept { return edge_var_.size(); }
    [[nodiscard]] std::uint32_t check_begin(std::size_t c) const noexcept { return check_offsets_[c]; }
    [[nodiscard]] std::uint32_t check_end(std::size_t c) const noexcept { return check_offsets_[c + 1]; }
    [[nodiscard]] std::uint32_t edge_var(std::size_t e) const noexcept { return edge_var_[e]; }
    [[nodiscard]] std::span<const std::uint32_t> var_edges(std::size_t v) const noexcept {
        return {var_edges_.data() + var_offsets_[v], var_edges_.data() + var_offsets_[v + 1]};
    }

private:
    std::size_t checks_;
    std::size_t vars_;
    std::vector<std::uint32_t> check_offsets_;
    std::vector<std::uint32_t> edge_var_;
    std::vector<std::uint32_t> var_offsets_;
    std::vector<std::uint32_t> var_edges_;
};

/// Reusable decoder bound to one Tanner graph. Not thread-safe; use one per worker.
class BpDecoder {
public:
    BpDecoder(std::shared_ptr<const TannerGraph> graph, DecoderConfig cfg) : graph_(std::move(graph)), cfg_(cfg) {
        if (!graph_) throw std::invalid_argument("BpDecoder: null graph");
        cfg_.validate();
    }
    BpDecoder(const SparseBitMatrix& h, DecoderConfig cfg) : BpDecoder(std::make_shared<const TannerGraph>(h), cfg) {}

    [[nodiscard]] const DecoderConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const TannerGraph& graph() const noexcept { return *graph_; }

    DecodeResult decode(const BitVector& syndrome, std::span<const double> channel_llrs) {
        const auto& g = *graph_;
        if (syndrome.size() != g.checks()) {
            throw std::invalid_argument("decode: syndrome length " + std::to_string(syndrome.size()) + " != checks " +
                                        std::to_string(g.checks()));
        }
        if (channel_llrs.size() != g.vars()) {
            throw std::invalid_argument("decode: prior length " + std::to_string(channel_llrs.size()) + " != columns " +
                                        std::to_string(g.vars()));
        }
        if (cfg_.arith.is_float()) {
            detail::FloatOps ops{cfg_.alpha};
            return run(ops, syndrome, channel_llrs, float_bufs_);
        }
        detail::FixedOps ops{*cfg_.arith.fixed, cfg_.alpha};
        return run(ops, syndrome, channel_llrs, fixed_bufs_);
    }

    DecodeResult decode(const BitVector& syndrome, const ChannelPriors& priors) { return decode(syndrome, priors.llrs); }

private:
    template <class Msg>
    struct Buffers {
        std::vector<Msg> channel;
        std::vector<Msg> to_check;
        std::vector<Msg> to_var;
        std::vector<Msg> posterior;
        std::vector<Msg> in;
        std::vector<Msg> out;
    };

    template <class Ops, class Msg>
    DecodeResult run(Ops& ops, const BitVector& syndrome, std::span<const double> llrs, Buffers<Msg>& b) {
        const auto& g = *graph_;
        const std::size_t n = g.vars();
        DecodeResult res;

        if (cfg_.early_stop && syndrome.none()) {
            res.converged = true;
            res.iterations = 1;
            res.error_estimate = BitVector(n);
            res.hard_decision = BitVector(n);
            res.posterior_llrs.resize(n);
            for (std::size_t v = 0; v < n; ++v) res.posterior_llrs[v] = ops.to_double(ops.from_llr(llrs[v]));
            res.saturated = ops.saturated;
            return res;
        }

        syndrome_.resize(g.checks());
        for (std::size_t c = 0; c < g.checks(); ++c) syndrome_[c] = syndrome.test(c) ? 1 : 0;
        hard_.assign(n, 0);

        b.channel.resize(n);
        b.posterior.resize(n);
        b.to_check.resize(g.edges());
        b.to_var.resize(g.edges());
        for (std::size_t v = 0; v < n; ++v) b.channel[v] = ops.from_llr(llrs[v]);
        for (std::size_t e = 0; e < g.edges(); ++e) b.to_check[e] = b.channel[g.edge_var(e)];

        bool satisfied = false;
        int it = 0;
        while (it < cfg_.max_iters) {
            ++it;
            for (std::size_t c = 0; c < g.checks(); ++c) {
                const auto begin = g.check_begin(c);
                const auto deg = static_cast<std::size_t>(g.check_end(c) - begin);
                if (deg == 0) continue;
                if (cfg_.rule == UpdateRule::min_sum) {
                    detail::min_sum_check(ops, b.to_check.data() + begin, b.to_var.data() + begin, deg, syndrome_[c] != 0);
                } else {
                    detail::sum_product_check(ops, b.to_check.data() + begin, b.to_var.data() + begin, deg, syndrome_[c] != 0, scratch_);
                }
            }
            for (std::size_t v = 0; v < n; ++v) {
                const auto edges = g.var_edges(v);
                const std::size_t deg = edges.size();
                b.in.resize(deg);
                b.out.resize(deg);
                for (std::size_t j = 0; j < deg; ++j) b.in[j] = b.to_var[edges[j]];
                b.posterior[v] = detail::variable_node(ops, b.channel[v], b.in.data(), b.out.data(), deg);
                for (std::size_t j = 0; j < deg; ++j) b.to_check[edges[j]] = b.out[j];
                hard_[v] = b.posterior[v] < 0 ? 1 : 0;
            }
            satisfied = syndrome_matches();
            if (cfg_.early_stop && satisfied) break;
        }

        res.converged = satisfied;
        res.iterations = it;
        res.hard_decision = BitVector::from_bits(hard_);
        res.error_estimate = res.hard_decision;
        res.posterior_llrs.resize(n);
        for (std::size_t v = 0; v < n; ++v) res.posterior_llrs[v] = ops.to_double(b.posterior[v]);
        res.saturated = ops.saturated;
        return res;
    }

    bool syndrome_matches() const {
        const auto& g = *graph_;
        for (std::size_t c = 0; c < g.checks(); ++c) {
            std::uint8_t parity = 0;
            for (auto e = g.check_begin(c); e < g.check_end(c); ++e) parity ^= hard_[g.edge_var(e)];
            if (parity != syndrome_[c]) return false;
        }
        return true;
    }

    std::shared_ptr<const TannerGraph> graph_;
    DecoderConfig cfg_;
    Buffers<double> float_bufs_;
    Buffers<std::int32_t> fixed_bufs_;
    std::vector<std::uint8_t> syndrome_;
    std::vector<std::uint8_t> hard_;
    std::vector<double> scratch_;
};

inline DecodeResult decode(const SparseBitMatrix& h, const BitVector& syndrome, const ChannelPriors& priors, const DecoderConfig& cfg) {
    BpDecoder dec(h, cfg);
    return dec.decode(syndrome, priors);
}

}  // namespace qdiv
