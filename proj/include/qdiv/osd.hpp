#pragma once

// Ordered-statistics post-processing for syndromes that BP failed to match.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdiv/gf2.hpp"

namespace qdiv {

enum class OsdMethod { osd0, combination_sweep };

/// Column ordering key fed to elimination; the first columns in the order become pivots.
enum class OsdOrdering {
    error_likelihood,  // posterior LLR ascending: most probable error columns first
    reliability,       // |posterior LLR| ascending: least reliable columns first
};

struct OsdConfig {
    OsdMethod method{OsdMethod::combination_sweep};
    int lambda{1};                 // largest flip-subset size
    std::size_t max_weight{60};    // number of leading non-pivot columns eligible for flipping
    OsdOrdering ordering{OsdOrdering::error_likelihood};

    void validate() const {
        if (method == OsdMethod::combination_sweep && (lambda < 1 || lambda > 16)) {
            throw std::invalid_argument("osd config: lambda must be in [1, 16] for combination sweep");
        }
    }

    [[nodiscard]] std::string label() const {
        if (method == OsdMethod::osd0) return "osd0";
        return "osd-cs(" + std::to_string(lambda) + "," + std::to_string(max_weight) + ")";
    }

    friend bool operator==(const OsdConfig&, const OsdConfig&) = default;
};

/// Column order for elimination; ties keep ascending column index.
inline std::vector<std::size_t> osd_column_order(std::span<const double> posterior_llrs, OsdOrdering ordering) {
    std::vector<std::size_t> order(posterior_llrs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (ordering == OsdOrdering::reliability) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return std::fabs(posterior_llrs[a]) < std::fabs(posterior_llrs[b]); });
    } else {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return posterior_llrs[a] < posterior_llrs[b]; });
    }
    return order;
}

/// Returns x with H·x = s. Candidates are ranked by the sum of `soft_weights` over their support,
/// ties broken by enumeration index (OSD-0 first, then flip subsets by size and lexicographic order).
inline BitVector osd_decode(const SparseBitMatrix& h, const BitVector& syndrome, std::span<const double> posterior_llrs,
                            std::span<const double> soft_weights, const OsdConfig& cfg) {
    cfg.validate();
    if (syndrome.size() != h.rows()) throw std::invalid_argument("osd_decode: syndrome length mismatch");
    if (posterior_llrs.size() != h.cols() || soft_weights.size() != h.cols()) {
        throw std::invalid_argument("osd_decode: per-column input length mismatch");
    }
    const auto order = osd_column_order(posterior_llrs, cfg.ordering);
    const RowReduction rr = row_reduce(h, order);

    BitVector transformed = syndrome;
    apply_row_ops(rr.row_ops, transformed);
    for (std::size_t r = rr.rank; r < rr.rows(); ++r) {
        if (transformed.test(r)) throw std::domain_error("osd_decode: syndrome is outside the column space of H");
    }
    BitVector base(rr.rank);
    for (std::size_t i = 0; i < rr.rank; ++i) {
        if (transformed.test(i)) base.set_unchecked(i);
    }

    auto pivot_weight = [&](const BitVector& rhs) {
        double w = 0.0;
        for (auto i : rhs.support()) w += soft_weights[rr.pivot_cols[i]];
        return w;
    };
    auto assemble = [&](const BitVector& rhs, std::span<const std::size_t> flipped) {
        BitVector x(h.cols());
        for (auto i : rhs.support()) x.set_unchecked(rr.pivot_cols[i]);
        for (auto c : flipped) x.set_unchecked(c);
        return x;
    };

    if (cfg.method == OsdMethod::osd0) return assemble(base, {});

    std::vector<bool> is_pivot(h.cols(), false);
    for (auto c : rr.pivot_cols) is_pivot[c] = true;
    std::vector<std::size_t> eligible;
    for (auto c : order) {
        if (eligible.size() == cfg.max_weight) break;
        if (!is_pivot[c]) eligible.push_back(c);
    }
    std::vector<BitVector> reduced_cols;
    reduced_cols.reserve(eligible.size());
    for (auto c : eligible) {
        BitVector v(rr.rank);
        for (std::size_t i = 0; i < rr.rank; ++i) {
            if (rr.reduced.get(i, c)) v.set_unchecked(i);
        }
        reduced_cols.push_back(std::move(v));
    }

    double best_weight = pivot_weight(base);
    BitVector best_rhs = base;
    std::vector<std::size_t> best_flip;

    std::vector<std::size_t> chosen;
    const std::size_t max_size = std::min<std::size_t>(static_cast<std::size_t>(cfg.lambda), eligible.size());
    // Depth-first over index-increasing subsets of a fixed size gives lexicographic order.
    std::function<void(std::size_t, std::size_t, BitVector&, double)> extend = [&](std::size_t start, std::size_t size, BitVector& rhs,
                                                                                    double flip_weight) {
        if (chosen.size() == size) {
            const double w = flip_weight + pivot_weight(rhs);
            if (w < best_weight) {
                best_weight = w;
                best_rhs = rhs;
                best_flip.clear();
                for (auto t : chosen) best_flip.push_back(eligible[t]);
            }
            return;
        }
        for (std::size_t t = start; t + (size - chosen.size()) <= eligible.size(); ++t) {
            chosen.push_back(t);
            rhs ^= reduced_cols[t];
            extend(t + 1, size, rhs, flip_weight + soft_weights[eligible[t]]);
            rhs ^= reduced_cols[t];
            chosen.pop_back();
        }
    };
    for (std::size_t size = 1; size <= max_size; ++size) {
        BitVector rhs = base;
        extend(0, size, rhs, 0.0);
    }
    return assemble(best_rhs, best_flip);
}

}  // namespace qdiv
