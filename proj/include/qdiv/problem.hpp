#pragma once

// A decoding problem: check matrix, logical (or observable) matrix, and per-column error
// probabilities. Code-capacity, phenomenological, and DEM inputs all reduce to this.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdiv/codes.hpp"
#include "qdiv/noise.hpp"

namespace qdiv {

struct DecodingProblem {
    std::string name;
    std::shared_ptr<const SparseBitMatrix> h;         // checks × columns
    std::shared_ptr<const SparseBitMatrix> logicals;  // L (code modes) or O (DEM mode), × columns
    std::vector<double> probabilities;                 // sampling probability per column
    std::vector<std::uint32_t> thresholds;             // round(p · 2^18) per column
    bool observable_mode{false};                       // true for DEM problems

    [[nodiscard]] std::size_t columns() const noexcept { return probabilities.size(); }

    void validate() const {
        if (!h || !logicals) throw std::invalid_argument("decoding problem: missing matrix");
        if (h->cols() != probabilities.size() || logicals->cols() != probabilities.size() || thresholds.size() != probabilities.size()) {
            throw std::invalid_argument("decoding problem '" + name + "': dimension mismatch");
        }
    }

    /// Decoder priors: sampling probabilities clamped into (0, 0.5) so that noiseless columns still
    /// have a finite LLR.
    [[nodiscard]] std::vector<double> prior_probabilities() const {
        std::vector<double> p(probabilities.size());
        for (std::size_t j = 0; j < p.size(); ++j) p[j] = std::clamp(probabilities[j], 1e-12, 0.5 - 1e-12);
        return p;
    }
};

inline DecodingProblem make_problem(std::string name, SparseBitMatrix h, SparseBitMatrix logicals, std::vector<double> probs,
                                    bool observable_mode = false) {
    DecodingProblem pb;
    pb.name = std::move(name);
    pb.h = std::make_shared<const SparseBitMatrix>(std::move(h));
    pb.logicals = std::make_shared<const SparseBitMatrix>(std::move(logicals));
    pb.thresholds = thresholds_for(probs);
    pb.probabilities = std::move(probs);
    pb.observable_mode = observable_mode;
    pb.validate();
    return pb;
}

/// X errors on every qubit with probability p, detected by hz and classified against lz.
inline DecodingProblem code_capacity_problem(const CssCode& code, double p) {
    validate(NoiseSpec{IidBitFlip{p}});
    return make_problem(code.name, code.hz, code.lz, std::vector<double>(code.n, p));
}

/// Space-time problem for `rounds` noisy syndrome rounds followed by one perfect round.
/// Columns: data errors per round (rounds·n), then measurement errors per round (rounds·m).
/// Detector (r, i) compares round r's outcome of check i with round r-1's. With p_meas = 0
/// this reduces to the code-capacity problem.
inline DecodingProblem phenomenological_problem(const CssCode& code, const Phenomenological& noise) {
    validate(NoiseSpec{noise});
    if (noise.p_meas == 0.0) return code_capacity_problem(code, noise.p_data);
    const auto& hz = code.hz;
    const std::size_t n = code.n;
    const std::size_t m = hz.rows();
    const auto rounds = static_cast<std::size_t>(noise.rounds);
    const std::size_t data_cols = rounds * n;
    const std::size_t cols = data_cols + rounds * m;
    using idx = SparseBitMatrix::index_type;

    std::vector<std::vector<idx>> rows((rounds + 1) * m);
    for (std::size_t r = 0; r < rounds; ++r) {
        for (std::size_t i = 0; i < m; ++i) {
            auto& row = rows[r * m + i];
            for (auto c : hz.row(i)) row.push_back(static_cast<idx>(r * n + c));
            const auto meas = static_cast<idx>(data_cols + r * m + i);
            row.push_back(meas);
            rows[(r + 1) * m + i].push_back(meas);
        }
    }
    std::vector<std::vector<idx>> lrows(code.lz.rows());
    for (std::size_t l = 0; l < code.lz.rows(); ++l) {
        for (std::size_t r = 0; r < rounds; ++r) {
            for (auto c : code.lz.row(l)) lrows[l].push_back(static_cast<idx>(r * n + c));
        }
    }
    std::vector<double> probs(cols, noise.p_meas);
    std::fill(probs.begin(), probs.begin() + static_cast<std::ptrdiff_t>(data_cols), noise.p_data);
    return make_problem(code.name + "/phenomenological(" + std::to_string(noise.rounds) + ")",
                        SparseBitMatrix((rounds + 1) * m, cols, std::move(rows)), SparseBitMatrix(code.lz.rows(), cols, std::move(lrows)),
                        std::move(probs));
}

}  // namespace qdiv
