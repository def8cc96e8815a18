#pragma once

// CSS code construction: hypergraph products, bivariate bicycle codes, logical operator bases.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qdiv/gf2.hpp"

namespace qdiv {

struct ClassicalCode {
    SparseBitMatrix h;

    ClassicalCode() = default;
    explicit ClassicalCode(SparseBitMatrix matrix) : h(std::move(matrix)) {
        if (h.rows() == 0 || h.cols() == 0) throw std::invalid_argument("classical code: parity-check matrix is empty");
    }
};

struct CssCode {
    std::string name;
    std::size_t n{0};
    std::size_t k{0};
    SparseBitMatrix hx;
    SparseBitMatrix hz;
    SparseBitMatrix lx;  // X-type logicals: commute with hz rows
    SparseBitMatrix lz;  // Z-type logicals: commute with hx rows
    std::optional<int> d_upper;
    std::string provenance;
};

/// Bases of ker(hz)/rowspace(hx) and ker(hx)/rowspace(hz).
inline std::pair<SparseBitMatrix, SparseBitMatrix> logical_operators(const SparseBitMatrix& hx, const SparseBitMatrix& hz) {
    if (hx.cols() != hz.cols()) throw std::invalid_argument("logical_operators: hx and hz differ in column count");
    const std::size_t n = hx.cols();
    auto quotient = [n](const SparseBitMatrix& stabilizers, const SparseBitMatrix& checks) {
        Gf2Span span(n);
        for (std::size_t r = 0; r < stabilizers.rows(); ++r) span.insert(stabilizers.row_vector(r));
        std::vector<BitVector> logicals;
        for (auto& v : kernel_basis(checks)) {
            if (span.insert(v)) logicals.push_back(std::move(v));
        }
        return matrix_from_rows(n, logicals);
    };
    return {quotient(hx, hz), quotient(hz, hx)};
}

struct CssReport {
    bool dimensions_consistent{false};
    bool stabilizers_commute{false};
    bool lx_commutes_with_hz{false};
    bool lz_commutes_with_hx{false};
    bool logical_count_matches{false};
    bool logicals_nontrivial{false};

    [[nodiscard]] bool ok() const noexcept {
        return dimensions_consistent && stabilizers_commute && lx_commutes_with_hz && lz_commutes_with_hx && logical_count_matches &&
               logicals_nontrivial;
    }

    [[nodiscard]] std::vector<std::string> failures() const {
        std::vector<std::string> out;
        if (!dimensions_consistent) out.emplace_back("dimensions");
        if (!stabilizers_commute) out.emplace_back("hx*hz^T != 0");
        if (!lx_commutes_with_hz) out.emplace_back("lx*hz^T != 0");
        if (!lz_commutes_with_hx) out.emplace_back("lz*hx^T != 0");
        if (!logical_count_matches) out.emplace_back("k does not match n - rank(hx) - rank(hz)");
        if (!logicals_nontrivial) out.emplace_back("logical rows dependent on stabilizers");
        return out;
    }
};

inline CssReport validate_css(const CssCode& code) {
    CssReport rep;
    rep.dimensions_consistent = code.hx.cols() == code.n && code.hz.cols() == code.n && code.lx.cols() == code.n &&
                                code.lz.cols() == code.n && code.lx.rows() == code.k && code.lz.rows() == code.k;
    if (code.hx.cols() != code.hz.cols()) return rep;
    rep.stabilizers_commute = rows_orthogonal(code.hx, code.hz);
    rep.lx_commutes_with_hz = code.lx.cols() == code.n && rows_orthogonal(code.hz, code.lx);
    rep.lz_commutes_with_hx = code.lz.cols() == code.n && rows_orthogonal(code.hx, code.lz);
    const std::size_t rx = rank(code.hx);
    const std::size_t rz = rank(code.hz);
    rep.logical_count_matches = code.hx.cols() >= rx + rz && code.k == code.hx.cols() - rx - rz;

    auto independent_of = [](const SparseBitMatrix& stabilizers, const SparseBitMatrix& logicals) {
        if (logicals.cols() != stabilizers.cols()) return false;
        Gf2Span span(stabilizers.cols());
        for (std::size_t r = 0; r < stabilizers.rows(); ++r) span.insert(stabilizers.row_vector(r));
        for (std::size_t r = 0; r < logicals.rows(); ++r) {
            if (!span.insert(logicals.row_vector(r))) return false;
        }
        return true;
    };
    rep.logicals_nontrivial = independent_of(code.hx, code.lx) && independent_of(code.hz, code.lz);
    return rep;
}

/// Wraps a commuting (hx, hz) pair, derives logicals, and rejects non-commuting input.
inline CssCode make_css_code(SparseBitMatrix hx, SparseBitMatrix hz, std::string name = {}, std::optional<int> d_upper = std::nullopt) {
    if (hx.cols() != hz.cols()) throw std::invalid_argument("css code: hx has " + std::to_string(hx.cols()) + " columns, hz has " +
                                                            std::to_string(hz.cols()));
    if (!rows_orthogonal(hx, hz)) throw std::invalid_argument("css code '" + name + "': hx*hz^T != 0");
    CssCode code;
    code.name = std::move(name);
    code.n = hx.cols();
    auto [lx, lz] = logical_operators(hx, hz);
    code.k = lx.rows();
    code.hx = std::move(hx);
    code.hz = std::move(hz);
    code.lx = std::move(lx);
    code.lz = std::move(lz);
    code.d_upper = d_upper;
    return code;
}

/// hx = [H1⊗I_n2 | I_m1⊗H2ᵀ], hz = [I_n1⊗H2 | H1ᵀ⊗I_m2].
inline CssCode hypergraph_product(const ClassicalCode& c1, const ClassicalCode& c2) {
    const auto& h1 = c1.h;
    const auto& h2 = c2.h;
    auto hx = hstack(kron(h1, identity_matrix(h2.cols())), kron(identity_matrix(h1.rows()), h2.transpose()));
    auto hz = hstack(kron(identity_matrix(h1.cols()), h2), kron(h1.transpose(), identity_matrix(h2.rows())));
    return make_css_code(std::move(hx), std::move(hz));
}

struct Monomial {
    int x_power{0};
    int y_power{0};
    friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Sum of x^i y^j over the terms, with x = S_l ⊗ I_m and y = I_l ⊗ S_m.
inline SparseBitMatrix bivariate_polynomial(int l, int m, const std::vector<Monomial>& terms) {
    if (l < 1 || m < 1) throw std::invalid_argument("bivariate bicycle: l and m must be positive");
    if (terms.empty()) throw std::invalid_argument("bivariate bicycle: term list is empty");
    for (const auto& t : terms) {
        if (t.x_power < 0 || t.x_power >= l || t.y_power < 0 || t.y_power >= m) {
            throw std::invalid_argument("bivariate bicycle: exponent (" + std::to_string(t.x_power) + "," + std::to_string(t.y_power) +
                                        ") not reduced mod (" + std::to_string(l) + "," + std::to_string(m) + ")");
        }
    }
    const auto size = static_cast<std::size_t>(l) * static_cast<std::size_t>(m);
    std::vector<std::vector<SparseBitMatrix::index_type>> rows(size);
    for (int a = 0; a < l; ++a) {
        for (int b = 0; b < m; ++b) {
            auto& row = rows[static_cast<std::size_t>(a * m + b)];
            for (const auto& t : terms) {
                row.push_back(static_cast<SparseBitMatrix::index_type>(((a + t.x_power) % l) * m + (b + t.y_power) % m));
            }
        }
    }
    return SparseBitMatrix::from_xor_rows(size, size, std::move(rows));
}

/// hx = [A | B], hz = [Bᵀ | Aᵀ].
inline CssCode bivariate_bicycle(int l, int m, const std::vector<Monomial>& a_terms, const std::vector<Monomial>& b_terms) {
    const auto a = bivariate_polynomial(l, m, a_terms);
    const auto b = bivariate_polynomial(l, m, b_terms);
    return make_css_code(hstack(a, b), hstack(b.transpose(), a.transpose()));
}

}  // namespace qdiv
