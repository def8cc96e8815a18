#pragma once

// Small dense GF(2) oracles and random instance helpers shared by the unit tests.

#include <cstdint>
#include <random>
#include <vector>

#include "qdiv/gf2.hpp"

namespace qdiv::test {

using Dense = std::vector<std::vector<std::uint8_t>>;

inline Dense random_dense(std::size_t rows, std::size_t cols, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution bit(density);
    Dense d(rows, std::vector<std::uint8_t>(cols, 0));
    for (auto& row : d) {
        for (auto& x : row) x = bit(rng) ? 1 : 0;
    }
    return d;
}

inline SparseBitMatrix to_sparse(const Dense& d, std::size_t cols) {
    std::vector<std::vector<SparseBitMatrix::index_type>> support(d.size());
    for (std::size_t r = 0; r < d.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (d[r][c]) support[r].push_back(static_cast<SparseBitMatrix::index_type>(c));
        }
    }
    return {d.size(), cols, std::move(support)};
}

inline std::vector<std::uint8_t> random_bits(std::size_t n, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution bit(density);
    std::vector<std::uint8_t> v(n);
    for (auto& x : v) x = bit(rng) ? 1 : 0;
    return v;
}

inline BitVector to_bitvector(const std::vector<std::uint8_t>& bits) { return BitVector::from_bits(bits); }

inline std::vector<std::uint8_t> dense_mul(const Dense& d, const std::vector<std::uint8_t>& v) {
    std::vector<std::uint8_t> out(d.size(), 0);
    for (std::size_t r = 0; r < d.size(); ++r) {
        std::uint8_t acc = 0;
        for (std::size_t c = 0; c < v.size(); ++c) acc ^= static_cast<std::uint8_t>(d[r][c] & v[c]);
        out[r] = acc;
    }
    return out;
}

/// Textbook Gaussian elimination on a copy.
inline std::size_t dense_rank(Dense d, std::size_t cols) {
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < d.size(); ++c) {
        std::size_t pivot = rank;
        while (pivot < d.size() && !d[pivot][c]) ++pivot;
        if (pivot == d.size()) continue;
        std::swap(d[rank], d[pivot]);
        for (std::size_t r = 0; r < d.size(); ++r) {
            if (r != rank && d[r][c]) {
                for (std::size_t k = 0; k < cols; ++k) d[r][k] ^= d[rank][k];
            }
        }
        ++rank;
    }
    return rank;
}

inline std::vector<std::uint8_t> bits_of(const BitVector& v) {
    std::vector<std::uint8_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v.get(i) ? 1 : 0;
    return out;
}

inline BitVector bitvector_from_index(std::size_t n, std::uint64_t mask) {
    BitVector v(n);
    for (std::size_t i = 0; i < n; ++i) {
        if ((mask >> i) & 1U) v.set(i);
    }
    return v;
}

}  // namespace qdiv::test
