#pragma once

// Sparse and packed linear algebra over GF(2).

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qdiv {

/// Fixed-length bit vector stored in 64-bit words.
class BitVector {
public:
    using word_type = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    BitVector() = default;
    explicit BitVector(std::size_t length) : length_(length), words_((length + kWordBits - 1) / kWordBits, 0) {}

    BitVector(std::initializer_list<int> bits) : BitVector(bits.size()) {
        std::size_t i = 0;
        for (int b : bits) {
            if (b != 0) set(i);
            ++i;
        }
    }

    static BitVector from_bits(std::span<const std::uint8_t> bits) {
        BitVector v(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] != 0) v.set_unchecked(i);
        }
        return v;
    }

    [[nodiscard]] std::size_t size() const noexcept { return length_; }
    [[nodiscard]] std::span<const word_type> words() const noexcept { return words_; }

    [[nodiscard]] bool get(std::size_t i) const {
        check(i);
        return test(i);
    }
    [[nodiscard]] bool operator[](std::size_t i) const { return get(i); }

    void set(std::size_t i, bool value = true) {
        check(i);
        if (value) {
            set_unchecked(i);
        } else {
            words_[i / kWordBits] &= ~(word_type{1} << (i % kWordBits));
        }
    }

    void flip(std::size_t i) {
        check(i);
        words_[i / kWordBits] ^= word_type{1} << (i % kWordBits);
    }

    // Hot-path accessors; callers guarantee i < size().
    [[nodiscard]] bool test(std::size_t i) const noexcept { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
    void set_unchecked(std::size_t i) noexcept { words_[i / kWordBits] |= word_type{1} << (i % kWordBits); }

    void clear() noexcept { std::fill(words_.begin(), words_.end(), 0); }

    [[nodiscard]] bool any() const noexcept {
        return std::any_of(words_.begin(), words_.end(), [](word_type w) { return w != 0; });
    }
    [[nodiscard]] bool none() const noexcept { return !any(); }

    [[nodiscard]] std::size_t count() const noexcept {
        std::size_t c = 0;
        for (word_type w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    [[nodiscard]] std::vector<std::size_t> support() const {
        std::vector<std::size_t> out;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            word_type word = words_[w];
            while (word != 0) {
                out.push_back(w * kWordBits + static_cast<std::size_t>(std::countr_zero(word)));
                word &= word - 1;
            }
        }
        return out;
    }

    /// Parity of the bitwise AND with another vector of the same length.
    [[nodiscard]] bool dot(const BitVector& other) const {
        require_same_length(other);
        word_type acc = 0;
        for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & other.words_[w];
        return (std::popcount(acc) & 1) != 0;
    }

    BitVector& operator^=(const BitVector& other) {
        require_same_length(other);
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
        return *this;
    }

    friend BitVector operator^(BitVector a, const BitVector& b) {
        a ^= b;
        return a;
    }

    friend bool operator==(const BitVector&, const BitVector&) = default;

    /// Hex encoding: character c holds bits 4c..4c+3, bit 4c in the lowest nibble position.
    [[nodiscard]] std::string to_hex() const {
        static constexpr char kDigits[] = "0123456789abcdef";
        std::string out((length_ + 3) / 4, '0');
        for (std::size_t c = 0; c < out.size(); ++c) {
            unsigned nibble = 0;
            for (unsigned b = 0; b < 4; ++b) {
                const std::size_t i = 4 * c + b;
                if (i < length_ && test(i)) nibble |= 1U << b;
            }
            out[c] = kDigits[nibble];
        }
        return out;
    }

    static BitVector from_hex(std::size_t length, std::string_view hex) {
        if (hex.size() != (length + 3) / 4) {
            throw std::invalid_argument("hex string has " + std::to_string(hex.size()) + " digits, expected " +
                                        std::to_string((length + 3) / 4) + " for length " + std::to_string(length));
        }
        BitVector v(length);
        for (std::size_t c = 0; c < hex.size(); ++c) {
            const char ch = hex[c];
            unsigned nibble = 0;
            if (ch >= '0' && ch <= '9') {
                nibble = static_cast<unsigned>(ch - '0');
            } else if (ch >= 'a' && ch <= 'f') {
                nibble = static_cast<unsigned>(ch - 'a' + 10);
            } else if (ch >= 'A' && ch <= 'F') {
                nibble = static_cast<unsigned>(ch - 'A' + 10);
            } else {
                throw std::invalid_argument(std::string("invalid hex digit '") + ch + "'");
            }
            for (unsigned b = 0; b < 4; ++b) {
                if ((nibble >> b) & 1U) {
                    const std::size_t i = 4 * c + b;
                    if (i >= length) throw std::invalid_argument("hex string sets bits beyond vector length");
                    v.set_unchecked(i);
                }
            }
        }
        return v;
    }

    [[nodiscard]] std::string to_string() const {
        std::string s(length_, '0');
        for (std::size_t i = 0; i < length_; ++i) {
            if (test(i)) s[i] = '1';
        }
        return s;
    }

private:
    void check(std::size_t i) const {
        if (i >= length_) {
            throw std::out_of_range("bit index " + std::to_string(i) + " out of range for length " + std::to_string(length_));
        }
    }
    void require_same_length(const BitVector& other) const {
        if (other.length_ != length_) {
            throw std::invalid_argument("bit vector length mismatch: " + std::to_string(length_) + " vs " +
                                        std::to_string(other.length_));
        }
    }

    std::size_t length_{0};
    std::vector<word_type> words_;
};

/// Immutable sparse GF(2) matrix with row-major sorted supports and a column view built at construction.
class SparseBitMatrix {
public:
    using index_type = std::uint32_t;

    SparseBitMatrix() = default;
    SparseBitMatrix(std::size_t rows, std::size_t cols) : SparseBitMatrix(rows, cols, std::vector<std::vector<index_type>>(rows)) {}

    SparseBitMatrix(std::size_t rows, std::size_t cols, std::vector<std::vector<index_type>> row_support)
        : rows_(rows), cols_(cols) {
        if (row_support.size() != rows) {
            throw std::invalid_argument("row count " + std::to_string(row_support.size()) + " does not match declared " +
                                        std::to_string(rows));
        }
        row_offsets_.assign(1, 0);
        row_offsets_.reserve(rows + 1);
        for (std::size_t r = 0; r < rows; ++r) {
            auto& row = row_support[r];
            std::sort(row.begin(), row.end());
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (row[i] >= cols) {
                    throw std::invalid_argument("row " + std::to_string(r) + " has column index " + std::to_string(row[i]) +
                                                " >= cols " + std::to_string(cols));
                }
                if (i > 0 && row[i] == row[i - 1]) {
                    throw std::invalid_argument("row " + std::to_string(r) + " repeats column index " + std::to_string(row[i]));
                }
            }
            col_indices_.insert(col_indices_.end(), row.begin(), row.end());
            row_offsets_.push_back(col_indices_.size());
        }
        build_columns();
    }

    /// Builds from a dense 0/1 table; every row must have the same length.
    static SparseBitMatrix from_dense(const std::vector<std::vector<int>>& dense) {
        const std::size_t rows = dense.size();
        const std::size_t cols = rows == 0 ? 0 : dense.front().size();
        std::vector<std::vector<index_type>> support(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            if (dense[r].size() != cols) throw std::invalid_argument("ragged dense matrix");
            for (std::size_t c = 0; c < cols; ++c) {
                if (dense[r][c] != 0) support[r].push_back(static_cast<index_type>(c));
            }
        }
        return {rows, cols, std::move(support)};
    }

    /// Builds from row supports where repeated indices cancel in pairs.
    static SparseBitMatrix from_xor_rows(std::size_t rows, std::size_t cols, std::vector<std::vector<index_type>> row_support) {
        for (auto& row : row_support) {
            std::sort(row.begin(), row.end());
            std::vector<index_type> reduced;
            for (std::size_t i = 0; i < row.size();) {
                std::size_t j = i;
                while (j < row.size() && row[j] == row[i]) ++j;
                if ((j - i) % 2 == 1) reduced.push_back(row[i]);
                i = j;
            }
            row = std::move(reduced);
        }
        return {rows, cols, std::move(row_support)};
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t nnz() const noexcept { return col_indices_.size(); }

    [[nodiscard]] std::span<const index_type> row(std::size_t r) const {
        return {col_indices_.data() + row_offsets_.at(r), col_indices_.data() + row_offsets_.at(r + 1)};
    }
    [[nodiscard]] std::span<const index_type> col(std::size_t c) const {
        return {row_indices_.data() + col_offsets_.at(c), row_indices_.data() + col_offsets_.at(c + 1)};
    }

    [[nodiscard]] bool get(std::size_t r, std::size_t c) const {
        const auto rw = row(r);
        return std::binary_search(rw.begin(), rw.end(), static_cast<index_type>(c));
    }

    [[nodiscard]] std::vector<std::vector<index_type>> row_supports() const {
        std::vector<std::vector<index_type>> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            const auto rw = row(r);
            out[r].assign(rw.begin(), rw.end());
        }
        return out;
    }

    [[nodiscard]] BitVector row_vector(std::size_t r) const {
        BitVector v(cols_);
        for (index_type c : row(r)) v.set_unchecked(c);
        return v;
    }

    [[nodiscard]] SparseBitMatrix transpose() const {
        std::vector<std::vector<index_type>> support(cols_);
        for (std::size_t c = 0; c < cols_; ++c) {
            const auto cl = col(c);
            support[c].assign(cl.begin(), cl.end());
        }
        return {cols_, rows_, std::move(support)};
    }

    friend bool operator==(const SparseBitMatrix& a, const SparseBitMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.row_offsets_ == b.row_offsets_ && a.col_indices_ == b.col_indices_;
    }

private:
    void build_columns() {
        col_offsets_.assign(cols_ + 1, 0);
        for (index_type c : col_indices_) ++col_offsets_[c + 1];
        std::partial_sum(col_offsets_.begin(), col_offsets_.end(), col_offsets_.begin());
        row_indices_.resize(col_indices_.size());
        std::vector<std::size_t> fill(col_offsets_.begin(), col_offsets_.end() - 1);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
                row_indices_[fill[col_indices_[k]]++] = static_cast<index_type>(r);
            }
        }
    }

    std::size_t rows_{0};
    std::size_t cols_{0};
    std::vector<std::size_t> row_offsets_{0};
    std::vector<index_type> col_indices_;
    std::vector<std::size_t> col_offsets_{0};
    std::vector<index_type> row_indices_;
};

/// [A | B] for matrices with equal row counts.
inline SparseBitMatrix hstack(const SparseBitMatrix& a, const SparseBitMatrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("hstack: row count mismatch");
    auto support = a.row_supports();
    const auto offset = static_cast<SparseBitMatrix::index_type>(a.cols());
    for (std::size_t r = 0; r < b.rows(); ++r) {
        for (auto c : b.row(r)) support[r].push_back(c + offset);
    }
    return {a.rows(), a.cols() + b.cols(), std::move(support)};
}

/// Kronecker product A ⊗ B.
inline SparseBitMatrix kron(const SparseBitMatrix& a, const SparseBitMatrix& b) {
    std::vector<std::vector<SparseBitMatrix::index_type>> support(a.rows() * b.rows());
    for (std::size_t ra = 0; ra < a.rows(); ++ra) {
        for (std::size_t rb = 0; rb < b.rows(); ++rb) {
            auto& row = support[ra * b.rows() + rb];
            for (auto ca : a.row(ra)) {
                for (auto cb : b.row(rb)) row.push_back(static_cast<SparseBitMatrix::index_type>(ca * b.cols() + cb));
            }
        }
    }
    return {a.rows() * b.rows(), a.cols() * b.cols(), std::move(support)};
}

inline SparseBitMatrix identity_matrix(std::size_t n) {
    std::vector<std::vector<SparseBitMatrix::index_type>> support(n);
    for (std::size_t i = 0; i < n; ++i) support[i] = {static_cast<SparseBitMatrix::index_type>(i)};
    return {n, n, std::move(support)};
}

inline BitVector mat_vec_mul(const SparseBitMatrix& m, const BitVector& v) {
    if (v.size() != m.cols()) {
        throw std::invalid_argument("mat_vec_mul: vector length " + std::to_string(v.size()) + " != matrix cols " +
                                    std::to_string(m.cols()));
    }
    BitVector out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        bool parity = false;
        for (auto c : m.row(r)) parity ^= v.test(c);
        if (parity) out.set_unchecked(r);
    }
    return out;
}

/// True when A·Bᵀ = 0 over GF(2).
inline bool rows_orthogonal(const SparseBitMatrix& a, const SparseBitMatrix& b) {
    if (a.cols() != b.cols()) return false;
    for (std::size_t r = 0; r < b.rows(); ++r) {
        if (mat_vec_mul(a, b.row_vector(r)).any()) return false;
    }
    return true;
}

/// Dense row-major GF(2) matrix, used as elimination workspace.
class DenseBitMatrix {
public:
    DenseBitMatrix() = default;
    DenseBitMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), stride_((cols + 63) / 64), data_(rows * stride_, 0) {}

    explicit DenseBitMatrix(const SparseBitMatrix& m) : DenseBitMatrix(m.rows(), m.cols()) {
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (auto c : m.row(r)) set(r, c);
        }
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    [[nodiscard]] bool get(std::size_t r, std::size_t c) const noexcept { return (data_[r * stride_ + c / 64] >> (c % 64)) & 1U; }
    void set(std::size_t r, std::size_t c) noexcept { data_[r * stride_ + c / 64] |= std::uint64_t{1} << (c % 64); }

    void swap_rows(std::size_t a, std::size_t b) noexcept {
        if (a == b) return;
        std::swap_ranges(data_.begin() + static_cast<std::ptrdiff_t>(a * stride_),
                         data_.begin() + static_cast<std::ptrdiff_t>((a + 1) * stride_),
                         data_.begin() + static_cast<std::ptrdiff_t>(b * stride_));
    }
    void add_row(std::size_t target, std::size_t source) noexcept {
        std::uint64_t* t = data_.data() + target * stride_;
        const std::uint64_t* s = data_.data() + source * stride_;
        for (std::size_t w = 0; w < stride_; ++w) t[w] ^= s[w];
    }

private:
    std::size_t rows_{0};
    std::size_t cols_{0};
    std::size_t stride_{0};
    std::vector<std::uint64_t> data_;
};

struct RowOp {
    enum class Kind : std::uint8_t { swap, add };
    Kind kind;
    std::uint32_t target;
    std::uint32_t source;
};

/// Result of Gauss-Jordan elimination. Pivot i sits at row i of `reduced`.
struct RowReduction {
    std::size_t rank{0};
    std::vector<std::size_t> pivot_cols;
    std::vector<RowOp> row_ops;
    DenseBitMatrix reduced;

    [[nodiscard]] std::size_t rows() const noexcept { return reduced.rows(); }
    [[nodiscard]] std::size_t cols() const noexcept { return reduced.cols(); }
};

/// Eliminates columns in `col_order` priority, recording every row operation.
inline RowReduction row_reduce(const SparseBitMatrix& m, std::span<const std::size_t> col_order) {
    if (col_order.size() != m.cols()) throw std::invalid_argument("row_reduce: column order must list every column");
    {
        std::vector<bool> seen(m.cols(), false);
        for (auto c : col_order) {
            if (c >= m.cols() || seen[c]) throw std::invalid_argument("row_reduce: column order is not a permutation");
            seen[c] = true;
        }
    }
    RowReduction rr;
    rr.reduced = DenseBitMatrix(m);
    auto& d = rr.reduced;
    const std::size_t rows = m.rows();
    for (auto c : col_order) {
        if (rr.rank == rows) break;
        std::size_t pivot = rr.rank;
        while (pivot < rows && !d.get(pivot, c)) ++pivot;
        if (pivot == rows) continue;
        if (pivot != rr.rank) {
            d.swap_rows(pivot, rr.rank);
            rr.row_ops.push_back({RowOp::Kind::swap, static_cast<std::uint32_t>(rr.rank), static_cast<std::uint32_t>(pivot)});
        }
        for (std::size_t r = 0; r < rows; ++r) {
            if (r != rr.rank && d.get(r, c)) {
                d.add_row(r, rr.rank);
                rr.row_ops.push_back({RowOp::Kind::add, static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(rr.rank)});
            }
        }
        rr.pivot_cols.push_back(c);
        ++rr.rank;
    }
    return rr;
}

inline RowReduction row_reduce(const SparseBitMatrix& m) {
    std::vector<std::size_t> order(m.cols());
    std::iota(order.begin(), order.end(), std::size_t{0});
    return row_reduce(m, order);
}

inline std::size_t rank(const SparseBitMatrix& m) { return row_reduce(m).rank; }

/// Applies recorded row operations to a right-hand side in place.
inline void apply_row_ops(std::span<const RowOp> ops, BitVector& s) {
    for (const auto& op : ops) {
        if (op.kind == RowOp::Kind::swap) {
            const bool a = s.test(op.target);
            const bool b = s.test(op.source);
            if (a != b) {
                s.flip(op.target);
                s.flip(op.source);
            }
        } else if (s.test(op.source)) {
            s.flip(op.target);
        }
    }
}

/// Solution of M·x = s supported on the pivot columns; throws when s lies outside the column space.
inline BitVector solve_with_pivots(const RowReduction& rr, const BitVector& s) {
    if (s.size() != rr.rows()) {
        throw std::invalid_argument("solve_with_pivots: right-hand side has length " + std::to_string(s.size()) + ", expected " +
                                    std::to_string(rr.rows()));
    }
    BitVector t = s;
    apply_row_ops(rr.row_ops, t);
    for (std::size_t r = rr.rank; r < rr.rows(); ++r) {
        if (t.test(r)) throw std::domain_error("solve_with_pivots: inconsistent system");
    }
    BitVector x(rr.cols());
    for (std::size_t i = 0; i < rr.rank; ++i) {
        if (t.test(i)) x.set_unchecked(rr.pivot_cols[i]);
    }
    return x;
}

inline std::vector<BitVector> kernel_basis(const SparseBitMatrix& m) {
    const RowReduction rr = row_reduce(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : rr.pivot_cols) is_pivot[c] = true;
    std::vector<BitVector> basis;
    basis.reserve(m.cols() - rr.rank);
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        BitVector v(m.cols());
        v.set_unchecked(f);
        for (std::size_t i = 0; i < rr.rank; ++i) {
            if (rr.reduced.get(i, f)) v.set_unchecked(rr.pivot_cols[i]);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

inline SparseBitMatrix matrix_from_rows(std::size_t cols, const std::vector<BitVector>& rows) {
    std::vector<std::vector<SparseBitMatrix::index_type>> support(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw std::invalid_argument("matrix_from_rows: row length mismatch");
        for (auto c : rows[r].support()) support[r].push_back(static_cast<SparseBitMatrix::index_type>(c));
    }
    return {rows.size(), cols, std::move(support)};
}

/// Incremental echelon basis used for span-membership tests.
class Gf2Span {
public:
    explicit Gf2Span(std::size_t length) : length_(length) {}

    /// Reduces v against the basis; returns true (and inserts) when v is independent.
    bool insert(BitVector v) {
        reduce(v);
        if (v.none()) return false;
        const auto lead = v.support().front();
        for (auto& b : basis_) {
            if (b.vec.test(lead)) b.vec ^= v;
        }
        basis_.push_back({lead, std::move(v)});
        return true;
    }

    [[nodiscard]] bool contains(BitVector v) const {
        reduce(v);
        return v.none();
    }

    [[nodiscard]] std::size_t dimension() const noexcept { return basis_.size(); }
    [[nodiscard]] std::size_t length() const noexcept { return length_; }

private:
    struct Entry {
        std::size_t lead;
        BitVector vec;
    };
    void reduce(BitVector& v) const {
        if (v.size() != length_) throw std::invalid_argument("Gf2Span: length mismatch");
        for (const auto& b : basis_) {
            if (v.test(b.lead)) v ^= b.vec;
        }
    }

    std::size_t length_;
    std::vector<Entry> basis_;
};

// Matrix text format: "rows cols" on the first line, then one line per row listing column indices.

inline SparseBitMatrix read_matrix(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("matrix text: missing 'rows cols' header");
    std::istringstream header(line);
    long long rows = -1;
    long long cols = -1;
    if (!(header >> rows >> cols) || rows < 0 || cols < 0) {
        throw std::runtime_error("matrix text: malformed header '" + line + "'");
    }
    std::vector<std::vector<SparseBitMatrix::index_type>> support(static_cast<std::size_t>(rows));
    for (long long r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) {
            throw std::runtime_error("matrix text: expected " + std::to_string(rows) + " rows, found " + std::to_string(r));
        }
        std::istringstream ls(line);
        long long c = 0;
        while (ls >> c) {
            if (c < 0 || c >= cols) throw std::runtime_error("matrix text: row " + std::to_string(r) + " index out of range");
            support[static_cast<std::size_t>(r)].push_back(static_cast<SparseBitMatrix::index_type>(c));
        }
        if (!ls.eof()) throw std::runtime_error("matrix text: row " + std::to_string(r) + " contains a non-integer token");
    }
    return {static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), std::move(support)};
}

inline SparseBitMatrix parse_matrix(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_matrix(in);
}

inline void write_matrix(std::ostream& out, const SparseBitMatrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        bool first = true;
        for (auto c : m.row(r)) {
            if (!first) out << ' ';
            out << c;
            first = false;
        }
        out << '\n';
    }
}

inline std::string format_matrix(const SparseBitMatrix& m) {
    std::ostringstream out;
    write_matrix(out, m);
    return out.str();
}

}  // namespace qdiv
