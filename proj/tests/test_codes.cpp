#include <random>

#include <gtest/gtest.h>

#include "qdiv/codes.hpp"
#include "qdiv/fixtures.hpp"
#include "test_support.hpp"

using namespace qdiv;

namespace {

SparseBitMatrix rep3() { return SparseBitMatrix::from_dense({{1, 1, 0}, {0, 1, 1}}); }

SparseBitMatrix swap_halves(const SparseBitMatrix& m) {
    const std::size_t half = m.cols() / 2;
    auto rows = m.row_supports();
    for (auto& row : rows) {
        for (auto& c : row) c = static_cast<SparseBitMatrix::index_type>(c < half ? c + half : c - half);
    }
    return {m.rows(), m.cols(), std::move(rows)};
}

std::size_t independent_rows(const SparseBitMatrix& m) { return rank(m); }

}  // namespace

TEST(HypergraphProduct, SmallestProduct) {
    const auto c = hypergraph_product(ClassicalCode(SparseBitMatrix::from_dense({{1, 1}})), ClassicalCode(SparseBitMatrix::from_dense({{1, 1}})));
    EXPECT_EQ(c.n, 5u);
    EXPECT_TRUE(rows_orthogonal(c.hx, c.hz));
    EXPECT_TRUE(validate_css(c).ok());
}

TEST(HypergraphProduct, RepetitionPatch) {
    const auto c = hypergraph_product(ClassicalCode(rep3()), ClassicalCode(rep3()));
    EXPECT_EQ(c.n, 13u);
    EXPECT_EQ(c.k, c.n - rank(c.hx) - rank(c.hz));
    EXPECT_EQ(c.k, 1u);
    EXPECT_TRUE(validate_css(c).ok());
}

TEST(HypergraphProduct, RandomSeedsValidate) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t m1 = 2 + rng() % 4;
        const std::size_t n1 = m1 + 1 + rng() % 4;
        const std::size_t m2 = 2 + rng() % 4;
        const std::size_t n2 = m2 + 1 + rng() % 4;
        auto d1 = test::random_dense(m1, n1, 0.4, rng);
        auto d2 = test::random_dense(m2, n2, 0.4, rng);
        d1[0][0] = 1;
        d2[0][0] = 1;
        const auto c = hypergraph_product(ClassicalCode(test::to_sparse(d1, n1)), ClassicalCode(test::to_sparse(d2, n2)));
        EXPECT_EQ(c.n, n1 * n2 + m1 * m2);
        const auto rep = validate_css(c);
        EXPECT_TRUE(rep.ok()) << ::testing::PrintToString(rep.failures());
    }
}

TEST(BivariateBicycle, DegenerateSingleBlock) {
    const auto c = bivariate_bicycle(1, 1, {{0, 0}}, {{0, 0}});
    EXPECT_EQ(c.n, 2u);
    EXPECT_EQ(c.hx.row_supports(), (std::vector<std::vector<std::uint32_t>>{{0, 1}}));
    EXPECT_EQ(c.hz.row_supports(), (std::vector<std::vector<std::uint32_t>>{{0, 1}}));
}

TEST(BivariateBicycle, ExponentOutOfRange) {
    EXPECT_THROW(bivariate_bicycle(3, 3, {{3, 0}}, {{0, 0}}), std::invalid_argument);
    EXPECT_THROW(bivariate_bicycle(3, 3, {}, {{0, 0}}), std::invalid_argument);
}

TEST(BivariateBicycle, SwappingPolynomialsSwapsHalves) {
    const std::vector<Monomial> a{{3, 0}, {0, 1}, {0, 2}};
    const std::vector<Monomial> b{{0, 3}, {1, 0}, {2, 0}};
    const auto ab = bivariate_bicycle(6, 6, a, b);
    const auto ba = bivariate_bicycle(6, 6, b, a);
    EXPECT_EQ(swap_halves(ba.hx).row_supports(), ab.hx.row_supports());
    EXPECT_EQ(swap_halves(ba.hz).row_supports(), ab.hz.row_supports());
}

TEST(BivariateBicycle, Presets) {
    const struct {
        const char* name;
        std::size_t n;
        std::size_t k;
    } presets[] = {{"bb_72_12_6", 72, 12}, {"bb_90_8_10", 90, 8}, {"bb_108_8_10", 108, 8}, {"bb_144_12_12", 144, 12}};
    for (const auto& p : presets) {
        const auto c = load_code(p.name);
        EXPECT_EQ(c.n, p.n) << p.name;
        EXPECT_EQ(c.k, p.k) << p.name;
        EXPECT_EQ(c.k, c.n - rank(c.hx) - rank(c.hz)) << p.name;
        EXPECT_TRUE(validate_css(c).ok()) << p.name;
        EXPECT_FALSE(c.provenance.empty());
    }
}

TEST(LogicalOperators, RepetitionCode) {
    const auto [lx, lz] = logical_operators(SparseBitMatrix(0, 3), rep3());
    ASSERT_EQ(lz.rows(), 1u);
    Gf2Span stabilizers(3);
    for (std::size_t r = 0; r < 2; ++r) stabilizers.insert(rep3().row_vector(r));
    EXPECT_TRUE(stabilizers.contains(lz.row_vector(0) ^ BitVector{1, 1, 1}));
    EXPECT_FALSE(stabilizers.contains(lz.row_vector(0)));
    EXPECT_EQ(lx.rows(), 1u);
}

TEST(LogicalOperators, Bb72IndependentAndCommuting) {
    const auto c = load_code("bb_72_12_6");
    ASSERT_EQ(c.lx.rows(), 12u);
    EXPECT_EQ(independent_rows(c.lx), 12u);
    EXPECT_EQ(independent_rows(c.lz), 12u);
    EXPECT_TRUE(rows_orthogonal(c.hz, c.lx));
    EXPECT_TRUE(rows_orthogonal(c.hx, c.lz));
    for (std::size_t r = 0; r < c.lx.rows(); ++r) EXPECT_FALSE(mat_vec_mul(c.hz, c.lx.row_vector(r)).any());
}

TEST(LogicalOperators, ZeroLogicals) {
    const auto [lx, lz] = logical_operators(SparseBitMatrix::from_dense({{1, 1}}), SparseBitMatrix::from_dense({{1, 1}}));
    EXPECT_EQ(lx.rows(), 0u);
    EXPECT_EQ(lz.rows(), 0u);
}

TEST(ValidateCss, FlippedBitFailsOrthogonality) {
    auto c = load_code("bb_72_12_6");
    auto rows = c.hx.row_supports();
    rows[0].push_back(rows[0].back() == 71 ? 0 : 71);
    rows[0].erase(std::unique(rows[0].begin(), rows[0].end()), rows[0].end());
    c.hx = SparseBitMatrix(c.hx.rows(), c.hx.cols(), rows);
    const auto rep = validate_css(c);
    EXPECT_FALSE(rep.stabilizers_commute);
    EXPECT_FALSE(rep.ok());
}

TEST(ValidateCss, MakeCssRejectsNonCommuting) {
    EXPECT_THROW(make_css_code(SparseBitMatrix::from_dense({{1, 0}}), SparseBitMatrix::from_dense({{1, 1}})), std::invalid_argument);
}

TEST(CodeFixtures, LargeFixturesMatchDeclaredDimensions) {
    const auto b1 = load_code("b1_882_24");
    EXPECT_EQ(b1.n, 882u);
    EXPECT_EQ(b1.k, 24u);
    EXPECT_EQ(b1.d_upper, 24);
    const auto hgp = load_code("hgp_rep3_13_1");
    EXPECT_EQ(hgp.n, 13u);
    EXPECT_EQ(hgp.k, 1u);
}

TEST(CodeFixtures, C2HypergraphProduct) {
    const auto c2 = load_code("c2_1922_50");
    EXPECT_EQ(c2.n, 1922u);
    EXPECT_EQ(c2.k, 50u);
}

TEST(CodeFixtures, ParseAndValidate) {
    const std::string text = "{\"name\": \"t\", \"n\": 13, \"k\": 1, \"construction\": \"hypergraph_product\"}\n[h1]\n2 3\n0 1\n1 2\n[h2]\n2 3\n0 1\n1 2\n";
    const auto c = build_code(parse_code_fixture(text));
    EXPECT_EQ(c.name, "t");
    EXPECT_EQ(c.n, 13u);
    const std::string wrong_k = "{\"n\": 13, \"k\": 2, \"construction\": \"hypergraph_product\"}\n[h1]\n2 3\n0 1\n1 2\n[h2]\n2 3\n0 1\n1 2\n";
    EXPECT_THROW(build_code(parse_code_fixture(wrong_k)), std::runtime_error);
    EXPECT_THROW(parse_code_fixture("not json\n"), std::runtime_error);
    EXPECT_THROW(build_code(parse_code_fixture("{\"construction\": \"explicit\"}\n")), std::runtime_error);
    EXPECT_THROW(load_code("no_such_code"), std::invalid_argument);
}

TEST(CodeFixtures, FormatRoundTrip) {
    const auto c = hypergraph_product(ClassicalCode(rep3()), ClassicalCode(rep3()));
    const auto text = format_code_fixture({{"name", "x"}, {"construction", "explicit"}}, {{"hx", c.hx}, {"hz", c.hz}});
    const auto back = build_code(parse_code_fixture(text));
    EXPECT_EQ(back.hx.row_supports(), c.hx.row_supports());
    EXPECT_EQ(back.k, 1u);
}
