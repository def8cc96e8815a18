#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "qdiv/bp.hpp"
#include "qdiv/osd.hpp"
#include "test_support.hpp"

using namespace qdiv;

namespace {

double soft_weight(const BitVector& x, const std::vector<double>& w) {
    double s = 0.0;
    for (auto j : x.support()) s += w[j];
    return s;
}

// Minimum soft weight over the whole coset {x : Hx = s}.
BitVector exhaustive_coset_minimum(const SparseBitMatrix& h, const BitVector& s, const std::vector<double>& w) {
    BitVector best(h.cols());
    double best_w = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << h.cols()); ++mask) {
        const auto x = test::bitvector_from_index(h.cols(), mask);
        if (!(mat_vec_mul(h, x) == s)) continue;
        const double sw = soft_weight(x, w);
        if (sw < best_w) {
            best_w = sw;
            best = x;
        }
    }
    return best;
}

struct Instance {
    SparseBitMatrix h;
    BitVector s;
    std::vector<double> priors;
    std::vector<double> posterior;
};

Instance random_instance(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::uniform_real_distribution<double> pdist(0.02, 0.3);
    Instance in;
    in.h = test::to_sparse(test::random_dense(rows, cols, 0.3, rng), cols);
    std::vector<double> p(cols);
    for (auto& x : p) x = pdist(rng);
    const auto e = test::to_bitvector(test::random_bits(cols, 0.2, rng));
    in.s = mat_vec_mul(in.h, e);
    const auto pr = init_priors(p);
    in.priors = pr.llrs;
    in.posterior = decode(in.h, in.s, pr, {UpdateRule::min_sum, 0.75, Arithmetic::float64(), 5, false}).posterior_llrs;
    return in;
}

}  // namespace

TEST(OsdColumnOrder, KeysAndTies) {
    const std::vector<double> post{0.5, -2.0, 0.5, -0.1, 3.0};
    EXPECT_EQ(osd_column_order(post, OsdOrdering::reliability), (std::vector<std::size_t>{3, 0, 2, 1, 4}));
    EXPECT_EQ(osd_column_order(post, OsdOrdering::error_likelihood), (std::vector<std::size_t>{1, 3, 0, 2, 4}));
}

TEST(OsdDecode, ZeroSyndromeGivesZero) {
    std::mt19937_64 rng(1);
    const auto in = random_instance(rng, 6, 12);
    for (auto method : {OsdMethod::osd0, OsdMethod::combination_sweep}) {
        OsdConfig cfg;
        cfg.method = method;
        EXPECT_TRUE(osd_decode(in.h, BitVector(6), in.posterior, in.priors, cfg).none());
    }
}

TEST(OsdDecode, IdentityReturnsSyndrome) {
    const auto h = identity_matrix(5);
    const BitVector s{1, 0, 1, 1, 0};
    const std::vector<double> w(5, 1.0);
    for (auto method : {OsdMethod::osd0, OsdMethod::combination_sweep}) {
        OsdConfig cfg;
        cfg.method = method;
        EXPECT_EQ(osd_decode(h, s, w, w, cfg), s);
    }
}

TEST(OsdDecode, AlwaysSatisfiesSyndrome) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto in = random_instance(rng, 10, 16);
        for (auto ordering : {OsdOrdering::error_likelihood, OsdOrdering::reliability}) {
            for (auto method : {OsdMethod::osd0, OsdMethod::combination_sweep}) {
                OsdConfig cfg;
                cfg.method = method;
                cfg.ordering = ordering;
                cfg.lambda = 2;
                EXPECT_EQ(mat_vec_mul(in.h, osd_decode(in.h, in.s, in.posterior, in.priors, cfg)), in.s);
            }
        }
    }
}

TEST(OsdDecode, SweepNeverWorseThanOsd0) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto in = random_instance(rng, 10, 16);
        OsdConfig zero;
        zero.method = OsdMethod::osd0;
        OsdConfig cs;
        cs.lambda = 3;
        const auto a = osd_decode(in.h, in.s, in.posterior, in.priors, zero);
        const auto b = osd_decode(in.h, in.s, in.posterior, in.priors, cs);
        EXPECT_LE(soft_weight(b, in.priors), soft_weight(a, in.priors) + 1e-12);
    }
}

TEST(OsdDecode, FullOrderSweepEqualsExhaustiveCosetSearch) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t cols = 8 + rng() % 9;
        const std::size_t rows = 4 + rng() % (cols - 5);
        const auto in = random_instance(rng, rows, cols);
        OsdConfig cfg;
        cfg.lambda = static_cast<int>(cols);
        cfg.max_weight = cols;
        for (auto ordering : {OsdOrdering::error_likelihood, OsdOrdering::reliability}) {
            cfg.ordering = ordering;
            const auto got = osd_decode(in.h, in.s, in.posterior, in.priors, cfg);
            const auto want = exhaustive_coset_minimum(in.h, in.s, in.priors);
            EXPECT_NEAR(soft_weight(got, in.priors), soft_weight(want, in.priors), 1e-12);
            EXPECT_EQ(got, want);
        }
    }
}

TEST(OsdDecode, Osd0IsDeterministicInOrdering) {
    std::mt19937_64 rng(5);
    const auto in = random_instance(rng, 10, 16);
    OsdConfig cfg;
    cfg.method = OsdMethod::osd0;
    auto scaled = in.posterior;
    for (auto& x : scaled) x *= 3.0;
    EXPECT_EQ(osd_decode(in.h, in.s, in.posterior, in.priors, cfg), osd_decode(in.h, in.s, scaled, in.priors, cfg));
}

TEST(OsdDecode, Errors) {
    const auto h = SparseBitMatrix::from_dense({{1, 1}, {1, 1}});
    const std::vector<double> w(2, 1.0);
    EXPECT_THROW(osd_decode(h, BitVector{1, 0}, w, w, OsdConfig{}), std::domain_error);
    EXPECT_THROW(osd_decode(h, BitVector(3), w, w, OsdConfig{}), std::invalid_argument);
    EXPECT_THROW(osd_decode(h, BitVector(2), std::vector<double>(3), w, OsdConfig{}), std::invalid_argument);
    OsdConfig bad;
    bad.lambda = 0;
    EXPECT_THROW(osd_decode(h, BitVector(2), w, w, bad), std::invalid_argument);
}

TEST(OsdConfig, Label) {
    EXPECT_EQ(OsdConfig{}.label(), "osd-cs(1,60)");
    OsdConfig z;
    z.method = OsdMethod::osd0;
    EXPECT_EQ(z.label(), "osd0");
}
