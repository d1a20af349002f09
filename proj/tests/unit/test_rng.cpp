#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "subq/rng.hpp"
#include "subq/stats.hpp"

using namespace subq;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswers) {
    using B = Philox4x32::Block;
    using K = Philox4x32::Key;
    EXPECT_EQ(Philox4x32::generate(B{0, 0, 0, 0}, K{0, 0}),
              (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::generate(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                   K{0xffffffff, 0xffffffff}),
              (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::generate(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                   K{0xa4093822, 0x299f31d0}),
              (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamIsCounterAddressed) {
    Philox4x32 a(7, 3);
    const auto first = Philox4x32::generate({0, 0, 3, 0}, {7, 0});
    for (auto word : first) EXPECT_EQ(a(), word);
    const auto second = Philox4x32::generate({1, 0, 3, 0}, {7, 0});
    for (auto word : second) EXPECT_EQ(a(), word);
}

TEST(Philox, SameSeedSameDraws) {
    Philox4x32 a(42, 0), b(42, 0), c(42, 1), d(43, 0);
    int equal_c = 0, equal_d = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        equal_c += x == c();
        equal_d += x == d();
    }
    EXPECT_LT(equal_c, 3);
    EXPECT_LT(equal_d, 3);
}

TEST(Philox, UniformRanges) {
    Philox4x32 g(1, 2);
    for (int i = 0; i < 100000; ++i) {
        const double u = g.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        const double v = g.uniform_open0();
        EXPECT_GT(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(NormalStream, MomentsWithinThreeSigma) {
    NormalStream z(2024, 5);
    const int n = 200000;
    std::vector<double> x(n), x2(n), x4(n);
    for (int i = 0; i < n; ++i) {
        const double v = z();
        x[i] = v;
        x2[i] = v * v;
        x4[i] = v * v * v * v;
    }
    const auto m1 = mean_with_error(std::span<const double>(x));
    const auto m2 = mean_with_error(std::span<const double>(x2));
    const auto m4 = mean_with_error(std::span<const double>(x4));
    EXPECT_LE(std::abs(m1.value), 3.0 * m1.std_error);
    EXPECT_LE(std::abs(m2.value - 1.0), 3.0 * m2.std_error);
    EXPECT_LE(std::abs(m4.value - 3.0), 3.0 * m4.std_error);
}

TEST(DeriveSeed, DistinctTags) {
    EXPECT_NE(derive_seed(42, 1), derive_seed(42, 2));
    EXPECT_NE(derive_seed(42, 1), derive_seed(43, 1));
    EXPECT_EQ(derive_seed(42, 1), derive_seed(42, 1));
}

TEST(Stats, CompensatedSumRecoversSmallTerms) {
    CompensatedSum s;
    s.add(1e16);
    for (int i = 0; i < 1000; ++i) s.add(1.0);
    s.add(-1e16);
    EXPECT_EQ(s.value(), 1000.0);
}

TEST(Stats, MeanWithError) {
    const std::vector<double> v{1, 2, 3, 4};
    const auto e = mean_with_error(std::span<const double>(v));
    EXPECT_DOUBLE_EQ(e.value, 2.5);
    // sample variance 5/3, over n = 4
    EXPECT_NEAR(e.std_error, std::sqrt(5.0 / 12.0), 1e-15);
    EXPECT_EQ(e.n_samples, 4u);
}

TEST(Stats, OlsSlopeOfLine) {
    Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(11, 0.0, 1.0);
    Eigen::VectorXd y = (3.0 * t.array() - 2.0).matrix();
    EXPECT_NEAR(ols_slope(t, y), 3.0, 1e-13);
}
