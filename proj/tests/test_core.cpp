#include <psox/core.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace psox;

TEST(Clamp, ProjectsOntoBox)
{
    const auto b = Bounds::uniform(2, -30, 30);
    EXPECT_EQ(clamp_to_bounds({35, 0}, b), (RealVector{30, 0}));
    EXPECT_EQ(clamp_to_bounds({0, 0}, b), (RealVector{0, 0}));
    EXPECT_EQ(clamp_to_bounds({-31, 31}, b), (RealVector{-30, 30}));
}

TEST(Clamp, Idempotent)
{
    const auto b = Bounds::uniform(5, -1, 2);
    RngStream rng(3);
    for (int t = 0; t < 1000; ++t) {
        RealVector x(5);
        for (auto& g : x) g = rng.uniform(-10, 10);
        const auto once = clamp_to_bounds(x, b);
        EXPECT_EQ(clamp_to_bounds(once, b), once);
        EXPECT_TRUE(b.contains(once));
    }
}

TEST(Clamp, DimensionMismatchThrows)
{
    EXPECT_THROW(clamp_to_bounds({1, 2, 3}, Bounds::uniform(2, 0, 1)), StructuralError);
}

TEST(Bounds, RejectsEmptyInterval)
{
    EXPECT_THROW(Bounds::uniform(3, 1, 1), std::invalid_argument);
    EXPECT_THROW(Bounds({0, 0}, {1}), StructuralError);
}

TEST(Rng, UniformInUnitInterval)
{
    RngStream rng(11);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Rng, Replayable)
{
    RngStream a(99), b(99);
    for (int i = 0; i < 1000; ++i) {
        ASSERT_EQ(a.uniform(), b.uniform());
        ASSERT_EQ(a.normal(), b.normal());
        ASSERT_EQ(a.index(17), b.index(17));
    }
}

TEST(Rng, OpenIntervalExcludesZero)
{
    RngStream rng(5);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform_open();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(UniformVector, UnitBoundsContainment)
{
    const auto b = Bounds::uniform(8, 0, 1);
    RngStream rng(1);
    for (int i = 0; i < 1000; ++i) {
        const auto x = uniform_vector(b, rng);
        for (double g : x) {
            ASSERT_GE(g, 0.0);
            ASSERT_LT(g, 1.0);
        }
    }
}

TEST(UniformVector, SampleMeanNearCentre)
{
    // Analytic mean of U(-5.12, 5.12) is 0; std of the sample mean is 5.12/sqrt(3e5) ~ 0.009.
    const auto b = Bounds::uniform(3, -5.12, 5.12);
    RngStream rng(2024);
    std::vector<double> sum(3, 0.0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const auto x = uniform_vector(b, rng);
        for (int k = 0; k < 3; ++k) sum[k] += x[k];
    }
    for (double s : sum) EXPECT_NEAR(s / draws, 0.0, 0.05);
}

TEST(UniformVector, SameSeedSameVector)
{
    const auto b = Bounds::uniform(30, -600, 600);
    RngStream a(7), c(7);
    EXPECT_EQ(uniform_vector(b, a), uniform_vector(b, c));
}

TEST(Seeds, DerivationIsPureAndDistinct)
{
    EXPECT_EQ(derive_seed(100, 0), 100u);
    EXPECT_EQ(derive_seed(100, 5), 105u);
    EXPECT_NE(derive_seed(1, 1), derive_seed(1, 2));
}

TEST(Finite, DetectsNanAndInf)
{
    EXPECT_TRUE(all_finite(RealVector{0, 1, -2}));
    EXPECT_FALSE(all_finite(RealVector{0, std::nan("")}));
    EXPECT_FALSE(all_finite(RealVector{HUGE_VAL}));
}
