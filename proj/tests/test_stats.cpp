#include <psox/stats.hpp>

#include "oracles.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace psox;
using namespace psox::stats;

namespace {

std::vector<double> normals(std::size_t n, double mean, std::uint64_t seed)
{
    RngStream rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = mean + rng.normal();
    return v;
}

/// One-sided pooled two-sample t-test, H1: mean(t) > mean(c).
double pooled_t_p(const std::vector<double>& c, const std::vector<double>& t)
{
    const auto [mc, sc] = oracle::two_pass(c);
    const auto [mt, st] = oracle::two_pass(t);
    const double n0 = double(c.size()), n1 = double(t.size());
    const double sp2 = ((n0 - 1) * sc * sc + (n1 - 1) * st * st) / (n0 + n1 - 2);
    const double stat = (mt - mc) / std::sqrt(sp2 * (1 / n0 + 1 / n1));
    boost::math::students_t dist(n0 + n1 - 2);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

TEST(Summarize, SmallCases)
{
    const auto a = summarize(std::vector<double>{1, 1, 1});
    EXPECT_EQ(a.mean, 1.0);
    EXPECT_EQ(a.std, 0.0);
    const auto b = summarize(std::vector<double>{0, 2});
    EXPECT_EQ(b.mean, 1.0);
    EXPECT_NEAR(b.std, std::sqrt(2.0), 1e-15);
    EXPECT_EQ(summarize(std::vector<double>{4}).std, 0.0);
}

TEST(Summarize, MatchesTwoPassOracle)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto v = normals(30, 1e3, seed);
        const auto s = summarize(v);
        const auto [m, sd] = oracle::two_pass(v);
        EXPECT_NEAR(s.mean, m, 1e-12 * std::abs(m));
        EXPECT_NEAR(s.std, sd, 1e-12 * std::max(1.0, sd));
    }
}

TEST(Ranks, Midranks)
{
    EXPECT_EQ(rank_with_ties(std::vector<double>{10, 20, 30}), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(rank_with_ties(std::vector<double>{5, 5}), (std::vector<double>{1.5, 1.5}));
    EXPECT_EQ(rank_with_ties(std::vector<double>{3, 1, 3, 2}), (std::vector<double>{3.5, 1, 3.5, 2}));
}

TEST(Kruskal, SeparatedGroups)
{
    const std::vector<SampleGroup> g{{"a", {1, 2, 3}}, {"b", {4, 5, 6}}, {"c", {7, 8, 9}}};
    const auto r = kruskal_wallis(g, 0.05);
    EXPECT_NEAR(r.h, 7.2, 1e-9);
    EXPECT_NEAR(r.p, std::exp(-3.6), 1e-12);  // chi-square(2) upper tail is exp(-x/2)
    EXPECT_NEAR(r.p, 0.0273, 1e-4);
    EXPECT_EQ(flag_char(r.flag), '+');
}

TEST(Kruskal, PermutationOracle)
{
    // For three groups of three, H = 7.2 is the maximum and only the 3! group orderings reach it,
    // so the permutation p is 6/1680 while the chi-square tail gives 0.0273. Both are below 0.05.
    const std::vector<std::vector<double>> raw{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
    const double perm = oracle::kw_permutation_p(raw, 100000, 12345);
    EXPECT_NEAR(perm, 6.0 / 1680.0, 0.001);
    // A larger design where the chi-square approximation is accurate.
    std::vector<std::vector<double>> big{normals(12, 0, 1), normals(12, 0.6, 2), normals(12, 1.2, 3)};
    std::vector<SampleGroup> groups{{"a", big[0]}, {"b", big[1]}, {"c", big[2]}};
    const auto r = kruskal_wallis(groups, 0.05);
    EXPECT_NEAR(r.h, oracle::kw_statistic(big), 1e-9);
    EXPECT_NEAR(r.p, oracle::kw_permutation_p(big, 20000, 99), 0.02);
}

TEST(Kruskal, IdenticalGroups)
{
    const std::vector<SampleGroup> g{{"a", {5, 5, 5}}, {"b", {5, 5, 5}}, {"c", {5, 5, 5}}};
    const auto r = kruskal_wallis(g, 0.05);
    EXPECT_EQ(r.h, 0.0);
    EXPECT_EQ(r.p, 1.0);
    EXPECT_EQ(flag_char(r.flag), '~');
}

TEST(Kruskal, TieCorrection)
{
    // With ties the corrected H equals the uncorrected one divided by 1 - sum(t^3-t)/(N^3-N).
    const std::vector<SampleGroup> g{{"a", {1, 1, 2}}, {"b", {2, 3, 3}}};
    const auto r = kruskal_wallis(g, 0.05);
    const std::vector<double> ranks{1.5, 1.5, 3.5, 3.5, 5.5, 5.5};
    const double ra = 1.5 + 1.5 + 3.5, rb = 3.5 + 5.5 + 5.5;
    const double h_raw = 12.0 / 42.0 * (ra * ra / 3 + rb * rb / 3) - 21.0;
    EXPECT_NEAR(r.h, h_raw / (1.0 - 18.0 / 210.0), 1e-12);
}

TEST(Kruskal, NullCalibration)
{
    int quiet = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const std::vector<SampleGroup> g{{"a", normals(30, 0, 1000 + rep)}, {"b", normals(30, 0, 5000 + rep)}};
        if (kruskal_wallis(g, 0.05).flag == Flag::not_significant) ++quiet;
    }
    EXPECT_GE(quiet, 90);
}

TEST(Kruskal, InputErrors)
{
    const std::vector<SampleGroup> one{{"a", {1, 2}}};
    EXPECT_THROW(kruskal_wallis(one, 0.05), std::invalid_argument);
    const std::vector<SampleGroup> tiny{{"a", {1, 2}}, {"b", {3}}};
    EXPECT_THROW(kruskal_wallis(tiny, 0.05), std::invalid_argument);
}

TEST(Dunnett, IdenticalTreatmentIsNotSignificant)
{
    RngStream rng(1);
    const SampleGroup c{"c", normals(20, 0, 4)};
    const std::vector<SampleGroup> t{{"t", c.values}};
    const auto r = dunnett_one_sided(c, t, 0.05, 100000, rng);
    EXPECT_GE(r[0].p, 0.4);
    EXPECT_EQ(flag_char(r[0].flag), '~');
}

TEST(Dunnett, LargeShiftIsSignificant)
{
    RngStream rng(2);
    const SampleGroup c{"c", normals(30, 0, 5)};
    const std::vector<SampleGroup> t{{"t", normals(30, 2, 6)}};
    const auto r = dunnett_one_sided(c, t, 0.05, 100000, rng);
    EXPECT_LT(r[0].p, 0.001);
    EXPECT_EQ(flag_char(r[0].flag), '+');
}

TEST(Dunnett, SingleTreatmentMatchesAnalyticT)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const double shift = 0.05 * double(seed);
        const auto cv = normals(15, 0, 100 + seed), tv = normals(12, shift, 200 + seed);
        RngStream rng(300 + seed);
        const std::vector<SampleGroup> t{{"t", tv}};
        const auto r = dunnett_one_sided({"c", cv}, t, 0.05, 100000, rng);
        EXPECT_NEAR(r[0].p, pooled_t_p(cv, tv), 0.01) << seed;
    }
}

TEST(Dunnett, ZeroVarianceSignConvention)
{
    RngStream rng(3);
    const SampleGroup c{"c", {0, 0, 0, 0}};
    const std::vector<SampleGroup> t{{"up", {1, 1, 1, 1}}, {"down", {-1, -1, -1, -1}}};
    const auto r = dunnett_one_sided(c, t, 0.05, 1000, rng);
    EXPECT_EQ(r[0].p, 0.0);
    EXPECT_EQ(flag_char(r[0].flag), '+');
    EXPECT_EQ(r[1].p, 1.0);
    EXPECT_EQ(flag_char(r[1].flag), '~');
}

TEST(Dunnett, MultiplicityRaisesP)
{
    // Adding unrelated treatments can only make the adjusted p of a fixed comparison larger.
    const SampleGroup c{"c", normals(20, 0, 10)};
    const SampleGroup t1{"t1", normals(20, 0.7, 11)};
    RngStream a(7), b(7);
    const std::vector<SampleGroup> one{t1};
    const std::vector<SampleGroup> four{t1, {"x", normals(20, 0, 12)}, {"y", normals(20, 0, 13)}, {"z", normals(20, 0, 14)}};
    EXPECT_LT(dunnett_one_sided(c, one, 0.05, 50000, a)[0].p, dunnett_one_sided(c, four, 0.05, 50000, b)[0].p);
}

TEST(Report, IdenticalGroupsSkipDunnett)
{
    RngStream rng(1);
    const std::vector<SampleGroup> g{{"PSOX", {-1, -1, -1}}, {"AX", {-1, -1, -1}}, {"SBX", {-1, -1, -1}}};
    const auto r = build_report(g, "PSOX", 0.05, rng, 1000);
    EXPECT_EQ(flag_char(r.kruskal_flag()), '~');
    ASSERT_EQ(r.dunnett.size(), 2u);
    for (const auto& d : r.dunnett) EXPECT_EQ(flag_char(d.flag), '-');
}

TEST(Report, DominantControlFlagsAllTreatments)
{
    RngStream rng(2);
    const std::vector<SampleGroup> g{{"PSOX", normals(10, 0, 1)},
                                     {"AX", normals(10, 5, 2)},
                                     {"BLX", normals(10, 4, 3)},
                                     {"SBX", normals(10, 6, 4)}};
    const auto r = build_report(g, "PSOX", 0.05, rng, 20000);
    EXPECT_EQ(flag_char(r.kruskal_flag()), '+');
    for (const auto& d : r.dunnett) EXPECT_EQ(flag_char(d.flag), '+') << d.label;
}

TEST(Report, DeterministicGivenSeed)
{
    const std::vector<SampleGroup> g{{"PSOX", normals(10, 0, 1)}, {"AX", normals(10, 1, 2)}, {"FX", normals(10, 0.8, 3)}};
    RngStream a(42), b(42);
    const auto r1 = build_report(g, "PSOX", 0.05, a, 5000), r2 = build_report(g, "PSOX", 0.05, b, 5000);
    ASSERT_EQ(r1.dunnett.size(), r2.dunnett.size());
    for (std::size_t i = 0; i < r1.dunnett.size(); ++i) {
        if (std::isnan(r1.dunnett[i].p)) EXPECT_TRUE(std::isnan(r2.dunnett[i].p));
        else EXPECT_EQ(r1.dunnett[i].p, r2.dunnett[i].p);
    }
}

TEST(Report, MissingControlThrows)
{
    RngStream rng(1);
    const std::vector<SampleGroup> g{{"A", {1, 2}}, {"B", {3, 4}}};
    EXPECT_THROW(build_report(g, "PSOX", 0.05, rng, 100), std::invalid_argument);
}

TEST(Flags, PureFunctionOfPAndAlpha)
{
    EXPECT_EQ(flag_for(0.01, 0.05), Flag::significant);
    EXPECT_EQ(flag_for(0.05, 0.05), Flag::not_significant);
    EXPECT_EQ(flag_char(Flag::skipped), '-');
}
