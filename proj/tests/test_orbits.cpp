// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dehn/orbits.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace dehn;

namespace
{

const TwistProfile& twist()
{
    static const TwistProfile tp = build_twist_profile(-1, 0.1, 0.5);
    return tp;
}

const BindingProfile& binding()
{
    static const BindingProfile bp = build_binding_profile(0.4, 0.5, {}, &twist());
    return bp;
}

OrbitLevel principal()
{
    return find_principal_level(twist(), binding().formScale, binding().kappa);
}

} // namespace

TEST(PrincipalLevel, BareMappingTorus)
{
    const OrbitLevel lv = find_principal_level(twist());
    EXPECT_EQ(lv.pLevel, *twist().p0);
    EXPECT_LE(std::abs(twist().g.value(lv.pLevel)), 1e-12);
    EXPECT_EQ(lv.m, 1);
    EXPECT_TRUE(lv.isPrincipal);
    EXPECT_DOUBLE_EQ(lv.period, twist().hk.value(lv.pLevel));
    EXPECT_FALSE(lv.bindingRadius.has_value());
}

TEST(PrincipalLevel, ActionEqualsBindingValue)
{
    const OrbitLevel lv = principal();
    const BindingProfile& bp = binding();
    EXPECT_NEAR(lv.action, kTwoPi * bp.h2.value(bp.r0), 1e-9);
    EXPECT_NEAR(lv.action, 2.2533603994438631, 1e-12);
    ASSERT_TRUE(lv.bindingRadius.has_value());
    EXPECT_NEAR(*lv.bindingRadius, bp.r0, 1e-15);
}

TEST(PrincipalLevel, NoZeroForPositiveTwist)
{
    const TwistProfile pos = build_twist_profile(1, 0.1, 0.5);
    EXPECT_THROW(find_principal_level(pos), DomainError);
}

TEST(Enumeration, DenominatorOneOnlyPrincipal)
{
    const auto levels = enumerate_orbit_levels(twist(), 100.0, 1);
    ASSERT_EQ(levels.size(), 1u);
    EXPECT_TRUE(levels[0].isPrincipal);
}

TEST(Enumeration, ShippedLevelsUnderThreeTimesPrincipal)
{
    const OrbitLevel p = principal();
    const auto levels =
        enumerate_orbit_levels(twist(), 3 * p.action, 8, binding().formScale, binding().kappa);
    const std::vector<std::pair<int, int>> expect = {{0, 1}, {-1, 3}, {-1, 4}, {-2, 5}};
    ASSERT_EQ(levels.size(), expect.size());
    for (std::size_t j = 0; j < levels.size(); ++j)
    {
        EXPECT_EQ(levels[j].a, expect[j].first);
        EXPECT_EQ(levels[j].m, expect[j].second);
        if (j)
        {
            EXPECT_GT(levels[j].action, levels[j - 1].action);
        }
        EXPECT_NO_THROW(validateLevel(levels[j]));
    }
}

TEST(Enumeration, MatchesDenseScan)
{
    const double bound = 50.0;
    const auto levels = enumerate_orbit_levels(twist(), bound, 6);
    const double hi = twist().g.domain.hi;
    std::size_t expected = 0;
    for (int b = 1; b <= 6; ++b)
        for (int a = -b; a <= b; ++a)
        {
            if (std::gcd(a, b) != 1 && !(a == 0 && b == 1))
                continue;
            const double target = 2 * oracle::pi * a / b;
            auto f = [&](double s) { return oracle::g(-1, 0.1, 0.5, s) - target; };
            const int scan = 20000;
            for (int i = 0; i < scan; ++i)
            {
                const double s0 = hi * i / scan;
                const double s1 = hi * (i + 1) / scan;
                if ((f(s0) < 0) != (f(s1) < 0) && s1 > 1e-9)
                {
                    const double s = oracle::bisect(f, s0, s1);
                    if (twist().hk.value(s) * b <= bound)
                        ++expected;
                }
            }
        }
    EXPECT_EQ(levels.size(), expected);
    for (const OrbitLevel& lv : levels)
        EXPECT_NEAR(twist().g.value(lv.pLevel), lv.gValue, 1e-10);
}

TEST(Enumeration, ActionsMonotoneAlongSegmentForFixedMultiplicity)
{
    const auto levels = enumerate_orbit_levels(twist(), 200.0, 8);
    for (int m = 1; m <= 8; ++m)
    {
        std::vector<OrbitLevel> same;
        for (const auto& lv : levels)
            if (lv.m == m)
                same.push_back(lv);
        std::sort(same.begin(), same.end(),
                  [](const auto& x, const auto& y) { return x.pLevel < y.pLevel; });
        for (std::size_t j = 1; j < same.size(); ++j)
            EXPECT_GT(same[j].action, same[j - 1].action);
    }
}

TEST(Enumeration, TinyBoundIsEmpty)
{
    EXPECT_TRUE(enumerate_orbit_levels(twist(), 1e-3, 8).empty());
    EXPECT_THROW(enumerate_orbit_levels(twist(), 0.0, 8), DomainError);
    EXPECT_THROW(enumerate_orbit_levels(twist(), 1.0, 0), DomainError);
}

TEST(Levels, CoverMultipliesActionAndTurns)
{
    const OrbitLevel p = principal();
    const OrbitLevel c = coverLevel(p, 3);
    EXPECT_EQ(c.i, 3);
    EXPECT_DOUBLE_EQ(c.action, 3 * p.action);
    EXPECT_NO_THROW(validateLevel(c));
    OrbitLevel bad = p;
    bad.gValue = 0.3;
    EXPECT_THROW(validateLevel(bad), InvariantError);
}

TEST(OrbitSpace, RankFormulas)
{
    EXPECT_EQ(orbit_space_homology(5).bettiRanks, (std::map<int, int>{{0, 1}, {7, 1}}));
    EXPECT_EQ(orbit_space_homology(4).bettiRanks,
              (std::map<int, int>{{0, 1}, {2, 1}, {3, 1}, {5, 1}}));
    for (int n = 3; n <= 8; ++n)
    {
        const auto rep = orbit_space_homology(n);
        EXPECT_FALSE(rep.degenerate);
        int euler = 0;
        for (const auto& [d, r] : rep.bettiRanks)
            euler += (d % 2 ? -1 : 1) * r;
        // Closed odd-dimensional manifold.
        EXPECT_EQ(euler, 0);
    }
    EXPECT_TRUE(orbit_space_homology(2).degenerate);
    EXPECT_THROW(orbit_space_homology(1), DomainError);
}

TEST(Closure, PrincipalOrbitCloses)
{
    for (int n : {2, 3})
    {
        const ClosureReport rep = verify_closure_by_flow(binding(), principal(), 1e-8, n, 5);
        EXPECT_TRUE(rep.passed) << rep.distance;
        EXPECT_LE(rep.distance, 1e-8);
        EXPECT_NEAR(std::abs(rep.phiAdvance), kTwoPi, 1e-9);
    }
}

TEST(Closure, PerturbedLevelDoesNotClose)
{
    const OrbitLevel p = principal();
    OrbitLevel q = detail::makeLevel(twist(), p.pLevel + 1e-3, 0, 1, binding().formScale,
                                     binding().kappa);
    const ClosureReport rep = verify_closure_by_flow(binding(), q, 1e-8);
    EXPECT_FALSE(rep.passed);
    EXPECT_GT(rep.distance, 1e-4);
}

TEST(Closure, ZeroPeriodRejected)
{
    OrbitLevel p = principal();
    p.action = 0.0;
    EXPECT_THROW(verify_closure_by_flow(binding(), p, 1e-8), DomainError);
}
