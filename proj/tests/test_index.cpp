// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dehn/index.hpp"

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

using namespace dehn;

namespace
{

const TwistProfile& twist()
{
    static const TwistProfile tp = build_twist_profile(-1, 0.1, 0.5);
    return tp;
}

OrbitLevel principal() { return find_principal_level(twist()); }

Mat randomSymmetric(int dim, std::mt19937_64& rng, double scale)
{
    std::normal_distribution<double> g(0.0, scale);
    Mat A(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            A(i, j) = g(rng);
    return 0.5 * (A + A.transpose());
}

/// Loop winding i times in the first symplectic plane of dimension dim.
Mat loopAt(int dim, int i, double t)
{
    Mat L = Mat::Identity(dim, dim);
    const int m = dim / 2;
    const double th = kTwoPi * i * t;
    L(0, 0) = std::cos(th);
    L(0, m) = std::sin(th);
    L(m, 0) = -std::sin(th);
    L(m, m) = std::cos(th);
    return L;
}

} // namespace

TEST(RobbinSalamon, SkewPathIsHalfSignOfShear)
{
    EXPECT_EQ(robbin_salamon_index(skewPath(0.7, 2.0)).rsIndex, HalfInt::fromTwice(1));
    EXPECT_EQ(robbin_salamon_index(skewPath(-0.7, 2.0)).rsIndex, HalfInt::fromTwice(-1));
}

TEST(RobbinSalamon, ConstantIdentityIsZero)
{
    const SymplecticPath p = makePath(
        4, [](double) { return Mat(Mat::Identity(4, 4)); }, 0.0, 1.0);
    EXPECT_EQ(robbin_salamon_index(p).rsIndex, HalfInt());
}

TEST(RobbinSalamon, RotationLoopsMatchLoopMaslov)
{
    for (int i = 1; i <= 3; ++i)
    {
        const IndexResult r = robbin_salamon_index(rotationLoopPath(i));
        EXPECT_EQ(r.rsIndex, HalfInt::fromInt(loop_maslov(i))) << i;
    }
    EXPECT_EQ(loop_maslov(1), 2);
    EXPECT_EQ(loop_maslov(3), 6);
    EXPECT_THROW(loop_maslov(0), DomainError);
}

TEST(RobbinSalamon, LoopAdditivity)
{
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> turns(1, 3);
    for (int trial = 0; trial < 100; ++trial)
    {
        const int dim = trial % 2 ? 4 : 2;
        const Mat om = standardOmega(dim);
        const Mat S = randomSymmetric(dim, rng, 2.0);
        const int i = turns(rng);
        auto P = [om, S](double t) { return Mat((t * om * S).exp()); };
        const SymplecticPath path = makePath(dim, P, 0.0, 1.0);
        const SymplecticPath loop = makePath(
            dim, [dim, i](double t) { return loopAt(dim, i, t); }, 0.0, 1.0);
        const SymplecticPath prod = makePath(
            dim, [dim, i, P](double t) { return Mat(loopAt(dim, i, t) * P(t)); }, 0.0, 1.0);
        const HalfInt a = robbin_salamon_index(loop).rsIndex;
        const HalfInt b = robbin_salamon_index(path).rsIndex;
        const HalfInt c = robbin_salamon_index(prod).rsIndex;
        EXPECT_EQ(a, HalfInt::fromInt(2 * i));
        EXPECT_EQ(c, a + b) << "trial " << trial;
    }
}

TEST(LinearizedFlow, IdentityAtZeroAndShearSign)
{
    const OrbitLevel lv = principal();
    for (int n : {2, 3, 4})
    {
        const Mat F0 = linearized_reeb_flow(twist(), lv, n, 0.0);
        EXPECT_LE((F0 - Mat::Identity(2 * n - 2, 2 * n - 2)).cwiseAbs().maxCoeff(), 0.0);
        const double T = lv.period;
        const Mat FT = linearized_reeb_flow(twist(), lv, n, T);
        EXPECT_NEAR(FT(1, 0), -twist().g.d1(lv.pLevel) * T, 1e-14);
        EXPECT_LT(FT(1, 0), 0.0);
    }
}

TEST(LinearizedFlow, OneParameterGroup)
{
    const auto levels = enumerate_orbit_levels(twist(), 10.0, 5);
    for (const OrbitLevel& lv : levels)
        for (double t1 : {0.3, 1.1})
            for (double t2 : {0.2, 2.5})
            {
                const Mat a = linearized_reeb_flow(twist(), lv, 4, t1 + t2);
                const Mat b = linearized_reeb_flow(twist(), lv, 4, t2) *
                              linearized_reeb_flow(twist(), lv, 4, t1);
                EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-10);
            }
}

TEST(LinearizedFlow, Symplectic)
{
    const auto levels = enumerate_orbit_levels(twist(), 10.0, 5);
    for (const OrbitLevel& lv : levels)
        for (int n : {2, 3, 5})
            EXPECT_LE(linearizedFlowPath(twist(), lv, n, 3 * lv.period).symplecticDefect(), 1e-9);
}

TEST(Degree, PrincipalMinimumIsTwoIMinusOne)
{
    const OrbitLevel lv = principal();
    for (int n = 2; n <= 5; ++n)
        for (int i = 1; i <= 3; ++i)
        {
            const DegreeResult d = sft_degree(twist(), coverLevel(lv, i), n, 0);
            EXPECT_EQ(d.degree, 2 * i - 1) << "n=" << n << " i=" << i;
            EXPECT_EQ(d.index.rsIndex, HalfInt::fromTwice(1));
            EXPECT_EQ(d.muTotal, HalfInt::fromTwice(4 * i + 1));
            EXPECT_EQ(d.degree % 2, 1);
        }
}

TEST(Degree, MaximumOfMorseFunction)
{
    const OrbitLevel lv = principal();
    for (int n : {3, 4})
        EXPECT_EQ(sft_degree(twist(), lv, n, 2 * n - 3).degree, 1 + 2 * n - 3);
}

TEST(Degree, Rejections)
{
    const auto levels = enumerate_orbit_levels(twist(), 10.0, 5);
    for (const OrbitLevel& lv : levels)
        if (!lv.isPrincipal)
        {
            EXPECT_THROW(sft_degree(twist(), lv, 3, 0), DomainError);
        }
    EXPECT_THROW(sft_degree(twist(), principal(), 3, 4), DomainError);
}
