// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dehn/geometry.hpp"

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

const BindingProfile& quadratic()
{
    static const BindingProfile bp = [] {
        BindingShape s;
        s.name = "quadratic";
        return build_binding_profile(0.4, 0.9, s);
    }();
    return bp;
}

TildePoint randomTildePoint(int n, double sLo, double sHi, std::mt19937_64& rng)
{
    const BindingPoint b = randomBindingPoint(n, 0.0, 1.0, rng);
    std::uniform_real_distribution<double> uni(sLo, sHi);
    return {b.q, b.p * uni(rng), b.phi};
}

} // namespace

TEST(BindingPoint, RandomPointsSatisfyConstraints)
{
    std::mt19937_64 rng(1);
    for (int n : {2, 3, 5})
        for (int i = 0; i < 100; ++i)
        {
            const BindingPoint x = randomBindingPoint(n, 0.0, 0.5, rng);
            EXPECT_NO_THROW(x.validate());
            EXPECT_LE(tangencyResidual(x, randomTangent(x, rng)), 1e-10);
        }
    BindingPoint bad = randomBindingPoint(3, 0.0, 0.5, rng);
    bad.p = bad.q;
    EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Reeb, QuadraticCoreCoefficients)
{
    std::mt19937_64 rng(2);
    BindingPoint x = randomBindingPoint(3, 0.3, 0.3, rng);
    const TangentVector R = reeb_field_binding(quadratic(), x);
    EXPECT_NEAR(R.dphi, 1.0, 1e-14);
    EXPECT_LE((R.dq - x.p).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((R.dp + x.q).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Reeb, PureAngularAtR0)
{
    std::mt19937_64 rng(3);
    BindingPoint x = randomBindingPoint(3, 0.4, 0.4, rng);
    const TangentVector R = reeb_field_binding(binding(), x);
    EXPECT_LE(R.dq.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(R.dp.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(R.dphi, -binding().h1.d1(0.4) / binding().detH(0.4), 1e-14);
}

TEST(Reeb, ContactIdentitiesAtRandomPoints)
{
    std::mt19937_64 rng(4);
    const BindingProfile& bp = binding();
    double worstA = 0.0;
    double worstD = 0.0;
    for (int i = 0; i < 1000; ++i)
    {
        const BindingPoint x = randomBindingPoint(i % 2 ? 3 : 2, 0.0, bp.rMax, rng);
        const TangentVector R = reeb_field_binding(bp, x);
        worstA = std::max(worstA, std::abs(alpha(bp, x, R) - 1));
        if (x.r < 1e-4)
            continue;
        for (int j = 0; j < 10; ++j)
        {
            const TangentVector v = randomTangent(x, rng, false);
            worstD = std::max(worstD, std::abs(dAlphaFiniteDiff(bp, x, R, v)));
        }
    }
    EXPECT_LE(worstA, 1e-10);
    EXPECT_LE(worstD, 1e-9);
}

TEST(Reeb, ExactAndFiniteDifferenceFormsAgree)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i)
    {
        const BindingPoint x = randomBindingPoint(3, 0.01, 0.5, rng);
        const TangentVector v = randomTangent(x, rng, false);
        const TangentVector w = randomTangent(x, rng, false);
        EXPECT_NEAR(dAlpha(binding(), x, v, w), dAlphaFiniteDiff(binding(), x, v, w), 1e-9);
    }
}

TEST(Reeb, RadiusOutsideDomain)
{
    std::mt19937_64 rng(6);
    BindingPoint x = randomBindingPoint(2, 0.1, 0.1, rng);
    x.r = 0.7;
    EXPECT_THROW(reeb_field_binding(binding(), x), DomainError);
    x.r = -0.1;
    EXPECT_THROW(reeb_field_binding(binding(), x), DomainError);
}

TEST(TildeReeb, Identities)
{
    const TwistProfile& tp = twist();
    const TildeReebData at0 = reeb_field_tilde(tp, 0.0);
    EXPECT_DOUBLE_EQ(at0.N, 1.0);
    const TildeReebData atP0 = reeb_field_tilde(tp, *tp.p0);
    EXPECT_LE(std::abs(atP0.g), 1e-12);
    EXPECT_NEAR(atP0.N, 1 / tp.hTilde.value(*tp.p0), 1e-12);
    for (int i = 0; i <= 1000; ++i)
    {
        const double s = 2.0 * i / 1000;
        const TildeReebData d = reeb_field_tilde(tp, s);
        EXPECT_NEAR(d.N * (tp.hTilde.value(s) - s * tp.hTilde.d1(s)), 1.0, 1e-10);
        EXPECT_NEAR(d.g, d.N * tp.hTilde.d1(s), 1e-10);
    }
}

TEST(TildeReeb, PushforwardMatchesOnCollar)
{
    std::mt19937_64 rng(7);
    const BindingProfile& bp = binding();
    for (int i = 0; i < 500; ++i)
    {
        const BindingPoint x = randomBindingPoint(3, bp.collar.lo, bp.collar.hi, rng);
        const TangentVector d = pushforwardTildeReeb(twist(), bp, x) - reeb_field_binding(bp, x);
        EXPECT_LE(d.maxAbs(), 1e-8);
    }
}

TEST(ComplexStructure, DistinguishedDirections)
{
    std::mt19937_64 rng(8);
    const BindingProfile& bp = binding();
    const BindingPoint x = randomBindingPoint(3, 0.33, 0.33, rng);
    const SymplPoint xs{x, 0.4};
    const TangentVector Jt = apply_J(bp, xs, unitField(3, 0, 0, 1));
    EXPECT_LE((Jt - reeb_field_binding(bp, x)).maxAbs(), 1e-14);
    const TangentVector Jr = apply_J(bp, xs, unitField(3, 0, 1, 0));
    const double D = bp.detH(x.r);
    TangentVector expect = liouvilleReeb(x) * (-bp.h2.value(x.r) / D);
    expect.dphi = bp.h1.value(x.r) / D;
    EXPECT_LE((Jr - expect).maxAbs(), 1e-14);
}

TEST(ComplexStructure, SquaresToMinusOneAndIsCompatible)
{
    std::mt19937_64 rng(9);
    const BindingProfile& bp = binding();
    double worst = 0.0;
    double minPair = 1e300;
    for (int i = 0; i < 1000; ++i)
    {
        const BindingPoint x = randomBindingPoint(i % 2 ? 3 : 4, 0.01, bp.rMax, rng);
        const SymplPoint xs{x, 0.0};
        const TangentVector v = randomTangent(x, rng);
        worst = std::max(worst, (apply_J(bp, xs, apply_J(bp, xs, v)) + v).maxAbs());
        const TangentVector c = projectToContactPlane(bp, x, randomTangent(x, rng, false));
        EXPECT_LE(std::abs(alpha(bp, x, c)), 1e-12);
        const double nrm2 = c.dq.squaredNorm() + c.dp.squaredNorm() + c.dphi * c.dphi + c.dr * c.dr;
        minPair = std::min(minPair, dAlpha(bp, x, c, apply_J(bp, xs, c)) / nrm2);
    }
    EXPECT_LE(worst, 1e-9);
    EXPECT_GT(minPair, 0.0);
}

TEST(ComplexStructure, RejectsNonTangentVector)
{
    std::mt19937_64 rng(10);
    const BindingPoint x = randomBindingPoint(3, 0.2, 0.2, rng);
    TangentVector v = TangentVector::zero(3);
    v.dq = x.q;
    EXPECT_THROW(apply_J(binding(), {x, 0.0}, v), DomainError);
}

TEST(SymplecticFrame, PhaseRotation)
{
    std::mt19937_64 rng(11);
    const TildePoint x = randomTildePoint(3, 0.2, 1.5, rng);
    const SymplecticFrame f0 = symplectic_frame(twist(), x, 0.0);
    const SymplecticFrame f1 = symplectic_frame(twist(), x, 1.0);
    const SymplecticFrame fh = symplectic_frame(twist(), x, 0.5);
    for (int j = 0; j < 2; ++j)
    {
        EXPECT_LE((f1.vectors[j] - f0.vectors[j]).maxAbs(), 1e-14);
        EXPECT_LE((fh.vectors[j] + f0.vectors[j]).maxAbs(), 1e-14);
    }
    TangentVector P = TangentVector::zero(3);
    P.dp = x.p / x.p.norm();
    EXPECT_LE((f0.vectors[0] - P).maxAbs(), 1e-15);
}

TEST(SymplecticFrame, GramIsStandard)
{
    std::mt19937_64 rng(12);
    for (int n : {2, 3, 5})
        for (int i = 0; i < 100; ++i)
        {
            const TildePoint x = randomTildePoint(n, 0.05, 2.0, rng);
            std::uniform_real_distribution<double> ph(0.0, 1.0);
            const SymplecticFrame fr = symplectic_frame(twist(), x, ph(rng));
            const Eigen::MatrixXd G = frameGram(twist(), x, fr);
            EXPECT_LE((G - standardFrameGram(n)).cwiseAbs().maxCoeff(), 1e-9);
        }
}

TEST(SymplecticFrame, SingularAtZeroP)
{
    TildePoint x{Vec::Unit(3, 0), Vec::Zero(3), 0.0};
    EXPECT_THROW(symplectic_frame(twist(), x, 0.0), SingularityError);
}
