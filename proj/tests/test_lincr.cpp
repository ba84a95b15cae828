// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dehn/lincr.hpp"

#include <gtest/gtest.h>

#include <random>

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

const WEquation& weq()
{
    static const WEquation we = assemble_W_equation(binding(), solve_plane(binding(), 0.05));
    return we;
}

const KernelReport& kernel()
{
    static const KernelReport rep = kernel_dimension(weq());
    return rep;
}

SmoothProfile scaled(const SmoothProfile& p, double c)
{
    SmoothProfile q = p;
    q.valueFn = [f = p.valueFn, c](double r) { return c * f(r); };
    q.d1Fn = [f = p.d1Fn, c](double r) { return c * f(r); };
    q.d2Fn = [f = p.d2Fn, c](double r) { return c * f(r); };
    return q;
}

/// Log-norm growth of a single solution from sigma0 to sigma1.
double logGrowth(const ModeSystem& ms, const Eigen::VectorXd& y0, double sigma0, double sigma1)
{
    Eigen::MatrixXd Y = y0.normalized();
    const ShootResult res = propagate(ms, weq(), Y, weq().rAt(sigma0), sigma0, sigma1,
                                      {1e-11, 1e-11});
    return res.trace.back().logNorms[0];
}

} // namespace

TEST(WEquation, CoreCoefficientsVanish)
{
    const WEquation& we = weq();
    for (int i = 1; i <= 100; ++i)
    {
        const double r = binding().r0 / 4 * i / 100;
        EXPECT_EQ(we.K(r), 0.0);
        EXPECT_EQ(we.H2(r), 0.0);
    }
}

TEST(WEquation, ExplicitElementsSolveIt)
{
    const WEquation& we = weq();
    EXPECT_LE(we.residualS, 1e-8);
    // Constants in W1 are annihilated by the mode-0 system.
    const ModeSystem m0{0, ModeParity::Cos, false, 0.3};
    for (double r : {0.05, 0.2, 0.3, 0.39})
    {
        const Eigen::MatrixXd A = m0.coefficientMatrix(we, r);
        EXPECT_LE((A * Eigen::Vector4d(0, 0, 1, 0)).norm(), 1e-12);
        EXPECT_LE((A * Eigen::Vector4d(0, 0, 0, 1)).norm(), 1e-12);
        // 1/z in W1 for the frequency-1 system.
        const ModeSystem m1{1, ModeParity::Cos, false, 0.3};
        const Eigen::Vector4d w(0, 0, 1, -1);
        EXPECT_LE((m1.coefficientMatrix(we, r) * w + w).norm(), 1e-12);
    }
}

TEST(WEquation, AdmissibilityOfExplicitElementsFromNorms)
{
    const WEquation& we = weq();
    const double s0 = we.sigmaMid;
    const double s1 = we.sigmaEnd();
    // (1/z, 0): decays like 1/rho.
    const ModeSystem m1{1, ModeParity::Cos, false, 0.3};
    EXPECT_NEAR(logGrowth(m1, Eigen::Vector4d(0, 0, 1, -1), s0, s1), -(s1 - s0), 1e-6);
    const ModeSystem m1s{1, ModeParity::Sin, false, 0.3};
    EXPECT_NEAR(logGrowth(m1s, Eigen::Vector4d(0, 0, 1, 1), s0, s1), -(s1 - s0), 1e-6);
    // (-h1'/detH, h2'/detH): bounded, tends to a nonzero constant.
    const BindingProfile& bp = binding();
    const double r = we.rAt(s0);
    const Eigen::Vector4d fifth(bp.h2.d1(r) / bp.detH(r), 0, -bp.h1.d1(r) / bp.detH(r), 0);
    const ModeSystem m0{0, ModeParity::Cos, false, 0.3};
    const double g = logGrowth(m0, fifth, s0, s1);
    const double rEnd = we.rAt(s1);
    EXPECT_NEAR(std::exp(g) * fifth.norm(),
                std::hypot(bp.h2.d1(rEnd) / bp.detH(rEnd), bp.h1.d1(rEnd) / bp.detH(rEnd)), 1e-6);
}

TEST(Kernel, ShippedCount)
{
    const KernelReport& rep = kernel();
    EXPECT_EQ(rep.total, 5);
    for (const auto& [mode, count] : rep.perMode)
        EXPECT_EQ(count, mode == 0 ? 3 : mode == -1 ? 2 : 0) << mode;
    int sum = 0;
    for (const auto& [mode, count] : rep.perMode)
        sum += count;
    EXPECT_EQ(sum, rep.total);
    EXPECT_LT(rep.delta, rep.spectralGap);
}

TEST(Kernel, StableUnderDeltaPerturbation)
{
    for (double f : {0.8, 1.2})
    {
        const KernelReport rep = kernel_dimension(weq(), kernel().delta * f);
        EXPECT_EQ(rep.total, 5);
        EXPECT_EQ(rep.perMode, kernel().perMode);
    }
    EXPECT_THROW(kernel_dimension(weq(), 2 * kernel().spectralGap), DomainError);
}

TEST(Kernel, MorseBottDirections)
{
    for (int n : {2, 3, 4})
    {
        const KernelReport rep = kernel_dimension(weq(), 0.0, 2, n);
        EXPECT_EQ(rep.nonDecayingBounded, 2 * n - 3) << n;
        EXPECT_EQ(rep.total, 5);
    }
}

TEST(Kernel, BackSubstitution)
{
    const WEquation& we = weq();
    int found = 0;
    for (const ModeCount& mc : kernel().details)
    {
        const ModeSystem ms{mc.k, mc.parity, mc.normal, kernel().delta};
        for (const Eigen::VectorXd& v : mc.kernelAtMid)
        {
            EXPECT_LE(backSubstitutionResidual(ms, we, v, we.sigmaMid, we.sigmaMid + 8), 1e-7);
            ++found;
        }
    }
    EXPECT_EQ(found, 5);
}

TEST(Kernel, PlusOneRegularSolutionsGrow)
{
    const WEquation& we = weq();
    for (ModeParity par : {ModeParity::Cos, ModeParity::Sin})
    {
        const ModeSystem ms{1, par, false, kernel().delta};
        for (const Eigen::VectorXd& v : regularBasis(ms, we))
        {
            // Skip the 1/z direction (negative exponent).
            if ((ms.coefficientMatrix(we, 0.0) * v).dot(v) < 0)
                continue;
            const double toMid = logGrowth(ms, v, we.sigmaStart(), we.sigmaMid);
            const double toEnd = logGrowth(ms, v, we.sigmaStart(), we.sigmaEnd());
            EXPECT_GE(toEnd - toMid, std::log(10.0));
        }
    }
}

TEST(Kernel, HigherModesHaveNoAdmissibleDirections)
{
    for (const ModeCount& mc : kernel().details)
        if (std::abs(mc.k) >= 2)
        {
            EXPECT_EQ(mc.intersection, 0);
            EXPECT_GT(mc.largestRejected, 1e-5);
        }
}

TEST(PhasePlane, Eigen)
{
    const PhasePlaneEigen e0 = phase_plane_eigen_h2(0.0);
    EXPECT_DOUBLE_EQ(e0.lambdaPlus, 1.0);
    EXPECT_DOUBLE_EQ(e0.lambdaMinus, -1.0);
    EXPECT_DOUBLE_EQ(e0.vPlus[1], 1.0);
    EXPECT_DOUBLE_EQ(e0.vMinus[1], -1.0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 5.0);
    for (int i = 0; i < 100; ++i)
    {
        const PhasePlaneEigen e = phase_plane_eigen_h2(g(rng));
        EXPECT_NEAR(e.lambdaPlus * e.lambdaMinus, -1.0, 1e-12);
    }
    // At r = r0/2 against a dense eigensolver.
    const double rho = std::exp(weq().sigmaMid);
    const PhasePlaneEigen e = phase_plane_eigen(weq(), rho);
    Eigen::Matrix2d A;
    A << e.H2, 1, 1, 0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(A);
    EXPECT_NEAR(e.lambdaMinus, es.eigenvalues()[0], 1e-12);
    EXPECT_NEAR(e.lambdaPlus, es.eigenvalues()[1], 1e-12);
    EXPECT_LE((A * e.vPlus - e.lambdaPlus * e.vPlus).norm(), 1e-12);
    EXPECT_THROW(phase_plane_eigen(weq(), 0.0), DomainError);
}

TEST(Cone, ConstantCoefficientClosedForm)
{
    const ConeReport rep =
        cone_invariance_check([](double) { return 0.0; }, Interval{0.0, std::log(10.0)},
                              {Eigen::Vector2d(1, 1)});
    EXPECT_TRUE(rep.invariant);
    EXPECT_NEAR(rep.minGrowth, 10.0, 1e-8);
}

TEST(Cone, BoundaryStartEntersInterior)
{
    const ConeReport rep = cone_invariance_check(weq(), Interval{1.0, 2.0}, {Eigen::Vector2d(1, 0)});
    EXPECT_TRUE(rep.invariant);
    EXPECT_GT(rep.minComponent, 0.0);
    EXPECT_THROW(cone_invariance_check(weq(), Interval{1.0, 2.0}, {Eigen::Vector2d(-1, 1)}),
                 DomainError);
}

TEST(Cone, ShippedProfileRandomStarts)
{
    std::mt19937_64 rng(50);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::vector<Eigen::Vector2d> starts;
    for (int i = 0; i < 50; ++i)
        starts.emplace_back(u(rng), u(rng));
    const ConeReport rep = cone_invariance_check(weq(), Interval{1.0, 10.0}, starts);
    EXPECT_EQ(rep.starts, 50);
    EXPECT_TRUE(rep.invariant);
    EXPECT_TRUE(rep.allGrow);
    EXPECT_GE(rep.minGrowth, 10.0);
}

TEST(Parseval, SingleModeEquality)
{
    CylinderField f;
    f.sigma = num::linspace(0.0, 4.0, 21);
    f.values.resize(f.sigma.size());
    for (std::size_t i = 0; i < f.sigma.size(); ++i)
        for (int j = 0; j < f.psiPoints; ++j)
            f.values[i].push_back({std::polar(std::exp(-f.sigma[i]), kTwoPi * 2 * j / f.psiPoints),
                                   0.0});
    const SzReport rep = sz_inequality_check({f});
    EXPECT_NEAR(rep.minRatio, 2.0, 1e-12);
    EXPECT_TRUE(rep.passed);
}

TEST(Parseval, RandomFields)
{
    std::mt19937_64 rng(8);
    std::vector<CylinderField> fields;
    for (int i = 0; i < 100; ++i)
        fields.push_back(randomCylinderField(rng));
    const SzReport rep = sz_inequality_check(fields);
    EXPECT_EQ(rep.fields, 100);
    EXPECT_TRUE(rep.passed);
    EXPECT_GE(rep.minRatio, 2.0 - 1e-9);
}

TEST(Parseval, ConstantFieldIsVacuous)
{
    CylinderField f;
    f.sigma = num::linspace(0.0, 1.0, 5);
    f.values.assign(5, std::vector<std::array<std::complex<double>, 2>>(
                           f.psiPoints, {std::complex<double>(1, 2), 3.0}));
    const SzReport rep = sz_inequality_check({f});
    EXPECT_EQ(rep.vacuous, 1);
    EXPECT_TRUE(rep.passed);
}

TEST(ANorm, ShippedAndScaled)
{
    const WEquation& we = weq();
    EXPECT_GT(we.ANorm, 0.0);
    EXPECT_TRUE(std::isfinite(we.ANorm));
    EXPECT_FALSE(kernel().ANormBelow2);
    WEquation half = we;
    half.bp.h1 = scaled(we.bp.h1, 0.5);
    half.bp.h2 = scaled(we.bp.h2, 0.5);
    EXPECT_LT(a_norm_report(half), we.ANorm);
    EXPECT_NEAR(a_norm_report(half), 0.5 * we.ANorm, 1e-9 * we.ANorm);
}

TEST(ANorm, QuadraticProfilesGiveZero)
{
    WEquation q = weq();
    BindingShape s;
    s.name = "quadratic";
    q.bp = build_binding_profile(0.4, 0.9, s);
    EXPECT_EQ(a_norm_report(q), 0.0);
}
