// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Winding numbers, actions and annulus energies for level circles in the
// binding region, and the lower-bound audit for curves asymptotic to the
// principal orbit.
#pragma once

#include "dehn/common.hpp"
#include "dehn/numerics.hpp"
#include "dehn/profiles.hpp"

#include <functional>
#include <vector>

namespace dehn
{

/// A loop at constant r with d_psi u = c J d_r + d R_alpha + e d_t (+ X).
struct LevelCircle
{
    double r = 0.0;
    int samples = 512;
    std::function<double(double)> c;
    std::function<double(double)> d;
    std::function<double(double)> e;
    double cBar = 0.0;
    double dBar = 0.0;

    /// Periodic trapezoid rule over [0, 2 pi).
    double integrate(const std::function<double(double)>& f) const
    {
        double s = 0.0;
        for (int j = 0; j < samples; ++j)
            s += f(kTwoPi * j / samples);
        return s * kTwoPi / samples;
    }
    void finalize()
    {
        cBar = integrate(c);
        dBar = integrate(d);
    }
};

/// Boundary circle of the explicit plane at level r: c = h2', d = h2, e = 0.
/// `cover` multiplies the parametrization speed; orientation -1 reverses it.
inline LevelCircle planeLevelCircle(const BindingProfile& bp, double r, int cover = 1,
                                    int orientation = 1, int samples = 512)
{
    if (!(r > 0 && r <= bp.rMax))
        throw DomainError("level circle needs 0 < r <= rMax");
    const double s = static_cast<double>(cover * orientation);
    const double c0 = s * bp.h2.d1(r);
    const double d0 = s * bp.h2.value(r);
    LevelCircle lc;
    lc.r = r;
    lc.samples = samples;
    lc.c = [c0](double) { return c0; };
    lc.d = [d0](double) { return d0; };
    lc.e = [](double) { return 0.0; };
    lc.finalize();
    return lc;
}

/// Integral of (h1 c - h1' d) / detH over the circle, i.e. 2 pi times the
/// winding around the binding.
inline double windingIntegral(const BindingProfile& bp, const LevelCircle& lc)
{
    const double D = bp.detH(lc.r);
    if (std::abs(D) < 1e-300)
        throw SingularityError("detH vanishes on the level circle", lc.r);
    return (bp.h1.value(lc.r) * lc.cBar - bp.h1.d1(lc.r) * lc.dBar) / D;
}

/// Pointwise winding integrand at angle psi.
inline double windingIntegrand(const BindingProfile& bp, const LevelCircle& lc, double psi)
{
    return (bp.h1.value(lc.r) * lc.c(psi) - bp.h1.d1(lc.r) * lc.d(psi)) / bp.detH(lc.r);
}

inline int winding_number(const BindingProfile& bp, const LevelCircle& lc)
{
    const double w = windingIntegral(bp, lc) / kTwoPi;
    const double rounded = std::round(w);
    if (std::abs(w - rounded) > 1e-9)
        throw InvariantError("non-integral winding " + fmt17(w) + " at r = " + fmt17(lc.r));
    return static_cast<int>(rounded);
}

inline double action(const LevelCircle& lc) { return lc.dBar; }

/// A family of level circles over the radial range from r1 to r2.
struct CircleFamily
{
    double r1 = 0.0;
    double r2 = 0.0;
    std::function<LevelCircle(double)> circleAt;
};

struct AnnulusEnergy
{
    double E1 = 0.0;
    double E2 = 0.0;
};

/// E2 = int h2' dr ^ dphi and E1 = int (-h1'/h1)(h2 * W - dBar) dr, with W
/// the winding integral of each circle; radial Gauss-Legendre.
inline AnnulusEnergy annulus_energies(const BindingProfile& bp, const CircleFamily& fam,
                                      int panels = 256)
{
    AnnulusEnergy out;
    if (fam.r1 == fam.r2)
        return out;
    auto e2 = [&](double r) {
        const LevelCircle lc = fam.circleAt(r);
        return bp.h2.d1(r) * windingIntegral(bp, lc);
    };
    auto e1 = [&](double r) {
        const LevelCircle lc = fam.circleAt(r);
        const double h1 = bp.h1.value(r);
        return -bp.h1.d1(r) / h1 * (bp.h2.value(r) * windingIntegral(bp, lc) - lc.dBar);
    };
    out.E2 = num::gaussLegendre(e2, fam.r1, fam.r2, panels);
    out.E1 = num::gaussLegendre(e1, fam.r1, fam.r2, panels);
    return out;
}

/// Family of explicit-plane circles between r1 and r2.
inline CircleFamily planeFamily(const BindingProfile& bp, double r1, double r2,
                                int orientation = 1)
{
    return {r1, r2, [&bp, orientation](double r) {
                return planeLevelCircle(bp, r, 1, orientation);
            }};
}

struct AuditInput
{
    /// Action of the boundary circle of the disk cap (Stokes).
    double capAction = 0.0;
    std::vector<CircleFamily> families;
};

struct AuditReport
{
    double capAction = 0.0;
    double E1 = 0.0;
    double E2 = 0.0;
    double total = 0.0;
    double bound = 0.0;
    double excess = 0.0;
    double excursionEnergy = 0.0;
    int pointsBeyondR0 = 0;
    bool passed = true;
    bool vacuous = false;
};

/// Sums the cap action and the annulus energies and compares the total with
/// 2 pi h2(r0). Families reaching beyond r0 are flagged and their energy is
/// reported separately.
inline AuditReport energy_bound_audit(const BindingProfile& bp, const AuditInput& in)
{
    AuditReport rep;
    rep.bound = kTwoPi * bp.h2.value(bp.r0);
    if (in.families.empty() && in.capAction == 0.0)
    {
        rep.vacuous = true;
        return rep;
    }
    rep.capAction = in.capAction;
    for (const CircleFamily& fam : in.families)
    {
        if (fam.r1 < 0 || fam.r2 < 0 || fam.r1 > bp.rMax || fam.r2 > bp.rMax)
            throw DomainError("circle family leaves the binding region");
        const AnnulusEnergy e = annulus_energies(bp, fam);
        rep.E1 += e.E1;
        rep.E2 += e.E2;
        if (std::max(fam.r1, fam.r2) > bp.r0 + 1e-12)
        {
            ++rep.pointsBeyondR0;
            rep.excursionEnergy += e.E1 + e.E2;
        }
    }
    rep.total = rep.capAction + rep.E1 + rep.E2;
    rep.excess = rep.total - rep.bound;
    rep.passed = rep.total >= rep.bound - 1e-8;
    return rep;
}

/// The explicit plane: disk cap up to rCap, then plane circles up to r0.
inline AuditInput planeAuditInput(const BindingProfile& bp, double rCap)
{
    AuditInput in;
    in.capAction = kTwoPi * bp.h2.value(rCap);
    in.families.push_back(planeFamily(bp, rCap, bp.r0));
    return in;
}

/// The plane truncated at rCap plus an annulus reaching out to rOut > r0 and
/// back, traversed with reversed orientation so its energy is nonnegative.
inline AuditInput excursionAuditInput(const BindingProfile& bp, double rCap, double rOut)
{
    AuditInput in = planeAuditInput(bp, rCap);
    in.families.push_back(planeFamily(bp, bp.r0, rOut, -1));
    return in;
}

} // namespace dehn
