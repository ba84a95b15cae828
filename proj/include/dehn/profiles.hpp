// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Scalar profiles: the radial twist g and its primitives, and the binding
// pair (h1, h2) of the contact form h1 * lambda + h2 * dphi.
#pragma once

#include "dehn/common.hpp"
#include "dehn/numerics.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dehn
{

using ScalarFn = std::function<double(double)>;

enum class ProfileKind
{
    ClosedForm,
    SampledSpline,
};

/// A scalar function with first and second derivatives on a closed interval.
struct SmoothProfile
{
    Interval domain{0.0, 1.0};
    ProfileKind kind = ProfileKind::ClosedForm;
    ScalarFn valueFn;
    ScalarFn d1Fn;
    ScalarFn d2Fn;

    double value(double x) const { return valueFn(check(x)); }
    double d1(double x) const { return d1Fn(check(x)); }
    double d2(double x) const { return d2Fn(check(x)); }
    double operator()(double x) const { return value(x); }

    /// Largest relative disagreement between d1 and a fourth-order central
    /// difference of value over `samples` interior points.
    double derivativeMismatch(int samples = 200) const
    {
        double worst = 0.0;
        const double h = 1e-5 * std::max(1.0, domain.width());
        for (int i = 0; i < samples; ++i)
        {
            const double x = domain.lo + domain.width() * (i + 0.5) / samples;
            if (x - 2 * h < domain.lo || x + 2 * h > domain.hi)
                continue;
            const double fd =
                (8 * (value(x + h) - value(x - h)) - (value(x + 2 * h) - value(x - 2 * h))) /
                (12 * h);
            worst = std::max(worst, std::abs(fd - d1(x)) / std::max(1.0, std::abs(d1(x))));
        }
        return worst;
    }

  private:
    double check(double x) const
    {
        if (!domain.contains(x, 1e-12 * std::max(1.0, std::abs(domain.hi))))
            throw DomainError("profile evaluated at " + fmt17(x) + " outside [" +
                              fmt17(domain.lo) + ", " + fmt17(domain.hi) + "]");
        return x;
    }
};

/// Shape parameters of the twist. `wiggle` adds a sin^2 * sin bump on the
/// ramp and exists to exercise the monotonicity rejection.
struct TwistShape
{
    std::string name = "cosine-ramp";
    double sMax = 2.5;
    double wiggle = 0.0;
    int tableNodes = 256;
};

struct TwistProfile
{
    int k = -1;
    double eps = 0.1;
    double pPlateau = 0.5;
    TwistShape shape;
    SmoothProfile g;
    SmoothProfile f;
    SmoothProfile hk;
    SmoothProfile hTilde;
    std::optional<double> p0;
};

namespace detail
{

struct Ramp
{
    double k;
    double eps;
    double pp;
    double wiggle;

    // Unmodified twist g_k and its derivatives.
    double base(double s) const
    {
        const double x = std::min(s / pp, 1.0);
        const double w = std::sin(kPi * x);
        return k * kPi * (0.5 * (1.0 + std::cos(kPi * x)) + wiggle * w * w * std::sin(2 * kPi * x));
    }
    double base1(double s) const
    {
        if (s >= pp)
            return 0.0;
        const double x = s / pp;
        const double sx = std::sin(kPi * x);
        const double s2 = std::sin(2 * kPi * x);
        const double w1 = kPi * s2 * s2 + 2 * kPi * sx * sx * std::cos(2 * kPi * x);
        return k * kPi * (-0.5 * kPi * std::sin(kPi * x) + wiggle * w1) / pp;
    }
    double base2(double s) const
    {
        if (s >= pp)
            return 0.0;
        const double x = s / pp;
        const double sx = std::sin(kPi * x);
        const double s2 = std::sin(2 * kPi * x);
        const double c2 = std::cos(2 * kPi * x);
        const double w2 = 6 * kPi * kPi * s2 * c2 - 4 * kPi * kPi * sx * sx * s2;
        return k * kPi * (-0.5 * kPi * kPi * std::cos(kPi * x) + wiggle * w2) / (pp * pp);
    }
    double g(double s) const { return base(s) + eps * s; }
    double g1(double s) const { return base1(s) + eps; }
    double g2(double s) const { return base2(s); }
};

// Cumulative integrals of g and s * g' on a node table, finished with a
// single Kronrod panel from the nearest node.
struct PrimitiveTable
{
    Ramp ramp;
    std::vector<double> nodes;
    std::vector<double> intG;
    std::vector<double> intSg1;

    PrimitiveTable(const Ramp& r, double sMax, int count) : ramp(r)
    {
        nodes = num::linspace(0.0, sMax, count);
        nodes.push_back(r.pp);
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        intG.assign(nodes.size(), 0.0);
        intSg1.assign(nodes.size(), 0.0);
        for (std::size_t i = 1; i < nodes.size(); ++i)
        {
            const double a = nodes[i - 1];
            const double b = nodes[i];
            intG[i] = intG[i - 1] + num::integrate([&](double s) { return ramp.g(s); }, a, b);
            intSg1[i] =
                intSg1[i - 1] + num::integrate([&](double s) { return s * ramp.g1(s); }, a, b);
        }
    }

    std::size_t below(double s) const
    {
        auto it = std::upper_bound(nodes.begin(), nodes.end(), s);
        return it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
    }
    double primitiveG(double s) const
    {
        const std::size_t j = below(s);
        return intG[j] + num::integrateShort([&](double x) { return ramp.g(x); }, nodes[j], s);
    }
    double primitiveSg1(double s) const
    {
        const std::size_t j = below(s);
        return intSg1[j] +
               num::integrateShort([&](double x) { return x * ramp.g1(x); }, nodes[j], s);
    }
};

} // namespace detail

/// Builds the twist profile g = g_k + eps * s together with h_k, h~_k and
/// the zero p0 (k < 0).
inline TwistProfile build_twist_profile(int k, double eps, double pPlateau,
                                        const TwistShape& shape = {})
{
    if (k == 0)
        throw DomainError("twist multiplicity k = 0 describes no twist");
    if (eps < 0)
        throw DomainError("eps must be non-negative, got " + fmt17(eps));
    if (!(pPlateau > 0 && pPlateau < 1))
        throw DomainError("pPlateau must lie in (0, 1), got " + fmt17(pPlateau));
    if (shape.name != "cosine-ramp")
        throw DomainError("unknown twist shape '" + shape.name + "'");
    if (!(shape.sMax > pPlateau))
        throw DomainError("twist domain end must exceed pPlateau");

    const detail::Ramp ramp{static_cast<double>(k), eps, pPlateau, shape.wiggle};
    const Interval dom{0.0, shape.sMax};
    const int scan = 1000;

    for (int i = 1; i < scan; ++i)
    {
        const double s = pPlateau * i / scan;
        if (k * ramp.base1(s) > 1e-12)
            throw DomainError("non-monotone approach to plateau at s = " + fmt17(s));
    }

    TwistProfile tp;
    tp.k = k;
    tp.eps = eps;
    tp.pPlateau = pPlateau;
    tp.shape = shape;
    tp.g = {dom, ProfileKind::ClosedForm, [ramp](double s) { return ramp.g(s); },
            [ramp](double s) { return ramp.g1(s); }, [ramp](double s) { return ramp.g2(s); }};
    tp.f = {dom, ProfileKind::ClosedForm, [ramp](double s) { return ramp.base(s) - ramp.k * kPi; },
            [ramp](double s) { return ramp.base1(s); }, [ramp](double s) { return ramp.base2(s); }};

    auto table = std::make_shared<const detail::PrimitiveTable>(ramp, shape.sMax, shape.tableNodes);
    tp.hk = {dom, ProfileKind::ClosedForm,
             [table](double s) { return 1.0 + table->primitiveSg1(s); },
             [ramp](double s) { return s * ramp.g1(s); },
             [ramp](double s) { return ramp.g1(s) + s * ramp.g2(s); }};
    tp.hTilde = {dom, ProfileKind::ClosedForm,
                 [table](double s) { return 1.0 - table->primitiveG(s); },
                 [ramp](double s) { return -ramp.g(s); }, [ramp](double s) { return -ramp.g1(s); }};

    const auto gFn = [ramp](double s) { return ramp.g(s); };
    int flat = 0;
    for (int i = 0; i <= scan; ++i)
    {
        const double s = shape.sMax * i / scan;
        flat = std::abs(ramp.g(s)) <= 1e-13 ? flat + 1 : 0;
        if (flat >= 2)
            throw DomainError("zero of g is not isolated (g vanishes on an interval near s = " +
                              fmt17(s) + ")");
    }
    const auto brackets = num::signChangeBrackets(gFn, 0.0, shape.sMax, scan);
    if (k > 0)
    {
        if (!brackets.empty())
            throw InvariantError("g has a zero although k > 0");
    }
    else
    {
        if (brackets.size() != 1)
            throw InvariantError("g must change sign exactly once for k < 0, found " +
                                 std::to_string(brackets.size()) + " sign changes");
        const double root = num::bracketedRoot(gFn, [ramp](double s) { return ramp.g1(s); },
                                               brackets[0].lo, brackets[0].hi, 1e-12);
        if (!(ramp.g1(root) > 0))
            throw InvariantError("g'(p0) must be positive");
        tp.p0 = root;
    }

    for (int i = 0; i <= 100; ++i)
    {
        const double s = std::min(1.0, shape.sMax) * i / 100;
        if (!(tp.hk.value(s) > 0))
            throw InvariantError("h_k is not positive at s = " + fmt17(s));
    }
    return tp;
}

/// Shape of the binding pair. "twist-collar" blends the quadratic core into
/// the collar pulled back from the twist region; "quadratic" is h1 = 1 - r^2,
/// h2 = r^2 everywhere; "custom" takes the six evaluators given here.
struct BindingShape
{
    std::string name = "twist-collar";
    double collarStart = 0.25;
    double blendStartFraction = 0.25;
    ScalarFn h1, h1d, h1dd, h2, h2d, h2dd;
};

struct BindingProfile
{
    SmoothProfile h1;
    SmoothProfile h2;
    double r0 = 0.4;
    double rMax = 0.5;
    bool quadraticCore = false;
    bool hasMaximum = true;
    // Collar pullback convention (p-scale kappa, overall form scale C).
    double kappa = 0.0;
    double formScale = 1.0;
    Interval collar{0.0, 0.0};
    double minDetHOverR = 0.0;
    double argMinDetHOverR = 0.0;

    double detH(double r) const { return h1.value(r) * h2.d1(r) - h2.value(r) * h1.d1(r); }
    /// detH' = h1 h2'' - h2 h1''.
    double detH1(double r) const { return h1.value(r) * h2.d2(r) - h2.value(r) * h1.d2(r); }
    double detHOverR(double r) const { return r == 0.0 ? detH1(0.0) : detH(r) / r; }
};

namespace detail
{

inline double smoothstep5(double x)
{
    x = std::clamp(x, 0.0, 1.0);
    return x * x * x * (10 - 15 * x + 6 * x * x);
}
inline double smoothstep5d1(double x)
{
    if (x <= 0 || x >= 1)
        return 0.0;
    return 30 * x * x * (1 - x) * (1 - x);
}
inline double smoothstep5d2(double x)
{
    if (x <= 0 || x >= 1)
        return 0.0;
    return 60 * x * (1 - x) * (1 - 2 * x);
}

} // namespace detail

/// Builds the binding pair and verifies the contact condition on a 10^4 grid.
inline BindingProfile build_binding_profile(double r0, double rMax, const BindingShape& shape = {},
                                            const TwistProfile* tp = nullptr)
{
    if (!(r0 > 0 && r0 < rMax))
        throw DomainError("binding radii must satisfy 0 < r0 < rMax");
    BindingProfile bp;
    bp.r0 = r0;
    bp.rMax = rMax;
    const Interval dom{0.0, rMax};

    if (shape.name == "quadratic")
    {
        bp.h1 = {dom, ProfileKind::ClosedForm, [](double r) { return 1 - r * r; },
                 [](double r) { return -2 * r; }, [](double) { return -2.0; }};
        bp.h2 = {dom, ProfileKind::ClosedForm, [](double r) { return r * r; },
                 [](double r) { return 2 * r; }, [](double) { return 2.0; }};
        bp.quadraticCore = true;
        bp.hasMaximum = false;
    }
    else if (shape.name == "custom")
    {
        if (!shape.h1 || !shape.h1d || !shape.h1dd || !shape.h2 || !shape.h2d || !shape.h2dd)
            throw DomainError("custom binding shape needs h1, h2 and two derivatives of each");
        bp.h1 = {dom, ProfileKind::ClosedForm, shape.h1, shape.h1d, shape.h1dd};
        bp.h2 = {dom, ProfileKind::ClosedForm, shape.h2, shape.h2d, shape.h2dd};
        bp.hasMaximum = false;
    }
    else if (shape.name == "twist-collar")
    {
        if (!tp || !tp->p0)
            throw DomainError("twist-collar binding needs a twist profile with a zero (k < 0)");
        const double rc = shape.collarStart;
        const double a = r0 * shape.blendStartFraction;
        if (!(a < rc && rc < r0 && rc < 1))
            throw DomainError("twist-collar needs blendStart < collarStart < r0");
        const double kappa = r0 * *tp->p0;
        if (kappa / a > tp->hTilde.domain.hi)
            throw DomainError("twist domain too short for the blend region");
        const double C = rc * (1 - rc * rc) / kappa;
        bp.kappa = kappa;
        bp.formScale = C;
        bp.collar = {rc, rMax};
        bp.quadraticCore = true;
        const double w = rc - a;
        const TwistProfile twist = *tp;

        // Collar pieces and derivatives in r (s = kappa / r).
        auto c1 = [=](double r) { return C * kappa / r; };
        auto c1d = [=](double r) { return -C * kappa / (r * r); };
        auto c1dd = [=](double r) { return 2 * C * kappa / (r * r * r); };
        auto c2 = [=](double r) { return C * twist.hTilde.value(kappa / r) / kTwoPi; };
        auto c2d = [=](double r) { return C * twist.g.value(kappa / r) * kappa / (kTwoPi * r * r); };
        auto c2dd = [=](double r) {
            const double s = kappa / r;
            return -C / kTwoPi *
                   (twist.g.d1(s) * kappa * kappa / std::pow(r, 4) +
                    2 * kappa * twist.g.value(s) / std::pow(r, 3));
        };
        auto blend = [=](double r, double core, double cored, double coredd, ScalarFn cv,
                         ScalarFn cd, ScalarFn cdd, int order) {
            if (r <= a)
                return order == 0 ? core : order == 1 ? cored : coredd;
            const double x = (r - a) / w;
            const double chi = detail::smoothstep5(x);
            const double chi1 = detail::smoothstep5d1(x) / w;
            const double chi2 = detail::smoothstep5d2(x) / (w * w);
            const double v = cv(r);
            if (order == 0)
                return (1 - chi) * core + chi * v;
            const double vd = cd(r);
            if (order == 1)
                return (1 - chi) * cored + chi * vd + chi1 * (v - core);
            return (1 - chi) * coredd + chi * cdd(r) + 2 * chi1 * (vd - cored) +
                   chi2 * (v - core);
        };
        bp.h1 = {dom, ProfileKind::ClosedForm,
                 [=](double r) { return blend(r, 1 - r * r, -2 * r, -2, c1, c1d, c1dd, 0); },
                 [=](double r) { return blend(r, 1 - r * r, -2 * r, -2, c1, c1d, c1dd, 1); },
                 [=](double r) { return blend(r, 1 - r * r, -2 * r, -2, c1, c1d, c1dd, 2); }};
        bp.h2 = {dom, ProfileKind::ClosedForm,
                 [=](double r) { return blend(r, r * r, 2 * r, 2, c2, c2d, c2dd, 0); },
                 [=](double r) { return blend(r, r * r, 2 * r, 2, c2, c2d, c2dd, 1); },
                 [=](double r) { return blend(r, r * r, 2 * r, 2, c2, c2d, c2dd, 2); }};
    }
    else
    {
        throw DomainError("unknown binding shape '" + shape.name + "'");
    }

    const double scale = std::max(1.0, std::abs(bp.h1.value(0.0)));
    if (std::abs(bp.detH(0.0)) > 1e-12 * scale)
        throw InvariantError("detH/r does not extend continuously to r = 0 (detH(0) = " +
                             fmt17(bp.detH(0.0)) + ")");
    const int grid = 10000;
    bp.minDetHOverR = bp.detHOverR(0.0);
    double sign = bp.minDetHOverR >= 0 ? 1.0 : -1.0;
    for (int i = 0; i <= grid; ++i)
    {
        const double r = rMax * i / grid;
        if (std::abs(bp.h1.value(r)) <= 1e-12)
            throw InvariantError("h1 vanishes at r = " + fmt17(r));
        const double c = bp.detHOverR(r);
        if (std::abs(c) <= 1e-12 || c * sign < 0)
            throw InvariantError("contact condition fails: detH/r vanishes or changes sign at r = " +
                                 fmt17(r));
        if (std::abs(c) < std::abs(bp.minDetHOverR) || i == 0)
        {
            bp.minDetHOverR = std::abs(c);
            bp.argMinDetHOverR = r;
        }
    }

    if (bp.hasMaximum)
    {
        if (std::abs(bp.h2.d1(r0)) > 1e-10)
            throw InvariantError("h2'(r0) = " + fmt17(bp.h2.d1(r0)) + " is not zero");
        const double top = bp.h2.value(r0);
        for (int i = 0; i <= 1000; ++i)
        {
            const double r = rMax * i / 1000;
            if (bp.h2.value(r) > top + 1e-14)
                throw InvariantError("h2 exceeds h2(r0) at r = " + fmt17(r));
        }
    }
    return bp;
}

struct PullbackReport
{
    bool ok = false;
    double maxMismatch = 0.0;
    double worstRadius = 0.0;
    double kappa = 0.0;
    double formScale = 1.0;
    double anglePeriod = kTwoPi;
    int radiiChecked = 0;
    std::string message;
};

/// Compares (h1, h2) with the pullback of h~(|p|) dphi + p dq under
/// (q, p, r, phi) -> (q, kappa p / r, phi / 2pi), scaled by C, on `collar`.
inline PullbackReport pullback_consistency_check(const TwistProfile& tp, const BindingProfile& bp,
                                                 Interval collar)
{
    PullbackReport rep;
    if (!(collar.lo > 0 && collar.hi < bp.rMax + 1e-14 && collar.lo <= collar.hi))
        throw DomainError("collar must lie inside (0, rMax]");
    rep.kappa = bp.kappa > 0 ? bp.kappa : (tp.p0 ? bp.r0 * *tp.p0 : 1.0);
    rep.formScale = bp.formScale;
    const double kappa = rep.kappa;
    const double C = rep.formScale;
    const int count = collar.width() == 0.0 ? 1 : 1001;
    for (int i = 0; i < count; ++i)
    {
        const double r = count == 1 ? collar.lo : collar.lo + collar.width() * i / (count - 1);
        const double s = kappa / r;
        if (s > tp.hTilde.domain.hi)
        {
            rep.maxMismatch = std::numeric_limits<double>::infinity();
            rep.worstRadius = r;
            break;
        }
        const double e1 = std::abs(bp.h1.value(r) - C * kappa / r);
        const double e2 = std::abs(bp.h2.value(r) - C * tp.hTilde.value(s) / kTwoPi);
        const double e = std::max(e1, e2);
        if (e > rep.maxMismatch || i == 0)
        {
            rep.maxMismatch = e;
            rep.worstRadius = r;
        }
        ++rep.radiiChecked;
    }
    rep.ok = rep.maxMismatch <= 1e-8;
    rep.message = rep.ok ? "pullback matches on collar"
                         : "pullback mismatch " + fmt17(rep.maxMismatch) + " at r = " +
                               fmt17(rep.worstRadius);
    return rep;
}

} // namespace dehn
