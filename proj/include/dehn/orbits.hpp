// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Morse-Bott families of closed Reeb orbits: levels where g is a rational
// multiple of 2 pi, their periods and actions, the topology of the orbit
// space and a direct closure check by flowing the Reeb field.
#pragma once

#include "dehn/common.hpp"
#include "dehn/geometry.hpp"
#include "dehn/numerics.hpp"
#include "dehn/profiles.hpp"

#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace dehn
{

struct OrbitLevel
{
    double pLevel = 0.0;
    double gValue = 0.0;
    int a = 0;
    int m = 1;
    int i = 1;
    double period = 0.0;
    double action = 0.0;
    bool isPrincipal = false;
    std::optional<double> bindingRadius;
};

inline void validateLevel(const OrbitLevel& lv)
{
    const double turns = lv.m * lv.gValue / kTwoPi;
    if (std::abs(turns - std::round(turns)) > 1e-9)
        throw InvariantError("m * g / 2pi is not an integer at p = " + fmt17(lv.pLevel));
    if (lv.isPrincipal != (std::abs(lv.gValue) <= 1e-12))
        throw InvariantError("principal flag inconsistent with g at p = " + fmt17(lv.pLevel));
    if (lv.isPrincipal && lv.m != 1)
        throw InvariantError("principal level must have m = 1");
    if (lv.i % lv.m != 0)
        throw InvariantError("turn count i must be divisible by m");
}

namespace detail
{

inline OrbitLevel makeLevel(const TwistProfile& tp, double s, int a, int b, double formScale,
                            double kappa)
{
    OrbitLevel lv;
    lv.pLevel = s;
    lv.a = a;
    lv.m = b;
    lv.i = b;
    lv.gValue = a == 0 ? tp.g.value(s) : kTwoPi * a / b;
    lv.isPrincipal = a == 0;
    lv.period = tp.hk.value(s) * b;
    lv.action = formScale * lv.period;
    if (kappa > 0)
        lv.bindingRadius = kappa / s;
    return lv;
}

} // namespace detail

/// The family where g vanishes. `formScale` and `kappa` come from the binding
/// collar (1 and 0 give the bare mapping-torus values).
inline OrbitLevel find_principal_level(const TwistProfile& tp, double formScale = 1.0,
                                       double kappa = 0.0)
{
    if (tp.k > 0 || !tp.p0)
        throw DomainError("no principal level: g has no zero for k > 0");
    OrbitLevel lv = detail::makeLevel(tp, *tp.p0, 0, 1, formScale, kappa);
    if (std::abs(lv.gValue) > 1e-12)
        throw InvariantError("principal level residual " + fmt17(lv.gValue) + " above 1e-12");
    lv.gValue = 0.0;
    validateLevel(lv);
    return lv;
}

/// The i-fold cover of a level.
inline OrbitLevel coverLevel(const OrbitLevel& lv, int i)
{
    if (i < 1)
        throw DomainError("cover multiplicity must be at least 1");
    OrbitLevel out = lv;
    out.i = lv.i * i;
    out.period = lv.period * i;
    out.action = lv.action * i;
    return out;
}

/// All levels with g = 2 pi a / b (reduced, b <= denomCap) and action at most
/// actionBound, sorted by action.
inline std::vector<OrbitLevel> enumerate_orbit_levels(const TwistProfile& tp, double actionBound,
                                                      int denomCap, double formScale = 1.0,
                                                      double kappa = 0.0)
{
    if (!(actionBound > 0))
        throw DomainError("actionBound must be positive");
    if (denomCap < 1)
        throw DomainError("denomCap must be at least 1");
    const double lo = 0.0;
    const double hi = tp.g.domain.hi;
    double gMin = tp.g.value(lo);
    double gMax = gMin;
    for (int j = 0; j <= 1000; ++j)
    {
        const double v = tp.g.value(lo + (hi - lo) * j / 1000);
        gMin = std::min(gMin, v);
        gMax = std::max(gMax, v);
    }
    std::vector<OrbitLevel> out;
    for (int b = 1; b <= denomCap; ++b)
    {
        const int aLo = static_cast<int>(std::floor(gMin * b / kTwoPi));
        const int aHi = static_cast<int>(std::ceil(gMax * b / kTwoPi));
        for (int a = aLo; a <= aHi; ++a)
        {
            if (std::gcd(a, b) != 1 && !(a == 0 && b == 1))
                continue;
            const double target = kTwoPi * a / b;
            auto f = [&](double s) { return tp.g.value(s) - target; };
            auto df = [&](double s) { return tp.g.d1(s); };
            for (const Interval& br : num::signChangeBrackets(f, lo, hi, 1000))
            {
                const double s = num::bracketedRoot(f, df, br.lo, br.hi, 1e-12);
                if (s < 1e-9)
                    continue;
                OrbitLevel lv = detail::makeLevel(tp, s, a, b, formScale, kappa);
                if (a != 0)
                    lv.gValue = target;
                else
                    lv.gValue = 0.0;
                if (lv.action <= actionBound)
                {
                    validateLevel(lv);
                    out.push_back(lv);
                }
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const OrbitLevel& x, const OrbitLevel& y) {
        return x.action != y.action ? x.action < y.action : x.pLevel < y.pLevel;
    });
    return out;
}

struct OrbitSpaceReport
{
    int n = 0;
    std::string space = "unit cotangent bundle ST*S^{n-1}";
    std::map<int, int> bettiRanks;
    bool degenerate = false;
    std::string note;
};

/// Rational homology of ST*S^{n-1}.
inline OrbitSpaceReport orbit_space_homology(int n)
{
    if (n < 2)
        throw DomainError("orbit_space_homology needs n >= 2");
    OrbitSpaceReport rep;
    rep.n = n;
    if (n == 2)
    {
        rep.degenerate = true;
        rep.bettiRanks = {{0, 2}, {1, 2}};
        rep.note = "n = 2: ST*S^1 is two circles; the general rank formulas do not apply";
        return rep;
    }
    const int top = 2 * n - 3;
    if (n % 2 == 1)
        rep.bettiRanks = {{0, 1}, {top, 1}};
    else
        rep.bettiRanks = {{0, 1}, {n - 2, 1}, {n - 1, 1}, {top, 1}};
    return rep;
}

struct ClosureReport
{
    double radius = 0.0;
    double period = 0.0;
    double distance = 0.0;
    double phiAdvance = 0.0;
    int steps = 0;
    bool passed = false;
};

/// Flows R_alpha from a random point at the level's binding radius for one
/// claimed period (the action) and measures the distance to the start.
inline ClosureReport verify_closure_by_flow(const BindingProfile& bp, const OrbitLevel& level,
                                            double tol, int n = 3, std::uint64_t seed = 1)
{
    if (!(level.action > 0))
        throw DomainError("verify_closure_by_flow: period must be positive");
    if (!level.bindingRadius)
        throw DomainError("verify_closure_by_flow: level has no binding radius");
    const double r = *level.bindingRadius;
    if (!(r >= bp.collar.lo - 1e-14 && r <= bp.rMax + 1e-14))
        throw DomainError("verify_closure_by_flow: radius " + fmt17(r) +
                          " is outside the binding collar");
    std::mt19937_64 rng(seed);
    BindingPoint x0 = randomBindingPoint(n, r, r, rng);
    x0.r = r;
    const TangentVector R = reeb_field_binding(bp, x0);
    const double cl = x0.p.dot(R.dq);
    const double cphi = R.dphi;

    num::State y(2 * n + 1);
    for (int j = 0; j < n; ++j)
    {
        y[j] = x0.q[j];
        y[n + j] = x0.p[j];
    }
    y[2 * n] = x0.phi;
    auto rhs = [n, cl, cphi](const num::State& s, num::State& d, double) {
        d.resize(s.size());
        for (int j = 0; j < n; ++j)
        {
            d[j] = cl * s[n + j];
            d[n + j] = -cl * s[j];
        }
        d[2 * n] = cphi;
    };
    auto project = [n](num::State& s) {
        Eigen::Map<Vec> q(s.data(), n);
        Eigen::Map<Vec> p(s.data() + n, n);
        q.normalize();
        p -= p.dot(q) * q;
        p.normalize();
    };
    ClosureReport rep;
    rep.radius = r;
    rep.period = level.action;
    const num::State yT =
        num::integrateProjected(rhs, y, 0.0, level.action, project, {1e-10, 1e-10}, &rep.steps);
    double dist = 0.0;
    for (int j = 0; j < 2 * n; ++j)
        dist = std::max(dist, std::abs(yT[j] - y[j]));
    rep.phiAdvance = yT[2 * n] - y[2 * n];
    const double turns = rep.phiAdvance / kTwoPi;
    dist = std::max(dist, kTwoPi * std::abs(turns - std::round(turns)));
    rep.distance = dist;
    rep.passed = dist <= tol;
    return rep;
}

} // namespace dehn
