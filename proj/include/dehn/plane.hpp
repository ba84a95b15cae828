// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0
//
// The explicit finite-energy plane u(rho, psi) = (psi, q, p, r(rho), t(rho))
// asymptotic to the principal orbit, and its d(alpha)-energy.
#pragma once

#include "dehn/common.hpp"
#include "dehn/numerics.hpp"
#include "dehn/profiles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace dehn
{

struct PlaneOptions
{
    double tolAsym = 1e-6;
    double rhoMin = 1e-8;
    double sigmaStep = 0.01;
    double sigmaLimit = 200.0;
    num::OdeTolerance ode{1e-13, 1e-13};
    int n = 3;
};

/// Samples are uniform in sigma = log rho.
struct PlaneSolution
{
    std::vector<double> sigmaGrid;
    std::vector<double> rhoGrid;
    std::vector<double> rVals;
    std::vector<double> tVals;
    double rInit = 0.0;
    double tShift = 0.0;
    double tAtZero = 0.0;
    Eigen::VectorXd qFixed;
    Eigen::VectorXd pFixed;

    std::size_t size() const { return rVals.size(); }

    /// Hermite cubic r(sigma) with node slopes h2'(r); returns (r, dr/dsigma).
    std::pair<double, double> rAtSigma(const BindingProfile& bp, double sigma) const
    {
        if (sigmaGrid.size() < 2)
            return {rVals.front(), 0.0};
        const double lo = sigmaGrid.front();
        const double h = sigmaGrid[1] - sigmaGrid[0];
        std::size_t j = static_cast<std::size_t>(std::floor((sigma - lo) / h));
        j = std::min(j, sigmaGrid.size() - 2);
        const double x = (sigma - sigmaGrid[j]) / h;
        const double y0 = rVals[j];
        const double y1 = rVals[j + 1];
        const double m0 = bp.h2.d1(y0) * h;
        const double m1 = bp.h2.d1(y1) * h;
        const double x2 = x * x;
        const double x3 = x2 * x;
        const double r = (2 * x3 - 3 * x2 + 1) * y0 + (x3 - 2 * x2 + x) * m0 +
                         (-2 * x3 + 3 * x2) * y1 + (x3 - x2) * m1;
        const double dr = ((6 * x2 - 6 * x) * y0 + (3 * x2 - 4 * x + 1) * m0 +
                           (-6 * x2 + 6 * x) * y1 + (3 * x2 - 2 * x) * m1) /
                          h;
        return {r, dr};
    }

    /// Sub-solution with sample indices [first, last].
    PlaneSolution slice(std::size_t first, std::size_t last) const
    {
        PlaneSolution s = *this;
        auto cut = [&](std::vector<double>& v) {
            v = std::vector<double>(v.begin() + first, v.begin() + last + 1);
        };
        cut(s.sigmaGrid);
        cut(s.rhoGrid);
        cut(s.rVals);
        cut(s.tVals);
        return s;
    }
};

inline void validatePlane(const BindingProfile& bp, const PlaneSolution& sol)
{
    for (std::size_t j = 1; j < sol.size(); ++j)
        if (!(sol.rVals[j] > sol.rVals[j - 1]))
            throw InvariantError("plane radius is not strictly increasing at rho = " +
                                 fmt17(sol.rhoGrid[j]));
    for (double r : sol.rVals)
        if (r > bp.r0 + 1e-12)
            throw InvariantError("plane radius " + fmt17(r) + " exceeds r0");
}

/// Integrates dr/dsigma = h2'(r), dt/dsigma = h2(r) from rho = 1 forward until
/// r0 - r < tolAsym (or to rhoMax when positive) and backward to rhoMin.
inline PlaneSolution solve_plane(const BindingProfile& bp, double rAt1, double rhoMax = 0.0,
                                 const PlaneOptions& opt = {})
{
    if (!(rAt1 > 0 && rAt1 < bp.r0))
        throw DomainError("solve_plane needs rAt1 in (0, r0); r0 itself is the trivial cylinder");
    if (!bp.hasMaximum)
        throw DomainError("solve_plane needs a binding profile with a maximum of h2");
    const double hs = opt.sigmaStep;

    auto fwd = [&bp](const num::State& y, num::State& d, double) {
        d.resize(2);
        const double r = std::min(y[0], bp.r0);
        d[0] = bp.h2.d1(r);
        d[1] = bp.h2.value(r);
    };
    auto bwd = [&bp](const num::State& y, num::State& d, double) {
        d.resize(2);
        const double r = std::max(y[0], 0.0);
        d[0] = -bp.h2.d1(r);
        d[1] = -bp.h2.value(r);
    };

    // Backward: sigma from 0 down to log(rhoMin).
    const int nBack = static_cast<int>(std::ceil(-std::log(opt.rhoMin) / hs - 1e-9));
    std::vector<double> backTimes(nBack + 1);
    for (int j = 0; j <= nBack; ++j)
        backTimes[j] = j * hs;
    // r shrinks like rho^2 here, so only a relative tolerance makes sense.
    const auto back = num::integrateAt(bwd, {rAt1, 0.0}, backTimes, {1e-300, opt.ode.rel});

    // Forward in unit chunks of sigma until the asymptotic test holds.
    std::vector<num::State> ahead{{rAt1, 0.0}};
    const double sigmaEnd = rhoMax > 0 ? std::log(rhoMax) : opt.sigmaLimit;
    const int perChunk = static_cast<int>(std::lround(1.0 / hs));
    const int totalSteps = static_cast<int>(std::ceil(sigmaEnd / hs - 1e-9));
    int done = 0;
    while (true)
    {
        if (rhoMax <= 0 && bp.r0 - ahead.back()[0] < opt.tolAsym)
            break;
        if (done >= totalSteps)
        {
            if (rhoMax <= 0)
                throw NumericalError("plane did not reach r0 - r < tolAsym before sigma = " +
                                     fmt17(sigmaEnd));
            break;
        }
        const int steps = std::min(perChunk, totalSteps - done);
        std::vector<double> times(steps + 1);
        for (int j = 0; j <= steps; ++j)
            times[j] = (done + j) * hs;
        const auto part = num::integrateAt(fwd, ahead.back(), times, opt.ode);
        ahead.insert(ahead.end(), part.begin() + 1, part.end());
        done += steps;
        if (rhoMax <= 0)
        {
            // Trim to the first sample meeting the asymptotic test.
            for (std::size_t j = ahead.size() - part.size() + 1; j < ahead.size(); ++j)
                if (bp.r0 - ahead[j][0] < opt.tolAsym)
                {
                    ahead.resize(j + 1);
                    done = static_cast<int>(j);
                    break;
                }
        }
    }

    PlaneSolution sol;
    sol.rInit = rAt1;
    for (int j = nBack; j >= 1; --j)
    {
        sol.sigmaGrid.push_back(-j * hs);
        sol.rVals.push_back(back[j][0]);
        sol.tVals.push_back(back[j][1]);
    }
    for (std::size_t j = 0; j < ahead.size(); ++j)
    {
        sol.sigmaGrid.push_back(static_cast<double>(j) * hs);
        sol.rVals.push_back(ahead[j][0]);
        sol.tVals.push_back(ahead[j][1]);
    }
    for (double s : sol.sigmaGrid)
        sol.rhoGrid.push_back(std::exp(s));
    sol.tAtZero = sol.tVals.front() - sol.rVals.front() * sol.rVals.front() / 4;
    sol.qFixed = Eigen::VectorXd::Unit(opt.n, 0);
    sol.pFixed = Eigen::VectorXd::Unit(opt.n, 1);
    validatePlane(bp, sol);
    return sol;
}

struct PlaneEnergy
{
    double stokes = 0.0;
    double quadrature = 0.0;
    double relativeGap = 0.0;
};

/// Stokes value 2 pi (h2(r_last) - h2(r_first)) and the direct integral of
/// u* d(alpha) = h2'(r) r'(sigma) dsigma dpsi; throws if they disagree.
inline PlaneEnergy plane_energy_report(const BindingProfile& bp, const PlaneSolution& sol,
                                       int psiPoints = 64)
{
    PlaneEnergy e;
    if (sol.size() < 2)
        return e;
    e.stokes = kTwoPi * (bp.h2.value(sol.rVals.back()) - bp.h2.value(sol.rVals.front()));
    double radial = 0.0;
    for (std::size_t j = 0; j + 1 < sol.size(); ++j)
        radial += num::gaussLegendre(
            [&](double s) {
                const auto [r, dr] = sol.rAtSigma(bp, s);
                return bp.h2.d1(r) * dr;
            },
            sol.sigmaGrid[j], sol.sigmaGrid[j + 1], 1);
    // The integrand does not depend on psi; the periodic trapezoid is exact.
    double angular = 0.0;
    for (int k = 0; k < psiPoints; ++k)
        angular += kTwoPi / psiPoints;
    e.quadrature = angular * radial;
    const double scale = std::max(std::abs(e.stokes), 1e-300);
    e.relativeGap = std::abs(e.stokes - e.quadrature) / scale;
    if (e.relativeGap > 1e-6)
        throw NumericalError("plane energy: Stokes " + fmt17(e.stokes) + " and quadrature " +
                             fmt17(e.quadrature) + " disagree");
    return e;
}

inline double plane_energy(const BindingProfile& bp, const PlaneSolution& sol)
{
    return plane_energy_report(bp, sol).stokes;
}

} // namespace dehn
