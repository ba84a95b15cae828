// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Thin numerical layer: quadrature, bracketed roots and ODE integration.
// Quadrature and Runge-Kutta stepping are delegated to Boost.Math and
// Boost.Odeint; this header only fixes tolerances and the calling shapes the
// rest of the library uses.
#pragma once

#include "dehn/common.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

namespace dehn::num
{

using State = std::vector<double>;
using Rhs = std::function<void(const State&, State&, double)>;

/// Adaptive Gauss-Kronrod (7/15) integral of f over [a, b].
template<class F>
double integrate(F&& f, double a, double b, double absTol = 1e-12)
{
    if (a == b)
        return 0.0;
    double err = 0.0;
    double L1 = 0.0;
    // Boost's tolerance is relative to the L1 norm; tighten it until the
    // absolute target is met or the depth budget is exhausted.
    const double res = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 15, 1e-12, &err, &L1);
    if (!(err <= std::max(absTol, 1e-12 * L1) * 10.0))
        throw NumericalError("Gauss-Kronrod quadrature did not converge (error estimate " +
                             fmt17(err) + ")");
    return res;
}

/// Fixed 15-point Kronrod rule on a short interval where f is smooth.
template<class F>
double integrateShort(F&& f, double a, double b)
{
    if (a == b)
        return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0);
}

/// Composite Gauss-Legendre rule with `panels` equal panels of 10 points.
template<class F>
double gaussLegendre(F&& f, double a, double b, int panels)
{
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int i = 0; i < panels; ++i)
        sum += boost::math::quadrature::gauss<double, 10>::integrate(f, a + i * h, a + (i + 1) * h);
    return sum;
}

/// Bisection to a tight bracket followed by Newton polishing.
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them vanish).
inline double bracketedRoot(const std::function<double(double)>& f,
                            const std::function<double(double)>& df, double lo, double hi,
                            double residualTol = 1e-12)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if ((flo > 0) == (fhi > 0))
        throw DomainError("bracketedRoot: no sign change on [" + fmt17(lo) + ", " + fmt17(hi) + "]");
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it)
    {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0)
            return mid;
        if ((fm > 0) == (flo > 0))
        {
            lo = mid;
            flo = fm;
        }
        else
        {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    const double a = lo;
    const double b = hi;
    for (int it = 0; it < 20; ++it)
    {
        const double fx = f(x);
        if (std::abs(fx) <= residualTol * 1e-3)
            break;
        const double d = df(x);
        if (d == 0.0)
            break;
        const double next = x - fx / d;
        // Stay inside the bracket; Newton only polishes.
        if (next < a - 1e-12 || next > b + 1e-12)
            break;
        x = next;
    }
    if (std::abs(f(x)) > residualTol)
        throw NumericalError("bracketedRoot: residual " + fmt17(f(x)) + " above tolerance");
    return x;
}

/// Brackets of sign changes of f found by scanning `points` equally spaced samples.
inline std::vector<Interval> signChangeBrackets(const std::function<double(double)>& f, double lo,
                                                double hi, int points)
{
    std::vector<Interval> out;
    double xPrev = lo;
    double fPrev = f(lo);
    for (int i = 1; i <= points; ++i)
    {
        const double x = lo + (hi - lo) * i / points;
        const double fx = f(x);
        if ((fPrev < 0 && fx > 0) || (fPrev > 0 && fx < 0) || (fx == 0.0 && fPrev != 0.0))
            out.push_back({xPrev, x});
        xPrev = x;
        fPrev = fx;
    }
    return out;
}

struct OdeTolerance
{
    double abs = 1e-10;
    double rel = 1e-10;
};

/// Integrates y' = rhs(y, s) from s0 and returns the state at each requested
/// abscissa (monotone, starting at s0). Dormand-Prince 5(4) with dense output.
inline std::vector<State> integrateAt(const Rhs& rhs, State y0, const std::vector<double>& times,
                                      OdeTolerance tol = {})
{
    namespace odeint = boost::numeric::odeint;
    std::vector<State> out;
    out.reserve(times.size());
    if (times.empty())
        return out;
    if (times.size() == 1)
    {
        out.push_back(y0);
        return out;
    }
    auto stepper = odeint::make_dense_output(tol.abs, tol.rel, odeint::runge_kutta_dopri5<State>());
    const double dt0 = (times[1] - times[0]) * 0.1;
    try
    {
        odeint::integrate_times(stepper, rhs, y0, times.begin(), times.end(), dt0,
                                [&](const State& y, double) { out.push_back(y); });
    }
    catch (const odeint::step_adjustment_error& e)
    {
        throw NumericalError(std::string("integrator step underflow: ") + e.what());
    }
    return out;
}

/// Integrates from s0 to s1 and returns the final state.
inline State integrateTo(const Rhs& rhs, State y0, double s0, double s1, OdeTolerance tol = {})
{
    if (s0 == s1)
        return y0;
    return integrateAt(rhs, std::move(y0), {s0, s1}, tol).back();
}

/// Controlled stepping with a user projection applied after every accepted
/// step. Returns the final state; throws on step-size underflow.
inline State integrateProjected(const Rhs& rhs, State y, double s0, double s1,
                                const std::function<void(State&)>& project, OdeTolerance tol = {},
                                int* acceptedSteps = nullptr)
{
    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_controlled(tol.abs, tol.rel, odeint::runge_kutta_dopri5<State>());
    double s = s0;
    double dt = (s1 - s0) * 1e-3;
    const double minDt = std::abs(s1 - s0) * 1e-14;
    int accepted = 0;
    while ((s1 - s) * (s1 > s0 ? 1 : -1) > 0)
    {
        if ((s + dt - s1) * (s1 > s0 ? 1 : -1) > 0)
            dt = s1 - s;
        const auto res = stepper.try_step(rhs, y, s, dt);
        if (res == odeint::success)
        {
            project(y);
            ++accepted;
        }
        else if (std::abs(dt) < minDt)
        {
            throw NumericalError("projected integration: step size underflow at s = " + fmt17(s));
        }
        if (accepted > 10000000)
            throw NumericalError("projected integration: step budget exhausted");
    }
    if (acceptedSteps)
        *acceptedSteps = accepted;
    return y;
}

/// Uniform grid of `count` points on [a, b] inclusive.
inline std::vector<double> linspace(double a, double b, int count)
{
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i)
        v[i] = count == 1 ? a : a + (b - a) * i / (count - 1);
    return v;
}

} // namespace dehn::num
