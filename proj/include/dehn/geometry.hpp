// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Points and tangent vectors of the binding model ST*S^{n-1} x D^2 and its
// symplectization, with the contact form, Reeb fields and the almost complex
// structure J. Vectors q, p live in ambient R^n.
#pragma once

#include "dehn/common.hpp"
#include "dehn/profiles.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace dehn
{

using Vec = Eigen::VectorXd;

struct BindingPoint
{
    int n = 2;
    Vec q;
    Vec p;
    double r = 0.0;
    double phi = 0.0;

    double constraintResidual() const
    {
        return std::max({std::abs(q.dot(q) - 1), std::abs(p.dot(p) - 1), std::abs(q.dot(p))});
    }
    void validate(double tol = 1e-10) const
    {
        if (q.size() != n || p.size() != n || n < 2)
            throw DomainError("binding point vectors must have length n >= 2");
        if (constraintResidual() > tol)
            throw DomainError("binding point violates q.q = p.p = 1, q.p = 0 (residual " +
                              fmt17(constraintResidual()) + ")");
    }
};

struct SymplPoint
{
    BindingPoint base;
    double t = 0.0;
};

struct TangentVector
{
    double dphi = 0.0;
    Vec dq;
    Vec dp;
    double dr = 0.0;
    double dt = 0.0;

    static TangentVector zero(int n)
    {
        TangentVector v;
        v.dq = Vec::Zero(n);
        v.dp = Vec::Zero(n);
        return v;
    }
    TangentVector& operator+=(const TangentVector& o)
    {
        dphi += o.dphi;
        dq += o.dq;
        dp += o.dp;
        dr += o.dr;
        dt += o.dt;
        return *this;
    }
    TangentVector operator+(const TangentVector& o) const { return TangentVector(*this) += o; }
    TangentVector operator-(const TangentVector& o) const { return *this + o * -1.0; }
    TangentVector operator*(double c) const
    {
        TangentVector v = *this;
        v.dphi *= c;
        v.dq *= c;
        v.dp *= c;
        v.dr *= c;
        v.dt *= c;
        return v;
    }
    double maxAbs() const
    {
        return std::max({std::abs(dphi), dq.cwiseAbs().maxCoeff(), dp.cwiseAbs().maxCoeff(),
                         std::abs(dr), std::abs(dt)});
    }
};

inline TangentVector operator*(double c, const TangentVector& v) { return v * c; }

/// Residual of q.dq = 0, p.dp = 0, p.dq + q.dp = 0.
inline double tangencyResidual(const BindingPoint& x, const TangentVector& v)
{
    return std::max({std::abs(x.q.dot(v.dq)), std::abs(x.p.dot(v.dp)),
                     std::abs(x.p.dot(v.dq) + x.q.dot(v.dp))});
}

/// R_lambda = p d/dq - q d/dp.
inline TangentVector liouvilleReeb(const BindingPoint& x)
{
    TangentVector v = TangentVector::zero(x.n);
    v.dq = x.p;
    v.dp = -x.q;
    return v;
}

inline TangentVector unitField(int n, double dphi, double dr, double dt)
{
    TangentVector v = TangentVector::zero(n);
    v.dphi = dphi;
    v.dr = dr;
    v.dt = dt;
    return v;
}

// ---- random sampling ----------------------------------------------------

inline BindingPoint randomBindingPoint(int n, double rMin, double rMax, std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    BindingPoint x;
    x.n = n;
    x.q = Vec(n);
    x.p = Vec(n);
    for (int i = 0; i < n; ++i)
        x.q[i] = gauss(rng);
    x.q.normalize();
    do
    {
        for (int i = 0; i < n; ++i)
            x.p[i] = gauss(rng);
        x.p -= x.p.dot(x.q) * x.q;
    } while (x.p.norm() < 1e-6);
    x.p.normalize();
    x.r = rMin + (rMax - rMin) * uni(rng);
    x.phi = kTwoPi * uni(rng);
    return x;
}

/// Projects ambient Gaussian (dq, dp) onto the constraint tangent space.
inline TangentVector randomTangent(const BindingPoint& x, std::mt19937_64& rng, bool withT = true)
{
    std::normal_distribution<double> gauss;
    TangentVector v = TangentVector::zero(x.n);
    for (int i = 0; i < x.n; ++i)
    {
        v.dq[i] = gauss(rng);
        v.dp[i] = gauss(rng);
    }
    v.dq -= x.q.dot(v.dq) * x.q;
    v.dp -= x.p.dot(v.dp) * x.p;
    const double c = x.p.dot(v.dq) + x.q.dot(v.dp);
    v.dq -= 0.5 * c * x.p;
    v.dp -= 0.5 * c * x.q;
    v.dphi = gauss(rng);
    v.dr = gauss(rng);
    v.dt = withT ? gauss(rng) : 0.0;
    return v;
}

// ---- contact form -------------------------------------------------------

/// alpha = h1(r) p.dq + h2(r) dphi.
inline double alpha(const BindingProfile& bp, const BindingPoint& x, const TangentVector& v)
{
    return bp.h1.value(x.r) * x.p.dot(v.dq) + bp.h2.value(x.r) * v.dphi;
}

/// Exact d(alpha)(v, w).
inline double dAlpha(const BindingProfile& bp, const BindingPoint& x, const TangentVector& v,
                     const TangentVector& w)
{
    const double lv = x.p.dot(v.dq);
    const double lw = x.p.dot(w.dq);
    return bp.h1.d1(x.r) * (v.dr * lw - w.dr * lv) +
           bp.h1.value(x.r) * (v.dp.dot(w.dq) - w.dp.dot(v.dq)) +
           bp.h2.d1(x.r) * (v.dr * w.dphi - w.dr * v.dphi);
}

/// d(alpha)(v, w) by extrapolated central differences of alpha along the straight
/// ambient flows of v and w.
inline double dAlphaFiniteDiff(const BindingProfile& bp, const BindingPoint& x,
                               const TangentVector& v, const TangentVector& w, double h = 1e-5)
{
    auto shifted = [&](const TangentVector& d, double s) {
        BindingPoint y = x;
        y.q = x.q + s * d.dq;
        y.p = x.p + s * d.dp;
        y.r = x.r + s * d.dr;
        y.phi = x.phi + s * d.dphi;
        return y;
    };
    auto central = [&](double step) {
        const double dvw =
            (alpha(bp, shifted(v, step), w) - alpha(bp, shifted(v, -step), w)) / (2 * step);
        const double dwv =
            (alpha(bp, shifted(w, step), v) - alpha(bp, shifted(w, -step), v)) / (2 * step);
        return dvw - dwv;
    };
    // One Richardson step removes the h^2 term.
    return (4 * central(h) - central(2 * h)) / 3;
}

// ---- Reeb fields --------------------------------------------------------

/// R_alpha = (h2' R_lambda - h1' d/dphi) / detH, with the r -> 0 limit.
inline TangentVector reeb_field_binding(const BindingProfile& bp, const BindingPoint& x)
{
    if (x.r < 0 || x.r > bp.rMax * (1 + 1e-14))
        throw DomainError("reeb_field_binding: r = " + fmt17(x.r) + " outside [0, rMax]");
    double cl = 0.0;
    double cphi = 0.0;
    if (x.r < 1e-8)
    {
        const double h10 = bp.h1.value(0.0);
        cl = 1.0 / h10;
        cphi = -bp.h1.d2(0.0) / (h10 * bp.h2.d2(0.0));
    }
    else
    {
        const double d = bp.detH(x.r);
        if (d == 0.0)
            throw SingularityError("detH vanishes", x.r);
        cl = bp.h2.d1(x.r) / d;
        cphi = -bp.h1.d1(x.r) / d;
    }
    TangentVector v = liouvilleReeb(x) * cl;
    v.dphi = cphi;
    return v;
}

struct TildeReebData
{
    double s = 0.0;
    double N = 0.0;
    double g = 0.0;
};

/// Coefficients of R = N d/dphi + g G in the mapping-torus model.
inline TildeReebData reeb_field_tilde(const TwistProfile& tp, double s)
{
    if (!(s >= 0))
        throw DomainError("reeb_field_tilde: s must be non-negative");
    const double ht = tp.hTilde.value(s);
    const double htd = tp.hTilde.d1(s);
    const double den = ht - s * htd;
    if (std::abs(den) < 1e-14)
        throw SingularityError("h~ - s h~' vanishes", s);
    TildeReebData out;
    out.s = s;
    out.N = 1.0 / den;
    out.g = out.N * htd;
    return out;
}

/// Tilde-model Reeb field pushed to the binding collar, divided by the form
/// scale so that it compares with R_alpha directly.
inline TangentVector pushforwardTildeReeb(const TwistProfile& tp, const BindingProfile& bp,
                                          const BindingPoint& x)
{
    const TildeReebData d = reeb_field_tilde(tp, bp.kappa / x.r);
    TangentVector v = liouvilleReeb(x) * (-d.g);
    v.dphi = kTwoPi * d.N;
    return v * (1.0 / bp.formScale);
}

// ---- almost complex structure ------------------------------------------

/// J in coordinates (phi, q, p, r, t). J d/dt = R_alpha,
/// J d/dr = (-h2 R_lambda + h1 d/dphi) / detH, J(r_l d/dq) = -r_l d/dp.
inline TangentVector apply_J(const BindingProfile& bp, const SymplPoint& xs, const TangentVector& v)
{
    const BindingPoint& x = xs.base;
    if (tangencyResidual(x, v) > 1e-8)
        throw DomainError("apply_J: vector is not tangent (residual " +
                          fmt17(tangencyResidual(x, v)) + ")");
    if (x.r <= 0)
        throw SingularityError("apply_J: polar coordinates degenerate at r = 0", x.r);
    const double h1 = bp.h1.value(x.r);
    const double h2 = bp.h2.value(x.r);
    const double h1d = bp.h1.d1(x.r);
    const double h2d = bp.h2.d1(x.r);
    const double D = bp.detH(x.r);
    const int n = x.n;

    const double a = x.p.dot(v.dq);
    const Vec xq = v.dq - a * x.p - x.q.dot(v.dq) * x.q;
    const Vec xp = v.dp + a * x.q - x.p.dot(v.dp) * x.p;

    TangentVector out = TangentVector::zero(n);
    out.dq = xp;
    out.dp = -xq;
    // R_lambda -> -h1 d/dt - h1' d/dr, d/dphi -> -h2 d/dt - h2' d/dr
    out.dt -= a * h1 + v.dphi * h2;
    out.dr -= a * h1d + v.dphi * h2d;
    // d/dr -> (-h2 R_lambda + h1 d/dphi) / D, d/dt -> (h2' R_lambda - h1' d/dphi) / D
    const double cl = (-h2 * v.dr + h2d * v.dt) / D;
    out.dq += cl * x.p;
    out.dp -= cl * x.q;
    out.dphi += (h1 * v.dr - h1d * v.dt) / D;
    return out;
}

/// Projection of a tangent vector to the contact hyperplane (dt = 0, alpha = 0).
inline TangentVector projectToContactPlane(const BindingProfile& bp, const BindingPoint& x,
                                           TangentVector v)
{
    v.dt = 0.0;
    return v - reeb_field_binding(bp, x) * alpha(bp, x, v);
}

// ---- tilde-model symplectic frame --------------------------------------

/// Tangent vectors of the mapping torus at (q, p, phi) use dr = dt = 0.
struct TildePoint
{
    Vec q;
    Vec p;
    double phi = 0.0;
};

/// d(alpha~)(v, w) for alpha~ = h~(|p|) dphi + p.dq.
inline double dAlphaTilde(const TwistProfile& tp, const TildePoint& x, const TangentVector& v,
                          const TangentVector& w)
{
    const double s = x.p.norm();
    const double dsv = x.p.dot(v.dp) / s;
    const double dsw = x.p.dot(w.dp) / s;
    return tp.hTilde.d1(s) * (dsv * w.dphi - dsw * v.dphi) + v.dp.dot(w.dq) - w.dp.dot(v.dq);
}

inline double alphaTilde(const TwistProfile& tp, const TildePoint& x, const TangentVector& v)
{
    return tp.hTilde.value(x.p.norm()) * v.dphi + x.p.dot(v.dq);
}

struct SymplecticFrame
{
    std::vector<TangentVector> vectors;
    double qNormalization = 1.0;
};

/// Orthonormal complement of span{q, p} in R^n (n - 2 vectors).
inline std::vector<Vec> complementBasis(const Vec& q, const Vec& p)
{
    const int n = static_cast<int>(q.size());
    Eigen::MatrixXd M(n, n);
    M.col(0) = q.normalized();
    M.col(1) = (p - p.dot(M.col(0)) * M.col(0)).normalized();
    for (int i = 2; i < n; ++i)
        M.col(i) = Vec::Unit(n, i - 2);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    Eigen::MatrixXd Q = qr.householderQ();
    std::vector<Vec> out;
    for (int i = 2; i < n; ++i)
        out.push_back(Q.col(i));
    return out;
}

/// (P', Q', r_l d/dp ..., r_l d/dq ...) with (P', Q') the rotation of the
/// normalized (P, Q) by the angle 2 pi phase.
inline SymplecticFrame symplectic_frame(const TwistProfile& tp, const TildePoint& x, double phase)
{
    const int n = static_cast<int>(x.q.size());
    const double s = x.p.norm();
    if (s < 1e-12)
        throw SingularityError("symplectic_frame: |p| = 0", s);
    const double ht = tp.hTilde.value(s);
    if (ht == 0.0)
        throw SingularityError("symplectic_frame: h~ vanishes", s);
    const TildeReebData rd = reeb_field_tilde(tp, s);

    TangentVector P = TangentVector::zero(n);
    P.dp = x.p / s;
    TangentVector G = TangentVector::zero(n);
    G.dp = s * x.q;
    G.dq = -x.p / s;
    TangentVector Q = G * -1.0;
    Q.dphi = -s / ht;

    SymplecticFrame fr;
    fr.qNormalization = rd.N * ht;
    Q = Q * fr.qNormalization;

    const double th = kTwoPi * phase;
    const double c = std::cos(th);
    const double sn = std::sin(th);
    fr.vectors.push_back(P * c - Q * sn);
    fr.vectors.push_back(P * sn + Q * c);
    const auto rl = complementBasis(x.q, x.p);
    for (const Vec& r : rl)
    {
        TangentVector v = TangentVector::zero(n);
        v.dp = r;
        fr.vectors.push_back(v);
    }
    for (const Vec& r : rl)
    {
        TangentVector v = TangentVector::zero(n);
        v.dq = r;
        fr.vectors.push_back(v);
    }
    return fr;
}

/// Standard symplectic Gram matrix for the frame ordering above.
inline Eigen::MatrixXd standardFrameGram(int n)
{
    const int m = n - 2;
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 + 2 * m, 2 + 2 * m);
    S(0, 1) = 1;
    S(1, 0) = -1;
    for (int i = 0; i < m; ++i)
    {
        S(2 + i, 2 + m + i) = 1;
        S(2 + m + i, 2 + i) = -1;
    }
    return S;
}

inline Eigen::MatrixXd frameGram(const TwistProfile& tp, const TildePoint& x,
                                 const SymplecticFrame& fr)
{
    const int k = static_cast<int>(fr.vectors.size());
    Eigen::MatrixXd M(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            M(i, j) = dAlphaTilde(tp, x, fr.vectors[i], fr.vectors[j]);
    return M;
}

} // namespace dehn
