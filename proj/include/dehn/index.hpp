// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Robbin-Salamon indices of symplectic paths by crossing forms, the loop
// axiom and degrees of orbit generators.
#pragma once

#include "dehn/common.hpp"
#include "dehn/orbits.hpp"
#include "dehn/profiles.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <functional>
#include <map>
#include <vector>

namespace dehn
{

using Mat = Eigen::MatrixXd;

/// [[0, I], [-I, 0]] in dimension 2m.
inline Mat standardOmega(int dim)
{
    if (dim % 2 != 0 || dim <= 0)
        throw DomainError("symplectic dimension must be even and positive");
    const int m = dim / 2;
    Mat S = Mat::Zero(dim, dim);
    S.topRightCorner(m, m) = Mat::Identity(m, m);
    S.bottomLeftCorner(m, m) = -Mat::Identity(m, m);
    return S;
}

/// A continuous path t -> M(t) in Sp(Omega), sampled on a uniform grid for
/// crossing detection and evaluated directly for refinement.
struct SymplecticPath
{
    int dim = 2;
    Mat omega;
    double t0 = 0.0;
    double t1 = 1.0;
    std::function<Mat(double)> M;
    std::function<Mat(double)> dM;
    int sampleCount = 400;
    double tolerance = 1e-9;

    Mat derivative(double t) const
    {
        if (dM)
            return dM(t);
        const double h = 1e-5 * (t1 - t0);
        auto central = [&](double s) { return Mat((M(t + s) - M(t - s)) / (2 * s)); };
        return (4 * central(h) - central(2 * h)) / 3;
    }

    std::vector<std::pair<double, Mat>> samples() const
    {
        std::vector<std::pair<double, Mat>> out;
        for (int j = 0; j <= sampleCount; ++j)
        {
            const double t = t0 + (t1 - t0) * j / sampleCount;
            out.emplace_back(t, M(t));
        }
        return out;
    }

    /// Largest |M^T Omega M - Omega| over the samples.
    double symplecticDefect() const
    {
        double worst = 0.0;
        for (const auto& [t, m] : samples())
            worst = std::max(worst, (m.transpose() * omega * m - omega).cwiseAbs().maxCoeff());
        return worst;
    }
};

inline SymplecticPath makePath(int dim, std::function<Mat(double)> M, double t0, double t1,
                               std::function<Mat(double)> dM = {}, Mat omega = Mat())
{
    SymplecticPath p;
    p.dim = dim;
    p.omega = omega.size() ? omega : standardOmega(dim);
    p.t0 = t0;
    p.t1 = t1;
    p.M = std::move(M);
    p.dM = std::move(dM);
    return p;
}

struct Crossing
{
    double time = 0.0;
    int kernelDim = 0;
    int signature = 0;
    int zeroEigenvalues = 0;
};

struct IndexResult
{
    HalfInt rsIndex;
    int loopContribution = 0;
    HalfInt total;
    std::vector<Crossing> crossings;
    int persistentKernel = 0;
};

namespace detail
{

inline Eigen::JacobiSVD<Mat> svdMinusIdentity(const Mat& M)
{
    return Eigen::JacobiSVD<Mat>(M - Mat::Identity(M.rows(), M.cols()),
                                 Eigen::ComputeFullV);
}

// Singular values in ascending order.
inline Eigen::VectorXd ascending(const Eigen::VectorXd& s) { return s.reverse(); }

inline Crossing crossingAt(const SymplecticPath& path, double t, double kerTol)
{
    const Mat M = path.M(t);
    const auto svd = svdMinusIdentity(M);
    const Eigen::VectorXd sv = svd.singularValues();
    const int dim = path.dim;
    int kd = 0;
    for (int j = dim - 1; j >= 0 && sv[j] < kerTol; --j)
        ++kd;
    Crossing c;
    c.time = t;
    c.kernelDim = kd;
    if (kd == 0)
        return c;
    const Mat K = svd.matrixV().rightCols(kd);
    const Mat A = path.omega.transpose() * path.derivative(t) * M.inverse();
    const Mat S = 0.5 * (A + A.transpose());
    const Mat G = K.transpose() * S * K;
    const Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (G + G.transpose()));
    const Eigen::VectorXd ev = es.eigenvalues();
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    for (int j = 0; j < kd; ++j)
    {
        if (ev[j] > 1e-8 * scale)
            ++c.signature;
        else if (ev[j] < -1e-8 * scale)
            --c.signature;
        else
            ++c.zeroEigenvalues;
    }
    return c;
}

} // namespace detail

/// Robbin-Salamon index relative to the diagonal: half the crossing-form
/// signature at the end points plus the full signature at interior crossings.
inline IndexResult robbin_salamon_index(const SymplecticPath& path)
{
    if (!(path.t1 > path.t0))
        throw DomainError("symplectic path needs t1 > t0");
    if (path.omega.rows() != path.dim)
        throw DomainError("symplectic path: Omega has the wrong size");
    const auto smp = path.samples();
    const int dim = path.dim;
    double scale = 1.0;
    for (const auto& [t, m] : smp)
    {
        const double defect = (m.transpose() * path.omega * m - path.omega).cwiseAbs().maxCoeff();
        if (defect > path.tolerance * std::max(1.0, m.cwiseAbs().maxCoeff() * m.cwiseAbs().maxCoeff()))
            throw InvariantError("path is not symplectic at t = " + fmt17(t) + " (defect " +
                                 fmt17(defect) + ")");
        scale = std::max(scale, m.norm());
    }
    if ((smp.front().second - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-12)
        throw InvariantError("symplectic path must start at the identity");
    const double kerTol = 1e-7 * scale;

    // Persistent kernel: most frequent kernel dimension at interior samples.
    std::vector<Eigen::VectorXd> sv;
    std::map<int, int> freq;
    for (std::size_t j = 0; j < smp.size(); ++j)
    {
        sv.push_back(detail::ascending(detail::svdMinusIdentity(smp[j].second).singularValues()));
        if (j > 0 && j + 1 < smp.size())
        {
            int kd = 0;
            while (kd < dim && sv.back()[kd] < kerTol)
                ++kd;
            ++freq[kd];
        }
    }
    int d0 = 0;
    int best = -1;
    for (const auto& [kd, cnt] : freq)
        if (cnt > best)
        {
            best = cnt;
            d0 = kd;
        }

    IndexResult res;
    res.persistentKernel = d0;
    const Crossing start = detail::crossingAt(path, path.t0, kerTol);
    res.crossings.push_back(start);
    int twice = start.signature;

    if (d0 < dim)
    {
        auto sigma = [&](double t) {
            return detail::ascending(detail::svdMinusIdentity(path.M(t)).singularValues())[d0];
        };
        const std::size_t last = smp.size() - 1;
        std::vector<Interval> brackets;
        for (std::size_t j = 1; j < last; ++j)
            if (sv[j][d0] <= sv[j - 1][d0] && sv[j][d0] < sv[j + 1][d0])
                brackets.push_back({smp[j - 1].first, smp[j + 1].first});
        if (sv[last][d0] < sv[last - 1][d0])
            brackets.push_back({smp[last - 1].first, smp[last].first});

        std::vector<double> times;
        const double edge = 1e-9 * (path.t1 - path.t0);
        const Mat I = Mat::Identity(dim, dim);
        auto polish = [&](Interval br, double tm) {
            // sigma is a corner |a (t - tau)| at a crossing; Newton on the
            // signed value u^T (M - I) v lands on it.
            double sm = sigma(tm);
            for (int it = 0; it < 20 && sm >= 1e-3 * kerTol; ++it)
            {
                Eigen::JacobiSVD<Mat> svd(path.M(tm) - I, Eigen::ComputeFullU | Eigen::ComputeFullV);
                const int col = dim - 1 - d0;
                const double slope = svd.matrixU().col(col).dot(path.derivative(tm) *
                                                                svd.matrixV().col(col));
                if (slope == 0.0)
                    break;
                const double next =
                    std::clamp(tm - svd.singularValues()[col] / slope, br.lo, br.hi);
                const double sn = sigma(next);
                if (!(sn < sm))
                    break;
                tm = next;
                sm = sn;
            }
            if (sm < kerTol && tm - path.t0 >= edge && path.t1 - tm >= edge)
                times.push_back(tm);
        };
        for (const Interval& br : brackets)
        {
            const int sub = 32;
            double tm = br.lo;
            double sm = std::numeric_limits<double>::infinity();
            for (int q = 0; q <= sub; ++q)
            {
                const double t = br.lo + br.width() * q / sub;
                const double v = sigma(t);
                if (v < sm)
                {
                    sm = v;
                    tm = t;
                }
            }
            polish(br, tm);
        }
        if (d0 == 0)
        {
            // Odd-dimensional crossings change the sign of det(M - I).
            auto det = [&](double t) { return (path.M(t) - I).determinant(); };
            for (std::size_t j = 1; j < last; ++j)
            {
                double lo = smp[j].first;
                double hi = smp[j + 1].first;
                double flo = det(lo);
                const double fhi = det(hi);
                if (!((flo < 0 && fhi > 0) || (flo > 0 && fhi < 0)))
                    continue;
                for (int it = 0; it < 80 && hi - lo > 1e-15 * (path.t1 - path.t0); ++it)
                {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = det(mid);
                    if ((fm < 0) == (flo < 0))
                    {
                        lo = mid;
                        flo = fm;
                    }
                    else
                    {
                        hi = mid;
                    }
                }
                polish({smp[j].first, smp[j + 1].first}, 0.5 * (lo + hi));
            }
        }
        std::sort(times.begin(), times.end());
        double lastTime = path.t0;
        for (double tm : times)
        {
            if (tm - lastTime < 1e-7 * (path.t1 - path.t0))
                continue;
            Crossing c = detail::crossingAt(path, tm, std::max(kerTol, 1e-6 * scale));
            if (c.zeroEigenvalues > d0)
                throw NumericalError("degenerate interior crossing at t = " + fmt17(tm));
            res.crossings.push_back(c);
            twice += 2 * c.signature;
            lastTime = tm;
        }
    }

    const Crossing end = detail::crossingAt(path, path.t1, kerTol);
    res.crossings.push_back(end);
    twice += end.signature;
    res.rsIndex = HalfInt::fromTwice(twice);
    res.total = res.rsIndex;
    return res;
}

/// Maslov index of the frame rotation winding i times.
inline int loop_maslov(int i)
{
    if (i < 1)
        throw DomainError("loop_maslov needs i >= 1");
    return 2 * i;
}

/// t -> exp(2 pi i t Omega) on [0, 1] in dimension 2.
inline SymplecticPath rotationLoopPath(int i)
{
    const Mat om = standardOmega(2);
    return makePath(
        2, [om, i](double t) { return Mat((kTwoPi * i * t * om).exp()); }, 0.0, 1.0,
        [om, i](double t) { return Mat(kTwoPi * i * om * (kTwoPi * i * t * om).exp()); });
}

/// t -> [[1, 0], [-c t, 1]] on [0, T].
inline SymplecticPath skewPath(double c, double T)
{
    return makePath(
        2,
        [c](double t) {
            Mat m = Mat::Identity(2, 2);
            m(1, 0) = -c * t;
            return m;
        },
        0.0, T,
        [c](double) {
            Mat m = Mat::Zero(2, 2);
            m(1, 0) = -c;
            return m;
        });
}

/// Symplectic Gram matrix of the frame ordering (P', Q', r d/dp..., r d/dq...).
inline Mat frameOmega(int n)
{
    const int dim = 2 * n - 2;
    Mat S = Mat::Zero(dim, dim);
    S(0, 1) = 1;
    S(1, 0) = -1;
    const int m = n - 2;
    for (int j = 0; j < m; ++j)
    {
        S(2 + j, 2 + m + j) = 1;
        S(2 + m + j, 2 + j) = -1;
    }
    return S;
}

/// Linearized Reeb flow at a level in the rotated frame: the twist shear on
/// (P, Q) and the geodesic rotation on each (r d/dp, r d/dq) pair.
inline Mat linearized_reeb_flow(const TwistProfile& tp, const OrbitLevel& level, int n, double t)
{
    if (n < 2)
        throw DomainError("linearized_reeb_flow needs n >= 2");
    const double s = level.pLevel;
    if (s <= 0)
        throw SingularityError("linearized_reeb_flow: |p| = 0", s);
    const int dim = 2 * n - 2;
    const int m = n - 2;
    Mat F = Mat::Identity(dim, dim);
    F(1, 0) = -tp.g.d1(s) * t;
    const double th = level.gValue * t;
    for (int j = 0; j < m; ++j)
    {
        F(2 + j, 2 + j) = std::cos(th);
        F(2 + j, 2 + m + j) = s * std::sin(th);
        F(2 + m + j, 2 + j) = -std::sin(th) / s;
        F(2 + m + j, 2 + m + j) = std::cos(th);
    }
    return F;
}

inline SymplecticPath linearizedFlowPath(const TwistProfile& tp, const OrbitLevel& level, int n,
                                         double T)
{
    const int dim = 2 * n - 2;
    auto M = [tp, level, n](double t) { return linearized_reeb_flow(tp, level, n, t); };
    auto dM = [tp, level, n, dim](double t) {
        const int m = n - 2;
        const double s = level.pLevel;
        const double g = level.gValue;
        const double th = g * t;
        Mat D = Mat::Zero(dim, dim);
        D(1, 0) = -tp.g.d1(s);
        for (int j = 0; j < m; ++j)
        {
            D(2 + j, 2 + j) = -g * std::sin(th);
            D(2 + j, 2 + m + j) = s * g * std::cos(th);
            D(2 + m + j, 2 + j) = -g * std::cos(th) / s;
            D(2 + m + j, 2 + m + j) = -g * std::sin(th);
        }
        return D;
    };
    return makePath(dim, M, 0.0, T, dM, frameOmega(n));
}

struct DegreeResult
{
    IndexResult index;
    HalfInt muTotal;
    int degree = 0;
};

/// deg = mu(psi) + 2i - (2n - 3)/2 + morseIndex + (n - 3) for the principal family.
inline DegreeResult sft_degree(const TwistProfile& tp, const OrbitLevel& level, int n,
                               int morseIndex)
{
    if (!level.isPrincipal)
        throw DomainError("sft_degree is only supported on the principal level");
    if (!(tp.g.d1(level.pLevel) > 0))
        throw DomainError("sft_degree needs g' > 0 at the principal level");
    if (morseIndex < 0 || morseIndex > 2 * n - 3)
        throw DomainError("morseIndex must lie in [0, 2n - 3]");
    const double T = level.i * tp.hk.value(level.pLevel);
    DegreeResult out;
    out.index = robbin_salamon_index(linearizedFlowPath(tp, level, n, T));
    out.index.loopContribution = loop_maslov(level.i);
    out.index.total = out.index.rsIndex + HalfInt::fromInt(out.index.loopContribution);
    out.muTotal = out.index.total;
    const HalfInt deg = out.muTotal - HalfInt::fromTwice(2 * n - 3) +
                        HalfInt::fromInt(morseIndex + n - 3);
    out.degree = deg.toInt();
    return out;
}

} // namespace dehn
