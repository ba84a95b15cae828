// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0
//
// The linearized Cauchy-Riemann operator at the explicit plane, reduced to
//   dW/dsigma + i dW/dpsi = K Re(W2) (h1, -h2),   sigma = log rho,
// its real Fourier mode systems, and the kernel count by two-sided shooting.
#pragma once

#include "dehn/common.hpp"
#include "dehn/numerics.hpp"
#include "dehn/plane.hpp"
#include "dehn/profiles.hpp"

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <random>
#include <vector>

namespace dehn
{

struct WEquation
{
    BindingProfile bp;
    PlaneSolution sol;
    double ANorm = 0.0;
    double sigmaMid = 0.0;
    double residualS = 0.0;

    /// K = (h1' h2'' - h2' h1'') / detH.
    double K(double r) const
    {
        const double num = bp.h1.d1(r) * bp.h2.d2(r) - bp.h2.d1(r) * bp.h1.d2(r);
        return r == 0.0 ? 0.0 : num / bp.detH(r);
    }
    double H2(double r) const { return -bp.h2.value(r) * K(r); }
    double rhsCoeff(double r) const { return K(r); }
    double rAt(double sigma) const
    {
        if (sigma <= sol.sigmaGrid.front())
            return sol.rVals.front() * std::exp(2 * (sigma - sol.sigmaGrid.front()));
        if (sigma >= sol.sigmaGrid.back())
            return sol.rVals.back();
        return sol.rAtSigma(bp, sigma).first;
    }
    double H2At(double sigma) const { return H2(rAt(sigma)); }
    double sigmaStart() const { return 0.0; }
    double sigmaEnd() const { return sol.sigmaGrid.back(); }
};

/// sup |K| sqrt(h1^2 + h2^2) over the plane samples.
inline double a_norm_report(const WEquation& we)
{
    double sup = 0.0;
    for (double r : we.sol.rVals)
        sup = std::max(sup, std::abs(we.K(r)) *
                                std::hypot(we.bp.h1.value(r), we.bp.h2.value(r)));
    return sup;
}

/// Residual of the mode-0 element (-h1'/detH, h2'/detH) in the W-equation
/// on `points` samples, derivatives by the chain rule with r' = h2'(r).
inline double explicitElementResidual(const WEquation& we, int points = 1000)
{
    const BindingProfile& bp = we.bp;
    double worst = 0.0;
    const std::size_t nS = we.sol.size();
    for (int j = 0; j < points; ++j)
    {
        const std::size_t idx = std::min(nS - 1, static_cast<std::size_t>(
                                                     (static_cast<double>(j) + 0.5) * nS / points));
        const double r = we.sol.rVals[idx];
        if (r <= 0)
            continue;
        const double D = bp.detH(r);
        const double D1 = bp.detH1(r);
        const double rs = bp.h2.d1(r);
        const double u = bp.h2.d1(r) / D;
        const double du = rs * (bp.h2.d2(r) * D - bp.h2.d1(r) * D1) / (D * D);
        const double da = rs * (-bp.h1.d2(r) * D + bp.h1.d1(r) * D1) / (D * D);
        const double e1 = std::abs(du - we.H2(r) * u);
        const double e2 = std::abs(da - we.K(r) * bp.h1.value(r) * u);
        worst = std::max({worst, e1, e2});
    }
    return worst;
}

inline WEquation assemble_W_equation(const BindingProfile& bp, const PlaneSolution& sol)
{
    if (sol.size() < 2)
        throw DomainError("assemble_W_equation needs a sampled plane");
    WEquation we{bp, sol};
    for (double r : sol.rVals)
        if (r > 0 && std::abs(bp.detH(r)) < 1e-300)
            throw SingularityError("detH vanishes along the plane", r);
    we.ANorm = a_norm_report(we);
    // Midpoint for rank matching: first sample with r >= r0 / 2.
    we.sigmaMid = sol.sigmaGrid.back();
    for (std::size_t j = 0; j < sol.size(); ++j)
        if (sol.rVals[j] >= 0.5 * bp.r0)
        {
            we.sigmaMid = sol.sigmaGrid[j];
            break;
        }
    we.residualS = explicitElementResidual(we);
    if (we.residualS > 1e-8)
        throw InvariantError("explicit kernel element misses the W-equation by " +
                             fmt17(we.residualS));
    return we;
}

// ---- mode systems -------------------------------------------------------

enum class ModeParity
{
    Cos,
    Sin,
};

/// One real Fourier system. Main systems have state (u, v, a, b) =
/// (Re W2, Im W2, Re W1, Im W1); normal systems have state (f, g) for one
/// complex normal direction.
struct ModeSystem
{
    int k = 0;
    ModeParity parity = ModeParity::Cos;
    bool normal = false;
    double delta = 0.0;

    int odeDim() const { return normal ? 2 : 4; }

    Eigen::MatrixXd coefficientMatrix(const WEquation& we, double r) const
    {
        const double s = parity == ModeParity::Cos ? 1.0 : -1.0;
        const double kk = s * k;
        if (normal)
        {
            Eigen::MatrixXd A(2, 2);
            A << 0, kk, kk, 0;
            return A;
        }
        const double K = we.K(r);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
        A(0, 0) = -we.bp.h2.value(r) * K;
        A(0, 1) = kk;
        A(1, 0) = kk;
        A(2, 0) = K * we.bp.h1.value(r);
        A(2, 3) = kk;
        A(3, 2) = kk;
        return A;
    }
};

struct EigenSplit
{
    std::vector<Eigen::VectorXd> decaying;
    std::vector<Eigen::VectorXd> neutral;
    std::vector<Eigen::VectorXd> growing;
    double smallestNonzero = std::numeric_limits<double>::infinity();
};

/// Real invariant subspaces of A split by the real part of the spectrum.
inline EigenSplit splitSpectrum(const Eigen::MatrixXd& A, double delta)
{
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    EigenSplit out;
    const auto ev = es.eigenvalues();
    const auto V = es.eigenvectors();
    for (int j = 0; j < A.rows(); ++j)
    {
        const double re = ev[j].real();
        const double im = ev[j].imag();
        if (im < -1e-12)
            continue;
        std::vector<Eigen::VectorXd> vecs{V.col(j).real()};
        if (im > 1e-12)
            vecs.push_back(V.col(j).imag());
        auto& bin = re < -delta ? out.decaying : re > delta ? out.growing : out.neutral;
        for (auto& v : vecs)
            bin.push_back(v.normalized());
        if (std::abs(re) > 1e-12)
            out.smallestNonzero = std::min(out.smallestNonzero, std::abs(re));
    }
    return out;
}

/// Default weight: half the smallest nonzero |Re lambda| of the limiting
/// systems over frequencies 0..K.
inline double spectralGapDelta(const WEquation& we, int K)
{
    double gap = std::numeric_limits<double>::infinity();
    const double rInf = we.sol.rVals.back();
    for (int k = 0; k <= K; ++k)
        for (ModeParity par : {ModeParity::Cos, ModeParity::Sin})
        {
            ModeSystem ms{k, par, false, 0.0};
            gap = std::min(gap, splitSpectrum(ms.coefficientMatrix(we, rInf), 0.0).smallestNonzero);
        }
    return 0.5 * gap;
}

/// Regular-at-0 basis: core eigen-solutions with exponent >= 0 in W2 (and
/// normal directions), exponent >= -1 in W1.
inline std::vector<Eigen::VectorXd> regularBasis(const ModeSystem& ms, const WEquation& we)
{
    const Eigen::MatrixXd A = ms.coefficientMatrix(we, 0.0);
    std::vector<Eigen::VectorXd> out;
    const int blocks = ms.normal ? 1 : 2;
    for (int blk = 0; blk < blocks; ++blk)
    {
        const int off = 2 * blk;
        const Eigen::Matrix2d B = A.block(off, off, 2, 2);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(B);
        const bool w1 = !ms.normal && blk == 1;
        for (int j = 0; j < 2; ++j)
        {
            const double lam = es.eigenvalues()[j];
            if (lam >= (w1 ? -1.0 : 0.0) - 1e-12)
            {
                Eigen::VectorXd v = Eigen::VectorXd::Zero(ms.odeDim());
                v.segment(off, 2) = es.eigenvectors().col(j);
                out.push_back(v);
            }
        }
    }
    return out;
}

struct ShootSample
{
    double sigma = 0.0;
    std::vector<double> logNorms;
};

struct ShootResult
{
    Eigen::MatrixXd basis;
    std::vector<ShootSample> trace;
};

/// Propagates span(Y0) from sigma0 to sigma1 along the plane, with QR
/// re-orthonormalization every unit of sigma. r is carried in the state.
inline ShootResult propagate(const ModeSystem& ms, const WEquation& we, Eigen::MatrixXd Y,
                             double r0, double sigma0, double sigma1, num::OdeTolerance tol)
{
    const int d = ms.odeDim();
    const int m = static_cast<int>(Y.cols());
    ShootResult res;
    std::vector<double> logs(m, 0.0);
    res.trace.push_back({sigma0, logs});
    if (m == 0)
    {
        res.basis = Y;
        return res;
    }
    const double dir = sigma1 >= sigma0 ? 1.0 : -1.0;
    auto rhs = [&](const num::State& y, num::State& dy, double) {
        dy.assign(y.size(), 0.0);
        const double r = std::clamp(y[0], 0.0, we.bp.r0);
        dy[0] = dir * we.bp.h2.d1(r);
        const Eigen::MatrixXd A = ms.coefficientMatrix(we, r) * dir;
        Eigen::Map<const Eigen::MatrixXd> Ym(y.data() + 1, d, m);
        Eigen::Map<Eigen::MatrixXd> dYm(dy.data() + 1, d, m);
        dYm = A * Ym;
    };
    double s = sigma0;
    double r = r0;
    while (dir * (sigma1 - s) > 1e-12)
    {
        const double next = std::abs(sigma1 - s) > 1.0 ? s + dir : sigma1;
        num::State y(1 + d * m);
        y[0] = r;
        Eigen::Map<Eigen::MatrixXd>(y.data() + 1, d, m) = Y;
        // Integrate in the positive variable tau = dir * (sigma - s).
        y = num::integrateTo(rhs, y, 0.0, std::abs(next - s), tol);
        r = y[0];
        Y = Eigen::Map<Eigen::MatrixXd>(y.data() + 1, d, m);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
        const Eigen::MatrixXd R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, m);
        for (int j = 0; j < m; ++j)
        {
            logs[j] += std::log(std::abs(R(j, j)));
            if (R(j, j) < 0)
                Q.col(j) *= -1;
        }
        Y = Q;
        s = next;
        res.trace.push_back({s, logs});
    }
    res.basis = Y;
    return res;
}

struct ModeCount
{
    int k = 0;
    ModeParity parity = ModeParity::Cos;
    bool normal = false;
    int regularDim = 0;
    int admissibleDim = 0;
    int intersection = 0;
    int boundedIntersection = 0;
    double smallestAccepted = 0.0;
    double largestRejected = 0.0;
    std::vector<int> attributedModes;
    std::vector<Eigen::VectorXd> kernelAtMid;
    std::vector<ShootSample> forwardTrace;
    std::vector<ShootSample> backwardTrace;
};

namespace detail
{

// Intersection of two column spans by the SVD of [R | D].
inline std::pair<int, Eigen::MatrixXd> spanIntersection(const Eigen::MatrixXd& R,
                                                        const Eigen::MatrixXd& D,
                                                        double& smallAccepted,
                                                        double& largeRejected, double thr)
{
    const int mr = static_cast<int>(R.cols());
    const int md = static_cast<int>(D.cols());
    if (mr == 0 || md == 0)
        return {0, Eigen::MatrixXd(R.rows(), 0)};
    Eigen::MatrixXd M(R.rows(), mr + md);
    M << R, D;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto sv = svd.singularValues();
    const double top = sv[0];
    int deficit = mr + md - static_cast<int>(sv.size());
    deficit = std::max(deficit, 0);
    smallAccepted = 0.0;
    largeRejected = std::numeric_limits<double>::infinity();
    for (int j = 0; j < sv.size(); ++j)
    {
        const double rel = sv[j] / top;
        if (rel < thr)
        {
            ++deficit;
            smallAccepted = std::max(smallAccepted, rel);
        }
        else
        {
            largeRejected = std::min(largeRejected, rel);
        }
        if (rel >= thr && rel < 100 * thr)
            throw NumericalError("ambiguous rank decision: singular value " + fmt17(rel));
    }
    // Null vectors of [R | D] give intersection elements R x.
    const Eigen::MatrixXd V = svd.matrixV();
    Eigen::MatrixXd out(R.rows(), deficit);
    for (int j = 0; j < deficit; ++j)
        out.col(j) = R * V.col(mr + md - 1 - j).head(mr);
    return {deficit, out};
}

} // namespace detail

/// Kernel count of one real mode system: regular-at-0 solutions shot forward
/// and admissible-at-infinity solutions shot backward, matched at sigmaMid.
inline ModeCount countMode(const ModeSystem& ms, const WEquation& we, double rankTol = 1e-7,
                           num::OdeTolerance tol = {1e-11, 1e-11})
{
    ModeCount mc;
    mc.k = ms.k;
    mc.parity = ms.parity;
    mc.normal = ms.normal;
    const int d = ms.odeDim();
    const double rEnd = we.sol.rVals.back();
    const EigenSplit split = splitSpectrum(ms.coefficientMatrix(we, rEnd), ms.delta);

    std::vector<Eigen::VectorXd> adm = split.decaying;
    std::vector<Eigen::VectorXd> bounded = split.decaying;
    for (const auto& v : split.neutral)
        bounded.push_back(v);
    if (!ms.normal && ms.k == 0)
    {
        // The d/dt and R_alpha directions: constants in W1.
        adm.push_back(Eigen::Vector4d(0, 0, 1, 0));
        adm.push_back(Eigen::Vector4d(0, 0, 0, 1));
    }
    const auto reg = regularBasis(ms, we);
    mc.regularDim = static_cast<int>(reg.size());
    mc.admissibleDim = static_cast<int>(adm.size());

    auto toMat = [d](const std::vector<Eigen::VectorXd>& vs) {
        Eigen::MatrixXd M(d, static_cast<int>(vs.size()));
        for (std::size_t j = 0; j < vs.size(); ++j)
            M.col(static_cast<int>(j)) = vs[j];
        if (M.cols() > 0)
        {
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
            M = qr.householderQ() * Eigen::MatrixXd::Identity(d, M.cols());
        }
        return M;
    };
    const double rStart = we.rAt(we.sigmaStart());
    const ShootResult fwd =
        propagate(ms, we, toMat(reg), rStart, we.sigmaStart(), we.sigmaMid, tol);
    const ShootResult bwd = propagate(ms, we, toMat(adm), rEnd, we.sigmaEnd(), we.sigmaMid, tol);
    const ShootResult bwdB =
        propagate(ms, we, toMat(bounded), rEnd, we.sigmaEnd(), we.sigmaMid, tol);
    mc.forwardTrace = fwd.trace;
    mc.backwardTrace = bwd.trace;

    double sa = 0.0;
    double lr = 0.0;
    auto [cnt, vecs] = detail::spanIntersection(fwd.basis, bwd.basis, sa, lr, rankTol);
    mc.intersection = cnt;
    mc.smallestAccepted = sa;
    mc.largestRejected = lr;
    double sb = 0.0;
    double lb = 0.0;
    mc.boundedIntersection = detail::spanIntersection(fwd.basis, bwdB.basis, sb, lb, rankTol).first;

    for (int j = 0; j < cnt; ++j)
    {
        const Eigen::VectorXd v = vecs.col(j);
        mc.kernelAtMid.push_back(v);
        if (ms.k == 0)
        {
            mc.attributedModes.push_back(0);
            continue;
        }
        // Split each complex pair into its e^{+ik psi} and e^{-ik psi} parts.
        double plus = 0.0;
        double minus = 0.0;
        for (int p = 0; p < d / 2; ++p)
        {
            const double x = v[2 * p];
            const double y = v[2 * p + 1];
            if (ms.parity == ModeParity::Cos)
            {
                plus += 0.25 * (x + y) * (x + y);
                minus += 0.25 * (x - y) * (x - y);
            }
            else
            {
                plus += 0.25 * (x - y) * (x - y);
                minus += 0.25 * (x + y) * (x + y);
            }
        }
        mc.attributedModes.push_back(plus >= minus ? ms.k : -ms.k);
    }
    return mc;
}

/// countMode, repeated at tighter integration tolerance when the first rank
/// decision is ambiguous.
inline ModeCount countModeRefined(const ModeSystem& ms, const WEquation& we, double rankTol)
{
    try
    {
        return countMode(ms, we, rankTol);
    }
    catch (const NumericalError&)
    {
        return countMode(ms, we, rankTol, {1e-13, 1e-13});
    }
}

struct KernelReport
{
    std::map<int, int> perMode;
    int total = 0;
    int nonDecayingBounded = 0;
    double delta = 0.0;
    double spectralGap = 0.0;
    double ANorm = 0.0;
    bool ANormBelow2 = false;
    std::vector<ModeCount> details;
};

/// Admissible kernel directions per complex Fourier mode in [-K, K].
inline KernelReport kernel_dimension(const WEquation& we, double delta = 0.0, int K = 5, int n = 3,
                                      double rankTol = 1e-7)
{
    KernelReport rep;
    rep.spectralGap = 2 * spectralGapDelta(we, K);
    rep.delta = delta > 0 ? delta : 0.5 * rep.spectralGap;
    if (!(rep.delta < rep.spectralGap))
        throw DomainError("delta must lie below the spectral gap " + fmt17(rep.spectralGap));
    rep.ANorm = we.ANorm;
    rep.ANormBelow2 = we.ANorm < 2.0;
    for (int m = -K; m <= K; ++m)
        rep.perMode[m] = 0;
    for (int k = 0; k <= K; ++k)
    {
        for (ModeParity par : {ModeParity::Cos, ModeParity::Sin})
        {
            // Frequency 0 has a single real system.
            if (k == 0 && par == ModeParity::Sin)
                continue;
            const ModeSystem ms{k, par, false, rep.delta};
            ModeCount mc = countModeRefined(ms, we, rankTol);
            for (int mode : mc.attributedModes)
                ++rep.perMode[mode];
            rep.total += mc.intersection;
            rep.nonDecayingBounded += mc.boundedIntersection - mc.intersection;
            rep.details.push_back(std::move(mc));
        }
    }
    // Normal directions: n - 2 copies of the plain Cauchy-Riemann operator.
    for (int k = 0; k <= K; ++k)
        for (ModeParity par : {ModeParity::Cos, ModeParity::Sin})
        {
            if (k == 0 && par == ModeParity::Sin)
                continue;
            const ModeSystem ms{k, par, true, rep.delta};
            const ModeCount mc = countModeRefined(ms, we, rankTol);
            // The frequency-0 system carries both real components of a
            // complex constant.
            rep.total += (n - 2) * mc.intersection;
            rep.nonDecayingBounded += (n - 2) * (mc.boundedIntersection - mc.intersection);
            for (int mode : mc.attributedModes)
                rep.perMode[mode] += n - 2;
        }
    return rep;
}

/// Maximum residual of the original first-order system along a mode solution
/// propagated from y0 at sigmaMid; derivatives come from y' = A y, r' = h2'.
inline double backSubstitutionResidual(const ModeSystem& ms, const WEquation& we,
                                       const Eigen::VectorXd& y0, double sigma0, double sigma1,
                                       int checkpoints = 200)
{
    if (ms.normal)
        return 0.0;
    const double kk = (ms.parity == ModeParity::Cos ? 1.0 : -1.0) * ms.k;
    double worst = 0.0;
    double r = we.rAt(sigma0);
    Eigen::VectorXd y = y0;
    const double h = (sigma1 - sigma0) / checkpoints;
    for (int c = 0; c <= checkpoints; ++c)
    {
        const BindingProfile& bp = we.bp;
        const double h1 = bp.h1.value(r), h1d = bp.h1.d1(r), h1dd = bp.h1.d2(r);
        const double h2 = bp.h2.value(r), h2d = bp.h2.d1(r), h2dd = bp.h2.d2(r);
        const double D = bp.detH(r);
        const double rs = h2d;
        const Eigen::VectorXd dy = ms.coefficientMatrix(we, r) * y;
        const double u = y[0], v = y[1], a = y[2], b = y[3];
        const double du = dy[0], dv = dy[1], da = dy[2], db = dy[3];
        const double xr = h2d * a + h1d * u;
        const double xt = h2 * a + h1 * u;
        const double dxr = rs * (h2dd * a + h1dd * u) + h2d * da + h1d * du;
        const double dxt = rs * (h2d * a + h1d * u) + h2 * da + h1 * du;
        const double e1 = db - kk * (h1 * xr - h1d * xt) / D;
        const double e2 = dv + kk * (h2 * xr - h2d * xt) / D;
        const double e3 = dxr - kk * (h2d * b + h1d * v) - h2dd * xr;
        const double e4 = dxt - kk * (h2 * b + h1 * v) - h2d * xr;
        const double scale = std::max(1.0, y.norm());
        worst = std::max(worst, std::max({std::abs(e1), std::abs(e2), std::abs(e3),
                                          std::abs(e4)}) / scale);
        if (c == checkpoints)
            break;
        num::State st(5);
        st[0] = r;
        for (int j = 0; j < 4; ++j)
            st[1 + j] = y[j];
        auto rhs = [&](const num::State& s, num::State& ds, double) {
            ds.resize(5);
            const double rr = std::clamp(s[0], 0.0, we.bp.r0);
            ds[0] = we.bp.h2.d1(rr);
            const Eigen::MatrixXd A = ms.coefficientMatrix(we, rr);
            Eigen::Map<const Eigen::VectorXd> ys(s.data() + 1, 4);
            Eigen::Map<Eigen::VectorXd>(ds.data() + 1, 4) = A * ys;
        };
        st = num::integrateTo(rhs, st, sigma0 + c * h, sigma0 + (c + 1) * h, {1e-12, 1e-12});
        r = st[0];
        for (int j = 0; j < 4; ++j)
            y[j] = st[1 + j];
    }
    return worst;
}

// ---- phase plane ----------------------------------------------------------

struct PhasePlaneEigen
{
    double H2 = 0.0;
    double lambdaPlus = 0.0;
    double lambdaMinus = 0.0;
    Eigen::Vector2d vPlus;
    Eigen::Vector2d vMinus;
};

/// Eigen-data of [[H2, 1], [1, 0]] at the plane point rho.
inline PhasePlaneEigen phase_plane_eigen_h2(double H2)
{
    PhasePlaneEigen e;
    e.H2 = H2;
    const double root = std::sqrt(0.25 * H2 * H2 + 1);
    e.lambdaPlus = 0.5 * H2 + root;
    e.lambdaMinus = 0.5 * H2 - root;
    e.vPlus = Eigen::Vector2d(1, -0.5 * H2 + root);
    e.vMinus = Eigen::Vector2d(1, -0.5 * H2 - root);
    return e;
}

inline PhasePlaneEigen phase_plane_eigen(const WEquation& we, double rho)
{
    if (!(rho > 0))
        throw DomainError("phase_plane_eigen needs rho > 0");
    return phase_plane_eigen_h2(we.H2At(std::log(rho)));
}

struct ConeReport
{
    bool invariant = true;
    double minComponent = std::numeric_limits<double>::infinity();
    double minGrowth = std::numeric_limits<double>::infinity();
    int starts = 0;
    bool allGrow = false;
};

/// Integrates (u, v)' = [[H2, 1], [1, 0]] (u, v) over sigmaSpan for each start
/// in the open first quadrant; `H2` defaults to the plane's coefficient.
inline ConeReport cone_invariance_check(const std::function<double(double)>& H2, Interval sigmaSpan,
                                        const std::vector<Eigen::Vector2d>& starts,
                                        double growthTarget = 10.0)
{
    ConeReport rep;
    for (const auto& s0 : starts)
    {
        if (!(s0[0] > 0 && s0[1] >= 0))
            throw DomainError("cone starts must lie in the first quadrant");
        auto rhs = [&](const num::State& y, num::State& d, double s) {
            d.resize(2);
            d[0] = H2(s) * y[0] + y[1];
            d[1] = y[0];
        };
        const auto times = num::linspace(sigmaSpan.lo, sigmaSpan.hi, 201);
        const auto traj = num::integrateAt(rhs, {s0[0], s0[1]}, times, {1e-12, 1e-12});
        for (std::size_t j = 1; j < traj.size(); ++j)
        {
            rep.minComponent = std::min({rep.minComponent, traj[j][0], traj[j][1]});
            if (!(traj[j][0] > 0 && traj[j][1] > 0))
                rep.invariant = false;
        }
        rep.minGrowth = std::min(rep.minGrowth, traj.back()[0] / s0[0]);
        ++rep.starts;
    }
    rep.allGrow = rep.minGrowth >= growthTarget;
    return rep;
}

inline ConeReport cone_invariance_check(const WEquation& we, Interval sigmaSpan,
                                        const std::vector<Eigen::Vector2d>& starts)
{
    return cone_invariance_check([&we](double s) { return we.H2At(s); }, sigmaSpan, starts);
}

// ---- Parseval inequality ---------------------------------------------------

/// A complex 2-vector field on the cylinder sampled on sigma x psi.
struct CylinderField
{
    std::vector<double> sigma;
    int psiPoints = 64;
    // values[i][j] = (W1, W2) at sigma[i], psi_j = 2 pi j / psiPoints
    std::vector<std::vector<std::array<std::complex<double>, 2>>> values;
};

struct SzReport
{
    double minRatio = std::numeric_limits<double>::infinity();
    int fields = 0;
    int vacuous = 0;
    bool passed = true;
};

/// Smooth step weight: 2 for sigma <= s0, delta for sigma >= s1.
inline double weight(double sigma, double s0, double s1, double delta)
{
    const double x = std::clamp((sigma - s0) / (s1 - s0), 0.0, 1.0);
    const double chi = x * x * x * (10 - 15 * x + 6 * x * x);
    return (1 - chi) * 2.0 + chi * delta;
}

/// Checks 2 ||W_bar|| <= ||d_psi W_bar|| with modes 0 and +-1 removed.
inline SzReport sz_inequality_check(const std::vector<CylinderField>& fields, double delta = 0.3,
                                    double s0 = 0.0, double s1 = 5.0)
{
    SzReport rep;
    for (const CylinderField& f : fields)
    {
        const int N = f.psiPoints;
        double normW = 0.0;
        double normD = 0.0;
        double normAll = 0.0;
        for (std::size_t i = 0; i < f.sigma.size(); ++i)
        {
            const double trap = (i == 0 || i + 1 == f.sigma.size()) ? 0.5 : 1.0;
            const double ds = f.sigma.size() > 1 ? f.sigma[1] - f.sigma[0] : 1.0;
            const double w = std::exp(2 * weight(f.sigma[i], s0, s1, delta) * f.sigma[i]);
            for (int c = 0; c < 2; ++c)
            {
                for (int j = 0; j < N; ++j)
                    normAll += trap * ds * w * std::norm(f.values[i][j][c]) * kTwoPi / N;
                // Naive DFT in psi; Parseval turns the psi-integral into a sum.
                for (int m = -N / 2 + 1; m < N / 2; ++m)
                {
                    if (std::abs(m) <= 1)
                        continue;
                    std::complex<double> coef = 0.0;
                    for (int j = 0; j < N; ++j)
                        coef += f.values[i][j][c] * std::polar(1.0, -kTwoPi * m * j / N);
                    coef /= static_cast<double>(N);
                    const double a2 = std::norm(coef) * kTwoPi;
                    normW += trap * ds * w * a2;
                    normD += trap * ds * w * m * m * a2;
                }
            }
        }
        ++rep.fields;
        if (normW <= 1e-24 * normAll)
        {
            ++rep.vacuous;
            continue;
        }
        const double ratio = std::sqrt(normD / normW);
        rep.minRatio = std::min(rep.minRatio, ratio);
        if (ratio < 2 - 1e-9)
            rep.passed = false;
    }
    return rep;
}

/// Random field with modes |m| in [mLo, mHi] and smooth sigma profiles.
inline CylinderField randomCylinderField(std::mt19937_64& rng, int mLo = 2, int mHi = 10,
                                         int sigmaPoints = 41, int psiPoints = 64)
{
    std::normal_distribution<double> g;
    CylinderField f;
    f.psiPoints = psiPoints;
    f.sigma = num::linspace(0.0, 8.0, sigmaPoints);
    struct Term
    {
        int c, m;
        std::complex<double> amp;
        double centre, width;
    };
    std::vector<Term> terms;
    std::uniform_int_distribution<int> pickM(mLo, mHi);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int count = 1 + static_cast<int>(uni(rng) * 6);
    for (int t = 0; t < count; ++t)
    {
        const int m = pickM(rng) * (uni(rng) < 0.5 ? -1 : 1);
        terms.push_back({uni(rng) < 0.5 ? 0 : 1, m, {g(rng), g(rng)}, 8 * uni(rng),
                         0.5 + 2 * uni(rng)});
    }
    f.values.resize(sigmaPoints);
    for (int i = 0; i < sigmaPoints; ++i)
    {
        f.values[i].resize(psiPoints);
        for (int j = 0; j < psiPoints; ++j)
        {
            std::array<std::complex<double>, 2> v{0.0, 0.0};
            for (const Term& t : terms)
            {
                const double env = std::exp(-std::pow((f.sigma[i] - t.centre) / t.width, 2));
                v[t.c] += t.amp * env * std::polar(1.0, kTwoPi * t.m * j / psiPoints);
            }
            f.values[i][j] = v;
        }
    }
    return f;
}

} // namespace dehn
