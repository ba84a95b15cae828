// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Stages behind the command line tool. Each stage returns its JSON report and
// writes its CSV and JSON files into the output directory.
#pragma once

#include "dehn/config.hpp"
#include "dehn/energy.hpp"
#include "dehn/geometry.hpp"
#include "dehn/index.hpp"
#include "dehn/lincr.hpp"
#include "dehn/orbits.hpp"
#include "dehn/plane.hpp"
#include "dehn/profiles.hpp"
#include "dehn/report.hpp"

#include <filesystem>
#include <random>

namespace dehn
{

/// Profiles and derived objects shared by the stages.
struct Model
{
    RunConfig cfg;
    TwistProfile twist;
    BindingProfile binding;
};

inline Model buildModel(const RunConfig& cfg)
{
    Model m;
    m.cfg = cfg;
    TwistShape ts;
    ts.name = cfg.twistShape;
    ts.sMax = cfg.sMax;
    ts.wiggle = cfg.wiggle;
    ts.tableNodes = cfg.tableNodes;
    m.twist = build_twist_profile(cfg.k, cfg.eps, cfg.pPlateau, ts);
    BindingShape bs;
    bs.name = cfg.bindingShape;
    bs.collarStart = cfg.collarStart;
    bs.blendStartFraction = cfg.blendStartFraction;
    m.binding = build_binding_profile(cfg.r0, cfg.rMax, bs, &m.twist);
    return m;
}

inline PlaneOptions planeOptions(const RunConfig& cfg)
{
    PlaneOptions opt;
    opt.tolAsym = cfg.tolAsym;
    opt.rhoMin = cfg.rhoMin;
    opt.sigmaStep = cfg.sigmaStep;
    opt.ode = {cfg.tol.ode, cfg.tol.ode};
    opt.n = cfg.n;
    return opt;
}

/// Writes the sampled profile tables.
inline Json stageProfiles(const Model& m, const std::filesystem::path& out)
{
    const TwistProfile& tp = m.twist;
    const BindingProfile& bp = m.binding;
    CsvTable twist("twist_profile.csv");
    for (int j = 0; j <= 500; ++j)
    {
        const double s = tp.g.domain.lo + tp.g.domain.width() * j / 500;
        twist.add({s, tp.g.value(s), tp.g.d1(s), tp.hk.value(s), tp.hTilde.value(s)});
    }
    CsvTable binding("binding_profile.csv");
    for (int j = 0; j <= 500; ++j)
    {
        const double r = bp.rMax * j / 500;
        binding.add({r, bp.h1.value(r), bp.h1.d1(r), bp.h2.value(r), bp.h2.d1(r), bp.detH(r),
                     bp.detHOverR(r)});
    }
    writeCsv(out, twist);
    writeCsv(out, binding);
    Json j;
    j["twist_rows"] = twist.size();
    j["binding_rows"] = binding.size();
    return j;
}

inline Json stageValidate(const Model& m, const std::filesystem::path& out)
{
    const TwistProfile& tp = m.twist;
    const BindingProfile& bp = m.binding;
    stageProfiles(m, out);
    std::mt19937_64 rng(m.cfg.seed);
    double worstAlpha = 0.0;
    for (int j = 0; j < m.cfg.samples; ++j)
    {
        const BindingPoint x = randomBindingPoint(m.cfg.n, 0.0, bp.rMax, rng);
        worstAlpha = std::max(worstAlpha, std::abs(alpha(bp, x, reeb_field_binding(bp, x)) - 1));
    }
    const PullbackReport pb = pullback_consistency_check(tp, bp, bp.collar);
    Json j;
    j["k"] = tp.k;
    j["eps"] = tp.eps;
    j["p0"] = tp.p0 ? Json(*tp.p0) : Json(nullptr);
    j["min_det_h_over_r"] = bp.minDetHOverR;
    j["arg_min_det_h_over_r"] = bp.argMinDetHOverR;
    j["reeb_samples"] = m.cfg.samples;
    j["max_alpha_reeb_error"] = worstAlpha;
    j["pullback_max_mismatch"] = pb.maxMismatch;
    j["pullback_ok"] = pb.ok;
    j["pass"] = bp.minDetHOverR >= 0.5 && worstAlpha <= 1e-10 && pb.ok;
    writeJson(out / "validate.json", j);
    return j;
}

/// Pointwise identities of the contact form, Reeb field and J at random points.
inline Json stageGeometry(const Model& m, const std::filesystem::path& out)
{
    const BindingProfile& bp = m.binding;
    const TwistProfile& tp = m.twist;
    const int n = m.cfg.n;
    const int N = std::min(m.cfg.samples, 1000);
    std::mt19937_64 rng(m.cfg.seed);
    double alphaR = 0.0, dAlphaR = 0.0, fd = 0.0, jj = 0.0, compat = 1e300, push = 0.0;
    for (int s = 0; s < N; ++s)
    {
        const BindingPoint x = randomBindingPoint(n, 0.02, bp.rMax, rng);
        const TangentVector R = reeb_field_binding(bp, x);
        alphaR = std::max(alphaR, std::abs(alpha(bp, x, R) - 1));
        const TangentVector v = randomTangent(x, rng, false);
        const TangentVector w = randomTangent(x, rng, false);
        dAlphaR = std::max(dAlphaR, std::abs(dAlpha(bp, x, R, v)));
        fd = std::max(fd, std::abs(dAlpha(bp, x, v, w) - dAlphaFiniteDiff(bp, x, v, w)));
        const SymplPoint xs{x, 0.0};
        const TangentVector u = randomTangent(x, rng, true);
        jj = std::max(jj, (apply_J(bp, xs, apply_J(bp, xs, u)) + u).maxAbs());
        const TangentVector c = projectToContactPlane(bp, x, v);
        const double nrm = c.maxAbs();
        if (nrm > 1e-6)
            compat = std::min(compat, dAlpha(bp, x, c, apply_J(bp, xs, c)) / (nrm * nrm));
        if (bp.collar.width() > 0)
        {
            BindingPoint y = x;
            y.r = bp.collar.lo + bp.collar.width() * (s + 0.5) / N;
            push = std::max(push, (pushforwardTildeReeb(tp, bp, y) - reeb_field_binding(bp, y))
                                      .maxAbs());
        }
    }
    struct Row
    {
        const char* name;
        double worst;
        double tol;
        bool pass;
    };
    const std::vector<Row> rows = {
        {"alpha(R)=1", alphaR, 1e-10, alphaR <= 1e-10},
        {"dalpha(R,v)=0", dAlphaR, 1e-9, dAlphaR <= 1e-9},
        {"dalpha exact vs finite difference", fd, 1e-9, fd <= 1e-9},
        {"J^2=-1", jj, 1e-9, jj <= 1e-9},
        {"dalpha(v,Jv)>0 on the contact plane", compat, 0.0, compat > 0},
        {"tilde Reeb pushforward", push, 1e-8, push <= 1e-8},
    };
    CsvTable t("geometry_check.csv");
    Json j;
    Json table = Json::array();
    bool all = true;
    for (const Row& r : rows)
    {
        t.add({std::string(r.name), static_cast<long long>(N), r.worst, r.tol,
               static_cast<long long>(r.pass)});
        table.push_back({{"check", r.name}, {"worst", r.worst}, {"pass", r.pass}});
        all = all && r.pass;
    }
    j["checks"] = table;
    j["pass"] = all;
    writeCsv(out, t);
    writeJson(out / "geometry.json", j);
    return j;
}

inline Json stageOrbits(const Model& m, const std::filesystem::path& out)
{
    const TwistProfile& tp = m.twist;
    const BindingProfile& bp = m.binding;
    const OrbitLevel principal = find_principal_level(tp, bp.formScale, bp.kappa);
    const auto levels = enumerate_orbit_levels(tp, m.cfg.actionBoundFactor * principal.action,
                                               m.cfg.denomCap, bp.formScale, bp.kappa);
    CsvTable t("orbit_levels.csv");
    for (const OrbitLevel& lv : levels)
    {
        Cell degree = std::string();
        if (lv.isPrincipal)
            degree = static_cast<long long>(sft_degree(tp, lv, m.cfg.n, 0).degree);
        t.add({lv.pLevel, lv.gValue, static_cast<long long>(lv.m), static_cast<long long>(lv.i),
               lv.period, lv.action, degree, static_cast<long long>(lv.isPrincipal),
               static_cast<long long>(lv.a),
               lv.bindingRadius ? Cell(*lv.bindingRadius) : Cell(std::string())});
    }
    const ClosureReport cl =
        verify_closure_by_flow(bp, principal, m.cfg.tol.root, m.cfg.n, m.cfg.seed);
    const OrbitSpaceReport hom = orbit_space_homology(m.cfg.n);
    Json ranks = Json::object();
    for (const auto& [deg, rank] : hom.bettiRanks)
        ranks[std::to_string(deg)] = rank;
    Json j;
    j["principal_p"] = principal.pLevel;
    j["action_gamma0"] = principal.action;
    j["two_pi_h2_r0"] = kTwoPi * bp.h2.value(bp.r0);
    j["levels"] = levels.size();
    j["closure_distance"] = cl.distance;
    j["closure_pass"] = cl.passed;
    j["orbit_space"] = hom.space;
    j["betti_ranks"] = ranks;
    j["degenerate"] = hom.degenerate;
    writeCsv(out, t);
    writeJson(out / "orbits.json", j);
    return j;
}

inline Json stageIndex(const Model& m, const std::filesystem::path& out)
{
    const OrbitLevel principal = find_principal_level(m.twist, m.binding.formScale, m.binding.kappa);
    CsvTable t("degrees.csv");
    Json degrees = Json::array();
    int degreeGamma0 = 0;
    for (int i = 1; i <= m.cfg.maxCover; ++i)
    {
        for (int morse : {0, 2 * m.cfg.n - 3})
        {
            const DegreeResult d = sft_degree(m.twist, coverLevel(principal, i), m.cfg.n, morse);
            t.add({std::string("principal"), static_cast<long long>(i),
                   static_cast<long long>(morse), d.muTotal.value(),
                   static_cast<long long>(d.degree)});
            degrees.push_back({{"i", i},
                               {"morse_index", morse},
                               {"mu", d.muTotal.str()},
                               {"degree", d.degree}});
            if (i == 1 && morse == 0)
                degreeGamma0 = d.degree;
        }
    }
    Json j;
    j["n"] = m.cfg.n;
    j["degree_of_gamma0"] = degreeGamma0;
    j["degrees"] = degrees;
    writeCsv(out, t);
    writeJson(out / "index.json", j);
    return j;
}

inline Json stagePlane(const Model& m, const std::filesystem::path& out, PlaneSolution* keep = nullptr)
{
    const BindingProfile& bp = m.binding;
    const PlaneSolution sol = solve_plane(bp, m.cfg.rAt1, 0.0, planeOptions(m.cfg));
    PlaneEnergy e = plane_energy_report(bp, sol);
    CsvTable t("plane.csv");
    double coreErr = 0.0;
    const double a = bp.collar.lo > 0 ? bp.collar.lo * m.cfg.blendStartFraction : 0.0;
    for (std::size_t j = 0; j < sol.size(); ++j)
    {
        t.add({sol.rhoGrid[j], sol.rVals[j], sol.tVals[j]});
        if (sol.rVals[j] <= a)
            coreErr = std::max(coreErr, std::abs(sol.rVals[j] - m.cfg.rAt1 * sol.rhoGrid[j] *
                                                                  sol.rhoGrid[j]));
    }
    const double target = kTwoPi * bp.h2.value(bp.r0);
    Json j;
    j["samples"] = sol.size();
    j["rho_max"] = sol.rhoGrid.back();
    j["r_end_minus_r0"] = sol.rVals.back() - bp.r0;
    j["core_error"] = coreErr;
    j["stokes"] = e.stokes;
    j["quadrature"] = e.quadrature;
    j["relative_gap"] = e.relativeGap;
    j["action_gamma0"] = target;
    j["pass"] = std::abs(e.stokes - target) <= m.cfg.tol.quadrature * target &&
                e.relativeGap <= m.cfg.tol.quadrature;
    writeCsv(out, t);
    writeJson(out / "plane.json", j);
    if (keep)
        *keep = sol;
    return j;
}

inline Json stageLincr(const Model& m, const std::filesystem::path& out, const PlaneSolution& sol)
{
    const WEquation we = assemble_W_equation(m.binding, sol);
    const KernelReport rep =
        kernel_dimension(we, m.cfg.delta.value_or(0.0), m.cfg.modes, m.cfg.n, m.cfg.tol.rank);
    CsvTable shoot("lincr_shooting.csv");
    for (const ModeCount& mc : rep.details)
    {
        const std::string par = mc.parity == ModeParity::Cos ? "cos" : "sin";
        for (const auto* leg : {&mc.forwardTrace, &mc.backwardTrace})
        {
            const std::string name = leg == &mc.forwardTrace ? "regular" : "admissible";
            for (const ShootSample& s : *leg)
                for (std::size_t c = 0; c < s.logNorms.size(); ++c)
                    shoot.add({static_cast<long long>(mc.k), par, std::string("main"), name,
                               std::exp(s.sigma), static_cast<long long>(c), s.logNorms[c]});
        }
    }
    CsvTable modes("lincr_modes.csv");
    Json perMode = Json::object();
    for (const auto& [mode, cnt] : rep.perMode)
    {
        modes.add({static_cast<long long>(mode), static_cast<long long>(cnt)});
        perMode[std::to_string(mode)] = cnt;
    }
    Json j;
    j["per_mode"] = perMode;
    j["total"] = rep.total;
    j["non_decaying_bounded"] = rep.nonDecayingBounded;
    j["delta"] = rep.delta;
    j["spectral_gap"] = rep.spectralGap;
    j["a_norm"] = rep.ANorm;
    j["a_norm_below_2"] = rep.ANormBelow2;
    j["explicit_element_residual"] = we.residualS;
    j["pass"] = rep.total == 5 && rep.nonDecayingBounded == 2 * m.cfg.n - 3;
    writeCsv(out, shoot);
    writeCsv(out, modes);
    writeJson(out / "lincr.json", j);
    return j;
}

inline Json stageEnergy(const Model& m, const std::filesystem::path& out)
{
    const BindingProfile& bp = m.binding;
    const double rCap = m.cfg.rAt1;
    const AuditReport audit = energy_bound_audit(bp, planeAuditInput(bp, rCap));
    CsvTable t("energy_levels.csv");
    double worstWinding = 0.0;
    for (int j = 1; j <= 512; ++j)
    {
        const double r = bp.r0 * j / 512;
        const LevelCircle lc = planeLevelCircle(bp, r);
        const double w = windingIntegral(bp, lc) / kTwoPi;
        worstWinding = std::max(worstWinding, std::abs(w - 1));
        t.add({r, w, action(lc), bp.h2.d1(r) * windingIntegral(bp, lc)});
    }
    Json j;
    j["E1"] = audit.E1;
    j["E2"] = audit.E2;
    j["cap_action"] = audit.capAction;
    j["total"] = audit.total;
    j["bound"] = audit.bound;
    j["winding_max_error"] = worstWinding;
    j["pass"] = audit.passed && std::abs(audit.E1) <= 1e-9 && worstWinding <= 1e-9;
    writeCsv(out, t);
    writeJson(out / "energy.json", j);
    return j;
}

inline const std::vector<std::string>& stageNames()
{
    static const std::vector<std::string> names = {"profiles", "validate", "geometry", "orbits",
                                                   "index",    "plane",    "lincr",    "energy"};
    return names;
}

/// Runs one stage or all of them; `all` also writes summary.json.
inline Json runStage(const std::string& stage, const RunConfig& cfg,
                     const std::filesystem::path& out)
{
    const Model m = buildModel(cfg);
    if (stage == "profiles")
        return stageProfiles(m, out);
    if (stage == "validate")
        return stageValidate(m, out);
    if (stage == "geometry")
        return stageGeometry(m, out);
    if (stage == "orbits")
        return stageOrbits(m, out);
    if (stage == "index")
        return stageIndex(m, out);
    if (stage == "plane")
        return stagePlane(m, out);
    if (stage == "lincr")
    {
        PlaneSolution sol;
        stagePlane(m, out, &sol);
        return stageLincr(m, out, sol);
    }
    if (stage == "energy")
        return stageEnergy(m, out);
    if (stage != "all")
        throw DomainError("unknown stage '" + stage + "'");

    const Json v = stageValidate(m, out);
    const Json g = stageGeometry(m, out);
    const Json o = stageOrbits(m, out);
    const Json ix = stageIndex(m, out);
    PlaneSolution sol;
    const Json p = stagePlane(m, out, &sol);
    const Json l = stageLincr(m, out, sol);
    const Json e = stageEnergy(m, out);
    Json s;
    s["degree_of_gamma0"] = ix["degree_of_gamma0"];
    s["plane_energy"] = p["stokes"];
    s["action_gamma0"] = o["action_gamma0"];
    s["kernel_total"] = l["total"];
    s["pass_flags"] = {{"validate", v["pass"]},  {"geometry", g["pass"]},
                       {"orbits", o["closure_pass"]},
                       {"index", ix["degree_of_gamma0"] == 1}, {"plane", p["pass"]},
                       {"lincr", l["pass"]},      {"energy", e["pass"]}};
    writeJson(out / "summary.json", s);
    return s;
}

} // namespace dehn
