// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run configuration. Grammar, one statement per line:
//   [section]          starts a section
//   key = value        assignment inside the current section
//   # ... or ; ...     comment (whole line)
// Blank lines are ignored. Keys are case-sensitive. Every key must be known.
#pragma once

#include "dehn/common.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace dehn
{

class ConfigError : public Error
{
  public:
    ConfigError(const std::string& what, int line)
        : Error("config line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    int line() const { return line_; }

  private:
    int line_;
};

struct Tolerances
{
    double quadrature = 1e-6;
    double ode = 1e-13;
    double root = 1e-8;
    double rank = 1e-7;
};

struct RunConfig
{
    // [model]
    int n = 3;
    // [twist]
    int k = -1;
    double eps = 0.1;
    double pPlateau = 0.5;
    std::string twistShape = "cosine-ramp";
    double wiggle = 0.0;
    double sMax = 2.5;
    int tableNodes = 256;
    // [binding]
    double r0 = 0.4;
    double rMax = 0.5;
    std::string bindingShape = "twist-collar";
    double collarStart = 0.25;
    double blendStartFraction = 0.25;
    // [plane]
    double rAt1 = 0.05;
    double tolAsym = 1e-6;
    double rhoMin = 1e-8;
    double sigmaStep = 0.01;
    // [orbits]
    double actionBoundFactor = 3.0;
    int denomCap = 8;
    int maxCover = 3;
    // [lincr]
    std::optional<double> delta;
    int modes = 5;
    // [tolerances]
    Tolerances tol;
    // [run]
    std::string outDir = "out";
    std::uint64_t seed = 20260101;
    int samples = 10000;
};

namespace detail
{

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parseDouble(const std::string& v, const std::string& key, int line)
{
    std::size_t used = 0;
    double x = 0.0;
    try
    {
        x = std::stod(v, &used);
    }
    catch (const std::exception&)
    {
        throw ConfigError("key '" + key + "' expects a number, got '" + v + "'", line);
    }
    if (used != v.size() || !std::isfinite(x))
        throw ConfigError("key '" + key + "' expects a number, got '" + v + "'", line);
    return x;
}

inline long long parseInt(const std::string& v, const std::string& key, int line)
{
    std::size_t used = 0;
    long long x = 0;
    try
    {
        x = std::stoll(v, &used);
    }
    catch (const std::exception&)
    {
        throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'", line);
    }
    if (used != v.size())
        throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'", line);
    return x;
}

} // namespace detail

/// Checks the field invariants; `line` is reported for errors (0 = none).
inline void validateConfig(const RunConfig& c, int line = 0)
{
    if (c.n < 2)
        throw ConfigError("model.n must be >= 2", line);
    if (c.k == 0)
        throw ConfigError("twist.k must be nonzero", line);
    for (double t : {c.tol.quadrature, c.tol.ode, c.tol.root, c.tol.rank})
        if (!(t > 0))
            throw ConfigError("tolerances must be positive", line);
    if (c.delta && !(*c.delta > 0))
        throw ConfigError("lincr.delta must be positive", line);
    if (c.modes < 0 || c.denomCap < 1 || c.maxCover < 1 || c.samples < 1 || c.tableNodes < 2)
        throw ConfigError("counts must be positive", line);
}

inline RunConfig parseConfig(std::istream& in)
{
    RunConfig c;
    using Setter = std::function<void(const std::string&, const std::string&, int)>;
    auto dbl = [](double& f) -> Setter {
        return [&f](const std::string& v, const std::string& k, int l) {
            f = detail::parseDouble(v, k, l);
        };
    };
    auto integer = [](int& f) -> Setter {
        return [&f](const std::string& v, const std::string& k, int l) {
            f = static_cast<int>(detail::parseInt(v, k, l));
        };
    };
    auto str = [](std::string& f) -> Setter {
        return [&f](const std::string& v, const std::string&, int) { f = v; };
    };
    const std::map<std::string, Setter> keys = {
        {"model.n", integer(c.n)},
        {"twist.k", integer(c.k)},
        {"twist.eps", dbl(c.eps)},
        {"twist.p_plateau", dbl(c.pPlateau)},
        {"twist.shape", str(c.twistShape)},
        {"twist.wiggle", dbl(c.wiggle)},
        {"twist.s_max", dbl(c.sMax)},
        {"twist.table_nodes", integer(c.tableNodes)},
        {"binding.r0", dbl(c.r0)},
        {"binding.r_max", dbl(c.rMax)},
        {"binding.shape", str(c.bindingShape)},
        {"binding.collar_start", dbl(c.collarStart)},
        {"binding.blend_start_fraction", dbl(c.blendStartFraction)},
        {"plane.r_at_1", dbl(c.rAt1)},
        {"plane.tol_asym", dbl(c.tolAsym)},
        {"plane.rho_min", dbl(c.rhoMin)},
        {"plane.sigma_step", dbl(c.sigmaStep)},
        {"orbits.action_bound_factor", dbl(c.actionBoundFactor)},
        {"orbits.denom_cap", integer(c.denomCap)},
        {"orbits.max_cover", integer(c.maxCover)},
        {"lincr.delta",
         [&c](const std::string& v, const std::string& k, int l) {
             c.delta = detail::parseDouble(v, k, l);
         }},
        {"lincr.modes", integer(c.modes)},
        {"tolerances.quadrature", dbl(c.tol.quadrature)},
        {"tolerances.ode", dbl(c.tol.ode)},
        {"tolerances.root", dbl(c.tol.root)},
        {"tolerances.rank", dbl(c.tol.rank)},
        {"run.out", str(c.outDir)},
        {"run.seed",
         [&c](const std::string& v, const std::string& k, int l) {
             const long long s = detail::parseInt(v, k, l);
             if (s < 0)
                 throw ConfigError("run.seed must be nonnegative", l);
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"run.samples", integer(c.samples)},
    };

    std::string section;
    std::string raw;
    int line = 0;
    int kLine = 0;
    while (std::getline(in, raw))
    {
        ++line;
        const std::string s = detail::trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';')
            continue;
        if (s.front() == '[')
        {
            if (s.back() != ']' || s.size() < 3)
                throw ConfigError("malformed section header '" + s + "'", line);
            section = detail::trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value', got '" + s + "'", line);
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string value = detail::trim(s.substr(eq + 1));
        if (section.empty())
            throw ConfigError("key '" + key + "' appears before any section", line);
        const std::string full = section + "." + key;
        const auto it = keys.find(full);
        if (it == keys.end())
            throw ConfigError("unknown key '" + full + "'", line);
        if (value.empty())
            throw ConfigError("key '" + full + "' has an empty value", line);
        it->second(value, full, line);
        if (full == "twist.k")
            kLine = line;
    }
    if (c.k == 0)
        throw ConfigError("twist.k must be nonzero", kLine);
    validateConfig(c, line);
    return c;
}

inline RunConfig parseConfigString(const std::string& text)
{
    std::istringstream in(text);
    return parseConfig(in);
}

inline RunConfig loadConfig(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open config '" + path + "'");
    return parseConfig(in);
}

} // namespace dehn
