// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dehn/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"dehn: Reeb dynamics, planes and Cauchy-Riemann kernels on the binding model"};
    std::string configPath;
    std::string outDir;
    std::uint64_t seed = 0;
    bool quiet = false;
    bool schema = false;
    app.add_flag("--schema", schema, "Print the CSV column layout and exit");
    app.add_flag("--quiet", quiet, "Suppress the JSON report on stdout");

    std::string stage;
    std::vector<CLI::App*> subs;
    for (const char* nm : {"profiles", "validate", "geometry", "orbits", "index", "plane",
                         "lincr", "energy", "all"})
    {
        const std::string name = nm;
        CLI::App* sub = app.add_subcommand(name, "Run the " + name + " stage");
        sub->add_option("--config", configPath, "Config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", outDir, "Output directory (overrides run.out)");
        sub->add_option("--seed", seed, "Random seed (overrides run.seed)");
        sub->add_flag("--quiet", quiet, "Suppress the JSON report on stdout");
        sub->callback([&stage, name] { stage = name; });
        subs.push_back(sub);
    }
    app.require_subcommand(0, 1);
    CLI11_PARSE(app, argc, argv);

    if (schema)
    {
        std::cout << dehn::schemaText();
        return 0;
    }
    if (stage.empty())
    {
        std::cerr << app.help();
        return 2;
    }
    try
    {
        dehn::RunConfig cfg = dehn::loadConfig(configPath);
        for (CLI::App* sub : subs)
        {
            if (sub->count("--out"))
                cfg.outDir = outDir;
            if (sub->count("--seed"))
                cfg.seed = seed;
        }
        const dehn::Json report = dehn::runStage(stage, cfg, cfg.outDir);
        if (!quiet)
            std::cout << report.dump(2) << "\n";
    }
    catch (const dehn::Error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
