// Copyright (c) 2026 The cieig Authors.
// SPDX-License-Identifier: Apache-2.0

// Batch front-end: reads an experiment configuration, runs the
// contour-integral eigensolver, and writes eigenvalue tables plus
// convergence sweep data for plotting.

#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cieig/cieig.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config_error = 2;
constexpr int exit_solver_failure = 3;
constexpr int exit_verification_mismatch = 4;

std::vector<int> parse_sweep_list(const std::string& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        std::size_t used = 0;
        const int n = std::stoi(item, &used);
        if (used != item.size() || n < 1) {
            throw cieig::ConfigError("invalid sweep entry '" + item + "'", "--sweep");
        }
        out.push_back(n);
    }
    if (out.empty()) {
        throw cieig::ConfigError("sweep list is empty", "--sweep");
    }
    return out;
}

void print_error(const char* kind, const std::string& message)
{
    cieig::Json diag;
    diag["error"] = {{"kind", kind}, {"message", message}};
    std::cerr << diag.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"contour-integral nonlinear eigenvalue experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    std::string sweep_override;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    bool verify_override = false;

    CLI::App* run = app.add_subcommand("run", "run one experiment configuration");
    run->add_option("config", config_path, "experiment configuration file (JSON)")
        ->required();
    run->add_option("--output", output_override, "output directory (overrides config)");
    run->add_option("--sweep", sweep_override,
                    "comma-separated node counts for a convergence sweep");
    run->add_option("--seed", seed_override, "probe seed (overrides config)")
        ->each([&](const std::string&) { seed_given = true; });
    run->add_flag("--verify", verify_override, "run oracle cross-checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config_error;
    }

    cieig::ExperimentConfig config;
    try {
        config = cieig::parse_config_file(config_path);
        if (!output_override.empty()) {
            config.output = output_override;
        }
        if (!sweep_override.empty()) {
            config.sweep = parse_sweep_list(sweep_override);
        }
        if (seed_given) {
            config.solver.seed = seed_override;
        }
        if (verify_override) {
            config.verify = true;
        }
    } catch (const cieig::ConfigError& e) {
        print_error("config", e.what());
        return exit_config_error;
    }

    try {
        const cieig::RunReport report = cieig::run_experiment(config);
        std::cout << "accepted " << report.result.accepted.size() << " eigenvalue(s), "
                  << "rejected " << report.result.rejected.size() << ", rank "
                  << report.result.rank << "\n";
        for (const cieig::Eigenpair& pair : report.result.accepted) {
            std::printf("  lambda = %+.12e %+.12ei   residual %.3e\n",
                        pair.lambda.real(), pair.lambda.imag(), pair.residual);
        }
        std::cout << "results written to " << report.summary_json.parent_path().string()
                  << "\n";
        if (report.exit_code == exit_verification_mismatch) {
            print_error("verification",
                        "oracle cross-check failed; see summary.json for details");
            return exit_verification_mismatch;
        }
        return exit_ok;
    } catch (const cieig::ConfigError& e) {
        print_error("config", e.what());
        return exit_config_error;
    } catch (const std::exception& e) {
        print_error("solver", e.what());
        return exit_solver_failure;
    }
}
