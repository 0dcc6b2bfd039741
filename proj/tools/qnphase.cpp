// Copyright 2026 The qnphase Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qnphase command-line entry point.
//
// Exit codes: 0 success, 1 runtime error, 2 configuration or usage error.
// Errors are reported on stderr as one JSON object.

#include "qnphase/qnphase.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

namespace fs = std::filesystem;

enum Exit { ok = 0, runtime_failure = 1, config_failure = 2 };

void report_error(const std::string& kind, const std::string& message, const std::string& path = {})
{
    nlohmann::json j{{"error", kind}, {"message", message}};
    if (!path.empty())
        j["path"] = path;
    std::cerr << j.dump() << '\n';
}

void report_warnings(const std::string& scenario, const std::vector<std::string>& warnings)
{
    for (const auto& w : warnings)
        std::cerr << nlohmann::json{{"warning", w}, {"scenario", scenario}}.dump() << '\n';
}

struct Common {
    std::string config;
    std::string out_dir = "results";
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool overwrite = false;
    bool paper_scale = false;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("config", c.config, "Scenario JSON file (single scenario or bundle)")->required();
    cmd->add_option("--out-dir", c.out_dir, "Directory receiving one subdirectory per scenario");
    cmd->add_option("--seed", c.seed, "Override the master seed of every scenario");
    cmd->add_option("--threads", c.threads, "Worker threads (default: QNPHASE_THREADS, then all cores)");
    cmd->add_flag("--overwrite", c.overwrite, "Replace existing results");
    cmd->add_flag("--paper-scale", c.paper_scale, "Use the full realization counts");
}

qnphase::RunOptions options(const Common& c)
{
    qnphase::RunOptions o;
    o.threads = c.threads;
    o.seed = c.seed;
    o.paper_scale = c.paper_scale;
    return o;
}

int run_scenarios(const Common& c, bool require_sweep, bool qcr)
{
    const auto scenarios = qnphase::load_scenarios(c.config);
    if (require_sweep)
        for (std::size_t i = 0; i < scenarios.size(); ++i)
            if (scenarios[i].grid.size() < 2)
                throw qnphase::ConfigError(scenarios[i].name + ".sweep.grid", "a sweep needs at least 2 grid points");
    if (qcr)
        for (const auto& s : scenarios)
            if (s.shots.kind != qnphase::ShotKind::bernoulli_repetition)
                throw qnphase::ConfigError(s.name + ".shots.model", "QCR search needs the bernoulli shot model");
    for (const auto& s : scenarios) {
        const fs::path dir = fs::path(c.out_dir) / s.name;
        if (fs::exists(dir / "manifest.json") && !c.overwrite)
            throw std::runtime_error("output directory " + dir.string() + " already holds results; pass --overwrite");
    }
    for (const auto& s : scenarios) {
        const fs::path dir = fs::path(c.out_dir) / s.name;
        if (qcr) {
            const auto res = qnphase::run_qcr_search(s, options(c));
            qnphase::write_qcr(res, dir, c.overwrite);
            report_warnings(s.name, res.experiment.warnings);
            for (const auto& e : res.entries)
                std::printf("%s N=%d  delta_ave=%.5g  delta_min=%.5g  bound=%.5g\n", s.name.c_str(), e.degree,
                            e.mean_std_dev, e.min_std_dev, e.bound);
            std::printf("%s: %zu rows in %.1f s -> %s\n", s.name.c_str(), res.experiment.rows.size(),
                        res.experiment.wall_seconds, dir.string().c_str());
        } else {
            const auto res = qnphase::run_scenario(s, options(c));
            qnphase::write_experiment(res, dir, c.overwrite);
            report_warnings(s.name, res.warnings);
            std::printf("%s: %zu rows in %.1f s -> %s\n", s.name.c_str(), res.rows.size(), res.wall_seconds,
                        dir.string().c_str());
        }
    }
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Phase estimation with quantum networks: scenario runner"};
    app.require_subcommand(1);

    Common run_opts, sweep_opts, qcr_opts;
    auto* run = app.add_subcommand("run", "Run every scenario in a config file");
    add_common(run, run_opts);
    auto* sweep = app.add_subcommand("sweep", "Run scenarios whose sweep grid has several points");
    add_common(sweep, sweep_opts);
    auto* qcr = app.add_subcommand("qcr-search", "Random network search compared with the Cramer-Rao bound");
    add_common(qcr, qcr_opts);

    auto* validate = app.add_subcommand("validate", "Run the built-in invariant checks");

    std::string result_dir, figure_id, export_out;
    auto* exp = app.add_subcommand("export-figure-data", "Write plot-ready tables for one figure");
    exp->add_option("result", result_dir, "Result directory (a scenario or a parent of scenarios)")->required();
    exp->add_option("figure-id", figure_id, "fig2 .. fig9")->required();
    exp->add_option("--out-dir", export_out, "Destination (default: <result>/figure-data)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage", e.what());
        return config_failure;
    }

    try {
        if (*run)
            return run_scenarios(run_opts, false, false);
        if (*sweep)
            return run_scenarios(sweep_opts, true, false);
        if (*qcr)
            return run_scenarios(qcr_opts, false, true);
        if (*validate) {
            bool all = true;
            for (const auto& c : qnphase::run_validation()) {
                all = all && c.passed;
                std::printf("%-36s %s  value=%.3g  tol=%.3g\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.value,
                            c.tolerance);
            }
            return all ? ok : runtime_failure;
        }
        if (*exp) {
            const fs::path out = export_out.empty() ? fs::path(result_dir) / "figure-data" : fs::path(export_out);
            for (const auto& f : qnphase::export_figure_data(result_dir, figure_id, out))
                std::printf("%s\n", f.string().c_str());
            return ok;
        }
    } catch (const qnphase::ConfigError& e) {
        report_error("config", e.message(), e.path());
        return config_failure;
    } catch (const std::exception& e) {
        report_error("runtime", e.what());
        return runtime_failure;
    }
    return ok;
}
