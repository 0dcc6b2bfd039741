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

#ifndef QNPHASE_IO_HPP
#define QNPHASE_IO_HPP

// Result persistence: CSV tables (17 significant digits), JSON manifests and
// figure-data exports.
//
//   results.csv  one row per (grid point, N, realization)
//   summary.csv  one row per (grid point, N)
//   samples.csv  per-sample estimates, when record_samples is set
//   qcr.csv      QCR search table, best_networks.json its best realizations
//   manifest.json

#include "qnphase/harness.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnphase {

namespace fs = std::filesystem;

inline std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt(std::uint64_t v) { return std::to_string(v); }

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path), width_(header.size())
    {
        if (!out_)
            throw std::runtime_error("cannot write " + path.string());
        row(header);
    }

    void row(const std::vector<std::string>& cells)
    {
        if (cells.size() != width_)
            throw std::logic_error("CSV row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

private:
    std::ofstream out_;
    std::size_t width_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw std::runtime_error("missing CSV column " + name);
    }

    double number(std::size_t r, const std::string& name) const { return std::stod(rows.at(r).at(column(name))); }
    const std::string& text(std::size_t r, const std::string& name) const { return rows.at(r).at(column(name)); }
};

inline CsvTable read_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (!line.empty() && line.back() == ',')
            cells.emplace_back();
        return cells;
    };
    CsvTable t;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty CSV " + path.string());
    t.header = split(line);
    while (std::getline(in, line))
        if (!line.empty())
            t.rows.push_back(split(line));
    return t;
}

inline const std::vector<std::string> RESULTS_COLUMNS{
    "scenario", "config_hash", "master_seed", "axis", "grid_index", "grid_value", "N", "realization", "Q", "t", "dt",
    "network_seed", "phase_seed", "noise_seed", "lambda_random", "error_random", "lambda_fixed", "error_fixed",
    "std_dev", "fixed_phase", "theta", "leakage"};

inline const std::vector<std::string> SUMMARY_COLUMNS{
    "scenario", "axis", "grid_index", "grid_value", "N", "n_realizations", "mean_error_random", "sem_error_random",
    "mean_error_fixed", "sem_error_fixed", "mean_std_dev", "min_std_dev", "min_std_dev_realization", "se_min_std_dev",
    "ratio_random", "ratio_fixed", "sqrt_N", "qfi", "qcr_bound", "max_leakage", "mean_lambda_random"};

inline const std::vector<std::string> SAMPLES_COLUMNS{"scenario", "grid_index", "N", "realization", "kind",
                                                      "sample", "phi_true", "signal", "phi_est"};

inline const std::vector<std::string> QCR_COLUMNS{"scenario", "grid_index", "N", "qfi", "qcr_bound", "mean_std_dev",
                                                  "min_std_dev", "se_min_std_dev", "best_realization"};

/// Creates (or, with overwrite, reuses) an output directory.
inline void prepare_output_dir(const fs::path& dir, bool overwrite)
{
    if (fs::exists(dir / "manifest.json") && !overwrite)
        throw std::runtime_error("output directory " + dir.string() + " already holds results; pass --overwrite");
    fs::create_directories(dir);
}

inline std::vector<std::string> write_tables(const ExperimentResult& res, const fs::path& dir)
{
    const auto& c = res.config;
    const std::string axis = to_string(c.axis);
    std::vector<std::string> files{"results.csv", "summary.csv"};
    {
        CsvWriter w(dir / "results.csv", RESULTS_COLUMNS);
        for (const auto& r : res.rows)
            w.row({c.name, res.config_hash, fmt(c.master_seed), axis, std::to_string(r.grid_index), fmt(r.grid_value),
                   std::to_string(r.degree), std::to_string(r.realization), std::to_string(r.q_nodes), fmt(r.t),
                   fmt(r.dt), fmt(r.network_seed), fmt(r.phase_seed), fmt(r.noise_seed), fmt(r.lambda_random),
                   fmt(r.error_random), fmt(r.lambda_fixed), fmt(r.error_fixed), fmt(r.std_dev), fmt(r.fixed_phase),
                   fmt(r.theta), fmt(r.leakage)});
    }
    {
        CsvWriter w(dir / "summary.csv", SUMMARY_COLUMNS);
        for (const auto& s : res.summary)
            w.row({c.name, axis, std::to_string(s.grid_index), fmt(s.grid_value), std::to_string(s.degree),
                   std::to_string(s.n_realizations), fmt(s.mean_error_random), fmt(s.sem_error_random),
                   fmt(s.mean_error_fixed), fmt(s.sem_error_fixed), fmt(s.mean_std_dev), fmt(s.min_std_dev),
                   std::to_string(s.min_std_dev_realization), fmt(s.se_min_std_dev), fmt(s.ratio_random),
                   fmt(s.ratio_fixed), fmt(std::sqrt(static_cast<double>(s.degree))), fmt(s.qfi), fmt(s.qcr_bound),
                   fmt(s.max_leakage), fmt(s.mean_lambda_random)});
    }
    if (!res.samples.empty()) {
        files.push_back("samples.csv");
        CsvWriter w(dir / "samples.csv", SAMPLES_COLUMNS);
        for (const auto& s : res.samples)
            w.row({c.name, std::to_string(s.grid_index), std::to_string(s.degree), std::to_string(s.realization),
                   to_string(s.kind), std::to_string(s.sample), fmt(s.phi_true), fmt(s.signal), fmt(s.phi_est)});
    }
    return files;
}

inline void write_manifest(const ExperimentResult& res, const fs::path& dir, const std::vector<std::string>& files)
{
    const nlohmann::json m{{"tool", "qnphase"},
                           {"schema_version", SCHEMA_VERSION},
                           {"name", res.config.name},
                           {"config_hash", res.config_hash},
                           {"config", to_json(res.config)},
                           {"realizations", res.realizations},
                           {"paper_scale", res.paper_scale},
                           {"threads", res.threads},
                           {"wall_seconds", res.wall_seconds},
                           {"warnings", res.warnings},
                           {"files", files}};
    std::ofstream out(dir / "manifest.json");
    out << m.dump(2) << '\n';
}

inline void write_experiment(const ExperimentResult& res, const fs::path& dir, bool overwrite)
{
    prepare_output_dir(dir, overwrite);
    write_manifest(res, dir, write_tables(res, dir));
}

inline void write_qcr(const QcrResult& q, const fs::path& dir, bool overwrite)
{
    prepare_output_dir(dir, overwrite);
    auto files = write_tables(q.experiment, dir);
    {
        CsvWriter w(dir / "qcr.csv", QCR_COLUMNS);
        for (const auto& e : q.entries)
            w.row({q.experiment.config.name, std::to_string(e.grid_index), std::to_string(e.degree), fmt(e.qfi),
                   fmt(e.bound), fmt(e.mean_std_dev), fmt(e.min_std_dev), fmt(e.se_min_std_dev),
                   std::to_string(e.best_realization)});
    }
    nlohmann::json best = nlohmann::json::array();
    for (const auto& e : q.entries)
        best.push_back({{"grid_index", e.grid_index},
                        {"N", e.degree},
                        {"realization", e.best_realization},
                        {"std_dev", e.min_std_dev},
                        {"network", e.best_network}});
    std::ofstream(dir / "best_networks.json") << best.dump(2) << '\n';
    files.push_back("qcr.csv");
    files.push_back("best_networks.json");
    write_manifest(q.experiment, dir, files);
}

struct PeriodFit {
    int degree = 1;
    int realization = 0;
    double fitted = 0.0;
    double expected = 0.0;
    double relative_error = 0.0;
};

/// Oscillation period of the estimated signal over the full phase circle, per (N, realization).
inline std::vector<PeriodFit> fit_signal_periods(const std::vector<SampleRow>& samples)
{
    std::map<std::pair<int, int>, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& s : samples)
        if (s.kind == SampleKind::signal) {
            auto& g = groups[{s.degree, s.realization}];
            g.first.push_back(s.phi_true);
            g.second.push_back(s.signal);
        }
    std::vector<PeriodFit> out;
    for (const auto& [key, xy] : groups) {
        PeriodFit f;
        f.degree = key.first;
        f.realization = key.second;
        f.expected = 2.0 * std::numbers::pi / f.degree;
        f.fitted = fit_oscillation(xy.first, xy.second).period;
        f.relative_error = std::abs(f.fitted - f.expected) / f.expected;
        out.push_back(f);
    }
    return out;
}

inline std::vector<SampleRow> read_samples(const fs::path& path)
{
    const CsvTable t = read_csv(path);
    std::vector<SampleRow> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        SampleRow s;
        s.grid_index = static_cast<std::size_t>(t.number(r, "grid_index"));
        s.degree = static_cast<int>(t.number(r, "N"));
        s.realization = static_cast<int>(t.number(r, "realization"));
        const std::string& k = t.text(r, "kind");
        s.kind = k == "signal" ? SampleKind::signal : k == "fixed_test" ? SampleKind::fixed_test : SampleKind::test;
        s.sample = static_cast<int>(t.number(r, "sample"));
        s.phi_true = t.number(r, "phi_true");
        s.signal = t.number(r, "signal");
        s.phi_est = t.number(r, "phi_est");
        out.push_back(s);
    }
    return out;
}

inline bool valid_figure_id(const std::string& id)
{
    return id.size() == 4 && id.rfind("fig", 0) == 0 && id[3] >= '2' && id[3] <= '9';
}

/// Result directories below `root` (itself, or one level of scenario subdirectories).
inline std::vector<fs::path> result_dirs(const fs::path& root)
{
    if (fs::exists(root / "summary.csv"))
        return {root};
    std::vector<fs::path> out;
    if (fs::is_directory(root))
        for (const auto& e : fs::directory_iterator(root))
            if (e.is_directory() && fs::exists(e.path() / "summary.csv"))
                out.push_back(e.path());
    std::sort(out.begin(), out.end());
    if (out.empty())
        throw std::runtime_error("no results found under " + root.string());
    return out;
}

/// Writes plot-ready tables for one figure into `out_dir`; returns the files written.
inline std::vector<fs::path> export_figure_data(const fs::path& result, const std::string& figure_id,
                                                const fs::path& out_dir)
{
    if (!valid_figure_id(figure_id))
        throw ConfigError("figure-id", "expected one of fig2..fig9, got \"" + figure_id + "\"");
    fs::create_directories(out_dir);
    std::vector<fs::path> written;
    const auto dirs = result_dirs(result);

    if (figure_id == "fig2") {
        const fs::path sig = out_dir / "fig2_signal.csv", per = out_dir / "fig2_periods.csv";
        CsvWriter ws(sig, {"scenario", "N", "realization", "phi", "signal"});
        CsvWriter wp(per, {"scenario", "N", "realization", "fitted_period", "expected_period", "relative_error"});
        bool any = false;
        for (const auto& d : dirs) {
            if (!fs::exists(d / "samples.csv"))
                continue;
            const std::string name = d.filename().string();
            const auto samples = read_samples(d / "samples.csv");
            for (const auto& s : samples)
                if (s.kind == SampleKind::signal) {
                    any = true;
                    ws.row({name, std::to_string(s.degree), std::to_string(s.realization), fmt(s.phi_true),
                            fmt(s.signal)});
                }
            for (const auto& f : fit_signal_periods(samples))
                wp.row({name, std::to_string(f.degree), std::to_string(f.realization), fmt(f.fitted), fmt(f.expected),
                        fmt(f.relative_error)});
        }
        if (!any)
            throw std::runtime_error("fig2 export needs signal samples (protocol.signal_points with record_samples)");
        return {sig, per};
    }

    const fs::path path = out_dir / (figure_id + ".csv");
    CsvWriter w(path, {"scenario", "axis", "grid_value", "N", "mean_error_random", "sem_error_random",
                       "mean_error_fixed", "sem_error_fixed", "ratio_random", "ratio_fixed", "mean_std_dev",
                       "min_std_dev", "qcr_bound", "sqrt_N", "hl_N"});
    for (const auto& d : dirs) {
        const CsvTable t = read_csv(d / "summary.csv");
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            w.row({t.text(r, "scenario"), t.text(r, "axis"), t.text(r, "grid_value"), t.text(r, "N"),
                   t.text(r, "mean_error_random"), t.text(r, "sem_error_random"), t.text(r, "mean_error_fixed"),
                   t.text(r, "sem_error_fixed"), t.text(r, "ratio_random"), t.text(r, "ratio_fixed"),
                   t.text(r, "mean_std_dev"), t.text(r, "min_std_dev"), t.text(r, "qcr_bound"), t.text(r, "sqrt_N"),
                   t.text(r, "N")});
    }
    written.push_back(path);
    return written;
}

} // namespace qnphase

#endif // QNPHASE_IO_HPP
