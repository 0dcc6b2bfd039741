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

#ifndef QNPHASE_HARNESS_HPP
#define QNPHASE_HARNESS_HPP

// Scenario runner: per-realization work items on a thread pool, seeded phase
// and noise streams, readout training and evaluation, aggregation.

#include "qnphase/config.hpp"
#include "qnphase/metrics.hpp"
#include "qnphase/random.hpp"
#include "qnphase/response.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace qnphase {

struct RunOptions {
    int threads = 0;  // 0: QNPHASE_THREADS, then hardware concurrency
    bool paper_scale = false;
    std::optional<std::uint64_t> seed;
};

inline int resolve_threads(int requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("QNPHASE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0)
            return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// One (grid point, degree, realization) outcome.
struct ResultRow {
    std::size_t grid_index = 0;
    double grid_value = 0.0;
    int degree = 1;
    int realization = 0;
    int q_nodes = 0;
    double t = 0.0;
    double dt = 0.0;
    std::uint64_t network_seed = 0;
    std::uint64_t phase_seed = 0;
    std::uint64_t noise_seed = 0;
    double lambda_random = 0.0;
    double error_random = 0.0;  // averaged error over test phases in [0, pi/N]
    double lambda_fixed = 0.0;
    double error_fixed = 0.0;   // SDM at the fixed phase
    double std_dev = 0.0;       // single-estimate spread at the fixed phase
    double fixed_phase = 0.0;
    double theta = 0.0;
    double leakage = 0.0;
};

struct SummaryRow {
    std::size_t grid_index = 0;
    double grid_value = 0.0;
    int degree = 1;
    int n_realizations = 0;
    double mean_error_random = 0.0;
    double sem_error_random = 0.0;
    double mean_error_fixed = 0.0;
    double sem_error_fixed = 0.0;
    double mean_std_dev = 0.0;
    double min_std_dev = 0.0;
    int min_std_dev_realization = 0;
    double se_min_std_dev = 0.0;
    double ratio_random = std::numeric_limits<double>::quiet_NaN();  // error(N=1) / error(N)
    double ratio_fixed = std::numeric_limits<double>::quiet_NaN();
    double qfi = 0.0;
    double qcr_bound = std::numeric_limits<double>::quiet_NaN();
    double max_leakage = 0.0;
    double mean_lambda_random = 0.0;
};

enum class SampleKind { test, fixed_test, signal };

inline std::string to_string(SampleKind k)
{
    switch (k) {
    case SampleKind::test: return "test";
    case SampleKind::fixed_test: return "fixed_test";
    case SampleKind::signal: return "signal";
    }
    return "?";
}

struct SampleRow {
    std::size_t grid_index = 0;
    int degree = 1;
    int realization = 0;
    SampleKind kind = SampleKind::test;
    int sample = 0;
    double phi_true = 0.0;
    double signal = 0.0;    // I_est
    double phi_est = 0.0;
};

struct ExperimentResult {
    ScenarioConfig config;
    std::string config_hash;
    int realizations = 0;
    std::vector<ResultRow> rows;
    std::vector<SummaryRow> summary;
    std::vector<SampleRow> samples;
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;
    int threads = 1;
    bool paper_scale = false;
};

inline constexpr double LEAKAGE_LIMIT = 1e-6;

namespace detail {

enum Split : std::uint64_t { split_train = 0, split_validation = 1, split_test = 2, split_fixed_validation = 3,
                             split_fixed_test = 4, split_signal = 5 };

/// Dynamics needed for one point, minus the network realization.
struct DynamicsKey {
    ResourceSpec resource;
    int levels = 0;
    int q_nodes = 0;
    NoiseConfig noise;
    std::vector<double> times;
    std::optional<TimeWindow> window;

    std::string str() const
    {
        nlohmann::json j{{"f", static_cast<int>(resource.family)}, {"N", resource.degree}, {"p", resource.dephase_p},
                         {"d", levels}, {"Q", q_nodes}, {"g", {noise.decay, noise.dephasing, noise.depolarizing}},
                         {"t", times}};
        if (window)
            j["w"] = {window->begin, window->end};
        return j.dump();
    }
};

struct PointPlan {
    PointParams params;
    DynamicsKey key;
    std::size_t slot = 0;  // index into the response list of `key`
};

inline bool stepped(const ScenarioConfig& c, const NoiseConfig& n)
{
    return c.coupling == CouplingType::cascading || n.any();
}

inline std::vector<PointPlan> plan_points(const ScenarioConfig& c)
{
    std::vector<PointPlan> out;
    for (std::size_t g = 0; g < c.grid.size(); ++g)
        for (int d : c.point_degrees(g)) {
            PointPlan p;
            p.params = point_params(c, g, d);
            p.key.resource = p.params.resource;
            p.key.levels = p.params.levels;
            p.key.q_nodes = p.params.q_nodes;
            p.key.noise = p.params.noise;
            p.key.window = c.window;
            if (c.axis == SweepAxis::time) {
                p.key.times = c.grid;
                p.slot = g;
            } else {
                p.key.times = {p.params.t};
            }
            out.push_back(std::move(p));
        }
    return out;
}

/// Per-work-item caches: networks by Q, propagators by (Q, levels), responses by key.
class RealizationContext {
public:
    RealizationContext(const ScenarioConfig& c, int realization, const std::map<std::string, double>& dts)
        : c_(c), dts_(dts), seed_(derive_seed(c.master_seed, {tag(StreamTag::realization),
                                                               static_cast<std::uint64_t>(realization)}))
    {
    }

    std::uint64_t network_seed() const { return seed_; }

    const NetworkRealization& network(int q)
    {
        auto it = nets_.find(q);
        if (it == nets_.end())
            it = nets_.emplace(q, sample_realization(q, c_.coupling, seed_, c_.cascade_decay)).first;
        return it->second;
    }

    double dt_for(const DynamicsKey& key) const
    {
        const auto it = dts_.find(key.str());
        return it == dts_.end() ? c_.dt : it->second;
    }

    const ResponseResult& response(const DynamicsKey& key)
    {
        const std::string k = key.str();
        auto it = responses_.find(k);
        if (it != responses_.end())
            return it->second;
        return responses_.emplace(k, compute(key, dt_for(key))).first->second;
    }

    ResponseResult compute(const DynamicsKey& key, double dt)
    {
        const NetworkRealization& net = network(key.q_nodes);
        const DensityMatrix rho = make_resource(key.resource, key.levels);
        const HilbertSpace full = HilbertSpace::network(key.levels, key.q_nodes);
        ResponseRequest req;
        req.times = key.times;
        req.window = key.window;
        req.dt = dt;
        req.track_leakage = c_.coupling == CouplingType::ultra_strong;
        if (c_.coupling == CouplingType::cascading) {
            const CascadeStepper stepper(net, full, dt);
            return stepped_response(rho, full, [&](CMatrix& x) { stepper.step(x); }, req);
        }
        const Propagator& prop = propagator(key.q_nodes, key.levels);
        if (!key.noise.any())
            return coherent_response(rho, full, prop, req);
        const NoisyStepper stepper(full, prop, key.noise, dt);
        return stepped_response(rho, full, [&](CMatrix& x) { stepper.step(x); }, req);
    }

private:
    const Propagator& propagator(int q, int levels)
    {
        const auto key = std::make_pair(q, levels);
        auto it = props_.find(key);
        if (it == props_.end()) {
            const HilbertSpace full = HilbertSpace::network(levels, q);
            it = props_.emplace(key, std::make_unique<Propagator>(build_hamiltonian_real(network(q), full))).first;
        }
        return *it->second;
    }

    const ScenarioConfig& c_;
    const std::map<std::string, double>& dts_;
    std::uint64_t seed_;
    std::map<int, NetworkRealization> nets_;
    std::map<std::pair<int, int>, std::unique_ptr<Propagator>> props_;
    std::map<std::string, ResponseResult> responses_;
};

/// Largest change of any node mean, over a set of probe phases, between two responses.
inline double response_difference(const ResponseResult& a, const ResponseResult& b)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < a.responses.size(); ++i)
        for (int p = 0; p < 12; ++p) {
            const double phi = 2.0 * std::numbers::pi * p / 12.0;
            worst = std::max(worst, (a.responses[i].means(phi) - b.responses[i].means(phi)).cwiseAbs().maxCoeff());
        }
    return worst;
}

struct NoisyFeatures {
    std::vector<double> phases;
    RMatrix means;  // observed node means, one row per sample
};

inline NoisyFeatures observe(const PhaseResponse& resp, std::vector<double> phases, const ShotModel& shots,
                             std::uint64_t noise_seed, Split split)
{
    NoisyFeatures f;
    f.means.resize(static_cast<Index>(phases.size()), resp.size());
    for (std::size_t i = 0; i < phases.size(); ++i)
        f.means.row(static_cast<Index>(i)) =
            observe_means(resp.means(phases[i]), shots, derive_seed(noise_seed, {split, i})).transpose();
    f.phases = std::move(phases);
    return f;
}

inline std::vector<double> uniform_phases(std::uint64_t phase_seed, Split split, int n, double hi)
{
    Rng rng = make_rng(derive_seed(phase_seed, {split}));
    std::uniform_real_distribution<double> u(0.0, hi);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& v : out)
        v = u(rng);
    return out;
}

struct PointOutcome {
    ResultRow row;
    std::vector<SampleRow> samples;
};

/// Trains and evaluates one readout pair (averaged-range and fixed-phase) for a point.
inline PointOutcome evaluate_point(const ScenarioConfig& c, const PointParams& p, const PhaseResponse& resp,
                                   int realization, std::uint64_t network_seed)
{
    const int n = p.resource.degree;
    const double period = std::numbers::pi / n;
    const auto r = static_cast<std::uint64_t>(realization);
    const auto nn = static_cast<std::uint64_t>(n);
    // Phase and noise streams do not depend on the grid index: every grid
    // point of a sweep sees the same phases and standard-normal draws.
    const std::uint64_t phase_seed = derive_seed(c.master_seed, {tag(StreamTag::phases), r, nn});
    const std::uint64_t noise_seed = derive_seed(c.master_seed, {tag(StreamTag::shot_noise), r, nn});

    PointOutcome out;
    ResultRow& row = out.row;
    row.grid_index = p.grid_index;
    row.grid_value = p.grid_value;
    row.degree = n;
    row.realization = realization;
    row.q_nodes = p.q_nodes;
    row.t = p.t;
    row.network_seed = network_seed;
    row.phase_seed = phase_seed;
    row.noise_seed = noise_seed;

    const FeatureMap map(c.features, p.q_nodes);
    const auto training = observe(resp, uniform_phases(phase_seed, split_train, p.n_train, 2.0 * std::numbers::pi),
                               p.shots, noise_seed, split_train);

    auto fit = [&](double theta, const NoisyFeatures& validation) {
        const TrainingSet ts = make_training_set(training.phases, training.means, map, n, theta);
        if (!p.lambda.select)
            return train(ts, p.lambda.value);
        const EvaluationSet ev{validation.phases, map.apply_rows(validation.means)};
        return select_lambda(ts, ev, p.lambda.grid()).model;
    };
    auto estimates = [&](const ReadoutModel& m, const NoisyFeatures& f) {
        const RMatrix x = map.apply_rows(f.means);
        std::vector<double> est(f.phases.size()), sig(f.phases.size());
        for (std::size_t i = 0; i < est.size(); ++i) {
            sig[i] = predict(m, x.row(static_cast<Index>(i)).transpose());
            est[i] = retrieve_phase(sig[i], n) - m.theta;
        }
        return std::make_pair(est, sig);
    };
    auto record = [&](SampleKind kind, const NoisyFeatures& f, const std::vector<double>& est,
                      const std::vector<double>& sig) {
        if (!c.record_samples)
            return;
        for (std::size_t i = 0; i < est.size(); ++i)
            out.samples.push_back({p.grid_index, n, realization, kind, static_cast<int>(i), f.phases[i], sig[i], est[i]});
    };

    // averaged error over random phases in [0, pi/N]
    {
        NoisyFeatures validation;
        if (p.lambda.select)
            validation = observe(resp, uniform_phases(phase_seed, split_validation, c.n_validation, period), p.shots,
                                 noise_seed, split_validation);
        const ReadoutModel m = fit(0.0, validation);
        const auto test = observe(resp, uniform_phases(phase_seed, split_test, c.n_test, period), p.shots, noise_seed,
                                  split_test);
        const auto [est, sig] = estimates(m, test);
        row.lambda_random = m.lambda;
        row.error_random = phase_error(test.phases, est).error;
        record(SampleKind::test, test, est, sig);
        if (c.signal_points > 0) {
            const auto signal =
                observe(resp, uniform_phases(phase_seed, split_signal, c.signal_points, 2.0 * std::numbers::pi),
                        p.shots, noise_seed, split_signal);
            const auto [sest, ssig] = estimates(m, signal);
            if (c.record_samples)
                for (std::size_t i = 0; i < sest.size(); ++i)
                    out.samples.push_back({p.grid_index, n, realization, SampleKind::signal, static_cast<int>(i),
                                           signal.phases[i], ssig[i], sest[i]});
        }
    }

    // fixed phase, shifted target
    {
        double phi_star;
        if (c.fixed_phase) {
            phi_star = *c.fixed_phase;
        } else {
            Rng rng = make_rng(derive_seed(c.master_seed, {tag(StreamTag::fixed_phase), r, nn}));
            phi_star = std::uniform_real_distribution<double>(0.0, 2.0 * period)(rng);
        }
        const double theta = c.theta == ThetaPolicy::highest_slope ? period / 2.0 - phi_star : 0.0;
        // Held-out phases span the retrieval branch [-theta, pi/N - theta];
        // validating at phi* alone would reward models that ignore their input.
        NoisyFeatures validation;
        if (p.lambda.select) {
            auto phases = uniform_phases(phase_seed, split_fixed_validation, c.n_validation, period);
            for (auto& v : phases)
                v -= theta;
            validation = observe(resp, std::move(phases), p.shots, noise_seed, split_fixed_validation);
        }
        const ReadoutModel m = fit(theta, validation);
        const auto test = observe(resp, std::vector<double>(static_cast<std::size_t>(c.n_test), phi_star), p.shots,
                                  noise_seed, split_fixed_test);
        const auto [est, sig] = estimates(m, test);
        const PhaseErrorReport rep = phase_error(test.phases, est);
        row.lambda_fixed = m.lambda;
        row.error_fixed = rep.error;
        row.std_dev = rep.std_dev;
        row.fixed_phase = phi_star;
        row.theta = theta;
        record(SampleKind::fixed_test, test, est, sig);
    }
    return out;
}

inline double sem(const std::vector<double>& v)
{
    if (v.size() < 2)
        return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

} // namespace detail

/// Picks the integration step for every stepped dynamics key by halving from
/// the configured step until node means move by less than the tolerance, probed
/// on realization 0.
inline std::map<std::string, double> refine_steps(const ScenarioConfig& c, std::vector<std::string>& warnings)
{
    std::map<std::string, double> dts;
    for (const auto& pp : detail::plan_points(c)) {
        const std::string k = pp.key.str();
        if (dts.count(k))
            continue;
        dts[k] = c.dt;
        if (!detail::stepped(c, pp.key.noise) || !c.auto_refine)
            continue;
        detail::RealizationContext ctx(c, 0, dts);
        double dt = c.dt;
        ResponseResult coarse = ctx.compute(pp.key, dt);
        bool converged = false;
        for (int h = 0; h < 4; ++h) {
            ResponseResult fine = ctx.compute(pp.key, dt / 2.0);
            const double diff = detail::response_difference(coarse, fine);
            if (diff < c.refine_tolerance) {
                converged = true;
                break;
            }
            dt /= 2.0;
            coarse = std::move(fine);
        }
        if (!converged)
            warnings.push_back("time step did not converge to " + std::to_string(c.refine_tolerance) + " for " + k +
                               "; using dt=" + std::to_string(dt));
        dts[k] = dt;
    }
    return dts;
}

/// Runs every (grid point, degree, realization) of a scenario. Work items are
/// realizations; results are merged by index, so the output does not depend on
/// the thread count.
inline ExperimentResult run_scenario(ScenarioConfig config, const RunOptions& opt = {})
{
    const auto start = std::chrono::steady_clock::now();
    if (opt.seed)
        config.master_seed = *opt.seed;
    ExperimentResult result;
    result.paper_scale = opt.paper_scale;
    result.realizations = opt.paper_scale ? config.paper_realizations : config.realizations;
    result.threads = resolve_threads(opt.threads);
    result.config = config;
    result.config_hash = config_hash(config);

    const auto points = detail::plan_points(config);
    const auto dts = refine_steps(config, result.warnings);

    const int n_real = result.realizations;
    std::vector<std::vector<detail::PointOutcome>> outcomes(static_cast<std::size_t>(n_real));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_real));
    std::atomic<int> next{0};

    auto worker = [&] {
        for (int r = next++; r < n_real; r = next++) {
            try {
                detail::RealizationContext ctx(config, r, dts);
                std::vector<detail::PointOutcome> local;
                local.reserve(points.size());
                for (const auto& pp : points) {
                    const ResponseResult& rr = ctx.response(pp.key);
                    auto o = detail::evaluate_point(config, pp.params, rr.responses.at(pp.slot), r, ctx.network_seed());
                    o.row.dt = ctx.dt_for(pp.key);
                    o.row.leakage = rr.max_leakage;
                    local.push_back(std::move(o));
                }
                outcomes[static_cast<std::size_t>(r)] = std::move(local);
            } catch (...) {
                errors[static_cast<std::size_t>(r)] = std::current_exception();
            }
        }
    };
    const int nt = std::min(result.threads, n_real);
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    for (std::size_t r = 0; r < errors.size(); ++r)
        if (errors[r]) {
            try {
                std::rethrow_exception(errors[r]);
            } catch (const std::exception& e) {
                throw std::runtime_error("scenario " + config.name + ", realization " + std::to_string(r) + ": " +
                                         e.what());
            }
        }

    // rows ordered by (point, realization)
    for (std::size_t i = 0; i < points.size(); ++i)
        for (int r = 0; r < n_real; ++r) {
            auto& o = outcomes[static_cast<std::size_t>(r)][i];
            result.rows.push_back(o.row);
            result.samples.insert(result.samples.end(), o.samples.begin(), o.samples.end());
        }

    double worst_leak = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& pp = points[i];
        SummaryRow s;
        s.grid_index = pp.params.grid_index;
        s.grid_value = pp.params.grid_value;
        s.degree = pp.params.resource.degree;
        s.n_realizations = n_real;
        std::vector<double> er, ef, sd, lr;
        s.min_std_dev = std::numeric_limits<double>::infinity();
        for (int r = 0; r < n_real; ++r) {
            const ResultRow& row = result.rows[i * static_cast<std::size_t>(n_real) + static_cast<std::size_t>(r)];
            er.push_back(row.error_random);
            ef.push_back(row.error_fixed);
            sd.push_back(row.std_dev);
            lr.push_back(row.lambda_random);
            if (row.std_dev < s.min_std_dev) {
                s.min_std_dev = row.std_dev;
                s.min_std_dev_realization = r;
            }
            s.max_leakage = std::max(s.max_leakage, row.leakage);
        }
        s.mean_error_random = mean(er);
        s.sem_error_random = detail::sem(er);
        s.mean_error_fixed = mean(ef);
        s.sem_error_fixed = detail::sem(ef);
        s.mean_std_dev = mean(sd);
        s.mean_lambda_random = mean(lr);
        s.se_min_std_dev = s.min_std_dev / std::sqrt(2.0 * (config.n_test - 1));
        s.qfi = qfi(make_resource(pp.params.resource, pp.params.resource.degree + 1));
        if (pp.params.shots.kind == ShotKind::bernoulli_repetition && s.qfi > QFI_CUTOFF)
            s.qcr_bound = qcr_bound(s.qfi, static_cast<double>(pp.params.shots.repetitions));
        worst_leak = std::max(worst_leak, s.max_leakage);
        result.summary.push_back(s);
    }
    // ratios against N = 1 at the same grid point (or anywhere, for an N sweep)
    for (auto& s : result.summary)
        for (const auto& b : result.summary)
            if (b.degree == 1 && (config.axis == SweepAxis::degree || b.grid_index == s.grid_index)) {
                s.ratio_random = b.mean_error_random / s.mean_error_random;
                s.ratio_fixed = b.mean_error_fixed / s.mean_error_fixed;
                break;
            }
    if (worst_leak > LEAKAGE_LIMIT) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "top-level input population reached %.3g (limit %.0e); raise input_levels",
                      worst_leak, LEAKAGE_LIMIT);
        result.warnings.emplace_back(buf);
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

struct QcrEntry {
    std::size_t grid_index = 0;
    int degree = 1;
    double qfi = 0.0;
    double bound = 0.0;
    double mean_std_dev = 0.0;
    double min_std_dev = 0.0;
    double se_min_std_dev = 0.0;
    int best_realization = 0;
    NetworkRealization best_network;
};

struct QcrResult {
    ExperimentResult experiment;
    std::vector<QcrEntry> entries;
};

/// Random search over network realizations for the smallest single-estimate
/// spread at the fixed phase, compared with the Cramer-Rao bound.
inline QcrResult run_qcr_search(const ScenarioConfig& config, const RunOptions& opt = {})
{
    if (config.shots.kind != ShotKind::bernoulli_repetition)
        throw ConfigError("shots.model", "QCR search needs the bernoulli shot model with explicit M");
    QcrResult out;
    out.experiment = run_scenario(config, opt);
    const auto& ex = out.experiment;
    for (const auto& s : ex.summary) {
        QcrEntry e;
        e.grid_index = s.grid_index;
        e.degree = s.degree;
        e.qfi = s.qfi;
        e.bound = s.qcr_bound;
        e.mean_std_dev = s.mean_std_dev;
        e.min_std_dev = s.min_std_dev;
        e.se_min_std_dev = s.se_min_std_dev;
        e.best_realization = s.min_std_dev_realization;
        const int q = point_params(ex.config, s.grid_index, s.degree).q_nodes;
        const std::uint64_t seed = derive_seed(ex.config.master_seed,
                                               {tag(StreamTag::realization), static_cast<std::uint64_t>(e.best_realization)});
        e.best_network = sample_realization(q, ex.config.coupling, seed, ex.config.cascade_decay);
        out.entries.push_back(std::move(e));
    }
    return out;
}

} // namespace qnphase

#endif // QNPHASE_HARNESS_HPP
