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

#ifndef QNPHASE_CONFIG_HPP
#define QNPHASE_CONFIG_HPP

// Scenario configuration: JSON schema, validation with field paths, and the
// per-grid-point parameter view used by the runner.

#include "qnphase/evolution.hpp"
#include "qnphase/measurement.hpp"
#include "qnphase/network.hpp"
#include "qnphase/readout.hpp"
#include "qnphase/resources.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnphase {

inline constexpr int SCHEMA_VERSION = 1;
inline constexpr double DEFAULT_DT = 0.01;
inline constexpr double CASCADE_DEFAULT_DT = 0.005;

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)), message_(message)
    {
    }
    const std::string& path() const { return path_; }
    const std::string& message() const { return message_; }

private:
    std::string path_;
    std::string message_;
};

enum class SweepAxis { xi, gamma_decay, gamma_dephasing, gamma_depolarizing, dephase_p, q_nodes, degree, time, lambda, n_train };

inline std::string to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::xi: return "xi";
    case SweepAxis::gamma_decay: return "gamma_decay";
    case SweepAxis::gamma_dephasing: return "gamma_dephasing";
    case SweepAxis::gamma_depolarizing: return "gamma_depolarizing";
    case SweepAxis::dephase_p: return "p";
    case SweepAxis::q_nodes: return "Q";
    case SweepAxis::degree: return "N";
    case SweepAxis::time: return "t";
    case SweepAxis::lambda: return "lambda";
    case SweepAxis::n_train: return "N_train";
    }
    return "?";
}

inline std::optional<SweepAxis> parse_sweep_axis(const std::string& s)
{
    for (auto a : {SweepAxis::xi, SweepAxis::gamma_decay, SweepAxis::gamma_dephasing, SweepAxis::gamma_depolarizing,
                   SweepAxis::dephase_p, SweepAxis::q_nodes, SweepAxis::degree, SweepAxis::time, SweepAxis::lambda,
                   SweepAxis::n_train})
        if (to_string(a) == s)
            return a;
    return std::nullopt;
}

enum class ThetaPolicy { highest_slope, zero };

struct LambdaPolicy {
    bool select = true;        // choose on a held-out validation set
    double value = 1e-6;       // used when select == false
    double grid_min = 1e-10;
    double grid_max = 10.0;
    int grid_points = 23;

    std::vector<double> grid() const { return log_grid(grid_min, grid_max, grid_points); }
};

struct ScenarioConfig {
    int schema_version = SCHEMA_VERSION;
    std::string name;
    std::string description;

    ResourceFamily family = ResourceFamily::noon;
    std::vector<int> degrees{1};
    double dephase_p = 1.0;
    std::optional<int> input_levels;  // overrides the automatic truncation

    int q_nodes = 4;
    CouplingType coupling = CouplingType::energy_preserving;
    double cascade_decay = 1.0;

    NoiseConfig noise;

    double t_final = 8.0;
    double dt = DEFAULT_DT;
    std::optional<TimeWindow> window;
    bool auto_refine = true;
    double refine_tolerance = 1e-4;

    ShotModel shots = ShotModel::gaussian(1e-3);

    FeatureKind features = FeatureKind::linear;
    LambdaPolicy lambda;

    int n_train = 10;
    int n_test = 100;
    int n_validation = 100;
    ThetaPolicy theta = ThetaPolicy::highest_slope;
    std::optional<double> fixed_phase;
    int signal_points = 0;
    bool record_samples = false;

    int realizations = 20;
    int paper_realizations = 50;

    std::uint64_t master_seed = 1;

    SweepAxis axis = SweepAxis::xi;
    std::vector<double> grid;

    /// Degrees evaluated at every grid point.
    std::vector<int> point_degrees(std::size_t g) const
    {
        if (axis == SweepAxis::degree)
            return {static_cast<int>(std::lround(grid.at(g)))};
        return degrees;
    }
};

/// Parameters in force at one (grid point, degree).
struct PointParams {
    std::size_t grid_index = 0;
    double grid_value = 0.0;
    ResourceSpec resource;
    int levels = 0;
    int q_nodes = 0;
    NoiseConfig noise;
    double t = 0.0;
    ShotModel shots;
    LambdaPolicy lambda;
    int n_train = 0;
};

inline int truncation_levels(const ResourceSpec& spec, CouplingType coupling, std::optional<int> override_levels)
{
    if (override_levels)
        return *override_levels;
    const int base = spec.conserving_levels();
    if (coupling == CouplingType::ultra_strong)
        return std::max(base, spec.degree + 3);
    return base;
}

inline PointParams point_params(const ScenarioConfig& c, std::size_t g, int degree)
{
    PointParams p;
    p.grid_index = g;
    p.grid_value = c.grid.at(g);
    p.resource = {c.family, degree, c.dephase_p};
    p.q_nodes = c.q_nodes;
    p.noise = c.noise;
    p.t = c.t_final;
    p.shots = c.shots;
    p.lambda = c.lambda;
    p.n_train = c.n_train;
    const double v = p.grid_value;
    switch (c.axis) {
    case SweepAxis::xi: p.shots.xi = v; break;
    case SweepAxis::gamma_decay: p.noise.decay = v; break;
    case SweepAxis::gamma_dephasing: p.noise.dephasing = v; break;
    case SweepAxis::gamma_depolarizing: p.noise.depolarizing = v; break;
    case SweepAxis::dephase_p: p.resource.dephase_p = v; break;
    case SweepAxis::q_nodes: p.q_nodes = static_cast<int>(std::lround(v)); break;
    case SweepAxis::degree: break;
    case SweepAxis::time: p.t = v; break;
    case SweepAxis::lambda:
        p.lambda.select = false;
        p.lambda.value = v;
        break;
    case SweepAxis::n_train: p.n_train = static_cast<int>(std::lround(v)); break;
    }
    p.levels = truncation_levels(p.resource, c.coupling, c.input_levels);
    return p;
}

namespace detail {

using nlohmann::json;

inline std::string join_path(const std::string& base, const std::string& key)
{
    return base.empty() ? key : base + "." + key;
}

inline const char* type_name(const json& j) { return j.type_name(); }

class Field {
public:
    Field(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    const std::string& path() const { return path_; }
    const json& raw() const { return j_; }

    bool has(const std::string& key) const { return j_.is_object() && j_.contains(key) && !j_.at(key).is_null(); }

    Field at(const std::string& key) const
    {
        if (!j_.is_object())
            throw ConfigError(path_.empty() ? "$" : path_, "expected an object");
        if (!has(key))
            throw ConfigError(join_path(path_, key), "missing required field");
        return {j_.at(key), join_path(path_, key)};
    }

    void allow(std::initializer_list<const char*> keys) const
    {
        if (!j_.is_object())
            throw ConfigError(path_.empty() ? "$" : path_, "expected an object");
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, v] : j_.items())
            if (!ok.count(k))
                throw ConfigError(join_path(path_, k), "unknown field");
    }

    double number() const
    {
        if (!j_.is_number())
            throw ConfigError(path_, std::string("expected a number, got ") + type_name(j_));
        const double v = j_.get<double>();
        if (!std::isfinite(v))
            throw ConfigError(path_, "expected a finite number");
        return v;
    }

    int integer() const
    {
        if (!j_.is_number_integer())
            throw ConfigError(path_, std::string("expected an integer, got ") + type_name(j_));
        return j_.get<int>();
    }

    std::uint64_t unsigned_integer() const
    {
        if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<long long>() >= 0))
            throw ConfigError(path_, "expected a non-negative integer");
        return j_.get<std::uint64_t>();
    }

    bool boolean() const
    {
        if (!j_.is_boolean())
            throw ConfigError(path_, std::string("expected a boolean, got ") + type_name(j_));
        return j_.get<bool>();
    }

    std::string string() const
    {
        if (!j_.is_string())
            throw ConfigError(path_, std::string("expected a string, got ") + type_name(j_));
        return j_.get<std::string>();
    }

    std::vector<double> numbers() const
    {
        if (!j_.is_array())
            throw ConfigError(path_, std::string("expected an array, got ") + type_name(j_));
        std::vector<double> out;
        for (std::size_t i = 0; i < j_.size(); ++i)
            out.push_back(Field(j_.at(i), path_ + "[" + std::to_string(i) + "]").number());
        return out;
    }

    std::vector<int> integers() const
    {
        if (!j_.is_array())
            throw ConfigError(path_, std::string("expected an array, got ") + type_name(j_));
        std::vector<int> out;
        for (std::size_t i = 0; i < j_.size(); ++i)
            out.push_back(Field(j_.at(i), path_ + "[" + std::to_string(i) + "]").integer());
        return out;
    }

    template <typename Fn>
    auto parse_with(Fn&& fn) const
    {
        const std::string s = string();
        try {
            return fn(s);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path_, e.what());
        }
    }

private:
    const json& j_;
    std::string path_;
};

inline void require(bool ok, const std::string& path, const std::string& message)
{
    if (!ok)
        throw ConfigError(path, message);
}

inline bool is_integral(double v) { return std::abs(v - std::round(v)) < 1e-9; }

} // namespace detail

/// Parses one scenario object. Unknown fields are rejected so typos surface.
inline ScenarioConfig parse_scenario(const nlohmann::json& j, const std::string& base = "")
{
    using detail::Field;
    using detail::require;
    const Field root(j, base);
    root.allow({"schema_version", "name", "description", "resource", "network", "noise", "plan", "shots", "readout",
                "protocol", "realizations", "master_seed", "sweep"});

    ScenarioConfig c;
    c.schema_version = root.at("schema_version").integer();
    require(c.schema_version == SCHEMA_VERSION, root.at("schema_version").path(),
            "unsupported schema version " + std::to_string(c.schema_version));
    c.name = root.at("name").string();
    require(!c.name.empty() && c.name.find_first_of(",/\\\"\n ") == std::string::npos, root.at("name").path(),
            "name must be non-empty without spaces, commas, quotes or slashes");
    if (root.has("description"))
        c.description = root.at("description").string();

    const Field res = root.at("resource");
    res.allow({"family", "degrees", "dephase_p", "input_levels"});
    c.family = res.at("family").parse_with(parse_resource_family);
    if (res.has("degrees")) {
        c.degrees = res.at("degrees").integers();
        require(!c.degrees.empty(), res.at("degrees").path(), "must not be empty");
        for (int d : c.degrees)
            require(d >= 1, res.at("degrees").path(), "degrees must be >= 1");
    }
    if (res.has("dephase_p")) {
        c.dephase_p = res.at("dephase_p").number();
        require(c.dephase_p >= 0.0 && c.dephase_p <= 1.0, res.at("dephase_p").path(), "must lie in [0,1]");
    }
    if (res.has("input_levels")) {
        c.input_levels = res.at("input_levels").integer();
        require(*c.input_levels >= 2, res.at("input_levels").path(), "must be >= 2");
    }

    const Field net = root.at("network");
    net.allow({"Q", "coupling", "cascade_decay"});
    c.q_nodes = net.at("Q").integer();
    require(c.q_nodes >= 1 && c.q_nodes <= 8, net.at("Q").path(), "must lie in [1,8]");
    c.coupling = net.at("coupling").parse_with(parse_coupling);
    if (net.has("cascade_decay")) {
        c.cascade_decay = net.at("cascade_decay").number();
        require(c.cascade_decay > 0.0, net.at("cascade_decay").path(), "must be positive");
    }

    if (root.has("noise")) {
        const Field n = root.at("noise");
        n.allow({"decay", "dephasing", "depolarizing"});
        if (n.has("decay"))
            c.noise.decay = n.at("decay").number();
        if (n.has("dephasing"))
            c.noise.dephasing = n.at("dephasing").number();
        if (n.has("depolarizing"))
            c.noise.depolarizing = n.at("depolarizing").number();
        require(c.noise.decay >= 0 && c.noise.dephasing >= 0 && c.noise.depolarizing >= 0, n.path(),
                "rates must be non-negative");
    }

    const Field plan = root.at("plan");
    plan.allow({"t_final", "dt", "window", "auto_refine", "refine_tolerance"});
    c.t_final = plan.at("t_final").number();
    require(c.t_final > 0.0, plan.at("t_final").path(), "must be positive");
    if (c.coupling == CouplingType::cascading)
        c.dt = CASCADE_DEFAULT_DT;
    if (plan.has("dt")) {
        c.dt = plan.at("dt").number();
        require(c.dt > 0.0, plan.at("dt").path(), "must be positive");
    }
    if (plan.has("window")) {
        const auto w = plan.at("window").numbers();
        require(w.size() == 2 && w[0] >= 0.0 && w[1] > w[0], plan.at("window").path(),
                "expected [begin, end] with 0 <= begin < end");
        c.window = TimeWindow{w[0], w[1]};
    }
    if (plan.has("auto_refine"))
        c.auto_refine = plan.at("auto_refine").boolean();
    if (plan.has("refine_tolerance")) {
        c.refine_tolerance = plan.at("refine_tolerance").number();
        require(c.refine_tolerance > 0.0, plan.at("refine_tolerance").path(), "must be positive");
    }

    const Field shots = root.at("shots");
    shots.allow({"model", "xi", "M"});
    const std::string model = shots.at("model").string();
    if (model == "gaussian") {
        c.shots = ShotModel::gaussian(shots.at("xi").number());
        require(c.shots.xi >= 0.0, shots.at("xi").path(), "must be non-negative");
    } else if (model == "bernoulli") {
        const double m = shots.at("M").number();
        require(m >= 1.0 && detail::is_integral(m), shots.at("M").path(), "must be a positive integer");
        c.shots = ShotModel::bernoulli(static_cast<long long>(std::llround(m)));
    } else {
        throw ConfigError(shots.at("model").path(), "expected \"gaussian\" or \"bernoulli\"");
    }

    if (root.has("readout")) {
        const Field ro = root.at("readout");
        ro.allow({"features", "lambda"});
        if (ro.has("features"))
            c.features = ro.at("features").parse_with(parse_feature_kind);
        if (ro.has("lambda")) {
            const Field l = ro.at("lambda");
            l.allow({"policy", "value", "min", "max", "points"});
            const std::string policy = l.at("policy").string();
            if (policy == "select") {
                c.lambda.select = true;
                if (l.has("min"))
                    c.lambda.grid_min = l.at("min").number();
                if (l.has("max"))
                    c.lambda.grid_max = l.at("max").number();
                if (l.has("points"))
                    c.lambda.grid_points = l.at("points").integer();
                require(c.lambda.grid_min > 0.0 && c.lambda.grid_max > c.lambda.grid_min, l.path(),
                        "grid needs 0 < min < max");
                require(std::log10(c.lambda.grid_max / c.lambda.grid_min) >= 4.0 - 1e-9, l.path(),
                        "grid must span at least 4 decades");
                require(c.lambda.grid_points >= 3, l.path(), "grid needs at least 3 points");
            } else if (policy == "fixed") {
                c.lambda.select = false;
                c.lambda.value = l.at("value").number();
                require(c.lambda.value > 0.0, l.at("value").path(), "must be positive");
            } else {
                throw ConfigError(l.at("policy").path(), "expected \"select\" or \"fixed\"");
            }
        }
    }

    if (root.has("protocol")) {
        const Field p = root.at("protocol");
        p.allow({"N_train", "N_test", "N_validation", "theta", "fixed_phase", "signal_points", "record_samples"});
        if (p.has("N_train"))
            c.n_train = p.at("N_train").integer();
        if (p.has("N_test"))
            c.n_test = p.at("N_test").integer();
        if (p.has("N_validation"))
            c.n_validation = p.at("N_validation").integer();
        require(c.n_train >= 1, detail::join_path(p.path(), "N_train"), "must be >= 1");
        require(c.n_test >= 2, detail::join_path(p.path(), "N_test"), "must be >= 2");
        require(c.n_validation >= 2, detail::join_path(p.path(), "N_validation"), "must be >= 2");
        if (p.has("theta")) {
            const std::string t = p.at("theta").string();
            if (t == "highest_slope")
                c.theta = ThetaPolicy::highest_slope;
            else if (t == "zero")
                c.theta = ThetaPolicy::zero;
            else
                throw ConfigError(p.at("theta").path(), "expected \"highest_slope\" or \"zero\"");
        }
        if (p.has("fixed_phase"))
            c.fixed_phase = p.at("fixed_phase").number();
        if (p.has("signal_points")) {
            c.signal_points = p.at("signal_points").integer();
            require(c.signal_points >= 0, p.at("signal_points").path(), "must be >= 0");
        }
        if (p.has("record_samples"))
            c.record_samples = p.at("record_samples").boolean();
    }

    if (root.has("realizations")) {
        const Field r = root.at("realizations");
        r.allow({"count", "paper_count"});
        if (r.has("count"))
            c.realizations = r.at("count").integer();
        if (r.has("paper_count"))
            c.paper_realizations = r.at("paper_count").integer();
        require(c.realizations >= 1, detail::join_path(r.path(), "count"), "must be >= 1");
        require(c.paper_realizations >= 1, detail::join_path(r.path(), "paper_count"), "must be >= 1");
    }

    c.master_seed = root.at("master_seed").unsigned_integer();

    const Field sw = root.at("sweep");
    sw.allow({"axis", "grid"});
    const auto axis = parse_sweep_axis(sw.at("axis").string());
    if (!axis)
        throw ConfigError(sw.at("axis").path(), "unknown sweep axis \"" + sw.at("axis").string() + "\"");
    c.axis = *axis;
    c.grid = sw.at("grid").numbers();
    const std::string gpath = sw.at("grid").path();
    require(!c.grid.empty(), gpath, "must not be empty");
    for (double v : c.grid) {
        switch (c.axis) {
        case SweepAxis::xi:
            require(v >= 0.0, gpath, "xi must be non-negative");
            require(c.shots.kind == ShotKind::gaussian_sdm, gpath, "xi sweep needs the gaussian shot model");
            break;
        case SweepAxis::gamma_decay:
        case SweepAxis::gamma_dephasing:
        case SweepAxis::gamma_depolarizing: require(v >= 0.0, gpath, "rates must be non-negative"); break;
        case SweepAxis::dephase_p: require(v >= 0.0 && v <= 1.0, gpath, "p must lie in [0,1]"); break;
        case SweepAxis::q_nodes: require(detail::is_integral(v) && v >= 1 && v <= 8, gpath, "Q must be an integer in [1,8]"); break;
        case SweepAxis::degree: require(detail::is_integral(v) && v >= 1, gpath, "N must be a positive integer"); break;
        case SweepAxis::time: require(v > 0.0, gpath, "times must be positive"); break;
        case SweepAxis::lambda: require(v > 0.0, gpath, "lambda must be positive"); break;
        case SweepAxis::n_train: require(detail::is_integral(v) && v >= 1, gpath, "N_train must be a positive integer"); break;
        }
    }
    if (c.axis == SweepAxis::time)
        require(!c.window, gpath, "a time sweep cannot be combined with an integration window");
    if (c.coupling == CouplingType::cascading)
        require(!c.noise.any(), root.path().empty() ? "noise" : root.path() + ".noise",
                "noise channels are not combined with cascading coupling");
    if (c.window)
        require(c.window->end <= c.t_final + 1e-12, plan.at("window").path(), "window must end by t_final");
    return c;
}

inline nlohmann::json to_json(const ScenarioConfig& c)
{
    nlohmann::json res{{"family", to_string(c.family)}, {"degrees", c.degrees}, {"dephase_p", c.dephase_p}};
    if (c.input_levels)
        res["input_levels"] = *c.input_levels;
    nlohmann::json plan{{"t_final", c.t_final}, {"dt", c.dt}, {"auto_refine", c.auto_refine},
                        {"refine_tolerance", c.refine_tolerance}};
    if (c.window)
        plan["window"] = {c.window->begin, c.window->end};
    nlohmann::json shots = c.shots.kind == ShotKind::gaussian_sdm
                               ? nlohmann::json{{"model", "gaussian"}, {"xi", c.shots.xi}}
                               : nlohmann::json{{"model", "bernoulli"}, {"M", c.shots.repetitions}};
    nlohmann::json lambda = c.lambda.select ? nlohmann::json{{"policy", "select"},
                                                             {"min", c.lambda.grid_min},
                                                             {"max", c.lambda.grid_max},
                                                             {"points", c.lambda.grid_points}}
                                            : nlohmann::json{{"policy", "fixed"}, {"value", c.lambda.value}};
    nlohmann::json protocol{{"N_train", c.n_train},
                            {"N_test", c.n_test},
                            {"N_validation", c.n_validation},
                            {"theta", c.theta == ThetaPolicy::highest_slope ? "highest_slope" : "zero"},
                            {"signal_points", c.signal_points},
                            {"record_samples", c.record_samples}};
    if (c.fixed_phase)
        protocol["fixed_phase"] = *c.fixed_phase;
    return {{"schema_version", c.schema_version},
            {"name", c.name},
            {"description", c.description},
            {"resource", res},
            {"network", {{"Q", c.q_nodes}, {"coupling", to_string(c.coupling)}, {"cascade_decay", c.cascade_decay}}},
            {"noise", {{"decay", c.noise.decay}, {"dephasing", c.noise.dephasing}, {"depolarizing", c.noise.depolarizing}}},
            {"plan", plan},
            {"shots", shots},
            {"readout", {{"features", to_string(c.features)}, {"lambda", lambda}}},
            {"protocol", protocol},
            {"realizations", {{"count", c.realizations}, {"paper_count", c.paper_realizations}}},
            {"master_seed", c.master_seed},
            {"sweep", {{"axis", to_string(c.axis)}, {"grid", c.grid}}}};
}

/// A scenario file holds either one scenario or {"schema_version", "scenarios": [...]}.
inline std::vector<ScenarioConfig> parse_scenarios(const nlohmann::json& j)
{
    if (j.is_object() && j.contains("scenarios")) {
        const detail::Field root(j, "");
        root.allow({"schema_version", "scenarios", "description"});
        const int v = root.at("schema_version").integer();
        detail::require(v == SCHEMA_VERSION, "schema_version", "unsupported schema version " + std::to_string(v));
        const auto& arr = j.at("scenarios");
        detail::require(arr.is_array() && !arr.empty(), "scenarios", "expected a non-empty array");
        std::vector<ScenarioConfig> out;
        std::set<std::string> names;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "scenarios[" + std::to_string(i) + "]";
            out.push_back(parse_scenario(arr.at(i), path));
            detail::require(names.insert(out.back().name).second, path + ".name", "duplicate scenario name");
        }
        return out;
    }
    return {parse_scenario(j)};
}

inline std::vector<ScenarioConfig> load_scenarios(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path, "cannot open config file");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path, std::string("invalid JSON: ") + e.what());
    }
    return parse_scenarios(j);
}

/// FNV-1a over the canonical JSON dump (keys sorted).
inline std::string config_hash(const ScenarioConfig& c)
{
    const std::string s = to_json(c).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace qnphase

#endif // QNPHASE_CONFIG_HPP
