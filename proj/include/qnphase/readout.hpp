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

#ifndef QNPHASE_READOUT_HPP
#define QNPHASE_READOUT_HPP

// Trained linear output layer: ridge regression onto the target signal
// (1 - cos(N(phi + theta)))/2 and phase retrieval by inversion.

#include "qnphase/hilbert.hpp"
#include "qnphase/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnphase {

enum class FeatureKind { linear, polynomial_products };

inline std::string to_string(FeatureKind k)
{
    return k == FeatureKind::linear ? "Linear" : "PolynomialProducts";
}

inline FeatureKind parse_feature_kind(const std::string& s)
{
    if (s == "Linear")
        return FeatureKind::linear;
    if (s == "PolynomialProducts")
        return FeatureKind::polynomial_products;
    throw std::invalid_argument("unknown feature map '" + s + "'");
}

/// Linear: (1, n_1..n_Q). PolynomialProducts appends the product of every
/// subset of >= 2 node means, ordered by subset size then lexicographically
/// (for Q = 3: n1n2, n1n3, n2n3, n1n2n3).
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(FeatureKind kind, int q_nodes) : kind_(kind), q_(q_nodes)
    {
        if (q_nodes < 1)
            throw std::invalid_argument("feature map needs at least one node");
        if (kind == FeatureKind::polynomial_products) {
            if (q_nodes > 12)
                throw std::invalid_argument("product features limited to 12 nodes");
            for (int size = 2; size <= q_nodes; ++size)
                for (unsigned mask = 0; mask < (1u << q_nodes); ++mask)
                    if (std::popcount(mask) == size)
                        subsets_.push_back(mask);
        }
    }

    FeatureKind kind() const { return kind_; }
    int q_nodes() const { return q_; }
    Index size() const { return 1 + q_ + static_cast<Index>(subsets_.size()); }

    RVector apply(const RVector& means) const
    {
        if (means.size() != q_)
            throw std::invalid_argument("expected " + std::to_string(q_) + " node means, got " +
                                        std::to_string(means.size()));
        RVector f(size());
        f(0) = 1.0;
        f.segment(1, q_) = means;
        Index k = 1 + q_;
        for (unsigned mask : subsets_) {
            double prod = 1.0;
            for (int j = 0; j < q_; ++j)
                if (mask & (1u << j))
                    prod *= means(j);
            f(k++) = prod;
        }
        return f;
    }

    RMatrix apply_rows(const RMatrix& means_rows) const
    {
        RMatrix x(means_rows.rows(), size());
        for (Index i = 0; i < means_rows.rows(); ++i)
            x.row(i) = apply(means_rows.row(i).transpose()).transpose();
        return x;
    }

    bool operator==(const FeatureMap&) const = default;

private:
    FeatureKind kind_ = FeatureKind::linear;
    int q_ = 1;
    std::vector<unsigned> subsets_;
};

inline double target_signal(double phi, int degree, double theta = 0.0)
{
    return 0.5 * (1.0 - std::cos(degree * (phi + theta)));
}

/// Inverse of the unshifted signal, clamped: 0 below 0, pi/N above 1.
inline double retrieve_phase(double signal, int degree)
{
    if (degree < 1)
        throw std::invalid_argument("degree must be >= 1");
    if (signal < 0.0)
        return 0.0;
    if (signal > 1.0)
        return std::numbers::pi / degree;
    return std::acos(1.0 - 2.0 * signal) / degree;
}

struct TrainingSet {
    std::vector<double> phases;
    RMatrix x;  // feature rows
    RVector y;  // target_signal(phase, degree, theta)
    int degree = 1;
    double theta = 0.0;
    FeatureMap map;
};

inline TrainingSet make_training_set(std::vector<double> phases, const RMatrix& means_rows, const FeatureMap& map,
                                     int degree, double theta)
{
    if (static_cast<Index>(phases.size()) != means_rows.rows())
        throw std::invalid_argument("phase count does not match feature rows");
    TrainingSet ts;
    ts.x = map.apply_rows(means_rows);
    ts.y.resize(static_cast<Index>(phases.size()));
    for (std::size_t i = 0; i < phases.size(); ++i)
        ts.y(static_cast<Index>(i)) = target_signal(phases[i], degree, theta);
    ts.phases = std::move(phases);
    ts.degree = degree;
    ts.theta = theta;
    ts.map = map;
    return ts;
}

struct ReadoutModel {
    RVector alpha;
    double lambda = 0.0;
    double theta = 0.0;
    int degree = 1;
    FeatureMap map;
};

/// alpha = (X^T X + lambda 1)^-1 X^T Y evaluated through the SVD of X, so the
/// same factorization serves a whole lambda grid. The intercept column is
/// regularized like every other coefficient.
class RidgeSolver {
public:
    explicit RidgeSolver(const TrainingSet& ts) : theta_(ts.theta), degree_(ts.degree), map_(ts.map)
    {
        if (ts.x.rows() < 1)
            throw std::invalid_argument("training set is empty");
        if (ts.x.rows() != ts.y.size())
            throw std::invalid_argument("training rows and targets differ in length");
        svd_.compute(ts.x, Eigen::ComputeThinU | Eigen::ComputeThinV);
        uty_ = svd_.matrixU().transpose() * ts.y;
    }

    ReadoutModel solve(double lambda) const
    {
        if (!(lambda > 0.0))
            throw std::invalid_argument("ridge parameter must be positive");
        const RVector& s = svd_.singularValues();
        RVector shrink(s.size());
        for (Index i = 0; i < s.size(); ++i)
            shrink(i) = s(i) / (s(i) * s(i) + lambda);
        ReadoutModel m;
        m.alpha = svd_.matrixV() * shrink.cwiseProduct(uty_);
        if (!m.alpha.allFinite())
            throw std::runtime_error("ridge solution is not finite");
        m.lambda = lambda;
        m.theta = theta_;
        m.degree = degree_;
        m.map = map_;
        return m;
    }

private:
    double theta_;
    int degree_;
    FeatureMap map_;
    Eigen::JacobiSVD<RMatrix> svd_;
    RVector uty_;
};

inline ReadoutModel train(const TrainingSet& ts, double lambda) { return RidgeSolver(ts).solve(lambda); }

inline double predict(const ReadoutModel& model, const RVector& features)
{
    if (features.size() != model.alpha.size())
        throw std::invalid_argument("feature vector has " + std::to_string(features.size()) +
                                    " entries, model expects " + std::to_string(model.alpha.size()));
    return model.alpha.dot(features);
}

inline double predict_means(const ReadoutModel& model, const RVector& means)
{
    return predict(model, model.map.apply(means));
}

/// Phase estimate from feature rows, undoing the target shift.
inline double estimate_phase(const ReadoutModel& model, const RVector& features)
{
    return retrieve_phase(predict(model, features), model.degree) - model.theta;
}

struct EvaluationSet {
    std::vector<double> phases;
    RMatrix x;  // feature rows
};

inline PhaseErrorReport evaluate(const ReadoutModel& model, const EvaluationSet& eval)
{
    std::vector<double> est(eval.phases.size());
    for (std::size_t l = 0; l < est.size(); ++l)
        est[l] = estimate_phase(model, eval.x.row(static_cast<Index>(l)).transpose());
    return phase_error(eval.phases, est);
}

inline std::vector<double> log_grid(double lo, double hi, int points)
{
    if (points < 2 || !(lo > 0.0) || !(hi > lo))
        throw std::invalid_argument("log grid needs 0 < lo < hi and >= 2 points");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < points; ++i)
        g[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (points - 1));
    return g;
}

struct LambdaSelection {
    double lambda_min = 0.0;
    std::size_t index = 0;
    std::vector<double> grid;
    std::vector<double> errors;  // held-out phase error per grid point
    ReadoutModel model;          // trained at lambda_min
};

/// Picks the grid point with the smallest held-out phase error (first one on ties).
inline LambdaSelection select_lambda(const TrainingSet& ts, const EvaluationSet& validation,
                                     const std::vector<double>& grid)
{
    if (grid.size() < 3)
        throw std::invalid_argument("lambda grid needs at least 3 points");
    const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
    if (std::log10(*hi / *lo) < 4.0 - 1e-9)
        throw std::invalid_argument("lambda grid must span at least 4 decades");
    const RidgeSolver solver(ts);
    LambdaSelection sel;
    sel.grid = grid;
    sel.errors.reserve(grid.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ReadoutModel m = solver.solve(grid[i]);
        const double err = evaluate(m, validation).error;
        sel.errors.push_back(err);
        if (err < best) {
            best = err;
            sel.index = i;
            sel.lambda_min = grid[i];
            sel.model = std::move(m);
        }
    }
    return sel;
}

inline void to_json(nlohmann::json& j, const ReadoutModel& m)
{
    j = nlohmann::json{{"alpha", std::vector<double>(m.alpha.data(), m.alpha.data() + m.alpha.size())},
                       {"lambda", m.lambda},
                       {"theta", m.theta},
                       {"N", m.degree},
                       {"feature_map", {{"kind", to_string(m.map.kind())}, {"q_nodes", m.map.q_nodes()}}}};
}

inline void from_json(const nlohmann::json& j, ReadoutModel& m)
{
    const auto alpha = j.at("alpha").get<std::vector<double>>();
    m.alpha = Eigen::Map<const RVector>(alpha.data(), static_cast<Index>(alpha.size()));
    m.lambda = j.at("lambda").get<double>();
    m.theta = j.at("theta").get<double>();
    m.degree = j.at("N").get<int>();
    const auto& fm = j.at("feature_map");
    m.map = FeatureMap(parse_feature_kind(fm.at("kind").get<std::string>()), fm.at("q_nodes").get<int>());
    if (m.map.size() != m.alpha.size())
        throw std::invalid_argument("readout JSON: alpha length does not match feature map");
}

} // namespace qnphase

#endif // QNPHASE_READOUT_HPP
