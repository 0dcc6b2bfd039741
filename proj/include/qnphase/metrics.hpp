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

#ifndef QNPHASE_METRICS_HPP
#define QNPHASE_METRICS_HPP

// Phase-error statistics and precision-limit comparisons.

#include <algorithm>
#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnphase {

struct PhaseErrorReport {
    double error = 0.0;    // sqrt(sum (est - true)^2 / (n (n-1)))
    double std_dev = 0.0;  // error * sqrt(n)
    std::size_t n_test = 0;
    bool fixed_phase = false;  // all true phases equal: error is the SDM of that phase
};

inline PhaseErrorReport phase_error(std::span<const double> phi_true, std::span<const double> phi_est)
{
    if (phi_true.size() != phi_est.size())
        throw std::invalid_argument("phase lists differ in length");
    const std::size_t n = phi_true.size();
    if (n < 2)
        throw std::invalid_argument("phase error needs at least 2 samples");
    double ss = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        const double d = phi_est[l] - phi_true[l];
        ss += d * d;
    }
    PhaseErrorReport rep;
    rep.n_test = n;
    rep.error = std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
    rep.std_dev = rep.error * std::sqrt(static_cast<double>(n));
    rep.fixed_phase = std::all_of(phi_true.begin(), phi_true.end(),
                                  [&](double p) { return p == phi_true.front(); });
    return rep;
}

enum class PrecisionClass { below_sql, beats_sql, reaches_hl };

inline std::string to_string(PrecisionClass c)
{
    switch (c) {
    case PrecisionClass::below_sql: return "below_sql";
    case PrecisionClass::beats_sql: return "beats_sql";
    case PrecisionClass::reaches_hl: return "reaches_hl";
    }
    return "?";
}

struct RatioEntry {
    int degree = 1;
    double ratio = 0.0;  // error_1 / error_N
    double sql = 1.0;    // sqrt(N)
    double hl = 1.0;     // N
    PrecisionClass classification = PrecisionClass::below_sql;
};

/// eta_1N = error_1 / error_N against the sqrt(N) and N thresholds.
inline RatioEntry sql_hl_ratio(double error_1, double error_n, int degree)
{
    if (!(error_n > 0.0))
        throw std::invalid_argument("ratio needs a positive error for degree N");
    if (degree < 1)
        throw std::invalid_argument("degree must be >= 1");
    RatioEntry e;
    e.degree = degree;
    e.ratio = error_1 / error_n;
    e.sql = std::sqrt(static_cast<double>(degree));
    e.hl = static_cast<double>(degree);
    constexpr double rel = 1e-12;
    if (e.ratio >= e.hl * (1.0 - rel) && degree > 1)
        e.classification = PrecisionClass::reaches_hl;
    else if (e.ratio > e.sql * (1.0 + rel))
        e.classification = PrecisionClass::beats_sql;
    else
        e.classification = PrecisionClass::below_sql;
    return e;
}

/// Quantum Cramer-Rao bound 1/sqrt(M F_q).
inline double qcr_bound(double fisher, double repetitions)
{
    if (!(fisher > 0.0))
        throw std::invalid_argument("QCR bound needs positive Fisher information");
    if (!(repetitions >= 1.0))
        throw std::invalid_argument("QCR bound needs M >= 1");
    return 1.0 / std::sqrt(repetitions * fisher);
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least-squares line through (log x, log y).
inline LineFit fit_log_log(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("log-log fit needs >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("log-log fit needs positive values");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

inline double mean(std::span<const double> v)
{
    if (v.empty())
        return 0.0;
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

struct OscillationFit {
    double frequency = 0.0;  // omega in y ~ a + b cos(omega x) + c sin(omega x)
    double period = 0.0;
    double amplitude = 0.0;
    double offset = 0.0;
    double rss = 0.0;
};

namespace detail {

inline OscillationFit fit_at(std::span<const double> x, std::span<const double> y, double omega)
{
    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Eigen::Vector3d f(1.0, std::cos(omega * x[i]), std::sin(omega * x[i]));
        a += f * f.transpose();
        b += f * y[i];
    }
    const Eigen::Vector3d c = a.ldlt().solve(b);
    OscillationFit fit;
    fit.frequency = omega;
    fit.period = 2.0 * 3.141592653589793238 / omega;
    fit.offset = c(0);
    fit.amplitude = std::hypot(c(1), c(2));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - c(0) - c(1) * std::cos(omega * x[i]) - c(2) * std::sin(omega * x[i]);
        fit.rss += r * r;
    }
    return fit;
}

} // namespace detail

/// Least-squares single-tone fit: scans omega over [omega_lo, omega_hi] on a
/// fine grid, then refines the best bracket by golden-section search.
inline OscillationFit fit_oscillation(std::span<const double> x, std::span<const double> y, double omega_lo = 0.25,
                                      double omega_hi = 8.0, double step = 1e-3)
{
    if (x.size() != y.size() || x.size() < 4)
        throw std::invalid_argument("oscillation fit needs >= 4 paired points");
    if (!(omega_lo > 0.0) || !(omega_hi > omega_lo) || !(step > 0.0))
        throw std::invalid_argument("oscillation fit needs 0 < omega_lo < omega_hi and step > 0");
    OscillationFit best = detail::fit_at(x, y, omega_lo);
    for (double w = omega_lo + step; w <= omega_hi; w += step) {
        const OscillationFit f = detail::fit_at(x, y, w);
        if (f.rss < best.rss)
            best = f;
    }
    double lo = std::max(omega_lo, best.frequency - step), hi = std::min(omega_hi, best.frequency + step);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 60; ++it) {
        const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
        if (detail::fit_at(x, y, m1).rss < detail::fit_at(x, y, m2).rss)
            hi = m2;
        else
            lo = m1;
    }
    const OscillationFit refined = detail::fit_at(x, y, 0.5 * (lo + hi));
    return refined.rss <= best.rss ? refined : best;
}

} // namespace qnphase

#endif // QNPHASE_METRICS_HPP
