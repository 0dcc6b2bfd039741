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

#include "qnphase/metrics.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numbers>
#include <random>

using namespace qnphase;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("perfect estimates give zero error")
{
    const std::vector<double> t{0.1, 0.5, 0.9};
    const auto rep = phase_error(t, t);
    CHECK(rep.error == 0.0);
    CHECK(rep.n_test == 3);
    CHECK_FALSE(rep.fixed_phase);
}

TEST_CASE("two samples with errors plus and minus e give e")
{
    const double e = 0.013;
    const std::vector<double> t{0.4, 0.4}, est{0.4 + e, 0.4 - e};
    const auto rep = phase_error(t, est);
    CHECK_THAT(rep.error, WithinAbs(e, 1e-15));
    CHECK_THAT(rep.std_dev, WithinAbs(e * std::sqrt(2.0), 1e-15));
    CHECK(rep.fixed_phase);
}

TEST_CASE("phase error rejects bad input")
{
    const std::vector<double> one{0.1}, two{0.1, 0.2};
    CHECK_THROWS_AS(phase_error(one, one), std::invalid_argument);
    CHECK_THROWS_AS(phase_error(two, one), std::invalid_argument);
}

TEST_CASE("phase error is permutation invariant")
{
    std::vector<double> t{0.1, 0.2, 0.3, 0.4, 0.5}, est{0.12, 0.19, 0.33, 0.38, 0.5};
    const double base = phase_error(t, est).error;
    std::vector<std::size_t> idx{4, 2, 0, 3, 1};
    std::vector<double> t2, e2;
    for (auto i : idx) {
        t2.push_back(t[i]);
        e2.push_back(est[i]);
    }
    CHECK_THAT(phase_error(t2, e2).error, WithinAbs(base, 1e-16));
}

TEST_CASE("Gaussian estimates with spread s give about s/10 at 100 samples")
{
    const double s = 0.02;
    std::mt19937_64 gen(1);
    std::normal_distribution<double> g(0.0, s);
    double acc = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> t(100, 0.7), est;
        for (int i = 0; i < 100; ++i)
            est.push_back(0.7 + g(gen));
        acc += phase_error(t, est).error;
    }
    CHECK_THAT(acc / 200.0, WithinRel(s / 10.0, 0.2));
}

TEST_CASE("ratio classification against sqrt(N) and N")
{
    const auto eq = sql_hl_ratio(0.1, 0.1, 2);
    CHECK(eq.ratio == 1.0);
    CHECK(eq.classification == PrecisionClass::below_sql);
    for (int n = 2; n <= 4; ++n) {
        const auto hl = sql_hl_ratio(0.1 * n, 0.1, n);
        CHECK_THAT(hl.ratio, WithinAbs(n, 1e-12));
        CHECK(hl.classification == PrecisionClass::reaches_hl);
    }
    CHECK(sql_hl_ratio(0.15, 0.1, 2).classification == PrecisionClass::beats_sql);
    CHECK(sql_hl_ratio(0.1, 0.1, 1).classification == PrecisionClass::below_sql);
    CHECK_THROWS_AS(sql_hl_ratio(0.1, 0.0, 2), std::invalid_argument);
    CHECK(to_string(PrecisionClass::beats_sql) == "beats_sql");
}

TEST_CASE("quantum Cramer-Rao bound")
{
    CHECK_THAT(qcr_bound(1.0, 1e4), WithinAbs(0.01, 1e-15));
    CHECK_THAT(qcr_bound(16.0, 1e4), WithinAbs(0.0025, 1e-15));
    for (int n = 1; n <= 4; ++n)
        CHECK_THAT(qcr_bound(n * n, 400.0), WithinAbs(1.0 / (20.0 * n), 1e-15));
    double prev = qcr_bound(0.5, 1.0);
    for (double f = 1.0; f < 20.0; f += 1.0) {
        CHECK(qcr_bound(f, 1.0) < prev);
        CHECK(qcr_bound(f, 2.0) < qcr_bound(f, 1.0));
        prev = qcr_bound(f, 1.0);
    }
    CHECK_THROWS_AS(qcr_bound(0.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(qcr_bound(1.0, 0.5), std::invalid_argument);
}

TEST_CASE("log-log fit recovers a power law")
{
    std::vector<double> x, y;
    for (double v : {1e-4, 1e-3, 1e-2, 1e-1}) {
        x.push_back(v);
        y.push_back(3.0 * std::pow(v, 0.75));
    }
    const auto f = fit_log_log(x, y);
    CHECK_THAT(f.slope, WithinAbs(0.75, 1e-12));
    CHECK_THAT(std::exp(f.intercept), WithinAbs(3.0, 1e-10));
    y[0] = -1.0;
    CHECK_THROWS_AS(fit_log_log(x, y), std::invalid_argument);
}

TEST_CASE("oscillation fit finds the tone of a sampled cosine")
{
    std::vector<double> x, y;
    const double omega = 2.0;
    std::mt19937_64 gen(4);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (int i = 0; i < 50; ++i) {
        x.push_back(2.0 * std::numbers::pi * i / 50.0);
        y.push_back(0.5 - 0.5 * std::cos(omega * x.back()) + noise(gen));
    }
    const auto fit = fit_oscillation(x, y);
    CHECK_THAT(fit.frequency, WithinAbs(omega, 5e-3));
    CHECK_THAT(fit.period, WithinRel(std::numbers::pi, 3e-3));
    CHECK_THAT(fit.amplitude, WithinAbs(0.5, 0.01));
    CHECK_THAT(fit.offset, WithinAbs(0.5, 0.01));
    CHECK_THROWS_AS(fit_oscillation(std::span(x).first(3), std::span(y).first(3)), std::invalid_argument);
}

TEST_CASE("mean of a span")
{
    const std::vector<double> v{1.0, 2.0, 6.0};
    CHECK(mean(v) == 3.0);
    CHECK(mean(std::span<const double>{}) == 0.0);
}
