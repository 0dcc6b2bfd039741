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

#include "qnphase/measurement.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace qnphase;
using Catch::Matchers::WithinAbs;

namespace {

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
};

Moments moments(const std::vector<double>& v)
{
    Moments m;
    for (double x : v)
        m.mean += x;
    m.mean /= static_cast<double>(v.size());
    for (double x : v)
        m.sd += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(m.sd / static_cast<double>(v.size() - 1));
    return m;
}

} // namespace

TEST_CASE("zero xi reproduces the ideal means")
{
    Rng rng(1);
    const RVector ideal = RVector::LinSpaced(4, 0.1, 0.9);
    CHECK(sample_gaussian(ideal, 0.0, rng) == ideal);
    CHECK(observe_means(ideal, ShotModel::gaussian(0.0), 7) == ideal);
    CHECK_THROWS_AS(sample_gaussian(ideal, -1.0, rng), std::invalid_argument);
}

TEST_CASE("gaussian noise has standard deviation xi/2 and is additive")
{
    const double xi = 0.02;
    Rng rng(2);
    std::vector<double> eps;
    const RVector zero = RVector::Zero(1);
    for (int i = 0; i < 100000; ++i)
        eps.push_back(sample_gaussian(zero, xi, rng)(0));
    const auto m = moments(eps);
    CHECK(m.sd >= 0.49 * xi);
    CHECK(m.sd <= 0.51 * xi);
    CHECK(std::abs(m.mean) < 4.0 * xi / 2.0 / std::sqrt(100000.0));

    Rng a(3), b(3);
    RVector ideal(2);
    ideal << 0.2, 0.7;
    const RVector shifted = ideal.array() + 0.25;
    CHECK(((sample_gaussian(shifted, xi, b) - sample_gaussian(ideal, xi, a)).array() - 0.25).abs().maxCoeff() <
          1e-15);
}

TEST_CASE("bernoulli endpoints are exact")
{
    Rng rng(4);
    for (long long m : {1LL, 7LL, 10000LL}) {
        CHECK(sample_bernoulli(0.0, m, rng) == 0.0);
        CHECK(sample_bernoulli(1.0, m, rng) == 1.0);
    }
    CHECK_THROWS_AS(sample_bernoulli(1.2, 10, rng), std::domain_error);
    CHECK_THROWS_AS(sample_bernoulli(0.5, 0, rng), std::invalid_argument);
}

TEST_CASE("bernoulli SDM at one half and M = 1e4 is 0.005")
{
    Rng rng(5);
    std::vector<double> v;
    for (int t = 0; t < 1000; ++t)
        v.push_back(sample_bernoulli(0.5, 10000, rng));
    const auto m = moments(v);
    CHECK(m.sd >= 0.0045);
    CHECK(m.sd <= 0.0055);
    CHECK(std::abs(m.mean - 0.5) < 3.0 * 0.005 / std::sqrt(1000.0));
}

TEST_CASE("bernoulli estimator is unbiased across means")
{
    Rng rng(6);
    for (double p : {0.05, 0.3, 0.77}) {
        std::vector<double> v;
        const long long m = 400;
        for (int t = 0; t < 1000; ++t)
            v.push_back(sample_bernoulli(p, m, rng));
        const double sdm = std::sqrt(p * (1 - p) / m);
        CHECK(std::abs(moments(v).mean - p) < 3.0 * sdm / std::sqrt(1000.0));
        CHECK_THAT(moments(v).sd, WithinAbs(sdm, 0.1 * sdm));
    }
}

TEST_CASE("gaussian and bernoulli models agree in scale at matched xi")
{
    const long long m = 2500;
    const double xi = 2.0 * std::sqrt(0.25 / m);
    std::vector<double> g, b;
    const RVector half = RVector::Constant(1, 0.5);
    for (std::uint64_t s = 0; s < 2000; ++s) {
        g.push_back(observe_means(half, ShotModel::gaussian(xi), s)(0));
        b.push_back(observe_means(half, ShotModel::bernoulli(m), s)(0));
    }
    CHECK_THAT(moments(g).sd / moments(b).sd, WithinAbs(1.0, 0.1));
}

TEST_CASE("observation is deterministic in the sample seed and independent per node")
{
    const RVector ideal = RVector::Constant(3, 0.4);
    const auto model = ShotModel::gaussian(0.1);
    CHECK(observe_means(ideal, model, 11) == observe_means(ideal, model, 11));
    CHECK(observe_means(ideal, model, 11) != observe_means(ideal, model, 12));
    const RVector o = observe_means(ideal, model, 11);
    CHECK(o(0) != o(1));
    CHECK_THROWS_AS(observe_means(ideal, ShotModel::bernoulli(0), 1), std::invalid_argument);
}
