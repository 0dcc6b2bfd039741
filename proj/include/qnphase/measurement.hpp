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

#ifndef QNPHASE_MEASUREMENT_HPP
#define QNPHASE_MEASUREMENT_HPP

// Finite-statistics estimates of node occupations.

#include "qnphase/hilbert.hpp"
#include "qnphase/random.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace qnphase {

enum class ShotKind { gaussian_sdm, bernoulli_repetition };

struct ShotModel {
    ShotKind kind = ShotKind::gaussian_sdm;
    double xi = 0.0;        // gaussian: standard deviation of the mean is xi/2
    long long repetitions = 1;  // bernoulli: M

    static ShotModel gaussian(double xi) { return {ShotKind::gaussian_sdm, xi, 1}; }
    static ShotModel bernoulli(long long m) { return {ShotKind::bernoulli_repetition, 0.0, m}; }

    void validate() const
    {
        if (kind == ShotKind::gaussian_sdm && !(xi >= 0.0))
            throw std::invalid_argument("xi must be nonnegative");
        if (kind == ShotKind::bernoulli_repetition && repetitions < 1)
            throw std::invalid_argument("repetition count M must be >= 1");
    }
};

/// Adds independent N(0, (xi/2)^2) noise to every mean. No clamping.
inline RVector sample_gaussian(const RVector& means_ideal, double xi, Rng& rng)
{
    if (!(xi >= 0.0))
        throw std::invalid_argument("xi must be nonnegative");
    if (xi == 0.0)
        return means_ideal;
    std::normal_distribution<double> noise(0.0, xi / 2.0);
    RVector out = means_ideal;
    for (Index j = 0; j < out.size(); ++j)
        out(j) += noise(rng);
    return out;
}

/// Average of M thresholded uniforms: each draw mu counts 1 when mu < mean.
inline double sample_bernoulli(double mean_ideal, long long m, Rng& rng)
{
    constexpr double slack = 1e-9;
    if (m < 1)
        throw std::invalid_argument("repetition count M must be >= 1");
    if (mean_ideal < -slack || mean_ideal > 1.0 + slack)
        throw std::domain_error("Bernoulli sampling needs a mean in [0,1], got " + std::to_string(mean_ideal));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    long long hits = 0;
    for (long long i = 0; i < m; ++i)
        if (unit(rng) < mean_ideal)
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(m);
}

/// One observed feature vector; node j draws from the stream derive_seed(sample_seed, {j}).
inline RVector observe_means(const RVector& means_ideal, const ShotModel& model, std::uint64_t sample_seed)
{
    model.validate();
    RVector out(means_ideal.size());
    for (Index j = 0; j < means_ideal.size(); ++j) {
        Rng rng(derive_seed(sample_seed, {static_cast<std::uint64_t>(j)}));
        if (model.kind == ShotKind::gaussian_sdm) {
            const RVector one = RVector::Constant(1, means_ideal(j));
            out(j) = sample_gaussian(one, model.xi, rng)(0);
        } else {
            out(j) = sample_bernoulli(means_ideal(j), model.repetitions, rng);
        }
    }
    return out;
}

} // namespace qnphase

#endif // QNPHASE_MEASUREMENT_HPP
