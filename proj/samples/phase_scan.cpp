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

// Trains a linear readout on noise-free node occupations of one network and
// scans the retrieved phase across the first branch.

#include <qnphase/qnphase.hpp>

#include <cstdio>
#include <numbers>

int main()
{
    using namespace qnphase;

    const int q = 4, degree = 2;
    const auto network = sample_realization(q, CouplingType::energy_preserving, 7);
    const DensityMatrix resource = make_resource({ResourceFamily::noon, degree});
    ResponseRequest req;
    req.times = {8.0};
    const PhaseResponse resp = network_response(resource, network, {}, req).responses.front();

    const FeatureMap map(FeatureKind::linear, q);
    std::vector<double> train_phases;
    RMatrix rows(10, q);
    for (int i = 0; i < 10; ++i) {
        train_phases.push_back(2.0 * std::numbers::pi * (i + 0.5) / 10.0);
        rows.row(i) = resp.means(train_phases.back()).transpose();
    }
    const ReadoutModel model = train(make_training_set(train_phases, rows, map, degree, 0.0), 1e-10);

    std::printf("%10s %10s\n", "phi", "estimate");
    for (int i = 0; i <= 10; ++i) {
        const double phi = std::numbers::pi / degree * i / 10.0;
        std::printf("%10.5f %10.5f\n", phi, estimate_phase(model, map.apply(resp.means(phi))));
    }
}
