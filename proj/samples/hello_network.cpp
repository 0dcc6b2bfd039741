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

// Sends a phase-encoded NOON state through one random network and prints the
// node occupations over time.

#include <qnphase/qnphase.hpp>

#include <cstdio>
#include <numbers>

int main()
{
    using namespace qnphase;

    const int q = 3;
    const auto network = sample_realization(q, CouplingType::energy_preserving, 2026);
    const ResourceSpec spec{ResourceFamily::noon, 2};
    const DensityMatrix resource = encode_phase(make_resource(spec), std::numbers::pi / 5);

    const HilbertSpace full = HilbertSpace::network(spec.conserving_levels(), q);
    const DensityMatrix rho0 = embed_input_state(resource, full);
    const auto traj = evolve(rho0, network, {.dephasing = 0.01}, EvolutionPlan::with_step(12.0, 0.01, 100));

    std::printf("%6s", "t");
    for (int j = 1; j <= q; ++j)
        std::printf("   <n_%d>", j);
    std::printf("\n");
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::printf("%6.2f", traj.times[i]);
        for (int j = 0; j < q; ++j)
            std::printf(" %7.4f", traj.mean_occupations[i](j));
        std::printf("\n");
    }
}
