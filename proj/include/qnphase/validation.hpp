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

#ifndef QNPHASE_VALIDATION_HPP
#define QNPHASE_VALIDATION_HPP

// Self-checks run by `qnphase validate`: analytic identities and cross-checks
// between independent code paths, each small enough to finish in seconds.

#include "qnphase/harness.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qnphase {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;      // measured deviation
    double tolerance = 0.0;
    std::string detail;
};

namespace detail {

inline DensityMatrix random_state(const HilbertSpace& space, Rng& rng, int rank = 3)
{
    std::normal_distribution<double> g;
    CMatrix a(space.dim(), rank);
    for (Index c = 0; c < a.cols(); ++c)
        for (Index r = 0; r < a.rows(); ++r)
            a(r, c) = cplx{g(rng), g(rng)};
    CMatrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    return {space, rho};
}

inline CheckResult check(std::string name, double value, double tol, std::string detail = {})
{
    return {std::move(name), value <= tol, value, tol, std::move(detail)};
}

inline NetworkRealization rabi_network(double w)
{
    NetworkRealization r;
    r.q_nodes = 1;
    r.energies = {0.0};
    r.couplings = RMatrix::Zero(1, 1);
    r.input_weights = RMatrix::Zero(1, 2);
    r.input_weights(0, 0) = w;
    r.coupling_type = CouplingType::energy_preserving;
    return r;
}

} // namespace detail

inline std::vector<CheckResult> run_validation()
{
    std::vector<CheckResult> out;
    Rng rng = make_rng(20240917);

    {
        double worst = 0.0;
        for (double p : {0.0, 0.01, 0.3, 1.0}) {
            const auto [k1, k2] = decay_kraus(p);
            worst = std::max(worst, max_abs(CMatrix(k1.adjoint() * k1 + k2.adjoint() * k2 - CMatrix::Identity(2, 2))));
        }
        out.push_back(detail::check("kraus_completeness", worst, 1e-12));
    }
    {
        const HilbertSpace space = HilbertSpace::network(2, 2);
        double trace_dev = 0.0, neg = 0.0;
        for (int i = 0; i < 100; ++i) {
            const DensityMatrix rho = detail::random_state(space, rng);
            for (const DensityMatrix& out_state : {apply_decay(rho, 0.7, 1.0), apply_dephasing(rho, 0.7, 1.0),
                                                   apply_depolarizing(rho, 0.5, 1.0)}) {
                trace_dev = std::max(trace_dev, std::abs(out_state.trace() - 1.0));
                neg = std::max(neg, -out_state.min_eigenvalue());
            }
        }
        out.push_back(detail::check("channel_trace_preservation", trace_dev, 1e-12));
        out.push_back(detail::check("channel_positivity", std::max(0.0, neg), 1e-12));
    }
    {
        const double w = 0.8;
        const auto r = detail::rabi_network(w);
        const HilbertSpace full = HilbertSpace::network(2, 1);
        const DensityMatrix rho0 = DensityMatrix::from_ket(full, basis_ket(full, {1, 0, 0}));
        const auto traj = evolve(rho0, r, NoiseConfig{}, EvolutionPlan{5.0, 500, 10, {}});
        double worst = 0.0;
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const double s = std::sin(w * traj.times[i]);
            worst = std::max(worst, std::abs(traj.mean_occupations[i](0) - s * s));
        }
        out.push_back(detail::check("rabi_oscillation", worst, 1e-8));
    }
    {
        const auto r = sample_realization(2, CouplingType::energy_preserving, 7);
        const HilbertSpace full = HilbertSpace::network(3, 2);
        const Operator h = build_hamiltonian(r, full);
        const DensityMatrix rho0 = detail::random_state(full, rng);
        const auto traj = evolve(rho0, r, NoiseConfig{}, EvolutionPlan{3.0, 300, 300, {}});
        const CMatrix u = Propagator(h).unitary(3.0);
        const CMatrix exact = u * rho0.matrix() * u.adjoint();
        out.push_back(detail::check("stepping_matches_exponential",
                                    max_abs(CMatrix(traj.final_state.matrix() - exact)), 1e-8));
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const int q = 1 + i % 4;
            const auto r = sample_realization(q, CouplingType::energy_preserving, 100 + i);
            const HilbertSpace full = HilbertSpace::network(2, q);
            const Operator h = build_hamiltonian(r, full);
            worst = std::max(worst, max_abs(commutator(h, total_number_operator(full)).matrix()));
        }
        out.push_back(detail::check("excitation_conservation", worst, 1e-12));
    }
    {
        double worst = 0.0;
        for (int n = 1; n <= 4; ++n)
            for (auto f : {ResourceFamily::noon, ResourceFamily::classical_correlated})
                worst = std::max(worst, std::abs(qfi(make_resource({f, n})) - n * n));
        out.push_back(detail::check("qfi_equals_N_squared", worst, 1e-9));
    }
    {
        const auto r = sample_realization(3, CouplingType::energy_preserving, 11);
        const ResourceSpec spec{ResourceFamily::classical_correlated, 2};
        const DensityMatrix rho = make_resource(spec);
        const HilbertSpace full = HilbertSpace::network(rho.space().levels(0), 3);
        double worst = 0.0;
        for (const NoiseConfig& noise : {NoiseConfig{}, NoiseConfig{0.1, 0.05, 0.02}}) {
            ResponseRequest req;
            req.times = {2.0};
            req.dt = 0.01;
            const auto resp = network_response(rho, r, noise, req);
            for (double phi : {0.3, 1.7}) {
                const auto traj = evolve(embed_input_state(encode_phase(rho, phi), full), r, noise,
                                         EvolutionPlan{2.0, 200, 200, {}});
                worst = std::max(worst, (traj.mean_occupations.back() - resp.responses[0].means(phi)).cwiseAbs().maxCoeff());
            }
        }
        out.push_back(detail::check("harmonic_engine_matches_evolution", worst, 1e-10));
    }
    {
        std::normal_distribution<double> g;
        TrainingSet ts;
        ts.map = FeatureMap(FeatureKind::linear, 3);
        RMatrix means(12, 3);
        for (Index i = 0; i < means.size(); ++i)
            means.data()[i] = g(rng);
        std::vector<double> phases(12);
        for (auto& p : phases)
            p = std::abs(g(rng));
        ts = make_training_set(phases, means, ts.map, 1, 0.0);
        const double lambda = 0.37;
        const RVector direct = (ts.x.transpose() * ts.x + lambda * RMatrix::Identity(4, 4)).ldlt().solve(ts.x.transpose() * ts.y);
        out.push_back(detail::check("ridge_normal_equations", (train(ts, lambda).alpha - direct).cwiseAbs().maxCoeff(), 1e-10));
    }
    {
        ScenarioConfig c;
        c.name = "validate";
        c.q_nodes = 3;
        c.degrees = {1, 2};
        c.t_final = 4.0;
        c.shots = ShotModel::gaussian(0.0);
        c.axis = SweepAxis::xi;
        c.grid = {0.0};
        c.realizations = 3;
        c.n_test = 20;
        c.n_validation = 20;
        RunOptions one, two;
        one.threads = 1;
        two.threads = 3;
        const auto a = run_scenario(c, one);
        const auto b = run_scenario(c, two);
        double worst = 0.0;
        for (const auto& row : a.rows)
            worst = std::max(worst, row.error_random);
        out.push_back(detail::check("noise_free_retrieval", worst, 1e-6));
        bool same = a.rows.size() == b.rows.size();
        for (std::size_t i = 0; same && i < a.rows.size(); ++i)
            same = a.rows[i].error_random == b.rows[i].error_random && a.rows[i].std_dev == b.rows[i].std_dev &&
                   a.rows[i].network_seed == b.rows[i].network_seed;
        out.push_back({"thread_count_independence", same, same ? 0.0 : 1.0, 0.0, {}});
    }
    return out;
}

} // namespace qnphase

#endif // QNPHASE_VALIDATION_HPP
