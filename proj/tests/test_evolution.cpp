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

#include "qnphase/evolution.hpp"

#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

using namespace qnphase;
using Catch::Matchers::WithinAbs;

namespace {

DensityMatrix random_state(const HilbertSpace& s, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    CMatrix a(s.dim(), s.dim());
    for (Index i = 0; i < a.size(); ++i)
        a.data()[i] = cplx(g(gen), g(gen));
    CMatrix rho = a * a.adjoint();
    rho /= rho.trace();
    return {s, rho};
}

HilbertSpace nodes_only(int q)
{
    return HilbertSpace(std::vector<ModeSpec>(static_cast<std::size_t>(q), ModeSpec::qubit()));
}

// Kraus sums written out with embedded operators.
CMatrix decay_reference(const CMatrix& rho, const HilbertSpace& s, double p)
{
    CMatrix out = rho;
    const auto [k1, k2] = decay_kraus(p);
    for (auto m : s.qubit_modes()) {
        const CMatrix a = embed(s, m, k1).matrix();
        const CMatrix b = embed(s, m, k2).matrix();
        out = a * out * a.adjoint() + b * out * b.adjoint();
    }
    return out;
}

CMatrix dephasing_reference(const CMatrix& rho, const HilbertSpace& s, double w)
{
    CMatrix out = rho;
    for (auto m : s.qubit_modes()) {
        const CMatrix z = pauli(s, m, 'z').matrix();
        out = (1.0 - w) * out + w * z * out * z;
    }
    return out;
}

CMatrix depolarizing_reference(const CMatrix& rho, const HilbertSpace& s, double p)
{
    CMatrix out = rho;
    for (auto m : s.qubit_modes()) {
        CMatrix next = (1.0 - p) * out;
        for (char ax : {'x', 'y', 'z'}) {
            const CMatrix sg = pauli(s, m, ax).matrix();
            next += (p / 3.0) * sg * out * sg;
        }
        out = next;
    }
    return out;
}

NetworkRealization rabi_network()
{
    NetworkRealization r;
    r.q_nodes = 1;
    r.energies = {0.0};
    r.couplings = RMatrix::Zero(1, 1);
    r.input_weights = RMatrix::Zero(1, 2);
    r.input_weights(0, 0) = 0.8;
    return r;
}

} // namespace

TEST_CASE("decay Kraus pair is complete for any probability")
{
    for (double p : {0.0, 0.1, 0.37, 0.9, 1.0}) {
        const auto [k1, k2] = decay_kraus(p);
        CHECK(max_abs(k1.adjoint() * k1 + k2.adjoint() * k2 - CMatrix::Identity(2, 2)) < 1e-15);
    }
    CHECK_THROWS_AS(decay_kraus(1.5), std::invalid_argument);
    CHECK_THROWS_AS(decay_kraus(-0.1), std::invalid_argument);
}

TEST_CASE("channels agree with explicit Kraus sums and preserve trace and positivity")
{
    const HilbertSpace s = HilbertSpace::network(2, 2);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const DensityMatrix rho = random_state(s, seed);
        const double g = 0.3 * static_cast<double>(seed), dt = 0.4;
        const auto dcy = apply_decay(rho, g, dt);
        const auto dph = apply_dephasing(rho, g, dt);
        const auto dpl = apply_depolarizing(rho, g, dt);
        CHECK(max_abs(dcy.matrix() - decay_reference(rho.matrix(), s, g * dt)) < 1e-13);
        CHECK(max_abs(dph.matrix() - dephasing_reference(rho.matrix(), s, g * dt / 2.0)) < 1e-13);
        CHECK(max_abs(dpl.matrix() - depolarizing_reference(rho.matrix(), s, g * dt)) < 1e-13);
        for (const auto* out : {&dcy, &dph, &dpl}) {
            CHECK_THAT(out->trace().real(), WithinAbs(1.0, 1e-12));
            CHECK(out->min_eigenvalue() > -1e-12);
        }
    }
}

TEST_CASE("zero rates leave the state untouched")
{
    const HilbertSpace s = nodes_only(2);
    const DensityMatrix rho = random_state(s, 9);
    CHECK(max_abs(apply_decay(rho, 0.0, 0.01).matrix() - rho.matrix()) == 0.0);
    CHECK(max_abs(apply_dephasing(rho, 0.0, 0.01).matrix() - rho.matrix()) == 0.0);
    CHECK(max_abs(apply_depolarizing(rho, 0.0, 0.01).matrix() - rho.matrix()) == 0.0);
}

TEST_CASE("full decay sends an excited node to its ground state")
{
    const HilbertSpace s = nodes_only(1);
    const auto rho = DensityMatrix::from_ket(s, basis_ket(s, {1}));
    const auto out = apply_decay(rho, 2.0, 0.5);
    CHECK(max_abs(out.matrix() - DensityMatrix::from_ket(s, basis_ket(s, {0})).matrix()) < 1e-15);
}

TEST_CASE("dephasing shrinks single-node coherence by 1 - 2w")
{
    const HilbertSpace s = nodes_only(1);
    CVector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const auto rho = DensityMatrix::from_ket(s, plus);
    const double g = 3.0, dt = 0.05, w = g * dt / 2.0;
    const auto out = apply_dephasing(rho, g, dt);
    CHECK_THAT(out.matrix()(0, 1).real(), WithinAbs((1.0 - 2.0 * w) / 2.0, 1e-15));
    CHECK_THAT(out.matrix()(0, 0).real(), WithinAbs(0.5, 1e-15));
    CMatrix diag = CMatrix::Zero(2, 2);
    diag(0, 0) = 0.3;
    diag(1, 1) = 0.7;
    CHECK(max_abs(apply_dephasing(DensityMatrix(s, diag), g, dt).matrix() - diag) == 0.0);
    CHECK_THROWS_AS(apply_dephasing(rho, 50.0, 0.1), std::invalid_argument);
}

TEST_CASE("depolarizing fixes I/2 and scales sigma_z by 1 - 4p/3")
{
    const HilbertSpace s = nodes_only(1);
    const DensityMatrix mixed(s, CMatrix::Identity(2, 2) / 2.0);
    CHECK(max_abs(apply_depolarizing(mixed, 0.7, 0.1).matrix() - mixed.matrix()) < 1e-16);
    const auto ground = DensityMatrix::from_ket(s, basis_ket(s, {0}));
    const double g = 0.7, dt = 0.1;
    const auto out = apply_depolarizing(ground, g, dt);
    const double z = out.expectation(pauli(s, 0, 'z'));
    CHECK_THAT(z, WithinAbs(1.0 - 4.0 * g * dt / 3.0, 1e-15));
    CHECK_THROWS_AS(apply_depolarizing(ground, 20.0, 0.1), std::invalid_argument);
}

TEST_CASE("decay bound is enforced")
{
    const HilbertSpace s = nodes_only(1);
    const auto rho = DensityMatrix::from_ket(s, basis_ket(s, {1}));
    CHECK_THROWS_AS(apply_decay(rho, 11.0, 0.1), std::invalid_argument);
    NoiseConfig n{.decay = 200.0};
    CHECK_THROWS_AS(n.validate(0.01), std::invalid_argument);
    CHECK_THROWS_AS(NoiseConfig{.dephasing = -1.0}.validate(0.01), std::invalid_argument);
}

TEST_CASE("unitary step preserves purity and is trivial for H = 0")
{
    const HilbertSpace s = HilbertSpace::network(2, 1);
    const DensityMatrix rho = DensityMatrix::from_ket(s, basis_ket(s, {1, 1, 0}));
    const Operator zero(s, CMatrix::Zero(s.dim(), s.dim()));
    CHECK(max_abs(unitary_step(rho, zero, 0.3).matrix() - rho.matrix()) < 1e-15);
    const auto r = sample_realization(1, CouplingType::energy_preserving, 4);
    const auto out = unitary_step(rho, build_hamiltonian(r, s), 0.7);
    CHECK_THAT(out.purity(), WithinAbs(1.0, 1e-10));
    CMatrix bad = CMatrix::Zero(s.dim(), s.dim());
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(unitary_step(rho, Operator(s, bad), 0.1), std::invalid_argument);
}

TEST_CASE("stepped Rabi oscillation matches sin^2(w t) at 50 times")
{
    const auto r = rabi_network();
    const HilbertSpace s = HilbertSpace::network(2, 1);
    const auto rho = DensityMatrix::from_ket(s, basis_ket(s, {1, 0, 0}));
    const auto plan = EvolutionPlan::with_step(5.0, 0.01, 10);
    const auto traj = evolve(rho, r, {}, plan);
    REQUIRE(traj.times.size() == 51);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        CHECK_THAT(traj.mean_occupations[i](0), WithinAbs(std::pow(std::sin(0.8 * t), 2), 1e-8));
    }
}

TEST_CASE("noise-free stepping equals one exponential and conserves excitation")
{
    const auto r = sample_realization(3, CouplingType::energy_preserving, 21);
    const HilbertSpace s = HilbertSpace::network(3, 3);
    CVector psi = (basis_ket(s, {2, 0, 0, 0, 0}) + basis_ket(s, {0, 2, 0, 0, 0})) / std::sqrt(2.0);
    const auto rho = DensityMatrix::from_ket(s, psi);
    const auto traj = evolve(rho, r, {}, EvolutionPlan::with_step(12.0, 0.01, 100));
    const CMatrix u = Propagator(build_hamiltonian(r, s)).unitary(12.0);
    CHECK(max_abs(traj.final_state.matrix() - u * rho.matrix() * u.adjoint()) < 1e-8);
    const Operator ntot = total_number_operator(s);
    CHECK_THAT(traj.final_state.expectation(ntot), WithinAbs(2.0, 1e-8));
    for (std::size_t i = 1; i < traj.times.size(); ++i)
        CHECK(traj.times[i] > traj.times[i - 1]);
    for (const auto& occ : traj.mean_occupations)
        for (Index j = 0; j < occ.size(); ++j) {
            CHECK(occ(j) >= -1e-9);
            CHECK(occ(j) <= 1.0 + 1e-9);
        }
}

TEST_CASE("halving the step changes noisy final occupations by less than 1e-4")
{
    const auto r = sample_realization(2, CouplingType::energy_preserving, 5);
    const HilbertSpace s = HilbertSpace::network(2, 2);
    const auto rho = DensityMatrix::from_ket(s, basis_ket(s, {1, 0, 0, 0}));
    const NoiseConfig noise{0.05, 0.05, 0.05};
    const auto a = evolve(rho, r, noise, EvolutionPlan::with_step(6.0, 0.01, 600));
    const auto b = evolve(rho, r, noise, EvolutionPlan::with_step(6.0, 0.005, 1200));
    CHECK((a.mean_occupations.back() - b.mean_occupations.back()).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("node decay drains the network")
{
    const auto r = sample_realization(2, CouplingType::energy_preserving, 6);
    const HilbertSpace s = HilbertSpace::network(2, 2);
    const auto rho = DensityMatrix::from_ket(s, basis_ket(s, {0, 0, 1, 1}));
    const Operator ntot = total_number_operator(s);
    double prev = 2.0;
    for (double t = 1.0; t <= 10.0; t += 1.0) {
        const auto traj = evolve(rho, r, {.decay = 2.0}, EvolutionPlan::with_step(t, 0.01));
        const double n = traj.final_state.expectation(ntot);
        CHECK(n < prev);
        prev = n;
    }
    CHECK(prev < 0.05);
}

TEST_CASE("channel order differences vanish as the step shrinks")
{
    const auto r = sample_realization(2, CouplingType::energy_preserving, 12);
    const HilbertSpace s = HilbertSpace::network(2, 2);
    const auto rho0 = DensityMatrix::from_ket(s, basis_ket(s, {1, 0, 0, 0}));
    const Propagator prop(build_hamiltonian(r, s));
    const NoiseConfig n{0.3, 0.3, 0.3};
    auto gap = [&](double dt) {
        const UnitaryStepper u(prop, dt);
        CMatrix a = rho0.matrix(), b = rho0.matrix();
        const int steps = static_cast<int>(std::lround(2.0 / dt));
        for (int i = 0; i < steps; ++i) {
            u.apply(a);
            apply_decay_inplace(a, s, n.decay, dt);
            apply_dephasing_inplace(a, s, n.dephasing, dt);
            apply_depolarizing_inplace(a, s, n.depolarizing, dt);
            u.apply(b);
            apply_depolarizing_inplace(b, s, n.depolarizing, dt);
            apply_dephasing_inplace(b, s, n.dephasing, dt);
            apply_decay_inplace(b, s, n.decay, dt);
        }
        return max_abs(a - b);
    };
    const double g1 = gap(0.02), g2 = gap(0.01);
    CHECK(g2 < g1);
    CHECK(g2 < 0.7 * g1);
}

TEST_CASE("cascading with zero input weights keeps the inputs frozen")
{
    auto r = sample_realization(2, CouplingType::cascading, 31, 1.0);
    r.input_weights.setZero();
    const HilbertSpace s = HilbertSpace::network(3, 2);
    const auto rho = DensityMatrix::from_ket(s, basis_ket(s, {2, 1, 1, 0}));
    const auto traj = evolve_cascading(rho, r, EvolutionPlan::with_step(3.0, 0.005, 100));
    CHECK_THAT(traj.final_state.mean_occupation(0), WithinAbs(2.0, 1e-12));
    CHECK_THAT(traj.final_state.mean_occupation(1), WithinAbs(1.0, 1e-12));
}

TEST_CASE("cascading evolution keeps trace and drains excitation")
{
    const auto r = sample_realization(2, CouplingType::cascading, 32, 1.0);
    const HilbertSpace s = HilbertSpace::network(3, 2);
    CVector psi = (basis_ket(s, {2, 0, 0, 0}) + basis_ket(s, {0, 2, 0, 0})) / std::sqrt(2.0);
    const auto rho0 = DensityMatrix::from_ket(s, psi);
    const CascadeStepper stepper(r, s, 0.005);
    const Operator ntot = total_number_operator(s);
    CMatrix rho = rho0.matrix();
    double prev = 2.0;
    for (int i = 0; i < 2400; ++i) {
        stepper.step(rho);
        if (i % 20 == 0) {
            const DensityMatrix d(s, rho);
            CHECK_THAT(d.trace().real(), WithinAbs(1.0, 1e-6));
            const double n = d.expectation(ntot);
            CHECK(n <= prev + 1e-9);
            prev = n;
        }
    }
    CHECK(prev < 2.0);
    r.validate();
    auto bad = r;
    bad.cascade_decay = 0.0;
    CHECK_THROWS_AS(evolve_cascading(rho0, bad, EvolutionPlan::with_step(1.0, 0.005)), std::invalid_argument);
    CHECK_THROWS_AS(evolve(rho0, r, {}, EvolutionPlan::with_step(1.0, 0.01)), std::invalid_argument);
}

TEST_CASE("an oversized cascading step is caught by the monitor")
{
    const auto r = sample_realization(3, CouplingType::cascading, 33, 1.0);
    const HilbertSpace s = HilbertSpace::network(3, 3);
    const auto rho0 = DensityMatrix::from_ket(s, basis_ket(s, {2, 0, 0, 0, 0}));
    CHECK_THROWS_AS(evolve_cascading(rho0, r, EvolutionPlan::with_step(20.0, 1.0)), EvolutionError);
}

TEST_CASE("window integration is exact for constants and ramps")
{
    const std::vector<double> t{0.0, 0.5, 1.0, 1.5, 2.0};
    std::vector<RVector> constant, ramp;
    for (double x : t) {
        constant.push_back(RVector::Constant(2, 0.3));
        RVector v(1);
        v << x / 2.0;
        ramp.push_back(v);
    }
    CHECK_THAT(integrate_series(t, constant, {0.25, 1.75})(1), WithinAbs(0.3, 1e-15));
    CHECK_THAT(integrate_series(t, ramp, {0.0, 2.0})(0), WithinAbs(0.5, 1e-12));
    CHECK_THAT(integrate_series(t, ramp, {0.3, 1.1})(0), WithinAbs(0.35, 1e-12));
    CHECK_THROWS_AS(integrate_series(t, ramp, {1.0, 2.5}), std::out_of_range);
    CHECK_THROWS_AS(integrate_series(t, ramp, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("a one-stride window approaches the midpoint sample")
{
    const auto r = rabi_network();
    const HilbertSpace s = HilbertSpace::network(2, 1);
    const auto rho = DensityMatrix::from_ket(s, basis_ket(s, {1, 0, 0}));
    auto plan = EvolutionPlan::with_step(2.0, 0.01);
    plan.window = TimeWindow{1.0, 1.01};
    const auto traj = evolve(rho, r, {}, plan);
    REQUIRE(traj.integrated_occupations);
    const double mid = std::pow(std::sin(0.8 * 1.005), 2);
    CHECK_THAT((*traj.integrated_occupations)(0), WithinAbs(mid, 1e-5));
}

TEST_CASE("plans validate their window and step")
{
    auto plan = EvolutionPlan::with_step(2.0, 0.01);
    plan.window = TimeWindow{1.5, 2.5};
    CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
    CHECK_THROWS_AS(EvolutionPlan::with_step(2.0, 0.0), std::invalid_argument);
    CHECK(EvolutionPlan::with_step(12.0, 0.01).n_steps == 1200);
}

TEST_CASE("trajectory CSV has a time column and one column per node")
{
    const auto r = sample_realization(2, CouplingType::energy_preserving, 2);
    const HilbertSpace s = HilbertSpace::network(2, 2);
    const auto rho = DensityMatrix::from_ket(s, basis_ket(s, {1, 0, 0, 0}));
    const auto traj = evolve(rho, r, {}, EvolutionPlan::with_step(0.1, 0.01, 5));
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "time,n_1,n_2");
    int rows = 0;
    while (std::getline(is, line))
        ++rows;
    CHECK(rows == 3);
}

TEST_CASE("step refinement halves until the probe settles")
{
    int calls = 0;
    const double dt = refine_time_step(
        [&](double h) {
            ++calls;
            RVector v(1);
            v << h * h;
            return v;
        },
        0.08, 1e-3);
    CHECK(dt == Catch::Approx(0.02));
    CHECK_THROWS_AS(refine_time_step([](double) { return RVector::Random(1); }, 0.1, 1e-12, 2), EvolutionError);
    CHECK(calls > 0);
}

TEST_CASE("cascading step is linear on non-Hermitian matrices")
{
    const auto r = sample_realization(2, CouplingType::cascading, 41, 1.0);
    const HilbertSpace s = HilbertSpace::network(2, 2);
    const CascadeStepper stepper(r, s, 0.005);
    std::mt19937_64 gen(5);
    std::normal_distribution<double> g;
    CMatrix a(s.dim(), s.dim()), b(s.dim(), s.dim());
    for (Index i = 0; i < a.size(); ++i) {
        a.data()[i] = cplx(g(gen), g(gen));
        b.data()[i] = cplx(g(gen), g(gen));
    }
    CMatrix sum = a + cplx(0.0, 1.0) * b;
    CMatrix sa = a, sb = b;
    for (int i = 0; i < 20; ++i) {
        stepper.step(sum);
        stepper.step(sa);
        stepper.step(sb);
    }
    CHECK(max_abs(sum - (sa + cplx(0.0, 1.0) * sb)) < 1e-12);

    // the Hermitian part of the generator acts on rho^dagger as on rho
    CMatrix x = a, xd = a.adjoint();
    stepper.step(x);
    stepper.step(xd);
    CHECK(max_abs(x.adjoint() - xd) < 1e-12);
}

TEST_CASE("the two-input cascading equation is not positivity preserving")
{
    // No a_1 rho a_2^dagger cross terms: the symmetric single excitation
    // goes negative by an amount that does not shrink with dt.
    const auto r = sample_realization(2, CouplingType::cascading, 79, 1.0);
    const HilbertSpace s = HilbertSpace::network(2, 2);
    const CVector psi = (basis_ket(s, {1, 0, 0, 0}) + basis_ket(s, {0, 1, 0, 0})) / std::sqrt(2.0);
    auto lowest = [&](double dt) {
        const CascadeStepper stepper(r, s, dt);
        CMatrix rho = DensityMatrix::from_ket(s, psi).matrix();
        double lo = 0.0;
        for (int i = 0; i < static_cast<int>(std::lround(2.0 / dt)); ++i) {
            stepper.step(rho);
            lo = std::min(lo, DensityMatrix(s, rho).min_eigenvalue());
        }
        return lo;
    };
    const double coarse = lowest(0.005), fine = lowest(0.00125);
    CHECK(coarse < -0.05);
    CHECK(fine < -0.05);
    CHECK_THAT(fine, WithinAbs(coarse, 0.2 * std::abs(coarse)));
}
