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

#ifndef QNPHASE_EVOLUTION_HPP
#define QNPHASE_EVOLUTION_HPP

// Density-matrix propagation: a unitary step followed by per-node noise
// channels, the cascading master equation, and occupation recording.
//
// All steppers act on raw matrices so the same code also propagates
// non-Hermitian operators (every map here is linear).

#include "qnphase/hilbert.hpp"
#include "qnphase/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qnphase {

class EvolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Noise rates in units of hbar*Omega, identical on every node.
struct NoiseConfig {
    double decay = 0.0;
    double dephasing = 0.0;
    double depolarizing = 0.0;

    bool any() const { return decay > 0.0 || dephasing > 0.0 || depolarizing > 0.0; }

    void validate(double dt) const
    {
        if (decay < 0.0 || dephasing < 0.0 || depolarizing < 0.0)
            throw std::invalid_argument("noise rates must be nonnegative");
        if (decay * dt > 1.0)
            throw std::invalid_argument("decay rate * dt = " + std::to_string(decay * dt) + " exceeds 1");
        if (dephasing * dt / 2.0 > 1.0)
            throw std::invalid_argument("dephasing weight exceeds 1");
        if (depolarizing * dt > 1.0)
            throw std::invalid_argument("depolarizing rate * dt = " + std::to_string(depolarizing * dt) +
                                        " exceeds 1");
    }
};

struct TimeWindow {
    double begin = 0.0;
    double end = 0.0;
    double length() const { return end - begin; }
};

struct EvolutionPlan {
    double t_final = 0.0;
    int n_steps = 1;
    int record_stride = 1;
    std::optional<TimeWindow> window;

    static EvolutionPlan with_step(double t_final, double dt, int record_stride = 1)
    {
        if (!(dt > 0.0))
            throw std::invalid_argument("time step must be positive");
        EvolutionPlan plan;
        plan.t_final = t_final;
        plan.n_steps = std::max(1, static_cast<int>(std::lround(t_final / dt)));
        plan.record_stride = record_stride;
        return plan;
    }

    double dt() const { return t_final / n_steps; }

    void validate() const
    {
        if (!(t_final > 0.0) || n_steps < 1)
            throw std::invalid_argument("evolution plan needs t_final > 0 and n_steps >= 1");
        if (record_stride < 1)
            throw std::invalid_argument("record_stride must be >= 1");
        if (window && (window->begin < 0.0 || window->end > t_final || window->end <= window->begin))
            throw std::invalid_argument("integration window must lie inside [0, t_final]");
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<RVector> mean_occupations;  // one entry per recorded time, one value per node
    DensityMatrix final_state;
    std::optional<RVector> integrated_occupations;
};

// --- channels -------------------------------------------------------------

/// Amplitude-damping Kraus pair for decay probability p = gamma*dt.
inline std::pair<CMatrix, CMatrix> decay_kraus(double p)
{
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("decay probability outside [0,1]");
    CMatrix k1(2, 2), k2(2, 2);
    k1 << 1, 0, 0, std::sqrt(1.0 - p);
    k2 << 0, std::sqrt(p), 0, 0;
    return {k1, k2};
}

namespace detail {

inline bool excited(const HilbertSpace& space, Index i, std::size_t m) { return space.occupation(i, m) == 1; }

inline void decay_mode(CMatrix& rho, const HilbertSpace& space, std::size_t m, double p)
{
    const Index s = space.stride(m);
    const Index dim = space.dim();
    const double keep = std::sqrt(1.0 - p);
    for (Index c = 0; c < dim; ++c) {
        const bool ec = excited(space, c, m);
        for (Index r = 0; r < dim; ++r) {
            const bool er = excited(space, r, m);
            if (!er && !ec)
                rho(r, c) += p * rho(r + s, c + s);
        }
    }
    for (Index c = 0; c < dim; ++c) {
        const bool ec = excited(space, c, m);
        for (Index r = 0; r < dim; ++r) {
            const int n_exc = static_cast<int>(excited(space, r, m)) + static_cast<int>(ec);
            if (n_exc == 1)
                rho(r, c) *= keep;
            else if (n_exc == 2)
                rho(r, c) *= (1.0 - p);
        }
    }
}

inline void dephase_mode(CMatrix& rho, const HilbertSpace& space, std::size_t m, double w)
{
    const double f = 1.0 - 2.0 * w;
    const Index dim = space.dim();
    for (Index c = 0; c < dim; ++c) {
        const bool ec = excited(space, c, m);
        for (Index r = 0; r < dim; ++r)
            if (excited(space, r, m) != ec)
                rho(r, c) *= f;
    }
}

// With weight w per Pauli, the 2x2 block of mode m maps as
//   B00 -> (1-2w) B00 + 2w B11,  B11 -> (1-2w) B11 + 2w B00,  B01 -> (1-4w) B01.
inline void depolarize_mode(CMatrix& rho, const HilbertSpace& space, std::size_t m, double w)
{
    const Index s = space.stride(m);
    const Index dim = space.dim();
    const double stay = 1.0 - 2.0 * w;
    const double off = 1.0 - 4.0 * w;
    for (Index c = 0; c < dim; ++c) {
        if (excited(space, c, m))
            continue;
        for (Index r = 0; r < dim; ++r) {
            if (excited(space, r, m))
                continue;
            const cplx b00 = rho(r, c), b11 = rho(r + s, c + s);
            rho(r, c) = stay * b00 + 2.0 * w * b11;
            rho(r + s, c + s) = stay * b11 + 2.0 * w * b00;
            rho(r + s, c) *= off;
            rho(r, c + s) *= off;
        }
    }
}

} // namespace detail

/// Decay channel on every qubit mode, applied node by node.
inline void apply_decay_inplace(CMatrix& rho, const HilbertSpace& space, double gamma, double dt)
{
    const double p = gamma * dt;
    if (gamma < 0.0 || p > 1.0)
        throw std::invalid_argument("decay rate * dt must lie in [0,1], got " + std::to_string(p));
    if (p == 0.0)
        return;
    for (auto m : space.qubit_modes())
        detail::decay_mode(rho, space, m, p);
}

inline void apply_dephasing_inplace(CMatrix& rho, const HilbertSpace& space, double gamma, double dt)
{
    const double w = gamma * dt / 2.0;
    if (gamma < 0.0 || w > 1.0)
        throw std::invalid_argument("dephasing weight must lie in [0,1], got " + std::to_string(w));
    if (w == 0.0)
        return;
    for (auto m : space.qubit_modes())
        detail::dephase_mode(rho, space, m, w);
}

inline void apply_depolarizing_inplace(CMatrix& rho, const HilbertSpace& space, double gamma, double dt)
{
    const double p = gamma * dt;
    if (gamma < 0.0 || p > 1.0)
        throw std::invalid_argument("depolarizing rate * dt must lie in [0,1], got " + std::to_string(p));
    if (p == 0.0)
        return;
    for (auto m : space.qubit_modes())
        detail::depolarize_mode(rho, space, m, p / 3.0);
}

inline DensityMatrix apply_decay(const DensityMatrix& rho, double gamma, double dt)
{
    CMatrix out = rho.matrix();
    apply_decay_inplace(out, rho.space(), gamma, dt);
    return {rho.space(), std::move(out)};
}

inline DensityMatrix apply_dephasing(const DensityMatrix& rho, double gamma, double dt)
{
    CMatrix out = rho.matrix();
    apply_dephasing_inplace(out, rho.space(), gamma, dt);
    return {rho.space(), std::move(out)};
}

inline DensityMatrix apply_depolarizing(const DensityMatrix& rho, double gamma, double dt)
{
    CMatrix out = rho.matrix();
    apply_depolarizing_inplace(out, rho.space(), gamma, dt);
    return {rho.space(), std::move(out)};
}

// --- unitary part ---------------------------------------------------------

/// Eigendecomposition of a Hermitian Hamiltonian; U(t) = V exp(-iEt) V^dagger.
class Propagator {
public:
    explicit Propagator(const RMatrix& h)
    {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(h);
        if (es.info() != Eigen::Success)
            throw EvolutionError("Hamiltonian eigendecomposition failed");
        energies_ = es.eigenvalues();
        vectors_ = es.eigenvectors().cast<cplx>();
    }

    explicit Propagator(const Operator& h)
    {
        const double scale = std::max(1.0, max_abs(h.matrix()));
        if (h.hermiticity_error() > 1e-12 * scale)
            throw std::invalid_argument("Hamiltonian is not Hermitian");
        if (h.matrix().imag().cwiseAbs().maxCoeff() == 0.0) {
            *this = Propagator(RMatrix(h.matrix().real()));
            return;
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
        if (es.info() != Eigen::Success)
            throw EvolutionError("Hamiltonian eigendecomposition failed");
        energies_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
    }

    const RVector& energies() const { return energies_; }
    const CMatrix& eigenvectors() const { return vectors_; }
    Index dim() const { return energies_.size(); }

    CMatrix unitary(double t) const
    {
        const CVector phases = (energies_.cast<cplx>() * (-I_UNIT * t)).array().exp().matrix();
        return vectors_ * phases.asDiagonal() * vectors_.adjoint();
    }

    /// Eigenbasis coefficients of a ket; pair with ket_at() for many times.
    CVector to_eigenbasis(const CVector& ket) const { return vectors_.adjoint() * ket; }

    CVector ket_at(const CVector& eigen_coeffs, double t) const
    {
        const CVector phases = (energies_.cast<cplx>() * (-I_UNIT * t)).array().exp().matrix();
        return vectors_ * phases.cwiseProduct(eigen_coeffs);
    }

private:
    RVector energies_;
    CMatrix vectors_;
};

/// Caches U(dt) for repeated conjugation X -> U X U^dagger.
class UnitaryStepper {
public:
    UnitaryStepper(const Propagator& prop, double dt) : u_(prop.unitary(dt)), u_dag_(u_.adjoint()) {}

    void apply(CMatrix& x) const
    {
        tmp_.noalias() = u_ * x;
        x.noalias() = tmp_ * u_dag_;
    }

    const CMatrix& unitary() const { return u_; }

private:
    CMatrix u_;
    CMatrix u_dag_;
    mutable CMatrix tmp_;
};

inline DensityMatrix unitary_step(const DensityMatrix& rho, const Operator& h, double dt)
{
    if (!(h.space() == rho.space()))
        throw std::invalid_argument("Hamiltonian and state live on different spaces");
    const Propagator prop(h);
    const UnitaryStepper step(prop, dt);
    CMatrix out = rho.matrix();
    step.apply(out);
    return {rho.space(), std::move(out)};
}

/// One step of rho -> D(dt) U(dt) [rho], channels in the order decay,
/// dephasing, depolarizing.
class NoisyStepper {
public:
    NoisyStepper(HilbertSpace space, const Propagator& prop, NoiseConfig noise, double dt)
        : space_(std::move(space)), unitary_(prop, dt), noise_(noise), dt_(dt)
    {
        noise_.validate(dt);
    }

    void step(CMatrix& x) const
    {
        unitary_.apply(x);
        apply_decay_inplace(x, space_, noise_.decay, dt_);
        apply_dephasing_inplace(x, space_, noise_.dephasing, dt_);
        apply_depolarizing_inplace(x, space_, noise_.depolarizing, dt_);
    }

    double dt() const { return dt_; }

private:
    HilbertSpace space_;
    UnitaryStepper unitary_;
    NoiseConfig noise_;
    double dt_;
};

/// Explicit Euler step of the cascaded master equation
///   drho = -i[H,rho] + sum_j gamma/2 L(rho,b_j)
///          + sum_jk W_jk ([a_k rho, b_j^+] + [b_j, rho a_k^+]) + sum_k chi_k/2 L(rho,a_k)
/// with chi_k = sum_j W_jk^2 / gamma, regrouped as
///   drho = G rho + rho G^+ + gamma sum_j b_j rho b_j^+ + sum_k chi_k a_k rho a_k^+
///          + sum_k (a_k rho B_k^+ + B_k rho a_k^+),   B_k = sum_j W_jk b_j.
class CascadeStepper {
public:
    CascadeStepper(const NetworkRealization& r, const HilbertSpace& space, double dt) : dt_(dt)
    {
        if (!(r.cascade_decay > 0.0))
            throw std::invalid_argument("cascading evolution needs gamma > 0");
        const double gamma = r.cascade_decay;
        NetworkRealization node_only = r;
        node_only.coupling_type = CouplingType::cascading;
        const CMatrix h = build_hamiltonian_real(node_only, space).cast<cplx>();
        const Index dim = space.dim();

        g_ = -I_UNIT * h;
        for (int j = 0; j < r.q_nodes; ++j) {
            CMatrix b = annihilation(space, static_cast<std::size_t>(j) + 2).matrix();
            g_ -= 0.5 * gamma * (b.adjoint() * b);
            node_jumps_.push_back(std::sqrt(gamma) * b);
        }
        for (std::size_t k = 0; k < 2; ++k) {
            const CMatrix a = annihilation(space, k).matrix();
            CMatrix bk = CMatrix::Zero(dim, dim);
            double chi = 0.0;
            for (int j = 0; j < r.q_nodes; ++j) {
                const double w = r.input_weights(j, static_cast<Index>(k));
                bk += w * annihilation(space, static_cast<std::size_t>(j) + 2).matrix();
                chi += w * w / gamma;
            }
            g_ -= 0.5 * chi * (a.adjoint() * a);
            g_ -= bk.adjoint() * a;
            input_jumps_.push_back(std::sqrt(chi) * a);
            inputs_.push_back(a);
            cascade_.push_back(bk);
        }
    }

    /// Linear in rho, so it also advances non-Hermitian phase components.
    void step(CMatrix& rho) const
    {
        drho_.noalias() = g_ * rho;
        drho_.noalias() += rho * g_.adjoint();
        for (const auto& l : node_jumps_)
            sandwich(l, rho, l);
        for (const auto& l : input_jumps_)
            sandwich(l, rho, l);
        for (std::size_t k = 0; k < inputs_.size(); ++k) {
            sandwich(inputs_[k], rho, cascade_[k]);
            sandwich(cascade_[k], rho, inputs_[k]);
        }
        rho += dt_ * drho_;
    }

    double dt() const { return dt_; }

private:
    // drho += l rho r^+
    void sandwich(const CMatrix& l, const CMatrix& rho, const CMatrix& r) const
    {
        tmp_.noalias() = l * rho;
        drho_.noalias() += tmp_ * r.adjoint();
    }

    double dt_;
    CMatrix g_;
    std::vector<CMatrix> node_jumps_;
    std::vector<CMatrix> input_jumps_;
    std::vector<CMatrix> inputs_;
    std::vector<CMatrix> cascade_;
    mutable CMatrix tmp_, drho_;
};

// --- trajectories ---------------------------------------------------------

/// Per-basis-state occupation of each qubit mode, for cheap diagonal expectations.
inline std::vector<RVector> node_occupation_tables(const HilbertSpace& space)
{
    std::vector<RVector> tables;
    for (auto m : space.qubit_modes()) {
        RVector occ(space.dim());
        for (Index i = 0; i < space.dim(); ++i)
            occ(i) = space.occupation(i, m);
        tables.push_back(std::move(occ));
    }
    return tables;
}

inline RVector diagonal_expectations(const CMatrix& rho, const std::vector<RVector>& tables)
{
    const RVector diag = rho.diagonal().real();
    RVector out(static_cast<Index>(tables.size()));
    for (std::size_t j = 0; j < tables.size(); ++j)
        out(static_cast<Index>(j)) = tables[j].dot(diag);
    return out;
}

struct MonitorTolerance {
    double min_eigenvalue = -1e-8;
    double trace_drift = 1e-6;
    int check_every = 10;
};

inline constexpr MonitorTolerance CASCADE_MONITOR{-0.5, 1e-6, 10};

namespace detail {

inline void monitor_state(const CMatrix& rho, const HilbertSpace& space, const MonitorTolerance& tol, double t)
{
    const double drift = std::abs(rho.trace() - 1.0);
    if (drift > tol.trace_drift)
        throw EvolutionError("trace drift " + std::to_string(drift) + " at t=" + std::to_string(t) +
                             "; reduce the time step");
    const double lo = DensityMatrix(space, rho).min_eigenvalue();
    if (lo < tol.min_eigenvalue)
        throw EvolutionError("positivity violated (eigenvalue " + std::to_string(lo) + ") at t=" +
                             std::to_string(t) + "; reduce the time step");
}

template <typename StepFn>
Trajectory run_steps(const DensityMatrix& rho0, const EvolutionPlan& plan, StepFn&& step,
                     const MonitorTolerance& tol)
{
    plan.validate();
    const auto& space = rho0.space();
    const auto tables = node_occupation_tables(space);
    const double dt = plan.dt();
    CMatrix rho = rho0.matrix();
    std::vector<double> times{0.0};
    std::vector<RVector> occ{diagonal_expectations(rho, tables)};
    for (int n = 1; n <= plan.n_steps; ++n) {
        step(rho);
        if (n % tol.check_every == 0 || n == plan.n_steps)
            monitor_state(rho, space, tol, n * dt);
        if (n % plan.record_stride == 0 || n == plan.n_steps) {
            times.push_back(n * dt);
            occ.push_back(diagonal_expectations(rho, tables));
        }
    }
    Trajectory traj{std::move(times), std::move(occ), DensityMatrix(space, std::move(rho)), std::nullopt};
    return traj;
}

} // namespace detail

inline RVector integrate_occupations(const Trajectory& traj, const TimeWindow& window);

/// Unitary-then-noise stepping of rho0 under the realization's Hamiltonian.
inline Trajectory evolve(const DensityMatrix& rho0, const NetworkRealization& r, const NoiseConfig& noise,
                         const EvolutionPlan& plan, const MonitorTolerance& tol = {})
{
    if (r.coupling_type == CouplingType::cascading)
        throw std::invalid_argument("cascading networks are propagated with evolve_cascading");
    plan.validate();
    const Propagator prop(build_hamiltonian_real(r, rho0.space()));
    const NoisyStepper stepper(rho0.space(), prop, noise, plan.dt());
    auto traj = detail::run_steps(rho0, plan, [&](CMatrix& x) { stepper.step(x); }, tol);
    if (plan.window)
        traj.integrated_occupations = integrate_occupations(traj, *plan.window);
    return traj;
}

/// The two-input cascading generator carries no a_1 rho a_2^dagger cross terms
/// and is not completely positive: symmetric input superpositions pick up
/// negative eigenvalues of order 0.1 at any dt. The default monitor therefore
/// keeps the trace check strict and uses the eigenvalue bound only to catch
/// a diverging step.
inline Trajectory evolve_cascading(const DensityMatrix& rho0, const NetworkRealization& r,
                                   const EvolutionPlan& plan,
                                   std::optional<MonitorTolerance> tol = std::nullopt)
{
    if (!(r.cascade_decay > 0.0))
        throw std::invalid_argument("cascading evolution needs gamma > 0");
    plan.validate();
    const CascadeStepper stepper(r, rho0.space(), plan.dt());
    const MonitorTolerance limits = tol.value_or(CASCADE_MONITOR);
    auto traj = detail::run_steps(rho0, plan, [&](CMatrix& x) { stepper.step(x); }, limits);
    if (plan.window)
        traj.integrated_occupations = integrate_occupations(traj, *plan.window);
    return traj;
}

namespace detail {

inline RVector lerp(const RVector& a, const RVector& b, double f) { return a + f * (b - a); }

} // namespace detail

/// Trapezoidal (1/T) * integral of the recorded occupations over the window;
/// window endpoints between samples are linearly interpolated.
inline RVector integrate_series(const std::vector<double>& times, const std::vector<RVector>& values,
                                const TimeWindow& window)
{
    if (times.size() != values.size() || times.size() < 2)
        throw std::invalid_argument("need at least two recorded samples to integrate");
    constexpr double slack = 1e-9;
    if (window.end <= window.begin)
        throw std::invalid_argument("empty integration window");
    if (window.begin < times.front() - slack || window.end > times.back() + slack)
        throw std::out_of_range("integration window outside the recorded time range");

    auto sample_at = [&](double t) {
        auto it = std::lower_bound(times.begin(), times.end(), t);
        if (it == times.end())
            return values.back();
        const auto i = static_cast<std::size_t>(it - times.begin());
        if (i == 0 || std::abs(times[i] - t) <= slack)
            return values[i];
        const double f = (t - times[i - 1]) / (times[i] - times[i - 1]);
        return detail::lerp(values[i - 1], values[i], f);
    };

    std::vector<double> ts{window.begin};
    std::vector<RVector> vs{sample_at(window.begin)};
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] > window.begin + slack && times[i] < window.end - slack) {
            ts.push_back(times[i]);
            vs.push_back(values[i]);
        }
    ts.push_back(window.end);
    vs.push_back(sample_at(window.end));

    RVector acc = RVector::Zero(vs.front().size());
    for (std::size_t i = 1; i < ts.size(); ++i)
        acc += 0.5 * (ts[i] - ts[i - 1]) * (vs[i] + vs[i - 1]);
    return acc / window.length();
}

inline RVector integrate_occupations(const Trajectory& traj, const TimeWindow& window)
{
    return integrate_series(traj.times, traj.mean_occupations, window);
}

/// CSV with columns time,n_1..n_Q.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
    const Index q = traj.mean_occupations.empty() ? 0 : traj.mean_occupations.front().size();
    os << "time";
    for (Index j = 0; j < q; ++j)
        os << ",n_" << (j + 1);
    os << '\n';
    char buf[64];
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.times[i]);
        os << buf;
        for (Index j = 0; j < q; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", traj.mean_occupations[i](j));
            os << ',' << buf;
        }
        os << '\n';
    }
}

/// Halves dt until the probe output changes by less than `tol` (max norm)
/// between dt and dt/2. Returns the accepted step.
inline double refine_time_step(const std::function<RVector(double)>& probe, double dt, double tol = 1e-4,
                               int max_halvings = 4)
{
    RVector coarse = probe(dt);
    for (int h = 0; h < max_halvings; ++h) {
        RVector fine = probe(dt / 2.0);
        if ((fine - coarse).cwiseAbs().maxCoeff() < tol)
            return dt;
        dt /= 2.0;
        coarse = std::move(fine);
    }
    throw EvolutionError("time step did not converge after " + std::to_string(max_halvings) + " halvings");
}

} // namespace qnphase

#endif // QNPHASE_EVOLUTION_HPP
