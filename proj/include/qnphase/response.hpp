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

#ifndef QNPHASE_RESPONSE_HPP
#define QNPHASE_RESPONSE_HPP

// Phase response of a network: node means as an exact trigonometric
// polynomial in the encoded phase.
//
// Encoding multiplies rho_ab by exp(i phi k_ab), k_ab = n2(a) - n2(b), so
//   rho(phi) = O_0 + sum_{k>0} (e^{ik phi} O_k + h.c.)
// and, every propagation map being linear and Hermiticity preserving,
//   <n_j>(phi) = c_j + sum_{k>0} 2 Re(e^{ik phi} C_kj),   C_kj = tr(n_j Phi(O_k)).
// One propagation per harmonic replaces one propagation per phase sample.

#include "qnphase/evolution.hpp"
#include "qnphase/hilbert.hpp"
#include "qnphase/network.hpp"
#include "qnphase/resources.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnphase {

struct PhaseResponse {
    RVector constant;                 // c_j
    std::vector<int> frequencies;     // k > 0
    std::vector<CVector> harmonics;   // C_k, one per frequency

    RVector means(double phi) const
    {
        RVector out = constant;
        for (std::size_t i = 0; i < frequencies.size(); ++i)
            out += 2.0 * (std::polar(1.0, frequencies[i] * phi) * harmonics[i]).real();
        return out;
    }

    Index size() const { return constant.size(); }
};

/// Frequency components of an input state: entry (a,b) goes to k = n2(a) - n2(b).
/// Only k >= 0 is returned; O_{-k} = O_k^dagger.
inline std::map<int, CMatrix> harmonic_components(const DensityMatrix& rho)
{
    const auto& space = rho.space();
    std::map<int, CMatrix> out;
    for (Index c = 0; c < rho.dim(); ++c)
        for (Index r = 0; r < rho.dim(); ++r) {
            const cplx v = rho.matrix()(r, c);
            if (v == cplx{})
                continue;
            const int k = space.occupation(r, 1) - space.occupation(c, 1);
            if (k < 0)
                continue;
            auto it = out.find(k);
            if (it == out.end())
                it = out.emplace(k, CMatrix::Zero(rho.dim(), rho.dim())).first;
            it->second(r, c) = v;
        }
    return out;
}

/// Embeds an input-space operator as O (x) |0..0><0..0| on the network space.
inline Index embed_input_index(const HilbertSpace& inputs, const HilbertSpace& full, Index a)
{
    return inputs.occupation(a, 0) * full.stride(0) + inputs.occupation(a, 1) * full.stride(1);
}

inline CMatrix embed_input_operator(const CMatrix& op, const HilbertSpace& inputs, const HilbertSpace& full)
{
    CMatrix out = CMatrix::Zero(full.dim(), full.dim());
    for (Index c = 0; c < op.cols(); ++c)
        for (Index r = 0; r < op.rows(); ++r)
            if (op(r, c) != cplx{})
                out(embed_input_index(inputs, full, r), embed_input_index(inputs, full, c)) = op(r, c);
    return out;
}

inline DensityMatrix embed_input_state(const DensityMatrix& rho_in, const HilbertSpace& full)
{
    return {full, embed_input_operator(rho_in.matrix(), rho_in.space(), full)};
}

/// Diagonal observables whose responses are tracked: node occupations, plus
/// optionally the top-level population of each input mode (leakage monitor).
struct ObservableTables {
    std::vector<RVector> nodes;
    std::optional<RVector> input_top;

    static ObservableTables for_space(const HilbertSpace& full, bool with_leakage)
    {
        ObservableTables t;
        t.nodes = node_occupation_tables(full);
        if (with_leakage) {
            RVector top = RVector::Zero(full.dim());
            for (Index i = 0; i < full.dim(); ++i)
                for (std::size_t k = 0; k < 2; ++k)
                    if (full.occupation(i, k) == full.levels(k) - 1)
                        top(i) = 1.0;
            t.input_top = std::move(top);
        }
        return t;
    }

    Index count() const { return static_cast<Index>(nodes.size()) + (input_top ? 1 : 0); }

    RVector expectations(const CMatrix& x_diag_real_source) const
    {
        const RVector d = x_diag_real_source.diagonal().real();
        return diag_expectations(d);
    }

    RVector diag_expectations(const RVector& d) const
    {
        RVector out(count());
        for (std::size_t j = 0; j < nodes.size(); ++j)
            out(static_cast<Index>(j)) = nodes[j].dot(d);
        if (input_top)
            out(count() - 1) = input_top->dot(d);
        return out;
    }

    CVector complex_expectations(const CVector& d) const
    {
        CVector out(count());
        for (std::size_t j = 0; j < nodes.size(); ++j)
            out(static_cast<Index>(j)) = nodes[j].cast<cplx>().dot(d);
        if (input_top)
            out(count() - 1) = input_top->cast<cplx>().dot(d);
        return out;
    }
};

struct ResponseRequest {
    std::vector<double> times;          // readout times
    std::optional<TimeWindow> window;   // when set, a single time-integrated response
    double dt = 0.01;                   // stepping / integration grid
    bool track_leakage = false;
};

struct ResponseResult {
    std::vector<PhaseResponse> responses;  // per readout time, or one for the window
    double max_leakage = 0.0;              // top-level input population, if tracked
};

namespace detail {

inline PhaseResponse split_response(const RVector& constant, const std::vector<int>& freqs,
                                    const std::vector<CVector>& harm, Index q)
{
    PhaseResponse r;
    r.constant = constant.head(q);
    r.frequencies = freqs;
    for (const auto& h : harm)
        r.harmonics.push_back(h.head(q));
    return r;
}

inline double leakage_of(const RVector& constant, const std::vector<int>& freqs, const std::vector<CVector>& harm,
                         int probes = 16)
{
    const Index last = constant.size() - 1;
    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        const double phi = 2.0 * 3.141592653589793 * p / probes;
        double v = constant(last);
        for (std::size_t i = 0; i < freqs.size(); ++i)
            v += 2.0 * (std::polar(1.0, freqs[i] * phi) * harm[i](last)).real();
        worst = std::max(worst, v);
    }
    return worst;
}

inline std::vector<double> window_grid(const TimeWindow& w, double dt)
{
    const int n = std::max(1, static_cast<int>(std::ceil(w.length() / dt - 1e-9)));
    std::vector<double> ts;
    for (int i = 0; i <= n; ++i)
        ts.push_back(w.begin + w.length() * i / n);
    return ts;
}

} // namespace detail

/// Closed-system response from the eigendecomposition of H: only the kets in
/// the support of the input state are propagated.
inline ResponseResult coherent_response(const DensityMatrix& rho_in, const HilbertSpace& full,
                                        const Propagator& prop, const ResponseRequest& req)
{
    const auto comps = harmonic_components(rho_in);
    const auto tables = ObservableTables::for_space(full, req.track_leakage);
    const Index q = static_cast<Index>(tables.nodes.size());

    std::vector<Index> support;
    std::map<Index, Index> slot;
    for (const auto& [k, o] : comps)
        for (Index c = 0; c < o.cols(); ++c)
            for (Index r = 0; r < o.rows(); ++r)
                if (o(r, c) != cplx{})
                    for (Index a : {r, c})
                        if (!slot.count(a)) {
                            slot[a] = static_cast<Index>(support.size());
                            support.push_back(a);
                        }
    const Index s = static_cast<Index>(support.size());
    CMatrix coeffs(full.dim(), s);
    for (Index i = 0; i < s; ++i)
        coeffs.col(i) = prop.eigenvectors().row(embed_input_index(rho_in.space(), full, support[i])).adjoint();

    std::vector<int> freqs;
    for (const auto& [k, o] : comps)
        if (k > 0)
            freqs.push_back(k);

    auto at_time = [&](double t, RVector& constant, std::vector<CVector>& harm) {
        const CVector phases = (prop.energies().cast<cplx>() * (-I_UNIT * t)).array().exp().matrix();
        const CMatrix psi = prop.eigenvectors() * (phases.asDiagonal() * coeffs);
        // pair(a,b) = <psi_b| obs |psi_a> for every tracked diagonal observable
        harm.clear();
        constant = RVector::Zero(tables.count());
        for (const auto& [k, o] : comps) {
            CVector acc = CVector::Zero(tables.count());
            for (Index c = 0; c < o.cols(); ++c)
                for (Index r = 0; r < o.rows(); ++r) {
                    if (o(r, c) == cplx{})
                        continue;
                    const CVector prod = psi.col(slot.at(c)).conjugate().cwiseProduct(psi.col(slot.at(r)));
                    acc += o(r, c) * tables.complex_expectations(prod);
                }
            if (k == 0)
                constant = acc.real();
            else
                harm.push_back(acc);
        }
    };

    ResponseResult result;
    auto record = [&](const RVector& constant, const std::vector<CVector>& harm) {
        if (req.track_leakage)
            result.max_leakage = std::max(result.max_leakage, detail::leakage_of(constant, freqs, harm));
    };

    if (req.window) {
        const auto ts = detail::window_grid(*req.window, req.dt);
        std::vector<std::vector<RVector>> series(1 + freqs.size() * 2);
        for (double t : ts) {
            RVector constant;
            std::vector<CVector> harm;
            at_time(t, constant, harm);
            record(constant, harm);
            series[0].push_back(constant);
            for (std::size_t i = 0; i < harm.size(); ++i) {
                series[1 + 2 * i].push_back(harm[i].real());
                series[2 + 2 * i].push_back(harm[i].imag());
            }
        }
        const RVector constant = integrate_series(ts, series[0], *req.window);
        std::vector<CVector> harm;
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            const RVector re = integrate_series(ts, series[1 + 2 * i], *req.window);
            const RVector im = integrate_series(ts, series[2 + 2 * i], *req.window);
            harm.push_back(re.cast<cplx>() + I_UNIT * im.cast<cplx>());
        }
        result.responses.push_back(detail::split_response(constant, freqs, harm, q));
        return result;
    }
    for (double t : req.times) {
        RVector constant;
        std::vector<CVector> harm;
        at_time(t, constant, harm);
        record(constant, harm);
        result.responses.push_back(detail::split_response(constant, freqs, harm, q));
    }
    if (req.track_leakage && !req.times.empty()) {
        // also scan the trajectory up to the last readout time
        const double t_end = *std::max_element(req.times.begin(), req.times.end());
        const int n = std::max(1, static_cast<int>(std::ceil(t_end / 0.25)));
        for (int i = 0; i <= n; ++i) {
            RVector constant;
            std::vector<CVector> harm;
            at_time(t_end * i / n, constant, harm);
            record(constant, harm);
        }
    }
    return result;
}

/// Response from explicit stepping of each harmonic operator; `step` is any
/// linear propagation step of size req.dt.
template <typename StepFn>
ResponseResult stepped_response(const DensityMatrix& rho_in, const HilbertSpace& full, StepFn&& step,
                                const ResponseRequest& req)
{
    const auto comps = harmonic_components(rho_in);
    const auto tables = ObservableTables::for_space(full, req.track_leakage);
    const Index q = static_cast<Index>(tables.nodes.size());
    const double dt = req.dt;

    std::vector<int> record_steps;
    auto to_step = [&](double t) {
        const double n = t / dt;
        const int rounded = static_cast<int>(std::lround(n));
        if (std::abs(n - rounded) > 1e-6)
            throw std::invalid_argument("readout time " + std::to_string(t) + " is not a multiple of dt=" +
                                        std::to_string(dt));
        return rounded;
    };
    if (req.window) {
        for (int n = to_step(req.window->begin); n <= to_step(req.window->end); ++n)
            record_steps.push_back(n);
    } else {
        for (double t : req.times)
            record_steps.push_back(to_step(t));
    }
    const int last = *std::max_element(record_steps.begin(), record_steps.end());

    std::vector<int> freqs;
    // values[comp][record] : expectations for each recorded step
    std::vector<std::map<int, CVector>> values;
    for (const auto& [k, o] : comps) {
        if (k > 0)
            freqs.push_back(k);
        CMatrix x = embed_input_operator(o, rho_in.space(), full);
        std::map<int, CVector> rec;
        auto capture = [&](int n) {
            if (std::find(record_steps.begin(), record_steps.end(), n) != record_steps.end())
                rec[n] = tables.complex_expectations(x.diagonal());
        };
        capture(0);
        for (int n = 1; n <= last; ++n) {
            step(x);
            capture(n);
        }
        values.push_back(std::move(rec));
    }

    auto assemble = [&](int n, RVector& constant, std::vector<CVector>& harm) {
        harm.clear();
        std::size_t ci = 0;
        for (const auto& [k, o] : comps) {
            const CVector& v = values[ci++].at(n);
            if (k == 0)
                constant = v.real();
            else
                harm.push_back(v);
        }
        if (constant.size() == 0)
            constant = RVector::Zero(tables.count());
    };

    ResponseResult result;
    if (req.window) {
        std::vector<double> ts;
        std::vector<std::vector<RVector>> series(1 + 2 * freqs.size());
        for (int n : record_steps) {
            RVector constant;
            std::vector<CVector> harm;
            assemble(n, constant, harm);
            if (req.track_leakage)
                result.max_leakage = std::max(result.max_leakage, detail::leakage_of(constant, freqs, harm));
            ts.push_back(n * dt);
            series[0].push_back(constant);
            for (std::size_t i = 0; i < harm.size(); ++i) {
                series[1 + 2 * i].push_back(harm[i].real());
                series[2 + 2 * i].push_back(harm[i].imag());
            }
        }
        const TimeWindow w{ts.front(), ts.back()};
        const RVector constant = integrate_series(ts, series[0], w);
        std::vector<CVector> harm;
        for (std::size_t i = 0; i < freqs.size(); ++i)
            harm.push_back(integrate_series(ts, series[1 + 2 * i], w).cast<cplx>() +
                           I_UNIT * integrate_series(ts, series[2 + 2 * i], w).cast<cplx>());
        result.responses.push_back(detail::split_response(constant, freqs, harm, q));
        return result;
    }
    for (int n : record_steps) {
        RVector constant;
        std::vector<CVector> harm;
        assemble(n, constant, harm);
        if (req.track_leakage)
            result.max_leakage = std::max(result.max_leakage, detail::leakage_of(constant, freqs, harm));
        result.responses.push_back(detail::split_response(constant, freqs, harm, q));
    }
    return result;
}

/// Picks the propagation route for a realization: eigendecomposition for
/// closed dynamics, unitary+channel stepping with noise, Euler stepping for
/// cascading input.
inline ResponseResult network_response(const DensityMatrix& rho_in, const NetworkRealization& r,
                                       const NoiseConfig& noise, const ResponseRequest& req)
{
    const int levels = rho_in.space().levels(0);
    const HilbertSpace full = HilbertSpace::network(levels, r.q_nodes);
    if (r.coupling_type == CouplingType::cascading) {
        if (noise.any())
            throw std::invalid_argument("noise channels are not combined with cascading coupling");
        const CascadeStepper stepper(r, full, req.dt);
        return stepped_response(rho_in, full, [&](CMatrix& x) { stepper.step(x); }, req);
    }
    const Propagator prop(build_hamiltonian_real(r, full));
    if (!noise.any())
        return coherent_response(rho_in, full, prop, req);
    const NoisyStepper stepper(full, prop, noise, req.dt);
    return stepped_response(rho_in, full, [&](CMatrix& x) { stepper.step(x); }, req);
}

} // namespace qnphase

#endif // QNPHASE_RESPONSE_HPP
