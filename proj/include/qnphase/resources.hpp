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

#ifndef QNPHASE_RESOURCES_HPP
#define QNPHASE_RESOURCES_HPP

// Phase-carrying two-mode input states and their diagnostics.

#include "qnphase/hilbert.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qnphase {

enum class ResourceFamily { noon, classical_correlated, max_entangled };

inline std::string to_string(ResourceFamily f)
{
    switch (f) {
    case ResourceFamily::noon: return "NOON";
    case ResourceFamily::classical_correlated: return "ClassicalCorrelated";
    case ResourceFamily::max_entangled: return "MaxEntangled";
    }
    return "?";
}

inline ResourceFamily parse_resource_family(const std::string& s)
{
    if (s == "NOON")
        return ResourceFamily::noon;
    if (s == "ClassicalCorrelated")
        return ResourceFamily::classical_correlated;
    if (s == "MaxEntangled")
        return ResourceFamily::max_entangled;
    throw std::invalid_argument("unknown resource family '" + s + "'");
}

struct ResourceSpec {
    ResourceFamily family = ResourceFamily::noon;
    int degree = 1;          // N
    double dephase_p = 1.0;  // off-diagonal scaling in the Fock basis

    void validate() const
    {
        if (degree < 1)
            throw std::invalid_argument("resource degree must be >= 1");
        if (dephase_p < 0.0 || dephase_p > 1.0)
            throw std::invalid_argument("dephasing parameter p must lie in [0,1]");
    }

    /// Largest total excitation number present in the state.
    int max_total_excitations() const
    {
        return family == ResourceFamily::classical_correlated ? 2 * degree : degree;
    }

    /// Per-mode truncation that holds the state and every state reachable
    /// from it under excitation-conserving dynamics.
    int conserving_levels() const { return max_total_excitations() + 1; }
};

namespace detail {

inline CVector noon_ket(const HilbertSpace& in, int n)
{
    return (basis_ket(in, {n, 0}) - basis_ket(in, {0, n})) / std::sqrt(2.0);
}

} // namespace detail

/// Resource state on the two input modes, truncated at `levels` per mode
/// (0 selects conserving_levels()).
///   NOON:                (|N0> - |0N>)/sqrt2
///   ClassicalCorrelated: 1/2 |psi_N><psi_N| + 1/2 |psit_N><psit_N|, psit_N = (|00> - |NN>)/sqrt2
///   MaxEntangled:        sum_m |N-m, m> / sqrt(N+1)
/// followed by Fock dephasing with p = spec.dephase_p.
inline DensityMatrix make_resource(const ResourceSpec& spec, int levels = 0)
{
    spec.validate();
    if (levels == 0)
        levels = spec.conserving_levels();
    const int needed = spec.degree + 1;
    if (levels < needed)
        throw std::invalid_argument("resource degree " + std::to_string(spec.degree) +
                                    " does not fit truncation " + std::to_string(levels));
    const HilbertSpace in = HilbertSpace::inputs(levels);
    const int n = spec.degree;
    CMatrix rho;
    switch (spec.family) {
    case ResourceFamily::noon: {
        const CVector psi = detail::noon_ket(in, n);
        rho = psi * psi.adjoint();
        break;
    }
    case ResourceFamily::classical_correlated: {
        const CVector psi = detail::noon_ket(in, n);
        const CVector tilde = (basis_ket(in, {0, 0}) - basis_ket(in, {n, n})) / std::sqrt(2.0);
        rho = 0.5 * psi * psi.adjoint() + 0.5 * tilde * tilde.adjoint();
        break;
    }
    case ResourceFamily::max_entangled: {
        CVector psi = CVector::Zero(in.dim());
        for (int m = 0; m <= n; ++m)
            psi += basis_ket(in, {n - m, m});
        psi /= std::sqrt(static_cast<double>(n + 1));
        rho = psi * psi.adjoint();
        break;
    }
    }
    if (spec.dephase_p != 1.0)
        for (Index c = 0; c < rho.cols(); ++c)
            for (Index r = 0; r < rho.rows(); ++r)
                if (r != c)
                    rho(r, c) *= spec.dephase_p;
    return {in, std::move(rho)};
}

/// Conjugation by exp(i phi n_2), n_2 the occupation of the second mode.
inline DensityMatrix encode_phase(const DensityMatrix& rho, double phi)
{
    const auto& space = rho.space();
    if (space.mode_count() < 2)
        throw std::invalid_argument("phase encoding needs a two-mode input state");
    CMatrix out = rho.matrix();
    for (Index c = 0; c < out.cols(); ++c)
        for (Index r = 0; r < out.rows(); ++r) {
            const int k = space.occupation(r, 1) - space.occupation(c, 1);
            if (k != 0)
                out(r, c) *= std::polar(1.0, phi * k);
        }
    return {space, std::move(out)};
}

inline DensityMatrix dephase_fock(const DensityMatrix& rho, double p)
{
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("dephasing parameter p must lie in [0,1]");
    CMatrix out = rho.matrix();
    for (Index c = 0; c < out.cols(); ++c)
        for (Index r = 0; r < out.rows(); ++r)
            if (r != c)
                out(r, c) *= p;
    return {rho.space(), std::move(out)};
}

/// -tr(rho ln rho) from the spectrum; eigenvalues below 1e-15 contribute 0.
inline double von_neumann_entropy(const DensityMatrix& rho)
{
    const RVector ev = rho.eigenvalues();
    double s = 0.0;
    for (Index i = 0; i < ev.size(); ++i)
        if (ev(i) > 1e-15)
            s -= ev(i) * std::log(ev(i));
    return s;
}

/// Relative entropy of coherence, S(diag rho) - S(rho).
inline double coherence(const DensityMatrix& rho)
{
    const CMatrix diag = rho.matrix().diagonal().asDiagonal();
    return von_neumann_entropy(DensityMatrix(rho.space(), diag)) - von_neumann_entropy(rho);
}

/// Partial transpose on the second mode of a two-mode state.
inline CMatrix partial_transpose_second(const DensityMatrix& rho)
{
    const auto& space = rho.space();
    if (space.mode_count() != 2)
        throw std::invalid_argument("negativity is defined here for two-mode states");
    const Index dim = space.dim();
    CMatrix pt(dim, dim);
    for (Index r = 0; r < dim; ++r)
        for (Index c = 0; c < dim; ++c) {
            const int r1 = space.occupation(r, 0), r2 = space.occupation(r, 1);
            const int c1 = space.occupation(c, 0), c2 = space.occupation(c, 1);
            const Index src_r = r1 * space.stride(0) + c2 * space.stride(1);
            const Index src_c = c1 * space.stride(0) + r2 * space.stride(1);
            pt(r, c) = rho.matrix()(src_r, src_c);
        }
    return pt;
}

/// Sum of |negative eigenvalues| of the partial transpose (input_1 : input_2).
inline double negativity(const DensityMatrix& rho)
{
    const CMatrix pt = partial_transpose_second(rho);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (pt + pt.adjoint()), Eigen::EigenvaluesOnly);
    double neg = 0.0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) < 0.0)
            neg -= es.eigenvalues()(i);
    return neg;
}

inline constexpr double QFI_CUTOFF = 1e-12;

/// Mixed-state quantum Fisher information for rho(phi) = e^{i phi G} rho e^{-i phi G}:
///   F = sum_{l_i + l_j > eps} 2 |<i| d rho |j>|^2 / (l_i + l_j),  d rho = i[G, rho].
inline double qfi(const DensityMatrix& rho, const Operator& generator)
{
    if (!(generator.space() == rho.space()))
        throw std::invalid_argument("generator and state live on different spaces");
    const CMatrix herm = 0.5 * (rho.matrix() + rho.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
    const RVector& lam = es.eigenvalues();
    const CMatrix& v = es.eigenvectors();
    const CMatrix& g = generator.matrix();
    const CMatrix d_rho = I_UNIT * (g * herm - herm * g);
    const CMatrix d_eig = v.adjoint() * d_rho * v;
    double f = 0.0;
    for (Index i = 0; i < lam.size(); ++i)
        for (Index j = 0; j < lam.size(); ++j) {
            const double s = lam(i) + lam(j);
            if (s > QFI_CUTOFF)
                f += 2.0 * std::norm(d_eig(i, j)) / s;
        }
    return f;
}

/// QFI with the phase generator n_2 of the state's own space.
inline double qfi(const DensityMatrix& rho) { return qfi(rho, number_operator(rho.space(), 1)); }

} // namespace qnphase

#endif // QNPHASE_RESOURCES_HPP
