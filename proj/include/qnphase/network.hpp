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

#ifndef QNPHASE_NETWORK_HPP
#define QNPHASE_NETWORK_HPP

// Random quantum-network realizations and their Hamiltonians.
//
// Units: hbar = Omega = 1. Energies, couplings and rates are in units of
// hbar*Omega and times in units of 1/Omega.

#include "qnphase/hilbert.hpp"
#include "qnphase/random.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnphase {

enum class CouplingType { energy_preserving, ultra_strong, cascading };

inline std::string to_string(CouplingType c)
{
    switch (c) {
    case CouplingType::energy_preserving: return "EnergyPreserving";
    case CouplingType::ultra_strong: return "UltraStrong";
    case CouplingType::cascading: return "Cascading";
    }
    return "?";
}

inline CouplingType parse_coupling(const std::string& s)
{
    if (s == "EnergyPreserving" || s == "EP")
        return CouplingType::energy_preserving;
    if (s == "UltraStrong" || s == "USC")
        return CouplingType::ultra_strong;
    if (s == "Cascading")
        return CouplingType::cascading;
    throw std::invalid_argument("unknown coupling type '" + s + "'");
}

/// One draw of node energies, node-node couplings and input weights.
struct NetworkRealization {
    int q_nodes = 0;
    std::vector<double> energies;   // e_j
    RMatrix couplings;              // c_jj', symmetric, zero diagonal
    RMatrix input_weights;          // w_jk, Q x 2
    CouplingType coupling_type = CouplingType::energy_preserving;
    double cascade_decay = 1.0;     // gamma, Cascading only
    std::uint64_t seed = 0;

    void validate() const
    {
        if (q_nodes < 1)
            throw std::invalid_argument("network needs at least one node");
        const auto q = static_cast<Index>(q_nodes);
        if (static_cast<Index>(energies.size()) != q || couplings.rows() != q || couplings.cols() != q ||
            input_weights.rows() != q || input_weights.cols() != 2)
            throw std::invalid_argument("network parameter shapes do not match q_nodes");
        auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        for (double e : energies)
            if (!in_unit(e))
                throw std::invalid_argument("node energy outside [0,1]");
        for (Index i = 0; i < q; ++i)
            for (Index j = 0; j < q; ++j) {
                if (!in_unit(couplings(i, j)))
                    throw std::invalid_argument("coupling outside [0,1]");
                if (couplings(i, j) != couplings(j, i))
                    throw std::invalid_argument("coupling matrix is not symmetric");
            }
        for (Index i = 0; i < input_weights.size(); ++i)
            if (!in_unit(input_weights.data()[i]))
                throw std::invalid_argument("input weight outside [0,1]");
        if (coupling_type == CouplingType::cascading && !(cascade_decay > 0.0))
            throw std::invalid_argument("cascading coupling needs a positive decay");
    }
};

/// Draws e_j, then c_jj' for j < j' (row-major), then w_jk (row-major), all
/// uniform on [0,1] from a single stream seeded with `seed`.
inline NetworkRealization sample_realization(int q_nodes, CouplingType coupling, std::uint64_t seed,
                                             double cascade_decay = 1.0)
{
    if (q_nodes < 1)
        throw std::invalid_argument("network needs at least one node");
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    NetworkRealization r;
    r.q_nodes = q_nodes;
    r.coupling_type = coupling;
    r.cascade_decay = cascade_decay;
    r.seed = seed;
    r.energies.resize(static_cast<std::size_t>(q_nodes));
    for (auto& e : r.energies)
        e = unit(rng);
    r.couplings = RMatrix::Zero(q_nodes, q_nodes);
    for (int j = 0; j < q_nodes; ++j)
        for (int jp = j + 1; jp < q_nodes; ++jp)
            r.couplings(j, jp) = r.couplings(jp, j) = unit(rng);
    r.input_weights.resize(q_nodes, 2);
    for (int j = 0; j < q_nodes; ++j)
        for (int k = 0; k < 2; ++k)
            r.input_weights(j, k) = unit(rng);
    return r;
}

namespace detail {

inline void check_network_space(const NetworkRealization& r, const HilbertSpace& space)
{
    if (space.mode_count() != static_cast<std::size_t>(r.q_nodes) + 2)
        throw std::invalid_argument("space has " + std::to_string(space.mode_count()) +
                                    " modes, realization needs 2 inputs + " + std::to_string(r.q_nodes) +
                                    " nodes");
    for (std::size_t m = 2; m < space.mode_count(); ++m)
        if (space.mode(m).kind != ModeKind::qubit)
            throw std::invalid_argument("network node " + std::to_string(m - 2) + " is not a qubit");
}

} // namespace detail

/// Real-valued Hamiltonian matrix. Node-node couplings are summed over
/// unordered pairs; Cascading keeps only the node terms (its input coupling
/// is dissipative and handled by the master equation).
inline RMatrix build_hamiltonian_real(const NetworkRealization& r, const HilbertSpace& space)
{
    r.validate();
    detail::check_network_space(r, space);
    const Index dim = space.dim();
    RMatrix h = RMatrix::Zero(dim, dim);
    const std::size_t q = static_cast<std::size_t>(r.q_nodes);
    auto node = [](std::size_t j) { return j + 2; };

    for (Index i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < q; ++j)
            h(i, i) += r.energies[j] * space.occupation(i, node(j));

    for (std::size_t j = 0; j < q; ++j)
        for (std::size_t jp = j + 1; jp < q; ++jp) {
            const double c = r.couplings(static_cast<Index>(j), static_cast<Index>(jp));
            accumulate_ladder_product(h, space, c, {{node(j), true}, {node(jp), false}});
            accumulate_ladder_product(h, space, c, {{node(jp), true}, {node(j), false}});
        }

    if (r.coupling_type == CouplingType::cascading)
        return h;

    for (std::size_t j = 0; j < q; ++j)
        for (std::size_t k = 0; k < 2; ++k) {
            const double w = r.input_weights(static_cast<Index>(j), static_cast<Index>(k));
            accumulate_ladder_product(h, space, w, {{k, true}, {node(j), false}});
            accumulate_ladder_product(h, space, w, {{node(j), true}, {k, false}});
            if (r.coupling_type == CouplingType::ultra_strong) {
                accumulate_ladder_product(h, space, w, {{k, false}, {node(j), false}});
                accumulate_ladder_product(h, space, w, {{node(j), true}, {k, true}});
            }
        }
    return h;
}

inline Operator build_hamiltonian(const NetworkRealization& r, const HilbertSpace& space)
{
    return {space, build_hamiltonian_real(r, space).cast<cplx>()};
}

inline void to_json(nlohmann::json& j, const NetworkRealization& r)
{
    std::vector<std::vector<double>> c(static_cast<std::size_t>(r.q_nodes));
    std::vector<std::vector<double>> w(static_cast<std::size_t>(r.q_nodes));
    for (int a = 0; a < r.q_nodes; ++a) {
        for (int b = 0; b < r.q_nodes; ++b)
            c[a].push_back(r.couplings(a, b));
        for (int k = 0; k < 2; ++k)
            w[a].push_back(r.input_weights(a, k));
    }
    j = nlohmann::json{{"q_nodes", r.q_nodes},
                       {"energies", r.energies},
                       {"couplings", c},
                       {"input_weights", w},
                       {"coupling_type", to_string(r.coupling_type)},
                       {"cascade_decay", r.cascade_decay},
                       {"seed", r.seed}};
}

inline void from_json(const nlohmann::json& j, NetworkRealization& r)
{
    r.q_nodes = j.at("q_nodes").get<int>();
    r.energies = j.at("energies").get<std::vector<double>>();
    const auto c = j.at("couplings").get<std::vector<std::vector<double>>>();
    const auto w = j.at("input_weights").get<std::vector<std::vector<double>>>();
    const auto q = static_cast<std::size_t>(std::max(r.q_nodes, 0));
    if (c.size() != q || w.size() != q)
        throw std::invalid_argument("network JSON: matrix row count does not match q_nodes");
    r.couplings.resize(r.q_nodes, r.q_nodes);
    r.input_weights.resize(r.q_nodes, 2);
    for (std::size_t a = 0; a < q; ++a) {
        if (c[a].size() != q || w[a].size() != 2)
            throw std::invalid_argument("network JSON: ragged matrix");
        for (std::size_t b = 0; b < q; ++b)
            r.couplings(static_cast<Index>(a), static_cast<Index>(b)) = c[a][b];
        for (std::size_t k = 0; k < 2; ++k)
            r.input_weights(static_cast<Index>(a), static_cast<Index>(k)) = w[a][k];
    }
    r.coupling_type = parse_coupling(j.at("coupling_type").get<std::string>());
    r.cascade_decay = j.value("cascade_decay", 1.0);
    r.seed = j.value("seed", std::uint64_t{0});
    r.validate();
}

} // namespace qnphase

#endif // QNPHASE_NETWORK_HPP
