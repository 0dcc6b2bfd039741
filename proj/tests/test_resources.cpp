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

#include "qnphase/resources.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>

using namespace qnphase;
using Catch::Matchers::WithinAbs;

namespace {

RVector spectrum(const DensityMatrix& rho)
{
    RVector ev = rho.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size());
    return ev;
}

} // namespace

TEST_CASE("NOON N=1 splits one excitation evenly")
{
    const auto rho = make_resource({ResourceFamily::noon, 1});
    CHECK(rho.dim() == 4);
    CHECK_THAT(rho.trace().real(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(rho.mean_occupation(0), WithinAbs(0.5, 1e-15));
    CHECK_THAT(rho.mean_occupation(1), WithinAbs(0.5, 1e-15));
    CHECK_THAT(rho.purity(), WithinAbs(1.0, 1e-14));
    const auto& s = rho.space();
    CHECK_THAT(rho.matrix()(s.index_of(std::vector<int>{1, 0}), s.index_of(std::vector<int>{0, 1})).real(),
               WithinAbs(-0.5, 1e-15));
}

TEST_CASE("classically correlated state equals the product-basis mixture")
{
    for (int n = 1; n <= 4; ++n) {
        const int levels = 2 * n + 1;
        const auto rho = make_resource({ResourceFamily::classical_correlated, n}, levels);
        const HilbertSpace mode({ModeSpec::boson(levels)});
        const CVector plus = (basis_ket(mode, {0}) + basis_ket(mode, {n})) / std::sqrt(2.0);
        const CVector minus = (basis_ket(mode, {0}) - basis_ket(mode, {n})) / std::sqrt(2.0);
        const CVector pm = kron(plus, minus), mp = kron(minus, plus);
        const CMatrix mix = 0.5 * pm * pm.adjoint() + 0.5 * mp * mp.adjoint();
        CHECK(max_abs(rho.matrix() - mix) < 1e-12);
        const RVector ev = spectrum(rho);
        CHECK_THAT(ev(ev.size() - 1), WithinAbs(0.5, 1e-12));
        CHECK_THAT(ev(ev.size() - 2), WithinAbs(0.5, 1e-12));
        CHECK(std::abs(ev(ev.size() - 3)) < 1e-12);
    }
}

TEST_CASE("maximally entangled N=2 has three equal amplitudes")
{
    const auto rho = make_resource({ResourceFamily::max_entangled, 2});
    const auto& s = rho.space();
    CHECK_THAT(rho.purity(), WithinAbs(1.0, 1e-14));
    for (auto occ : {std::vector<int>{2, 0}, std::vector<int>{1, 1}, std::vector<int>{0, 2}})
        CHECK_THAT(rho.matrix()(s.index_of(occ), s.index_of(occ)).real(), WithinAbs(1.0 / 3.0, 1e-15));
    CHECK_THAT(rho.matrix()(s.index_of(std::vector<int>{2, 0}), s.index_of(std::vector<int>{0, 2})).real(),
               WithinAbs(1.0 / 3.0, 1e-15));
}

TEST_CASE("resources reject degrees that do not fit the truncation")
{
    CHECK_THROWS_AS(make_resource({ResourceFamily::noon, 3}, 3), std::invalid_argument);
    CHECK_THROWS_AS(make_resource({ResourceFamily::noon, 0}), std::invalid_argument);
    CHECK_THROWS_AS(make_resource({ResourceFamily::noon, 1, 1.5}), std::invalid_argument);
    CHECK(ResourceSpec{ResourceFamily::classical_correlated, 3}.conserving_levels() == 7);
    CHECK(ResourceSpec{ResourceFamily::noon, 3}.conserving_levels() == 4);
    CHECK(parse_resource_family("MaxEntangled") == ResourceFamily::max_entangled);
    CHECK_THROWS_AS(parse_resource_family("GHZ"), std::invalid_argument);
}

TEST_CASE("phase encoding accumulates N phi and composes additively")
{
    const auto rho = make_resource({ResourceFamily::noon, 2});
    const auto& s = rho.space();
    CHECK(max_abs(encode_phase(rho, 0.0).matrix() - rho.matrix()) == 0.0);
    const auto enc = encode_phase(rho, std::numbers::pi / 2);
    const Index i20 = s.index_of(std::vector<int>{2, 0}), i02 = s.index_of(std::vector<int>{0, 2});
    // rho(20,02) = -1/2 before encoding; e^{-i pi} on the |02> side flips it.
    CHECK_THAT(enc.matrix()(i20, i02).real(), WithinAbs(0.5, 1e-15));
    const double a = 0.37, b = 1.21;
    CHECK(max_abs(encode_phase(encode_phase(rho, a), b).matrix() - encode_phase(rho, a + b).matrix()) < 1e-14);
    for (double phi : {0.3, 1.7, 4.0})
        CHECK((spectrum(encode_phase(rho, phi)) - spectrum(rho)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Fock dephasing keeps the diagonal, stays positive and commutes with encoding")
{
    for (int n = 1; n <= 4; ++n) {
        const auto rho = make_resource({ResourceFamily::classical_correlated, n});
        CHECK(max_abs(dephase_fock(rho, 1.0).matrix() - rho.matrix()) == 0.0);
        const auto diag = dephase_fock(rho, 0.0);
        CHECK(max_abs(CMatrix(diag.matrix().diagonal().asDiagonal()) - diag.matrix()) == 0.0);
        CHECK(max_abs(encode_phase(diag, 0.9).matrix() - diag.matrix()) == 0.0);
        for (double p = 0.0; p <= 1.0001; p += 0.1) {
            const auto d = dephase_fock(rho, std::min(p, 1.0));
            CHECK(d.min_eigenvalue() > -1e-12);
            CHECK(max_abs(d.matrix().diagonal() - rho.matrix().diagonal()) == 0.0);
            CHECK(max_abs(dephase_fock(encode_phase(rho, 0.8), std::min(p, 1.0)).matrix() -
                          encode_phase(d, 0.8).matrix()) < 1e-15);
        }
    }
    CHECK_THROWS_AS(dephase_fock(make_resource({ResourceFamily::noon, 1}), -0.1), std::invalid_argument);
}

TEST_CASE("spec dephasing matches dephase_fock")
{
    const auto a = make_resource({ResourceFamily::classical_correlated, 2, 0.4});
    const auto b = dephase_fock(make_resource({ResourceFamily::classical_correlated, 2}), 0.4);
    CHECK(max_abs(a.matrix() - b.matrix()) == 0.0);
}

TEST_CASE("coherence of the correlated state is ln 2 and shrinks with p")
{
    for (int n = 1; n <= 4; ++n) {
        const auto rho = make_resource({ResourceFamily::classical_correlated, n});
        CHECK_THAT(coherence(rho), WithinAbs(std::log(2.0), 1e-10));
        double prev = coherence(rho);
        for (double p : {0.8, 0.6, 0.4, 0.2, 0.0}) {
            const double c = coherence(dephase_fock(rho, p));
            CHECK(c <= prev + 1e-12);
            CHECK(c >= -1e-12);
            prev = c;
        }
        CHECK_THAT(prev, WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("negativity: correlated states are separable, NOON N=1 gives one half")
{
    for (int n = 1; n <= 4; ++n)
        CHECK_THAT(negativity(make_resource({ResourceFamily::classical_correlated, n})), WithinAbs(0.0, 1e-12));
    CHECK_THAT(negativity(make_resource({ResourceFamily::noon, 1})), WithinAbs(0.5, 1e-12));
    const HilbertSpace in = HilbertSpace::inputs(3);
    CHECK_THAT(negativity(DensityMatrix::from_ket(in, basis_ket(in, {0, 0}))), WithinAbs(0.0, 1e-15));
}

TEST_CASE("QFI reaches N^2 for NOON and correlated states")
{
    for (int n = 1; n <= 4; ++n) {
        const auto noon = make_resource({ResourceFamily::noon, n});
        const auto cc = make_resource({ResourceFamily::classical_correlated, n});
        CHECK_THAT(qfi(noon), WithinAbs(n * n, 1e-10));
        CHECK_THAT(qfi(cc), WithinAbs(n * n, 1e-10));
        CHECK_THAT(qfi(encode_phase(cc, 0.77)), WithinAbs(n * n, 1e-10));
        // Pure-state reference 4 Var(n_2).
        const Operator n2 = number_operator(noon.space(), 1);
        const double m1 = noon.expectation(n2), m2 = noon.expectation(n2 * n2);
        CHECK_THAT(qfi(noon), WithinAbs(4.0 * (m2 - m1 * m1), 1e-10));
    }
    const HilbertSpace in = HilbertSpace::inputs(3);
    CHECK_THAT(qfi(DensityMatrix::from_ket(in, basis_ket(in, {0, 0}))), WithinAbs(0.0, 1e-15));
    CHECK_THAT(qfi(make_resource({ResourceFamily::classical_correlated, 2, 0.0})), WithinAbs(0.0, 1e-12));
}
