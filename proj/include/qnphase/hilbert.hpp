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

#ifndef QNPHASE_HILBERT_HPP
#define QNPHASE_HILBERT_HPP

// Composite Hilbert spaces of truncated bosonic modes and two-level nodes,
// plus the elementary operators and states living on them.
//
// Basis ordering: the first mode is the most significant tensor factor, so
// an operator on mode m embeds as I_left (x) op (x) I_right. Network spaces
// are always laid out as [input_1, input_2, node_1 .. node_Q].

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qnphase {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr cplx I_UNIT{0.0, 1.0};

enum class ModeKind { boson, qubit };

struct ModeSpec {
    ModeKind kind = ModeKind::qubit;
    int levels = 2;

    static ModeSpec qubit() { return {ModeKind::qubit, 2}; }
    static ModeSpec boson(int levels)
    {
        if (levels < 2)
            throw std::invalid_argument("boson mode needs at least 2 levels, got " +
                                        std::to_string(levels));
        return {ModeKind::boson, levels};
    }

    bool operator==(const ModeSpec&) const = default;
};

class HilbertSpace {
public:
    HilbertSpace() = default;

    explicit HilbertSpace(std::vector<ModeSpec> modes) : modes_(std::move(modes))
    {
        if (modes_.empty())
            throw std::invalid_argument("Hilbert space needs at least one mode");
        strides_.assign(modes_.size(), 1);
        dim_ = 1;
        for (std::size_t m = modes_.size(); m-- > 0;) {
            const auto& spec = modes_[m];
            if (spec.levels < 2)
                throw std::invalid_argument("mode levels must be >= 2");
            if (spec.kind == ModeKind::qubit && spec.levels != 2)
                throw std::invalid_argument("qubit mode must have exactly 2 levels");
            strides_[m] = dim_;
            dim_ *= spec.levels;
        }
    }

    /// Two bosonic inputs truncated at `input_levels` followed by `q_nodes` qubits.
    static HilbertSpace network(int input_levels, int q_nodes)
    {
        if (q_nodes < 0)
            throw std::invalid_argument("negative node count");
        std::vector<ModeSpec> modes{ModeSpec::boson(input_levels), ModeSpec::boson(input_levels)};
        modes.insert(modes.end(), static_cast<std::size_t>(q_nodes), ModeSpec::qubit());
        return HilbertSpace(std::move(modes));
    }

    /// The two-mode input space on which resource states are defined.
    static HilbertSpace inputs(int input_levels)
    {
        return HilbertSpace({ModeSpec::boson(input_levels), ModeSpec::boson(input_levels)});
    }

    Index dim() const { return dim_; }
    std::size_t mode_count() const { return modes_.size(); }
    const std::vector<ModeSpec>& modes() const { return modes_; }
    const ModeSpec& mode(std::size_t m) const
    {
        check_mode(m);
        return modes_[m];
    }
    int levels(std::size_t m) const { return mode(m).levels; }
    Index stride(std::size_t m) const
    {
        check_mode(m);
        return strides_[m];
    }

    int occupation(Index basis_index, std::size_t m) const
    {
        return static_cast<int>((basis_index / strides_[m]) % modes_[m].levels);
    }

    Index index_of(std::span<const int> occupations) const
    {
        if (occupations.size() != modes_.size())
            throw std::invalid_argument("occupation list has " + std::to_string(occupations.size()) +
                                        " entries, space has " + std::to_string(modes_.size()) +
                                        " modes");
        Index idx = 0;
        for (std::size_t m = 0; m < modes_.size(); ++m) {
            if (occupations[m] < 0 || occupations[m] >= modes_[m].levels)
                throw std::out_of_range("occupation " + std::to_string(occupations[m]) +
                                        " exceeds truncation of mode " + std::to_string(m));
            idx += occupations[m] * strides_[m];
        }
        return idx;
    }

    std::vector<int> occupations_of(Index basis_index) const
    {
        std::vector<int> occ(modes_.size());
        for (std::size_t m = 0; m < modes_.size(); ++m)
            occ[m] = occupation(basis_index, m);
        return occ;
    }

    /// Indices of all qubit modes (the network nodes in a network space).
    std::vector<std::size_t> qubit_modes() const
    {
        std::vector<std::size_t> out;
        for (std::size_t m = 0; m < modes_.size(); ++m)
            if (modes_[m].kind == ModeKind::qubit)
                out.push_back(m);
        return out;
    }

    bool operator==(const HilbertSpace& other) const { return modes_ == other.modes_; }

    void check_mode(std::size_t m) const
    {
        if (m >= modes_.size())
            throw std::out_of_range("mode index " + std::to_string(m) + " out of range (" +
                                    std::to_string(modes_.size()) + " modes)");
    }

private:
    std::vector<ModeSpec> modes_;
    std::vector<Index> strides_;
    Index dim_ = 0;
};

namespace detail {

inline void require_square(const HilbertSpace& space, const CMatrix& m, const char* what)
{
    if (m.rows() != space.dim() || m.cols() != space.dim())
        throw std::invalid_argument(std::string(what) + ": matrix is " + std::to_string(m.rows()) +
                                    "x" + std::to_string(m.cols()) + ", space dimension is " +
                                    std::to_string(space.dim()));
}

} // namespace detail

class Operator {
public:
    Operator(HilbertSpace space, CMatrix matrix) : space_(std::move(space)), matrix_(std::move(matrix))
    {
        detail::require_square(space_, matrix_, "Operator");
    }

    const HilbertSpace& space() const { return space_; }
    const CMatrix& matrix() const { return matrix_; }
    Index dim() const { return space_.dim(); }

    Operator adjoint() const { return {space_, matrix_.adjoint()}; }

    Operator operator*(const Operator& rhs) const
    {
        same_space(rhs);
        return {space_, matrix_ * rhs.matrix_};
    }
    Operator operator+(const Operator& rhs) const
    {
        same_space(rhs);
        return {space_, matrix_ + rhs.matrix_};
    }
    Operator operator-(const Operator& rhs) const
    {
        same_space(rhs);
        return {space_, matrix_ - rhs.matrix_};
    }
    Operator operator*(cplx s) const { return {space_, matrix_ * s}; }

    double hermiticity_error() const { return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff(); }

private:
    void same_space(const Operator& rhs) const
    {
        if (!(space_ == rhs.space_))
            throw std::invalid_argument("operators live on different Hilbert spaces");
    }

    HilbertSpace space_;
    CMatrix matrix_;
};

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

/// Largest absolute matrix element; used as the operator norm proxy in checks.
inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

struct DensityTolerance {
    double hermiticity = 1e-12;
    double trace = 1e-10;
    double min_eigenvalue = -1e-9;
};

class DensityMatrix {
public:
    DensityMatrix(HilbertSpace space, CMatrix matrix) : space_(std::move(space)), matrix_(std::move(matrix))
    {
        detail::require_square(space_, matrix_, "DensityMatrix");
    }

    static DensityMatrix from_ket(HilbertSpace space, const CVector& ket)
    {
        if (ket.size() != space.dim())
            throw std::invalid_argument("ket dimension does not match space");
        CMatrix rho = ket * ket.adjoint();
        return {std::move(space), std::move(rho)};
    }

    const HilbertSpace& space() const { return space_; }
    const CMatrix& matrix() const { return matrix_; }
    CMatrix& mutable_matrix() { return matrix_; }
    Index dim() const { return space_.dim(); }

    cplx trace() const { return matrix_.trace(); }
    double purity() const { return (matrix_ * matrix_).trace().real(); }

    double expectation(const Operator& op) const
    {
        if (!(op.space() == space_))
            throw std::invalid_argument("operator and state live on different spaces");
        return (op.matrix() * matrix_).trace().real();
    }

    /// Mean occupation of mode m; uses the diagonal only.
    double mean_occupation(std::size_t m) const
    {
        space_.check_mode(m);
        double acc = 0.0;
        for (Index i = 0; i < dim(); ++i)
            acc += space_.occupation(i, m) * matrix_(i, i).real();
        return acc;
    }

    RVector eigenvalues() const
    {
        const CMatrix herm = 0.5 * (matrix_ + matrix_.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }

    double min_eigenvalue() const { return eigenvalues().minCoeff(); }

    /// Throws std::domain_error if the matrix is not a physical state.
    void check_physical(const DensityTolerance& tol = {}) const
    {
        const double herm = max_abs(matrix_ - matrix_.adjoint());
        if (herm > tol.hermiticity)
            throw std::domain_error("density matrix not Hermitian (deviation " + std::to_string(herm) + ")");
        const double tr_err = std::abs(trace() - 1.0);
        if (tr_err > tol.trace)
            throw std::domain_error("density matrix trace deviates from 1 by " + std::to_string(tr_err));
        const double lo = min_eigenvalue();
        if (lo < tol.min_eigenvalue)
            throw std::domain_error("density matrix has negative eigenvalue " + std::to_string(lo));
    }

private:
    HilbertSpace space_;
    CMatrix matrix_;
};

inline CMatrix kron(const CMatrix& a, const CMatrix& b)
{
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Embeds a single-mode matrix on mode m by tensoring identities elsewhere.
inline Operator embed(const HilbertSpace& space, std::size_t m, const CMatrix& local)
{
    space.check_mode(m);
    const Index d = space.levels(m);
    if (local.rows() != d || local.cols() != d)
        throw std::invalid_argument("local operator dimension does not match mode levels");
    const Index right = space.stride(m);
    const Index left = space.dim() / (right * d);
    CMatrix out = kron(CMatrix::Identity(left, left), kron(local, CMatrix::Identity(right, right)));
    return {space, std::move(out)};
}

inline CMatrix local_lowering(int levels)
{
    CMatrix a = CMatrix::Zero(levels, levels);
    for (int n = 1; n < levels; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline Operator annihilation(const HilbertSpace& space, std::size_t m)
{
    space.check_mode(m);
    return embed(space, m, local_lowering(space.levels(m)));
}

inline Operator creation(const HilbertSpace& space, std::size_t m) { return annihilation(space, m).adjoint(); }

inline Operator number_operator(const HilbertSpace& space, std::size_t m)
{
    space.check_mode(m);
    CMatrix n = CMatrix::Zero(space.dim(), space.dim());
    for (Index i = 0; i < space.dim(); ++i)
        n(i, i) = space.occupation(i, m);
    return {space, std::move(n)};
}

/// Sum of the number operators of every mode.
inline Operator total_number_operator(const HilbertSpace& space)
{
    CMatrix n = CMatrix::Zero(space.dim(), space.dim());
    for (Index i = 0; i < space.dim(); ++i) {
        int total = 0;
        for (std::size_t m = 0; m < space.mode_count(); ++m)
            total += space.occupation(i, m);
        n(i, i) = total;
    }
    return {space, std::move(n)};
}

inline CVector basis_ket(const HilbertSpace& space, std::span<const int> occupations)
{
    CVector ket = CVector::Zero(space.dim());
    ket(space.index_of(occupations)) = 1.0;
    return ket;
}

inline CVector basis_ket(const HilbertSpace& space, std::initializer_list<int> occupations)
{
    const std::vector<int> occ(occupations);
    return basis_ket(space, std::span<const int>(occ));
}

enum class PauliAxis { x, y, z };

inline PauliAxis parse_pauli_axis(char axis)
{
    switch (axis) {
    case 'x': case 'X': return PauliAxis::x;
    case 'y': case 'Y': return PauliAxis::y;
    case 'z': case 'Z': return PauliAxis::z;
    default: throw std::invalid_argument(std::string("invalid Pauli axis '") + axis + "'");
    }
}

inline CMatrix local_pauli(PauliAxis axis)
{
    CMatrix s(2, 2);
    switch (axis) {
    case PauliAxis::x: s << 0, 1, 1, 0; break;
    case PauliAxis::y: s << 0, -I_UNIT, I_UNIT, 0; break;
    case PauliAxis::z: s << 1, 0, 0, -1; break;
    }
    return s;
}

inline Operator pauli(const HilbertSpace& space, std::size_t m, PauliAxis axis)
{
    if (space.mode(m).kind != ModeKind::qubit)
        throw std::invalid_argument("Pauli operator requested on non-qubit mode " + std::to_string(m));
    return embed(space, m, local_pauli(axis));
}

inline Operator pauli(const HilbertSpace& space, std::size_t m, char axis)
{
    return pauli(space, m, parse_pauli_axis(axis));
}

// Products of ladder operators assembled straight from basis-state actions,
// so Hamiltonians never pay for dense products of embedded operators.
struct Ladder {
    std::size_t mode;
    bool raise;
};

/// target += coeff * (ops[0] ops[1] ... ops[n-1]); the rightmost op acts first.
inline void accumulate_ladder_product(RMatrix& target, const HilbertSpace& space, double coeff,
                                      std::span<const Ladder> ops)
{
    for (const auto& op : ops)
        space.check_mode(op.mode);
    const Index dim = space.dim();
    for (Index col = 0; col < dim; ++col) {
        Index row = col;
        double amp = coeff;
        for (std::size_t k = ops.size(); k-- > 0;) {
            const auto& op = ops[k];
            const int occ = space.occupation(row, op.mode);
            if (op.raise) {
                if (occ + 1 >= space.levels(op.mode)) {
                    amp = 0.0;
                    break;
                }
                amp *= std::sqrt(static_cast<double>(occ + 1));
                row += space.stride(op.mode);
            } else {
                if (occ == 0) {
                    amp = 0.0;
                    break;
                }
                amp *= std::sqrt(static_cast<double>(occ));
                row -= space.stride(op.mode);
            }
        }
        if (amp != 0.0)
            target(row, col) += amp;
    }
}

inline void accumulate_ladder_product(RMatrix& target, const HilbertSpace& space, double coeff,
                                      std::initializer_list<Ladder> ops)
{
    const std::vector<Ladder> v(ops);
    accumulate_ladder_product(target, space, coeff, std::span<const Ladder>(v));
}

} // namespace qnphase

#endif // QNPHASE_HILBERT_HPP
