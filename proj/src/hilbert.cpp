#include "spinorbit/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spinorbit {

namespace {

std::size_t dimension_for(std::size_t n_subsystems) { return std::size_t{1} << n_subsystems; }

int digit_at(std::size_t index, std::size_t position, std::size_t n) {
    return static_cast<int>((index >> (n - 1 - position)) & 1U);
}

std::size_t set_digit(std::size_t index, std::size_t position, std::size_t n, int digit) {
    const std::size_t bit = std::size_t{1} << (n - 1 - position);
    return digit ? (index | bit) : (index & ~bit);
}

void require_disjoint(const std::vector<Subsystem>& subsystems) {
    for (std::size_t i = 0; i < subsystems.size(); ++i) {
        for (std::size_t j = i + 1; j < subsystems.size(); ++j) {
            if (subsystems[i].label == subsystems[j].label) {
                throw LabelError("subsystem label appears twice: " +
                                 std::string(to_string(subsystems[i].label)));
            }
        }
    }
}

void require_basis_fits(const Subsystem& s) {
    const bool is_pol = s.label == Label::PolA;
    if (is_pol != (s.basis == Basis::Polarization)) {
        throw BasisError("basis " + std::string(to_string(s.basis)) + " does not fit subsystem " +
                         std::string(to_string(s.label)));
    }
}

std::vector<Subsystem> concat(const std::vector<Subsystem>& a, const std::vector<Subsystem>& b) {
    std::vector<Subsystem> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// Positions of `sub`'s labels inside `full`, checking that the bases agree.
std::vector<std::size_t> positions_in(const std::vector<Subsystem>& sub, const Ket& full) {
    std::vector<std::size_t> pos;
    pos.reserve(sub.size());
    for (const auto& s : sub) {
        const std::size_t p = full.position(s.label);
        if (full.subsystems()[p].basis != s.basis) {
            throw BasisError("subsystem " + std::string(to_string(s.label)) + " is written in " +
                             std::string(to_string(full.subsystems()[p].basis)) + ", expected " +
                             std::string(to_string(s.basis)));
        }
        pos.push_back(p);
    }
    return pos;
}

}  // namespace

std::string_view to_string(Label label) {
    switch (label) {
        case Label::PolA: return "polA";
        case Label::OamA: return "oamA";
        case Label::OamB: return "oamB";
    }
    return "?";
}

std::string_view to_string(Basis basis) {
    switch (basis) {
        case Basis::Polarization: return "polarization";
        case Basis::Circular: return "circular";
        case Basis::Linear: return "linear";
    }
    return "?";
}

std::array<std::string_view, 2> basis_names(Basis basis) {
    switch (basis) {
        case Basis::Polarization: return {"H", "V"};
        case Basis::Circular: return {"+l", "-l"};
        case Basis::Linear: return {"h", "v"};
    }
    return {"?", "?"};
}

void require_valid_ell(int ell) {
    if (ell < 1) {
        throw std::domain_error("OAM index must be >= 1, got " + std::to_string(ell));
    }
}

// ---------------------------------------------------------------------------
// Ket

Ket::Ket(std::vector<Subsystem> subsystems, Vector amplitudes, int ell)
    : subsystems_(std::move(subsystems)), amplitudes_(std::move(amplitudes)), ell_(ell) {
    require_valid_ell(ell_);
    require_disjoint(subsystems_);
    for (const auto& s : subsystems_) require_basis_fits(s);
    if (subsystems_.empty()) throw std::invalid_argument("ket needs at least one subsystem");
    if (static_cast<std::size_t>(amplitudes_.size()) != dimension_for(subsystems_.size())) {
        throw std::invalid_argument("ket amplitude count does not match its subsystems");
    }
    const double norm = amplitudes_.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kExactTol) {
        throw std::invalid_argument("ket is not normalized (norm " + std::to_string(norm) + ")");
    }
}

Ket Ket::normalized(std::vector<Subsystem> subsystems, Vector amplitudes, int ell) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    }
    amplitudes /= norm;
    return Ket(std::move(subsystems), std::move(amplitudes), ell);
}

Ket Ket::basis_state(Subsystem subsystem, int digit, int ell) {
    if (digit != 0 && digit != 1) throw std::invalid_argument("basis digit must be 0 or 1");
    Vector v = Vector::Zero(2);
    v(digit) = 1.0;
    return Ket({subsystem}, std::move(v), ell);
}

Complex Ket::amplitude(std::initializer_list<int> digits) const {
    if (digits.size() != subsystems_.size()) {
        throw std::invalid_argument("one digit per subsystem expected");
    }
    std::size_t index = 0;
    for (int d : digits) {
        if (d != 0 && d != 1) throw std::invalid_argument("basis digit must be 0 or 1");
        index = (index << 1) | static_cast<std::size_t>(d);
    }
    return amplitudes_(static_cast<Eigen::Index>(index));
}

std::size_t Ket::position(Label label) const {
    for (std::size_t i = 0; i < subsystems_.size(); ++i) {
        if (subsystems_[i].label == label) return i;
    }
    throw LabelError("ket has no subsystem " + std::string(to_string(label)));
}

bool Ket::contains(Label label) const {
    return std::any_of(subsystems_.begin(), subsystems_.end(),
                       [&](const Subsystem& s) { return s.label == label; });
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(std::vector<Subsystem> subsystems, Matrix matrix, OperatorKind kind)
    : subsystems_(std::move(subsystems)), matrix_(std::move(matrix)), kind_(kind) {
    require_disjoint(subsystems_);
    for (const auto& s : subsystems_) require_basis_fits(s);
    const auto dim = static_cast<Eigen::Index>(dimension_for(subsystems_.size()));
    if (subsystems_.empty() || matrix_.rows() != dim || matrix_.cols() != dim) {
        throw std::invalid_argument("operator matrix does not match its subsystems");
    }
    const Matrix id = Matrix::Identity(dim, dim);
    switch (kind_) {
        case OperatorKind::Unitary:
            if ((matrix_.adjoint() * matrix_ - id).cwiseAbs().maxCoeff() > kExactTol) {
                throw std::invalid_argument("operator declared unitary is not");
            }
            break;
        case OperatorKind::Projector:
            if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kExactTol ||
                (matrix_ * matrix_ - matrix_).cwiseAbs().maxCoeff() > kExactTol) {
                throw std::invalid_argument("operator declared a projector is not");
            }
            break;
        case OperatorKind::General:
            break;
    }
}

Operator Operator::identity(std::vector<Subsystem> subsystems) {
    const auto dim = static_cast<Eigen::Index>(dimension_for(subsystems.size()));
    return Operator(std::move(subsystems), Matrix::Identity(dim, dim), OperatorKind::Unitary);
}

Operator Operator::adjoint() const { return Operator(subsystems_, matrix_.adjoint(), kind_); }

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(Subsystem subsystem, Matrix2 matrix)
    : subsystem_(subsystem), matrix_(std::move(matrix)) {
    require_basis_fits(subsystem_);
    if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kExactTol) {
        throw std::invalid_argument("density matrix is not Hermitian");
    }
    if (std::abs(matrix_.trace() - Complex(1.0)) > kExactTol) {
        throw std::invalid_argument("density matrix does not have unit trace");
    }
    if (eigenvalues()(0) < -kEigenTol) {
        throw std::invalid_argument("density matrix is not positive semidefinite");
    }
}

DensityMatrix DensityMatrix::pure(const Ket& ket) {
    if (ket.subsystems().size() != 1) {
        throw std::invalid_argument("pure density matrix needs a single-subsystem ket");
    }
    const Vector& a = ket.amplitudes();
    Matrix2 rho = a * a.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(ket.subsystems().front(), rho);
}

DensityMatrix DensityMatrix::maximally_mixed(Subsystem subsystem) {
    return DensityMatrix(subsystem, 0.5 * Matrix2::Identity());
}

Eigen::Vector2d DensityMatrix::eigenvalues() const {
    // Closed form for a 2x2 Hermitian matrix.
    const double a = matrix_(0, 0).real();
    const double d = matrix_(1, 1).real();
    const double mean = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), std::abs(matrix_(0, 1)));
    return {mean - radius, mean + radius};
}

// ---------------------------------------------------------------------------
// Free functions

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Ket tensor(const Ket& a, const Ket& b) {
    if (a.ell() != b.ell()) throw std::invalid_argument("cannot combine kets with different ell");
    auto subsystems = concat(a.subsystems(), b.subsystems());
    require_disjoint(subsystems);
    Vector amps = kron(a.amplitudes(), b.amplitudes());
    return Ket::normalized(std::move(subsystems), std::move(amps), a.ell());
}

Operator tensor(const Operator& a, const Operator& b) {
    auto subsystems = concat(a.subsystems(), b.subsystems());
    require_disjoint(subsystems);
    OperatorKind kind = OperatorKind::General;
    if (a.kind() == b.kind()) kind = a.kind();
    return Operator(std::move(subsystems), kron(a.matrix(), b.matrix()), kind);
}

Vector apply_raw(const Operator& op, const Ket& psi) {
    const auto pos = positions_in(op.subsystems(), psi);
    const std::size_t n = psi.subsystems().size();
    const std::size_t k = pos.size();
    const std::size_t dim = psi.dimension();
    const std::size_t op_dim = dimension_for(k);
    const Matrix& m = op.matrix();
    const Vector& in = psi.amplitudes();

    Vector out = Vector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        std::size_t row = 0;
        for (std::size_t q = 0; q < k; ++q) row = (row << 1) | digit_at(i, pos[q], n);
        Complex acc = 0.0;
        for (std::size_t col = 0; col < op_dim; ++col) {
            std::size_t j = i;
            for (std::size_t q = 0; q < k; ++q) {
                j = set_digit(j, pos[q], n, digit_at(col, q, k));
            }
            acc += m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) *
                   in(static_cast<Eigen::Index>(j));
        }
        out(static_cast<Eigen::Index>(i)) = acc;
    }
    return out;
}

Ket apply(const Operator& op, const Ket& psi) {
    return Ket(psi.subsystems(), apply_raw(op, psi), psi.ell());
}

DensityMatrix partial_trace(const Ket& psi, Label keep) {
    const std::size_t p = psi.position(keep);
    const std::size_t n = psi.subsystems().size();
    const Vector& a = psi.amplitudes();
    Matrix2 rho = Matrix2::Zero();
    for (std::size_t i = 0; i < psi.dimension(); ++i) {
        if (digit_at(i, p, n) != 0) continue;
        const std::size_t i1 = set_digit(i, p, n, 1);
        const Complex c0 = a(static_cast<Eigen::Index>(i));
        const Complex c1 = a(static_cast<Eigen::Index>(i1));
        rho(0, 0) += c0 * std::conj(c0);
        rho(0, 1) += c0 * std::conj(c1);
        rho(1, 1) += c1 * std::conj(c1);
    }
    rho(1, 0) = std::conj(rho(0, 1));
    rho(0, 0) = rho(0, 0).real();
    rho(1, 1) = rho(1, 1).real();
    return DensityMatrix(psi.subsystems()[p], rho);
}

Matrix2 circular_to_linear_matrix() {
    const double s = 1.0 / std::numbers::sqrt2;
    Matrix2 u;
    u << Complex(s, 0.0), Complex(s, 0.0),
         Complex(0.0, s), Complex(0.0, -s);
    return u;
}

Ket oam_basis_change(const Ket& psi, Label label, BasisDirection direction) {
    if (label == Label::PolA) throw BasisError("basis change applies to OAM subsystems only");
    const std::size_t p = psi.position(label);
    const Basis from = direction == BasisDirection::CircularToLinear ? Basis::Circular : Basis::Linear;
    const Basis to = direction == BasisDirection::CircularToLinear ? Basis::Linear : Basis::Circular;
    if (psi.subsystems()[p].basis != from) {
        throw BasisError("subsystem " + std::string(to_string(label)) + " is not in the " +
                         std::string(to_string(from)) + " basis");
    }
    const Matrix2 u = circular_to_linear_matrix();
    const Matrix m = direction == BasisDirection::CircularToLinear ? Matrix(u) : Matrix(u.adjoint());
    const Operator change({{label, from}}, m, OperatorKind::Unitary);
    auto subsystems = psi.subsystems();
    subsystems[p].basis = to;
    return Ket(std::move(subsystems), apply_raw(change, psi), psi.ell());
}

Ket with_basis(const Ket& psi, Label label, Basis target) {
    const Basis current = psi.subsystem(label).basis;
    if (current == target) return psi;
    const auto direction = target == Basis::Linear ? BasisDirection::CircularToLinear
                                                   : BasisDirection::LinearToCircular;
    return oam_basis_change(psi, label, direction);
}

Complex inner(const Ket& a, const Ket& b) {
    if (a.subsystems() != b.subsystems() || a.ell() != b.ell()) {
        throw LabelError("inner product needs kets on identical subsystems");
    }
    return a.amplitudes().dot(b.amplitudes());
}

double overlap(const Ket& a, const Ket& b) { return std::norm(inner(a, b)); }

Projection project(const Ket& bra, const Ket& psi) {
    if (bra.ell() != psi.ell()) throw std::invalid_argument("projection across different ell");
    const auto pos = positions_in(bra.subsystems(), psi);
    const std::size_t n = psi.subsystems().size();
    const std::size_t k = pos.size();
    if (k >= n) throw LabelError("projection must leave at least one subsystem untouched");

    std::vector<Subsystem> rest;
    std::vector<std::size_t> rest_pos;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::find(pos.begin(), pos.end(), i) == pos.end()) {
            rest.push_back(psi.subsystems()[i]);
            rest_pos.push_back(i);
        }
    }
    const std::size_t m = rest.size();
    Vector out = Vector::Zero(static_cast<Eigen::Index>(dimension_for(m)));
    const Vector& a = psi.amplitudes();
    const Vector& b = bra.amplitudes();
    for (std::size_t i = 0; i < psi.dimension(); ++i) {
        std::size_t bra_index = 0;
        for (std::size_t q = 0; q < k; ++q) bra_index = (bra_index << 1) | digit_at(i, pos[q], n);
        std::size_t rest_index = 0;
        for (std::size_t q = 0; q < m; ++q) rest_index = (rest_index << 1) | digit_at(i, rest_pos[q], n);
        out(static_cast<Eigen::Index>(rest_index)) +=
            std::conj(b(static_cast<Eigen::Index>(bra_index))) * a(static_cast<Eigen::Index>(i));
    }
    const double probability = out.squaredNorm();
    if (probability <= 1e-300) return {0.0, std::nullopt};
    return {probability, Ket::normalized(std::move(rest), std::move(out), psi.ell())};
}

}  // namespace spinorbit
