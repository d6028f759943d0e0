// Labeled two-level Hilbert spaces for the spin/OAM teleportation model.
//
// Every state and operator declares the ordered list of subsystems it lives
// on. Amplitudes are stored row-major over that list: the first subsystem is
// the most significant digit. Each subsystem also carries the basis its
// amplitudes are written in, so circular (|+l>, |-l>) and linear
// (|h_l>, |v_l>) OAM amplitudes can never be mixed up silently.
//
// Canonical ordering used throughout the project:
//   polA = (H, V)
//   OAM circular = (+l, -l)
//   OAM linear   = (h_l, v_l)
//   joint order  = (polA, oamA, oamB)
//
// The circular/linear relation is |+-l> = (|h_l> +- i|v_l>)/sqrt(2).

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace spinorbit {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Matrix2 = Eigen::Matrix2cd;

/// Tolerance for identities that hold exactly in real arithmetic.
inline constexpr double kExactTol = 1e-12;
/// Tolerance on the smallest eigenvalue of a density matrix.
inline constexpr double kEigenTol = 1e-10;

enum class Label { PolA, OamA, OamB };

enum class Basis {
    Polarization,  // (H, V)
    Circular,      // (+l, -l)
    Linear,        // (h_l, v_l)
};

enum class BasisDirection { CircularToLinear, LinearToCircular };

struct Subsystem {
    Label label;
    Basis basis;

    friend bool operator==(const Subsystem&, const Subsystem&) = default;
};

inline constexpr Subsystem kPolA{Label::PolA, Basis::Polarization};

constexpr Subsystem oam_a(Basis basis) { return {Label::OamA, basis}; }
constexpr Subsystem oam_b(Basis basis) { return {Label::OamB, basis}; }

std::string_view to_string(Label label);
std::string_view to_string(Basis basis);
/// Names of the two basis vectors, e.g. {"H", "V"} or {"+l", "-l"}.
std::array<std::string_view, 2> basis_names(Basis basis);

class LabelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class BasisError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws std::domain_error unless ell >= 1.
void require_valid_ell(int ell);

/// Unit-norm state vector over an ordered list of qubit-sized subsystems.
class Ket {
public:
    /// Throws LabelError on repeated labels, std::invalid_argument on a size
    /// mismatch or a norm that differs from 1 by more than kExactTol.
    Ket(std::vector<Subsystem> subsystems, Vector amplitudes, int ell);

    /// Same as the constructor but rescales the amplitudes to unit norm first.
    static Ket normalized(std::vector<Subsystem> subsystems, Vector amplitudes, int ell);

    /// The basis vector with the given digit (0 or 1) on a single subsystem.
    static Ket basis_state(Subsystem subsystem, int digit, int ell);

    const std::vector<Subsystem>& subsystems() const { return subsystems_; }
    const Vector& amplitudes() const { return amplitudes_; }
    int ell() const { return ell_; }
    std::size_t dimension() const { return static_cast<std::size_t>(amplitudes_.size()); }

    /// Amplitude at the basis vector given by one digit per subsystem.
    Complex amplitude(std::initializer_list<int> digits) const;

    /// Position of `label` in the subsystem list; throws LabelError if absent.
    std::size_t position(Label label) const;
    bool contains(Label label) const;
    const Subsystem& subsystem(Label label) const { return subsystems_[position(label)]; }

private:
    std::vector<Subsystem> subsystems_;
    Vector amplitudes_;
    int ell_;
};

enum class OperatorKind { Unitary, Projector, General };

/// Square matrix acting on an ordered list of subsystems.
class Operator {
public:
    /// Validates the dimension and, for unitary/projector kinds, the defining
    /// identity to within kExactTol.
    Operator(std::vector<Subsystem> subsystems, Matrix matrix, OperatorKind kind);

    static Operator identity(std::vector<Subsystem> subsystems);

    const std::vector<Subsystem>& subsystems() const { return subsystems_; }
    const Matrix& matrix() const { return matrix_; }
    OperatorKind kind() const { return kind_; }

    Operator adjoint() const;

private:
    std::vector<Subsystem> subsystems_;
    Matrix matrix_;
    OperatorKind kind_;
};

/// Hermitian, positive semidefinite, unit-trace 2x2 matrix on one subsystem.
class DensityMatrix {
public:
    DensityMatrix(Subsystem subsystem, Matrix2 matrix);

    static DensityMatrix pure(const Ket& ket);
    static DensityMatrix maximally_mixed(Subsystem subsystem);

    const Subsystem& subsystem() const { return subsystem_; }
    const Matrix2& matrix() const { return matrix_; }

    /// Ascending eigenvalues.
    Eigen::Vector2d eigenvalues() const;

private:
    Subsystem subsystem_;
    Matrix2 matrix_;
};

/// Kronecker product of two matrices, `a` on the most significant digits.
Matrix kron(const Matrix& a, const Matrix& b);

Ket tensor(const Ket& a, const Ket& b);
Operator tensor(const Operator& a, const Operator& b);

/// Applies `op` to the matching subsystems of `psi`, identity elsewhere.
/// The result is not renormalized.
Vector apply_raw(const Operator& op, const Ket& psi);
/// Applies `op` and returns the resulting ket. Non-unitary operators must
/// leave the state normalized, otherwise use apply_raw.
Ket apply(const Operator& op, const Ket& psi);

/// Reduced density matrix of the single subsystem `keep`.
DensityMatrix partial_trace(const Ket& psi, Label keep);

/// The fixed matrix whose columns are |+l> and |-l> written in (h_l, v_l).
Matrix2 circular_to_linear_matrix();

/// Re-expresses the amplitudes of one OAM subsystem in the other OAM basis.
/// Throws BasisError for the polarization subsystem or when the subsystem is
/// not currently in the source basis of `direction`.
Ket oam_basis_change(const Ket& psi, Label subsystem, BasisDirection direction);

/// Converts `psi` so that `label` is written in `target` (no-op if it already is).
Ket with_basis(const Ket& psi, Label label, Basis target);

/// <a|b>; both kets must share subsystem lists and ell.
Complex inner(const Ket& a, const Ket& b);

/// |<a|b>|^2.
double overlap(const Ket& a, const Ket& b);

struct Projection {
    double probability;
    /// Normalized post-measurement state of the untouched subsystems; empty
    /// when the probability vanishes.
    std::optional<Ket> conditional;
};

/// Projects the subsystems of `bra` out of `psi`: computes (<bra| x I)|psi>.
/// `bra` must cover a strict subset of psi's labels with matching bases.
Projection project(const Ket& bra, const Ket& psi);

}  // namespace spinorbit
