// Spin-to-OAM teleportation pipeline.
//
// Photon A carries polarization (polA) and OAM (oamA); photon B carries OAM
// (oamB). Photon B's polarization is always |H> and is not simulated.
//
// Polarization conventions:
//   D = (H + V)/sqrt2, A = (H - V)/sqrt2, L = (H + iV)/sqrt2, R = (H - iV)/sqrt2.
// With |+l> = (h + i v)/sqrt2 this sends L to |+l> and R to |-l>.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <utility>

#include "spinorbit/hilbert.hpp"

namespace spinorbit::protocol {

/// Polarization alpha|H> + beta|V> with alpha = sin(gamma/2) and
/// beta = cos(gamma/2) exp(i delta).
class InputPolarization {
public:
    /// Throws std::domain_error unless gamma is in [0, pi]. delta is wrapped
    /// into [0, 2 pi).
    InputPolarization(double gamma, double delta);

    double gamma() const { return gamma_; }
    double delta() const { return delta_; }
    Complex alpha() const;
    Complex beta() const;

    /// Named states: "H", "V", "D", "A", "L", "R" (case-insensitive).
    static InputPolarization named(std::string_view name);

private:
    double gamma_;
    double delta_;
};

enum class BellLabel { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline constexpr std::array<BellLabel, 4> kBellLabels{BellLabel::PhiPlus, BellLabel::PhiMinus,
                                                      BellLabel::PsiPlus, BellLabel::PsiMinus};

std::string_view to_string(BellLabel label);
/// Accepts "PhiPlus" and "phi-plus" spellings.
std::optional<BellLabel> parse_bell_label(std::string_view text);
/// Two-bit classical message A sends to B: Phi+ 00, Phi- 01, Psi+ 10, Psi- 11.
std::pair<int, int> classical_bits(BellLabel label);

struct BellOutcome {
    BellLabel label;
    double probability;
    /// Photon B's normalized state, oamB in the linear basis.
    Ket conditional_b;
};

struct DovePrismSetting {
    double theta;
    int ell;

    /// theta = pi / (8 ell).
    static DovePrismSetting canonical(int ell);
    bool is_canonical() const;
};

/// Post-selected |l| subspace of the down-converted pair, with photon A in |H>:
/// (|-l>_A|+l>_B + |+l>_A|-l>_B)/sqrt2 (x) |H>_A, on (polA, oamA, oamB), OAM in
/// the circular basis.
Ket spdc_state(int ell);

enum class WavePlate { Half, Quarter };

/// Jones matrix of a linear retarder with retardance phi and fast axis at
/// `angle` from H:
///   J = cos(phi/2) I + i sin(phi/2) [[cos 2a, sin 2a], [sin 2a, -cos 2a]].
/// Half wave: phi = pi, quarter wave: phi = pi/2.
Operator waveplate_jones(WavePlate kind, double angle);

/// Rotates photon A's polarization |H> -> alpha|H> + beta|V>. Throws
/// PreconditionError if `chi` already has weight on |V>_A.
Ket prepare_input(const Ket& chi, const InputPolarization& pol);

/// |Phi+-> = (|h,H> +- |v,V>)/sqrt2, |Psi+-> = (|v,H> +- |h,V>)/sqrt2 on
/// (polA, oamA) with oamA linear, in kBellLabels order.
std::array<Ket, 4> bell_states(int ell);
const Ket& bell_state(const std::array<Ket, 4>& states, BellLabel label);

/// Product state the interferometer sends each Bell state to:
/// Phi+ -> |v,A>, Phi- -> |v,D>, Psi+ -> |h,A>, Psi- -> |h,D>.
Ket dp_output_state(BellLabel label, int ell);

/// Unitary on (polA, oamA[linear]) realising the Bell-to-product map above,
/// built as sum_i |out_i><Bell_i| so every output carries phase zero. Requires
/// the canonical setting; throws PreconditionError otherwise.
Operator psi_dp_unitary(const DovePrismSetting& setting);

/// Dove prism rotated by theta acting on one OAM subsystem (circular basis):
/// |+l> -> e^{2 i l theta}|-l>, |-l> -> e^{-2 i l theta}|+l>.
Operator dove_prism(Label oam, double theta, int ell);

/// Polarizing Sagnac loop with a Dove prism: the H path sees the prism at
/// +theta, the V path at -theta. Acts on (polA, oamA[circular]).
Operator sagnac_dove(const DovePrismSetting& setting);

enum class MeasurementMode { Direct, Physical };

/// Complete single-photon Bell analysis of photon A. `state` must be a unit
/// 8-dimensional ket on polA, oamA and oamB (any OAM bases).
std::array<BellOutcome, 4> bell_measurement(const Ket& state, MeasurementMode mode);

/// B's correction in the (h, v) basis: Phi+ -> 1, Phi- -> sigma_z,
/// Psi+ -> sigma_x, Psi- -> i sigma_y.
Operator pauli_correction(BellLabel label);

/// 64-bit deterministic stream: mt19937_64 with doubles taken from the top 53
/// bits, so draws are identical on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform();
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finaliser of base + (stream + 1) * golden gamma. Independent
/// trials use derive_seed(seed, trial_index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Inverse-CDF draw over the four outcome probabilities.
BellLabel sample_outcome(const std::array<BellOutcome, 4>& outcomes, Rng& rng);

struct TeleportResult {
    InputPolarization input;
    /// Corrected state of photon B, oamB linear basis.
    Ket b_state;
    BellLabel outcome;
    double probability;
};

/// Full pipeline: spdc_state -> prepare_input -> bell_measurement ->
/// pauli_correction. When `outcome` is empty it is drawn with Rng(seed).
TeleportResult teleport(const InputPolarization& pol, int ell,
                        std::optional<BellLabel> outcome = std::nullopt, std::uint64_t seed = 0,
                        MeasurementMode mode = MeasurementMode::Physical);

/// alpha|h_l> + beta|v_l> on oamB (linear basis).
Ket expected_b_state(const InputPolarization& pol, int ell);

}  // namespace spinorbit::protocol
