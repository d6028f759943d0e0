#include "spinorbit/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace spinorbit::protocol {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

const Subsystem kOamALinear = oam_a(Basis::Linear);
const Subsystem kOamACircular = oam_a(Basis::Circular);
const Subsystem kOamBLinear = oam_b(Basis::Linear);

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Two-qubit ket on (polA, oamA[linear]) from amplitudes in
// (H h, H v, V h, V v) order.
Ket pol_oam_ket(int ell, Complex hh, Complex hv, Complex vh, Complex vv) {
    Vector amps(4);
    amps << hh, hv, vh, vv;
    return Ket({kPolA, kOamALinear}, std::move(amps), ell);
}

}  // namespace

// ---------------------------------------------------------------------------
// InputPolarization

InputPolarization::InputPolarization(double gamma, double delta) : gamma_(gamma) {
    if (!std::isfinite(gamma) || gamma < 0.0 || gamma > kPi) {
        throw std::domain_error("gamma must lie in [0, pi]");
    }
    if (!std::isfinite(delta)) throw std::domain_error("delta must be finite");
    delta_ = std::fmod(delta, 2.0 * kPi);
    if (delta_ < 0.0) delta_ += 2.0 * kPi;
    if (delta_ >= 2.0 * kPi) delta_ = 0.0;
}

Complex InputPolarization::alpha() const { return std::sin(0.5 * gamma_); }

Complex InputPolarization::beta() const { return std::cos(0.5 * gamma_) * std::polar(1.0, delta_); }

InputPolarization InputPolarization::named(std::string_view name) {
    const std::string key = lowercase(name);
    if (key == "h") return {kPi, 0.0};
    if (key == "v") return {0.0, 0.0};
    if (key == "d") return {kPi / 2, 0.0};
    if (key == "a") return {kPi / 2, kPi};
    if (key == "l") return {kPi / 2, kPi / 2};
    if (key == "r") return {kPi / 2, 3 * kPi / 2};
    throw std::invalid_argument("unknown polarization name: " + std::string(name));
}

// ---------------------------------------------------------------------------
// Bell labels

std::string_view to_string(BellLabel label) {
    switch (label) {
        case BellLabel::PhiPlus: return "PhiPlus";
        case BellLabel::PhiMinus: return "PhiMinus";
        case BellLabel::PsiPlus: return "PsiPlus";
        case BellLabel::PsiMinus: return "PsiMinus";
    }
    return "?";
}

std::optional<BellLabel> parse_bell_label(std::string_view text) {
    std::string key = lowercase(text);
    std::erase(key, '-');
    std::erase(key, '_');
    if (key == "phiplus") return BellLabel::PhiPlus;
    if (key == "phiminus") return BellLabel::PhiMinus;
    if (key == "psiplus") return BellLabel::PsiPlus;
    if (key == "psiminus") return BellLabel::PsiMinus;
    return std::nullopt;
}

std::pair<int, int> classical_bits(BellLabel label) {
    switch (label) {
        case BellLabel::PhiPlus: return {0, 0};
        case BellLabel::PhiMinus: return {0, 1};
        case BellLabel::PsiPlus: return {1, 0};
        case BellLabel::PsiMinus: return {1, 1};
    }
    return {0, 0};
}

// ---------------------------------------------------------------------------
// Dove prism

DovePrismSetting DovePrismSetting::canonical(int ell) {
    require_valid_ell(ell);
    return {kPi / (8.0 * ell), ell};
}

bool DovePrismSetting::is_canonical() const {
    return ell >= 1 && std::abs(theta - kPi / (8.0 * ell)) <= 1e-14;
}

Operator dove_prism(Label oam, double theta, int ell) {
    require_valid_ell(ell);
    if (oam == Label::PolA) throw BasisError("Dove prism acts on an OAM subsystem");
    const double phase = 2.0 * ell * theta;
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = std::polar(1.0, phase);   // |+l> -> e^{2il theta}|-l>
    m(0, 1) = std::polar(1.0, -phase);  // |-l> -> e^{-2il theta}|+l>
    return Operator({{oam, Basis::Circular}}, std::move(m), OperatorKind::Unitary);
}

Operator sagnac_dove(const DovePrismSetting& setting) {
    const Matrix forward = dove_prism(Label::OamA, setting.theta, setting.ell).matrix();
    const Matrix backward = dove_prism(Label::OamA, -setting.theta, setting.ell).matrix();
    Matrix h_path = Matrix::Zero(2, 2);
    h_path(0, 0) = 1.0;
    Matrix v_path = Matrix::Zero(2, 2);
    v_path(1, 1) = 1.0;
    return Operator({kPolA, kOamACircular}, kron(h_path, forward) + kron(v_path, backward),
                    OperatorKind::Unitary);
}

// ---------------------------------------------------------------------------
// States and operators

Ket spdc_state(int ell) {
    require_valid_ell(ell);
    // Order (polA, oamA, oamB); circular digit 0 = +l, 1 = -l.
    Vector amps = Vector::Zero(8);
    amps(0b001) = kInvSqrt2;  // H, +l, -l
    amps(0b010) = kInvSqrt2;  // H, -l, +l
    return Ket({kPolA, kOamACircular, oam_b(Basis::Circular)}, std::move(amps), ell);
}

Operator waveplate_jones(WavePlate kind, double angle) {
    const double retardance = kind == WavePlate::Half ? kPi : kPi / 2;
    const double c = std::cos(0.5 * retardance);
    const double s = std::sin(0.5 * retardance);
    const double c2 = std::cos(2.0 * angle);
    const double s2 = std::sin(2.0 * angle);
    const Complex is(0.0, s);
    Matrix m(2, 2);
    m << c + is * c2, is * s2,
         is * s2, c - is * c2;
    return Operator({kPolA}, std::move(m), OperatorKind::Unitary);
}

Ket prepare_input(const Ket& chi, const InputPolarization& pol) {
    const std::size_t p = chi.position(Label::PolA);
    const std::size_t n = chi.subsystems().size();
    double v_weight = 0.0;
    for (std::size_t i = 0; i < chi.dimension(); ++i) {
        if ((i >> (n - 1 - p)) & 1U) v_weight += std::norm(chi.amplitudes()(static_cast<Eigen::Index>(i)));
    }
    if (v_weight > kExactTol) {
        throw PreconditionError("input preparation expects photon A in |H>");
    }
    // SU(2) rotation whose first column is (alpha, beta).
    const Complex a = pol.alpha();
    const Complex b = pol.beta();
    Matrix m(2, 2);
    m << a, -std::conj(b),
         b, std::conj(a);
    return apply(Operator({kPolA}, std::move(m), OperatorKind::Unitary), chi);
}

std::array<Ket, 4> bell_states(int ell) {
    require_valid_ell(ell);
    const double s = kInvSqrt2;
    return {
        pol_oam_ket(ell, s, 0, 0, s),    // Phi+ = (|h,H> + |v,V>)/sqrt2
        pol_oam_ket(ell, s, 0, 0, -s),   // Phi-
        pol_oam_ket(ell, 0, s, s, 0),    // Psi+ = (|v,H> + |h,V>)/sqrt2
        pol_oam_ket(ell, 0, s, -s, 0),   // Psi-
    };
}

const Ket& bell_state(const std::array<Ket, 4>& states, BellLabel label) {
    return states[static_cast<std::size_t>(label)];
}

Ket dp_output_state(BellLabel label, int ell) {
    require_valid_ell(ell);
    const double s = kInvSqrt2;
    // (polA, oamA) with A = (H - V)/sqrt2, D = (H + V)/sqrt2.
    switch (label) {
        case BellLabel::PhiPlus: return pol_oam_ket(ell, 0, s, 0, -s);   // |v, A>
        case BellLabel::PhiMinus: return pol_oam_ket(ell, 0, s, 0, s);   // |v, D>
        case BellLabel::PsiPlus: return pol_oam_ket(ell, s, 0, -s, 0);   // |h, A>
        case BellLabel::PsiMinus: return pol_oam_ket(ell, s, 0, s, 0);   // |h, D>
    }
    throw std::logic_error("unreachable");
}

Operator psi_dp_unitary(const DovePrismSetting& setting) {
    require_valid_ell(setting.ell);
    if (!setting.is_canonical()) {
        throw PreconditionError("Bell sorting requires theta = pi/(8 l)");
    }
    const auto bells = bell_states(setting.ell);
    Matrix u = Matrix::Zero(4, 4);
    for (BellLabel label : kBellLabels) {
        u += dp_output_state(label, setting.ell).amplitudes() *
             bell_state(bells, label).amplitudes().adjoint();
    }
    return Operator({kPolA, kOamALinear}, std::move(u), OperatorKind::Unitary);
}

std::array<BellOutcome, 4> bell_measurement(const Ket& state, MeasurementMode mode) {
    if (state.dimension() != 8 || !state.contains(Label::PolA) || !state.contains(Label::OamA) ||
        !state.contains(Label::OamB)) {
        throw std::invalid_argument("Bell measurement expects a state on polA, oamA and oamB");
    }
    if (std::abs(state.amplitudes().norm() - 1.0) > kExactTol) {
        throw std::invalid_argument("Bell measurement expects a normalized state");
    }
    Ket linear = with_basis(with_basis(state, Label::OamA, Basis::Linear), Label::OamB, Basis::Linear);
    const int ell = linear.ell();

    std::array<Ket, 4> bras = bell_states(ell);
    if (mode == MeasurementMode::Physical) {
        // Sort in the interferometer, then detect the product states it emits.
        const Operator sorter = psi_dp_unitary(DovePrismSetting::canonical(ell));
        linear = apply(sorter, linear);
        for (BellLabel label : kBellLabels) {
            bras[static_cast<std::size_t>(label)] = dp_output_state(label, ell);
        }
    }

    std::array<std::optional<BellOutcome>, 4> slots;
    for (BellLabel label : kBellLabels) {
        auto branch = project(bras[static_cast<std::size_t>(label)], linear);
        if (!branch.conditional) {
            throw PreconditionError("Bell outcome " + std::string(to_string(label)) +
                                    " has zero probability; conditional state undefined");
        }
        slots[static_cast<std::size_t>(label)] =
            BellOutcome{label, branch.probability, with_basis(*branch.conditional, Label::OamB, Basis::Linear)};
    }
    return {*slots[0], *slots[1], *slots[2], *slots[3]};
}

Operator pauli_correction(BellLabel label) {
    Matrix m(2, 2);
    switch (label) {
        case BellLabel::PhiPlus: m << 1, 0, 0, 1; break;
        case BellLabel::PhiMinus: m << 1, 0, 0, -1; break;
        case BellLabel::PsiPlus: m << 0, 1, 1, 0; break;
        case BellLabel::PsiMinus: m << 0, 1, -1, 0; break;  // i sigma_y
    }
    return Operator({kOamBLinear}, std::move(m), OperatorKind::Unitary);
}

// ---------------------------------------------------------------------------
// Sampling

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

BellLabel sample_outcome(const std::array<BellOutcome, 4>& outcomes, Rng& rng) {
    const double u = rng.uniform();
    double cumulative = 0.0;
    for (const auto& outcome : outcomes) {
        cumulative += outcome.probability;
        if (u < cumulative) return outcome.label;
    }
    return outcomes.back().label;
}

// ---------------------------------------------------------------------------
// Pipeline

Ket expected_b_state(const InputPolarization& pol, int ell) {
    Vector amps(2);
    amps << pol.alpha(), pol.beta();
    return Ket({kOamBLinear}, std::move(amps), ell);
}

TeleportResult teleport(const InputPolarization& pol, int ell, std::optional<BellLabel> outcome,
                        std::uint64_t seed, MeasurementMode mode) {
    const Ket prepared = prepare_input(spdc_state(ell), pol);
    const auto outcomes = bell_measurement(prepared, mode);
    BellLabel label;
    if (outcome) {
        label = *outcome;
    } else {
        Rng rng(seed);
        label = sample_outcome(outcomes, rng);
    }
    const BellOutcome& chosen = outcomes[static_cast<std::size_t>(label)];
    Ket corrected = apply(pauli_correction(label), chosen.conditional_b);
    return {pol, std::move(corrected), label, chosen.probability};
}

}  // namespace spinorbit::protocol
