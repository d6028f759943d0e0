// Projective tomography of photon B's OAM qubit.
//
// The six measurement states are the Pauli eigenstates in the (h_l, v_l)
// basis: h, v (z axis), d, a (x axis), l = |+l>, r = |-l> (y axis). Counts
// are simulated as independent Poisson variables and inverted by maximum
// likelihood.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "spinorbit/hilbert.hpp"

namespace spinorbit::tomography {

enum class Projector { H, V, D, A, L, R };

inline constexpr std::array<Projector, 6> kProjectors{Projector::H, Projector::V, Projector::D,
                                                      Projector::A, Projector::L, Projector::R};

/// "h", "v", "d", "a", "l", "r".
std::string_view to_string(Projector p);

/// Unit Bloch direction s_p with Pi_p = (I + s_p . sigma) / 2.
std::array<double, 3> bloch_direction(Projector p);

struct ProjectorSet {
    int ell;
    /// Kets in kProjectors order, oamB linear basis.
    std::array<Ket, 6> states;
    std::array<Matrix2, 6> projectors;

    const Matrix2& operator[](Projector p) const { return projectors[static_cast<std::size_t>(p)]; }
    /// The three complementary pairs (h, v), (d, a), (l, r).
    static constexpr std::array<std::array<Projector, 2>, 3> kBases{
        {{Projector::H, Projector::V}, {Projector::D, Projector::A}, {Projector::L, Projector::R}}};
};

ProjectorSet mub_projectors(int ell);

struct CountRecord {
    Projector projector;
    std::uint64_t shots;
    /// Sampled count, or the exact expectation N Tr(Pi rho) in noiseless mode.
    double count;
    std::uint64_t seed;
};

using Counts = std::array<CountRecord, 6>;

/// count_i ~ Poisson(shots * Tr(Pi_i rho)), one mt19937_64 stream seeded with
/// `seed`, projectors drawn in kProjectors order. With `noiseless` the exact
/// expectations are returned instead. Throws for shots == 0.
Counts simulate_counts(const DensityMatrix& rho, std::uint64_t shots, std::uint64_t seed,
                       bool noiseless = false);
Counts simulate_counts(const Ket& state, std::uint64_t shots, std::uint64_t seed, bool noiseless = false);

struct MleOptions {
    /// Step weight epsilon in rho <- (I + eps R) rho (I + eps R) / norm.
    double dilution = 0.5;
    /// Stop when the per-count log-likelihood gains less than this.
    double tolerance = 1e-12;
    int max_iterations = 100000;
    /// Finish with Newton steps in Bloch coordinates (interior or on the
    /// pure-state sphere), each accepted only if the likelihood rises.
    bool refine = true;
    /// Keep the log-likelihood of every accepted iterate.
    bool record_history = false;
};

struct MleResult {
    DensityMatrix rho;
    int iterations;
    bool converged;
    /// Per-count log-likelihood sum_i f_i log Tr(Pi_i rho), f_i = n_i / sum n.
    double log_likelihood;
    std::vector<double> history;
};

/// Per-count log-likelihood of `rho` for the given data.
double log_likelihood(std::span<const CountRecord> counts, const Matrix2& rho);

/// Maximum-likelihood density matrix in the (h, v) basis of oamB. Throws
/// std::invalid_argument when every count is zero or a count is negative.
MleResult mle_reconstruct(std::span<const CountRecord> counts, const MleOptions& options = {});

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Half the trace norm of rho - sigma.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Density matrix (I + r . sigma) / 2 on oamB[linear]; |r| must be <= 1.
DensityMatrix from_bloch(const std::array<double, 3>& r);
std::array<double, 3> to_bloch(const DensityMatrix& rho);

struct InputRow {
    std::string label;
    double gamma;
    double delta;
};

/// The six Pauli-eigenstate inputs in the order L, V, D, H, A, R.
std::vector<InputRow> mub_input_rows();

struct ReportOptions {
    int ell = 2;
    std::uint64_t shots = 10000;
    int trials = 100;
    std::uint64_t seed = 1;
    bool noiseless = false;
    MleOptions mle{};
};

struct TomographyReport {
    InputRow input;
    /// Teleported state after the Phi+ outcome.
    Ket true_state;
    /// Reconstruction from the first trial.
    DensityMatrix reconstructed;
    double fidelity_mean;
    double fidelity_std;
    int trials;
    std::uint64_t shots;
    /// Counts of the first trial.
    Counts first_counts;
};

/// Trial t of row k draws counts with seed derive_seed(seed, k * 2^32 + t).
/// fidelity_std is the sample standard deviation (0 for a single trial).
std::vector<TomographyReport> tomography_report(std::span<const InputRow> rows, const ReportOptions& options);

/// CSV header `label,projector,shots,count`.
void write_counts_csv(std::ostream& out, std::span<const TomographyReport> reports);
/// CSV header `label,gamma,delta,F_mean,F_std,trials,N`.
void write_report_csv(std::ostream& out, std::span<const TomographyReport> reports);
/// 2x2 nested arrays of [re, im] pairs, row-major in (h, v).
nlohmann::json density_matrix_json(const DensityMatrix& rho);
DensityMatrix density_matrix_from_json(const nlohmann::json& j);

}  // namespace spinorbit::tomography
