// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <string>

#include "optics_support.hpp"
#include "spinorbit/optics.hpp"
#include "spinorbit/protocol.hpp"
#include "spinorbit/tomography.hpp"
#include "test_support.hpp"
#include "tomography_support.hpp"

using namespace spinorbit;
using namespace spinorbit::protocol;
using namespace spinorbit::tomography;

namespace {

const double pi = std::numbers::pi;

struct Outcome {
    bool pass;
    std::string detail;
};

char buf[512];

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

InputPolarization random_pol(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> g(0.0, pi), d(0.0, 2.0 * pi);
    return InputPolarization(g(rng), d(rng));
}

Outcome teleport_identity() {
    std::mt19937_64 rng(20140101);
    double worst = 1.0;
    for (int t = 0; t < 200; ++t) {
        const InputPolarization p = random_pol(rng);
        for (int ell : {1, 2, 3}) {
            const Ket target = expected_b_state(p, ell);
            for (BellLabel l : kBellLabels) worst = std::min(worst, overlap(target, teleport(p, ell, l).b_state));
        }
    }
    return {worst >= 1.0 - 1e-12, fmt("min overlap 1 - %.3g over 200 inputs x 3 l x 4 outcomes", 1.0 - worst)};
}

Outcome bell_statistics() {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const InputPolarization p = random_pol(rng);
        for (int ell : {1, 2, 3}) {
            const Ket state = prepare_input(spdc_state(ell), p);
            for (auto mode : {MeasurementMode::Direct, MeasurementMode::Physical})
                for (const auto& o : bell_measurement(state, mode)) worst = std::max(worst, std::abs(o.probability - 0.25));
        }
    }
    return {worst <= 1e-12, fmt("max |p - 1/4| = %.3g over 200 inputs x 3 l, both modes", worst)};
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(3);
    double prob = 0.0, state = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Ket psi = testing::random_ket(rng, {kPolA, oam_a(Basis::Circular), oam_b(Basis::Circular)}, 1 + t % 3);
        const auto direct = bell_measurement(psi, MeasurementMode::Direct);
        const auto physical = bell_measurement(psi, MeasurementMode::Physical);
        for (std::size_t k = 0; k < 4; ++k) {
            prob = std::max(prob, std::abs(direct[k].probability - physical[k].probability));
            state = std::max(state, 1.0 - overlap(direct[k].conditional_b, physical[k].conditional_b));
        }
    }
    return {prob <= 1e-10 && state <= 1e-10,
            fmt("max |dp| = %.3g, max conditional infidelity = %.3g on 100 random states", prob, state)};
}

Outcome fidelity_table() {
    const auto rows = mub_input_rows();
    ReportOptions exact;
    exact.noiseless = true;
    exact.trials = 1;
    double exact_worst = 0.0;
    for (const auto& r : tomography_report(rows, exact)) exact_worst = std::max(exact_worst, std::abs(r.fidelity_mean - 1.0));

    ReportOptions noisy;
    noisy.shots = 10000;
    noisy.trials = 100;
    noisy.seed = 1;
    double min_row = 1.0, grand = 0.0;
    std::string per_row;
    for (const auto& r : tomography_report(rows, noisy)) {
        min_row = std::min(min_row, r.fidelity_mean);
        grand += r.fidelity_mean / static_cast<double>(rows.size());
        per_row += fmt(" %s=%.5f", r.input.label.c_str(), r.fidelity_mean);
    }
    return {exact_worst <= 1e-6 && min_row >= 0.984 && grand >= 0.99,
            fmt("noiseless |F-1| <= %.2g; N=1e4 x 100 trials: min row %.5f, grand mean %.5f;", exact_worst, min_row,
                grand) +
                per_row};
}

Outcome panels() {
    const optics::GridSpec grid;
    double worst_ncc = 1.0;
    bool lobes_ok = true;
    std::string lobes;
    for (const auto& panel : testing::teleport_panels()) {
        const optics::Image img = testing::panel_render(panel.input, grid);
        worst_ncc = std::min(worst_ncc, testing::ncc(img.values, testing::panel_analytic(panel, grid)));
        if (panel.superposition) {
            const int n = testing::count_lobes(testing::azimuthal_profile(img, 1.0, 1440));
            lobes_ok = lobes_ok && n == 4;
            lobes += fmt(" %s:%d", panel.input.c_str(), n);
        }
    }
    return {worst_ncc >= 0.999 && lobes_ok, fmt("min NCC %.6f on 256x256; lobes", worst_ncc) + lobes};
}

Outcome mle_validity() {
    std::mt19937_64 rng(6);
    double herm = 0, trace = 0, min_eig = 1;
    bool monotone = true;
    int runs = 0;
    for (int t = 0; t < 1000; ++t) {
        const Matrix2 truth = testing::random_density(rng);
        const std::uint64_t shots = t % 2 ? 100 : 10000;
        const Counts c = simulate_counts(DensityMatrix(oam_b(Basis::Linear), truth), shots, static_cast<std::uint64_t>(t));
        MleOptions opt;
        opt.record_history = true;
        const MleResult r = mle_reconstruct(c, opt);
        const Matrix2& m = r.rho.matrix();
        herm = std::max(herm, testing::max_abs(m - m.adjoint()));
        trace = std::max(trace, std::abs(m.trace() - Complex(1.0)));
        min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Matrix2>(m).eigenvalues().minCoeff());
        for (std::size_t i = 1; i < r.history.size(); ++i) monotone = monotone && r.history[i] >= r.history[i - 1];
        ++runs;
    }
    double consistency = 0;
    std::normal_distribution<double> g;
    for (int t = 0; t < 100; ++t) {
        std::array<double, 3> r{g(rng), g(rng), g(rng)};
        const double n = std::hypot(r[0], r[1], r[2]);
        for (double& x : r) x /= n;
        const DensityMatrix truth = from_bloch(r);
        consistency = std::max(consistency, trace_distance(mle_reconstruct(simulate_counts(truth, 10000, 0, true)).rho, truth));
    }
    const bool ok = herm <= 1e-12 && trace <= 1e-12 && min_eig >= -1e-10 && monotone && consistency <= 1e-6;
    return {ok, fmt("%d fits: |rho-rho^H| %.2g, |tr-1| %.2g, min eig %.2g, monotone %s; noiseless TD %.2g (100 pure)",
                    runs, herm, trace, min_eig, monotone ? "yes" : "no", consistency)};
}

Outcome fidelity_identities() {
    const Subsystem b = oam_b(Basis::Linear);
    std::mt19937_64 rng(8);
    double self = 0, ortho = 0, half = 0;
    for (int t = 0; t < 200; ++t) {
        const Ket psi = testing::random_ket(rng, {b});
        Vector perp(2);
        perp << -std::conj(psi.amplitudes()(1)), std::conj(psi.amplitudes()(0));
        const DensityMatrix p = DensityMatrix::pure(psi), q = DensityMatrix::pure(Ket({b}, perp, 2));
        const DensityMatrix mixed(b, testing::random_density(rng));
        self = std::max({self, std::abs(fidelity(p, p) - 1.0), std::abs(fidelity(mixed, mixed) - 1.0)});
        ortho = std::max(ortho, fidelity(p, q));
        half = std::max(half, std::abs(fidelity(p, DensityMatrix::maximally_mixed(b)) - 0.5));
    }
    return {self <= 1e-10 && ortho <= 1e-10 && half <= 1e-10,
            fmt("max |F(r,r)-1| %.2g, max F(orthogonal) %.2g, max |F(pure,I/2)-1/2| %.2g", self, ortho, half)};
}

Outcome hologram() {
    std::ifstream in(SPINORBIT_TEST_DATA_DIR "/hologram_l2_p16_sector_v_256.pgm", std::ios::binary);
    const std::vector<std::uint8_t> golden{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    const optics::HologramSpec spec{2, 16.0, optics::HologramTarget::SectorV};
    const auto first = optics::encode_pgm(optics::sector_hologram(spec, optics::GridSpec{}));
    const auto second = optics::encode_pgm(optics::sector_hologram(spec, optics::GridSpec{}));
    std::size_t diff = 0;
    for (std::size_t i = 0; i < std::min(first.size(), golden.size()); ++i) diff += first[i] != golden[i];
    const bool ok = !golden.empty() && first == golden && second == first;
    return {ok, fmt("%zu bytes, %zu differ from golden, repeat run identical: %s", first.size(), diff,
                    second == first ? "yes" : "no")};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "end-to-end teleportation identity", 1.0, teleport_identity},
        {2, "uniform Bell statistics", 1.0, bell_statistics},
        {3, "physical vs direct measurement oracle", 0.0, oracle_equivalence},
        {4, "tomography fidelity table", 60.0, fidelity_table},
        {5, "teleported intensity panels", 0.0, panels},
        {6, "MLE validity suite", 0.0, mle_validity},
        {7, "fidelity unit identities", 0.0, fidelity_identities},
        {8, "hologram bit-exactness", 0.0, hologram},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.limit_s <= 0.0 || secs < c.limit_s;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::string timing = fmt("%.3f s", secs);
        if (c.limit_s > 0.0) timing += fmt(" < %.0f s", c.limit_s);
        std::printf("[%s] %d %s: %s (%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), timing.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
