#include "spinorbit/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "spinorbit/protocol.hpp"

namespace spinorbit::tomography {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
constexpr double kSpectrumRoundoff = 64.0 * std::numeric_limits<double>::epsilon();
const Subsystem kOamBLinear = oam_b(Basis::Linear);

using Vec3 = Eigen::Vector3d;

Ket linear_ket(int ell, Complex h, Complex v) {
    Vector amps(2);
    amps << h, v;
    return Ket({kOamBLinear}, std::move(amps), ell);
}

Matrix2 pauli(int axis) {
    Matrix2 m;
    switch (axis) {
        case 0: m << 0, 1, 1, 0; break;
        case 1: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

Matrix2 projector_matrix(Projector p) {
    const auto s = bloch_direction(p);
    Matrix2 m = Matrix2::Identity();
    for (int axis = 0; axis < 3; ++axis) m += s[axis] * pauli(axis);
    return 0.5 * m;
}

Vec3 direction(Projector p) {
    const auto s = bloch_direction(p);
    return {s[0], s[1], s[2]};
}

// Per-count frequencies; throws on invalid data.
std::array<double, 6> frequencies(std::span<const CountRecord> counts) {
    if (counts.size() != 6) throw std::invalid_argument("tomography expects six count records");
    std::array<double, 6> f{};
    double total = 0.0;
    for (const auto& c : counts) {
        if (!(c.count >= 0.0) || !std::isfinite(c.count)) throw std::invalid_argument("counts must be finite and >= 0");
        total += c.count;
    }
    if (!(total > 0.0)) throw std::invalid_argument("cannot reconstruct from all-zero counts");
    for (std::size_t i = 0; i < 6; ++i) f[i] = counts[i].count / total;
    return f;
}

double bloch_log_likelihood(const std::array<double, 6>& f, const std::array<Vec3, 6>& dirs, const Vec3& r) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
        if (f[i] <= 0.0) continue;
        const double p = 0.5 * (1.0 + dirs[i].dot(r));
        if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
        sum += f[i] * std::log(p);
    }
    return sum;
}

// Newton refinement over the Bloch ball. Each round proposes an interior
// Newton step (or its radial projection) and a Newton step along the sphere
// |r| = 1, and keeps whichever raises the likelihood most.
Vec3 refine_bloch(const std::array<double, 6>& f, const std::array<Vec3, 6>& dirs, Vec3 r, double& best) {
    for (int round = 0; round < 100; ++round) {
        Vec3 g = Vec3::Zero();
        Eigen::Matrix3d hess = Eigen::Matrix3d::Zero();
        for (std::size_t i = 0; i < 6; ++i) {
            if (f[i] <= 0.0) continue;
            const double q = 1.0 + dirs[i].dot(r);
            g += f[i] / q * dirs[i];
            hess -= f[i] / (q * q) * dirs[i] * dirs[i].transpose();
        }

        std::vector<Vec3> candidates;
        Eigen::FullPivLU<Eigen::Matrix3d> lu(hess);
        if (lu.isInvertible()) {
            const Vec3 interior = r - lu.solve(g);
            if (interior.allFinite()) {
                if (interior.norm() <= 1.0) {
                    candidates.push_back(interior);
                } else {
                    candidates.push_back(interior.normalized());
                }
            }
        }
        const double radius = r.norm();
        if (radius > 0.0) {
            const Vec3 u = r / radius;
            Vec3 e1 = u.cross(std::abs(u.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).normalized();
            Vec3 e2 = u.cross(e1);
            Eigen::Matrix<double, 3, 2> basis;
            basis << e1, e2;
            const Eigen::Vector2d gt = basis.transpose() * g;
            const Eigen::Matrix2d ht = basis.transpose() * hess * basis - u.dot(g) * Eigen::Matrix2d::Identity();
            Eigen::FullPivLU<Eigen::Matrix2d> lu2(ht);
            if (lu2.isInvertible()) {
                const Vec3 step = u + basis * lu2.solve(-gt);
                if (step.allFinite() && step.norm() > 0.0) candidates.push_back(step.normalized());
            }
        }

        double round_best = best;
        Vec3 round_r = r;
        for (const Vec3& c : candidates) {
            const double value = bloch_log_likelihood(f, dirs, c);
            if (value > round_best) {
                round_best = value;
                round_r = c;
            }
        }
        if (!(round_best > best)) break;
        best = round_best;
        r = round_r;
    }
    return r;
}

Matrix2 hermitian_unit_trace(Matrix2 m) {
    m = (0.5 * (m + m.adjoint())).eval();
    m(0, 0) = m(0, 0).real();
    m(1, 1) = m(1, 1).real();
    m /= m.trace().real();
    return m;
}

}  // namespace

std::string_view to_string(Projector p) {
    switch (p) {
        case Projector::H: return "h";
        case Projector::V: return "v";
        case Projector::D: return "d";
        case Projector::A: return "a";
        case Projector::L: return "l";
        case Projector::R: return "r";
    }
    return "?";
}

std::array<double, 3> bloch_direction(Projector p) {
    switch (p) {
        case Projector::H: return {0, 0, 1};
        case Projector::V: return {0, 0, -1};
        case Projector::D: return {1, 0, 0};
        case Projector::A: return {-1, 0, 0};
        case Projector::L: return {0, 1, 0};
        case Projector::R: return {0, -1, 0};
    }
    return {0, 0, 0};
}

ProjectorSet mub_projectors(int ell) {
    require_valid_ell(ell);
    const double s = kInvSqrt2;
    ProjectorSet set{ell,
                     {linear_ket(ell, 1, 0), linear_ket(ell, 0, 1), linear_ket(ell, s, s),
                      linear_ket(ell, s, -s), linear_ket(ell, s, Complex(0, s)), linear_ket(ell, s, Complex(0, -s))},
                     {}};
    for (std::size_t i = 0; i < 6; ++i) {
        const Vector& a = set.states[i].amplitudes();
        set.projectors[i] = a * a.adjoint();
    }
    return set;
}

// ---------------------------------------------------------------------------
// Counts

Counts simulate_counts(const DensityMatrix& rho, std::uint64_t shots, std::uint64_t seed, bool noiseless) {
    if (shots == 0) throw std::invalid_argument("shots per projector must be >= 1");
    std::mt19937_64 engine(seed);
    Counts counts{};
    for (std::size_t i = 0; i < 6; ++i) {
        const Projector p = kProjectors[i];
        const double prob = std::clamp((projector_matrix(p) * rho.matrix()).trace().real(), 0.0, 1.0);
        const double mean = static_cast<double>(shots) * prob;
        double count = mean;
        if (!noiseless) {
            count = 0.0;
            if (mean > 0.0) {
                std::poisson_distribution<long long> dist(mean);
                count = static_cast<double>(dist(engine));
            }
        }
        counts[i] = {p, shots, count, seed};
    }
    return counts;
}

Counts simulate_counts(const Ket& state, std::uint64_t shots, std::uint64_t seed, bool noiseless) {
    return simulate_counts(DensityMatrix::pure(state), shots, seed, noiseless);
}

// ---------------------------------------------------------------------------
// Maximum likelihood

double log_likelihood(std::span<const CountRecord> counts, const Matrix2& rho) {
    const auto f = frequencies(counts);
    double sum = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
        if (f[i] <= 0.0) continue;
        const double p = (projector_matrix(counts[i].projector) * rho).trace().real();
        if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
        sum += f[i] * std::log(p);
    }
    return sum;
}

MleResult mle_reconstruct(std::span<const CountRecord> counts, const MleOptions& options) {
    const auto f = frequencies(counts);
    std::array<Matrix2, 6> pis;
    std::array<Vec3, 6> dirs;
    for (std::size_t i = 0; i < 6; ++i) {
        pis[i] = projector_matrix(counts[i].projector);
        dirs[i] = direction(counts[i].projector);
    }
    const auto evaluate = [&](const Matrix2& rho) {
        double sum = 0.0;
        for (std::size_t i = 0; i < 6; ++i) {
            if (f[i] <= 0.0) continue;
            const double p = (pis[i] * rho).trace().real();
            if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
            sum += f[i] * std::log(p);
        }
        return sum;
    };

    Matrix2 rho = 0.5 * Matrix2::Identity();
    double current = evaluate(rho);
    std::vector<double> history;
    if (options.record_history) history.push_back(current);

    bool converged = false;
    int iterations = 0;
    const Matrix2 id = Matrix2::Identity();
    while (iterations < options.max_iterations) {
        Matrix2 r_op = Matrix2::Zero();
        for (std::size_t i = 0; i < 6; ++i) {
            if (f[i] <= 0.0) continue;
            r_op += (f[i] / (pis[i] * rho).trace().real()) * pis[i];
        }
        double eps = options.dilution;
        Matrix2 candidate;
        double value = -std::numeric_limits<double>::infinity();
        bool accepted = false;
        while (eps > 1e-12) {
            const Matrix2 step = (id + eps * r_op) / (1.0 + eps);
            candidate = hermitian_unit_trace(step * rho * step);
            value = evaluate(candidate);
            if (value >= current) {
                accepted = true;
                break;
            }
            eps *= 0.5;
        }
        ++iterations;
        if (!accepted) {
            // No ascent direction left at double precision.
            converged = true;
            break;
        }
        const double gain = value - current;
        rho = candidate;
        current = value;
        if (options.record_history) history.push_back(current);
        if (gain < options.tolerance) {
            converged = true;
            break;
        }
    }

    if (options.refine) {
        const DensityMatrix start(kOamBLinear, rho);
        const auto b = to_bloch(start);
        Vec3 r(b[0], b[1], b[2]);
        if (r.norm() > 1.0) r.normalize();
        double best = bloch_log_likelihood(f, dirs, r);
        const Vec3 refined = refine_bloch(f, dirs, r, best);
        if (best > current) {
            rho = from_bloch({refined.x(), refined.y(), refined.z()}).matrix();
            current = best;
            if (options.record_history) history.push_back(current);
        }
    }

    return {DensityMatrix(kOamBLinear, rho), iterations, converged, current, std::move(history)};
}

// ---------------------------------------------------------------------------
// Distances

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    // Eigenvalues within round-off of zero count as zero.
    auto root_spectrum = [](const Eigen::Vector2d& values) {
        const double floor = kSpectrumRoundoff * std::max(values.cwiseAbs().maxCoeff(), 1e-300);
        return values.unaryExpr([floor](double v) { return v <= floor ? 0.0 : std::sqrt(v); }).eval();
    };
    Eigen::SelfAdjointEigenSolver<Matrix2> eig(rho.matrix());
    const Eigen::Vector2d lambda = root_spectrum(eig.eigenvalues());
    const Matrix2 sqrt_rho = eig.eigenvectors() * lambda.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
    Matrix2 inner = sqrt_rho * sigma.matrix() * sqrt_rho;
    inner = (0.5 * (inner + inner.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix2> eig_inner(inner, Eigen::EigenvaluesOnly);
    const double root_trace = root_spectrum(eig_inner.eigenvalues()).sum();
    return std::clamp(root_trace * root_trace, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    const Matrix2 diff = rho.matrix() - sigma.matrix();
    // Eigenvalues of a traceless Hermitian 2x2 matrix are +-sqrt(a^2 + |b|^2).
    return std::hypot(0.5 * (diff(0, 0).real() - diff(1, 1).real()), std::abs(diff(0, 1)));
}

DensityMatrix from_bloch(const std::array<double, 3>& r) {
    const double norm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    if (norm > 1.0 + kExactTol) throw std::invalid_argument("Bloch vector longer than 1");
    const double scale = norm > 1.0 ? 1.0 / norm : 1.0;
    Matrix2 m = Matrix2::Identity();
    for (int axis = 0; axis < 3; ++axis) m += scale * r[static_cast<std::size_t>(axis)] * pauli(axis);
    return DensityMatrix(kOamBLinear, 0.5 * m);
}

std::array<double, 3> to_bloch(const DensityMatrix& rho) {
    const Matrix2& m = rho.matrix();
    return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), m(0, 0).real() - m(1, 1).real()};
}

// ---------------------------------------------------------------------------
// Reports

std::vector<InputRow> mub_input_rows() {
    std::vector<InputRow> rows;
    for (const char* name : {"L", "V", "D", "H", "A", "R"}) {
        const auto pol = protocol::InputPolarization::named(name);
        rows.push_back({name, pol.gamma(), pol.delta()});
    }
    return rows;
}

std::vector<TomographyReport> tomography_report(std::span<const InputRow> rows, const ReportOptions& options) {
    if (options.trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (options.shots < 1) throw std::invalid_argument("shots must be >= 1");
    require_valid_ell(options.ell);

    std::vector<TomographyReport> reports;
    reports.reserve(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const InputRow& row = rows[k];
        const protocol::InputPolarization pol(row.gamma, row.delta);
        const auto teleported = protocol::teleport(pol, options.ell, protocol::BellLabel::PhiPlus);
        const DensityMatrix truth = DensityMatrix::pure(teleported.b_state);

        std::vector<double> fids;
        fids.reserve(static_cast<std::size_t>(options.trials));
        std::optional<DensityMatrix> first_rho;
        Counts first_counts{};
        for (int t = 0; t < options.trials; ++t) {
            const std::uint64_t seed =
                protocol::derive_seed(options.seed, (static_cast<std::uint64_t>(k) << 32) + static_cast<std::uint64_t>(t));
            const Counts counts = simulate_counts(truth, options.shots, seed, options.noiseless);
            // A trial with no clicks carries no information; it reconstructs to I/2.
            DensityMatrix estimate = DensityMatrix::maximally_mixed(kOamBLinear);
            const bool any = std::any_of(counts.begin(), counts.end(), [](const CountRecord& c) { return c.count > 0; });
            if (any) estimate = mle_reconstruct(counts, options.mle).rho;
            fids.push_back(fidelity(truth, estimate));
            if (t == 0) {
                first_rho = estimate;
                first_counts = counts;
            }
        }
        double mean = 0.0;
        for (double v : fids) mean += v;
        mean /= static_cast<double>(fids.size());
        double var = 0.0;
        for (double v : fids) var += (v - mean) * (v - mean);
        const double std_dev = fids.size() > 1 ? std::sqrt(var / static_cast<double>(fids.size() - 1)) : 0.0;

        reports.push_back({row, teleported.b_state, *first_rho, mean, std_dev, options.trials, options.shots,
                           first_counts});
    }
    return reports;
}

void write_counts_csv(std::ostream& out, std::span<const TomographyReport> reports) {
    out << "label,projector,shots,count\n";
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::setprecision(17);
    for (const auto& report : reports) {
        for (const auto& c : report.first_counts) {
            out << report.input.label << ',' << to_string(c.projector) << ',' << c.shots << ',' << c.count << '\n';
        }
    }
    out.flags(flags);
    out.precision(precision);
}

void write_report_csv(std::ostream& out, std::span<const TomographyReport> reports) {
    out << "label,gamma,delta,F_mean,F_std,trials,N\n";
    const auto flags = out.flags();
    const auto precision = out.precision();
    for (const auto& r : reports) {
        out << r.input.label << ',' << std::defaultfloat << std::setprecision(12) << r.input.gamma << ','
            << r.input.delta << ',' << std::fixed << std::setprecision(6) << r.fidelity_mean << ','
            << r.fidelity_std << ',' << r.trials << ',' << r.shots << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

nlohmann::json density_matrix_json(const DensityMatrix& rho) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 2; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < 2; ++j) row.push_back({rho.matrix()(i, j).real(), rho.matrix()(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

DensityMatrix density_matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("density matrix JSON must be a 2x2 array");
    Matrix2 m;
    for (int r = 0; r < 2; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (!row.is_array() || row.size() != 2) throw std::invalid_argument("density matrix JSON must be a 2x2 array");
        for (int c = 0; c < 2; ++c) {
            const auto& entry = row.at(static_cast<std::size_t>(c));
            m(r, c) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
        }
    }
    return DensityMatrix(kOamBLinear, m);
}

}  // namespace spinorbit::tomography
