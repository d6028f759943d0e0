#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "spinorbit/hilbert.hpp"

namespace spinorbit::testing {

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
    return v / v.norm();
}

inline Ket random_ket(std::mt19937_64& rng, std::vector<Subsystem> subsystems, int ell = 2) {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << subsystems.size());
    return Ket::normalized(std::move(subsystems), random_vector(rng, dim), ell);
}

/// Haar-ish unitary from the QR decomposition of a Gaussian matrix.
inline Matrix random_unitary(std::mt19937_64& rng, Eigen::Index dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(dim, dim);
}

/// Mixed qubit state from a random point inside the Bloch ball.
inline Matrix2 random_density(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double x, y, z;
    do {
        x = u(rng);
        y = u(rng);
        z = u(rng);
    } while (x * x + y * y + z * z > 1.0);
    Matrix2 m;
    m << Complex(1 + z, 0), Complex(x, -y), Complex(x, y), Complex(1 - z, 0);
    return 0.5 * m;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// |<a|b>|^2 for raw amplitude vectors.
inline double vec_overlap(const Vector& a, const Vector& b) { return std::norm(a.dot(b)); }

}  // namespace spinorbit::testing
