#include "spinorbit/optics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spinorbit::optics {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Keeps exact multiples of the grey-level step from rounding down.
constexpr double kLevelSlack = 1e-9;

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

double wrap_phase(double v) {
    double m = std::fmod(v, kTwoPi);
    if (m < 0.0) m += kTwoPi;
    if (m >= kTwoPi) m = 0.0;
    return m;
}

}  // namespace

void GridSpec::validate() const {
    if (width < 2 || height < 2) throw std::invalid_argument("grid must be at least 2x2 pixels");
    if (!(extent > 0.0) || !std::isfinite(extent)) throw std::invalid_argument("grid extent must be > 0");
    if (!(waist > 0.0) || !std::isfinite(waist)) throw std::invalid_argument("beam waist must be > 0");
}

double azimuth(double x, double y) {
    double phi = std::atan2(y, x);
    if (phi < 0.0) phi += kTwoPi;
    if (phi >= kTwoPi) phi = 0.0;
    return phi;
}

double Image::integral() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * grid.pixel_area();
}

// ---------------------------------------------------------------------------
// Laguerre-Gauss modes

Complex lg_amplitude(int ell_signed, double x, double y, double waist) {
    const double r = std::hypot(x, y) / waist;
    const double radial = std::pow(r, std::abs(ell_signed)) * std::exp(-r * r);
    return std::polar(radial, ell_signed * azimuth(x, y));
}

Field lg_field(int ell_signed, const GridSpec& grid) {
    if (ell_signed == 0) throw std::domain_error("LG field needs |l| >= 1");
    grid.validate();
    // Circular aperture inscribed in the frame, tested exactly in half-pixel units.
    const long long aperture = std::min(grid.width, grid.height);
    Field field = Field::Zero(grid.height, grid.width);
    for (int row = 0; row < grid.height; ++row) {
        const long long v = static_cast<long long>(grid.height) - 1 - 2LL * row;
        for (int col = 0; col < grid.width; ++col) {
            const long long u = 2LL * col + 1 - grid.width;
            if (u * u + v * v > aperture * aperture) continue;
            field(row, col) = lg_amplitude(ell_signed, grid.x(col), grid.y(row), grid.waist);
        }
    }
    const double power = field.squaredNorm() * grid.pixel_area();
    field /= std::sqrt(power);
    return field;
}

Image intensity_image(const Ket& b_state, const GridSpec& grid) {
    if (b_state.subsystems().size() != 1 || b_state.subsystems().front().label == Label::PolA) {
        throw std::invalid_argument("intensity image needs a single OAM subsystem ket");
    }
    const Label label = b_state.subsystems().front().label;
    const Ket circular = with_basis(b_state, label, Basis::Circular);
    const Complex c_plus = circular.amplitudes()(0);
    const Complex c_minus = circular.amplitudes()(1);

    const Field plus = lg_field(b_state.ell(), grid);
    const Field minus = lg_field(-b_state.ell(), grid);

    Image image{grid, ImageKind::Intensity, std::vector<double>(static_cast<std::size_t>(grid.width) * grid.height)};
    for (int row = 0; row < grid.height; ++row) {
        for (int col = 0; col < grid.width; ++col) {
            image.at(row, col) = std::norm(c_plus * plus(row, col) + c_minus * minus(row, col));
        }
    }
    return image;
}

// ---------------------------------------------------------------------------
// Holograms

std::string_view to_string(HologramTarget target) {
    switch (target) {
        case HologramTarget::SectorV: return "sector-v";
        case HologramTarget::SectorH: return "sector-h";
        case HologramTarget::Blazed: return "blazed";
    }
    return "?";
}

HologramTarget parse_hologram_target(std::string_view text) {
    if (text == "sector-v" || text == "sector_v") return HologramTarget::SectorV;
    if (text == "sector-h" || text == "sector_h") return HologramTarget::SectorH;
    if (text == "blazed") return HologramTarget::Blazed;
    throw std::invalid_argument("unknown hologram target: " + std::string(text));
}

void HologramSpec::validate() const {
    require_valid_ell(ell);
    if (!(pitch >= 2.0) || !std::isfinite(pitch)) throw std::invalid_argument("grating pitch must be >= 2 pixels");
}

int sector_sign(int ell, int col, int row, const GridSpec& grid, bool use_cos) {
    // Offsets of the pixel centre from the grid centre in half-pixel units.
    const long long u = 2LL * col + 1 - grid.width;
    const long long v = static_cast<long long>(grid.height) - 1 - 2LL * row;
    const double bits_needed = ell * std::log2(static_cast<double>(std::llabs(u) + std::llabs(v)) + 1.0);
    if (bits_needed < 120.0) {
        // Exact (u + iv)^ell in 128-bit integers.
        __int128 re = 1;
        __int128 im = 0;
        for (int k = 0; k < ell; ++k) {
            const __int128 next_re = re * u - im * v;
            const __int128 next_im = re * v + im * u;
            re = next_re;
            im = next_im;
        }
        const __int128 component = use_cos ? re : im;
        return component >= 0 ? 1 : -1;
    }
    const double phi = azimuth(grid.x(col), grid.y(row));
    const double value = use_cos ? std::cos(ell * phi) : std::sin(ell * phi);
    return value >= 0.0 ? 1 : -1;
}

Image sector_hologram(const HologramSpec& spec, const GridSpec& grid) {
    spec.validate();
    grid.validate();
    Image image{grid, ImageKind::Phase, std::vector<double>(static_cast<std::size_t>(grid.width) * grid.height)};
    for (int row = 0; row < grid.height; ++row) {
        for (int col = 0; col < grid.width; ++col) {
            double sector = 0.0;
            if (spec.target != HologramTarget::Blazed) {
                sector = sector_sign(spec.ell, col, row, grid, spec.target == HologramTarget::SectorH);
            }
            image.at(row, col) = wrap_phase(sector + kTwoPi * col / spec.pitch);
        }
    }
    return image;
}

// ---------------------------------------------------------------------------
// Poincare sphere

PoincarePoint poincare_coords(const Ket& b_state) {
    if (b_state.subsystems().size() != 1 || b_state.subsystems().front().label == Label::PolA) {
        throw std::invalid_argument("Poincare coordinates need a single OAM subsystem ket");
    }
    const Ket circular = with_basis(b_state, b_state.subsystems().front().label, Basis::Circular);
    const Complex c_plus = circular.amplitudes()(0);
    const Complex c_minus = circular.amplitudes()(1);
    const Complex cross = c_plus * std::conj(c_minus);
    return {2.0 * cross.real(), 2.0 * cross.imag(), std::norm(c_minus) - std::norm(c_plus)};
}

// ---------------------------------------------------------------------------
// Writers

std::vector<std::uint8_t> encode_pgm(const Image& image) {
    const std::string header =
        "P5\n" + std::to_string(image.grid.width) + " " + std::to_string(image.grid.height) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.reserve(bytes.size() + image.values.size());

    if (image.kind == ImageKind::Intensity) {
        const double peak = *std::max_element(image.values.begin(), image.values.end());
        for (double v : image.values) {
            const double scaled = peak > 0.0 ? std::round(255.0 * v / peak) : 0.0;
            bytes.push_back(static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0)));
        }
    } else {
        for (double v : image.values) {
            const double level = std::fmod(std::floor(v * (256.0 / kTwoPi) + kLevelSlack), 256.0);
            bytes.push_back(static_cast<std::uint8_t>(std::clamp(level, 0.0, 255.0)));
        }
    }
    return bytes;
}

void write_pgm(const std::filesystem::path& path, const Image& image) { write_bytes(path, encode_pgm(image)); }

std::vector<std::uint8_t> encode_raw(const Image& image) {
    std::vector<std::uint8_t> bytes(image.values.size() * sizeof(double));
    for (std::size_t i = 0; i < image.values.size(); ++i) {
        std::uint64_t word = std::bit_cast<std::uint64_t>(image.values[i]);
        for (std::size_t b = 0; b < 8; ++b) {
            bytes[i * 8 + b] = static_cast<std::uint8_t>(word >> (8 * b));
        }
    }
    return bytes;
}

void write_raw(const std::filesystem::path& path, const Image& image) { write_bytes(path, encode_raw(image)); }

}  // namespace spinorbit::optics
