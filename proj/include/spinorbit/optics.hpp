// Transverse-mode optics for photon B: p = 0 Laguerre-Gauss fields, far-field
// intensity images, SLM sector holograms and Poincare-sphere coordinates.
//
// Grid geometry: pixel (0, 0) is top-left, columns run along +x and rows run
// downward. Physical coordinates are centred on the grid with square pixels of
// side 2 * extent * waist / width, and y increases upward, so the azimuth
// phi = atan2(y, x) in [0, 2 pi) is counter-clockwise on screen with phi = 0
// along +x.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "spinorbit/hilbert.hpp"

namespace spinorbit::optics {

struct GridSpec {
    int width = 256;
    int height = 256;
    /// Half-width of the frame in units of the waist.
    double extent = 3.0;
    double waist = 1.0;

    /// Throws std::invalid_argument unless width, height >= 2 and extent, waist > 0.
    void validate() const;
    double pixel_pitch() const { return 2.0 * extent * waist / width; }
    double pixel_area() const { return pixel_pitch() * pixel_pitch(); }
    /// Physical coordinates of a pixel centre.
    double x(int col) const { return (col + 0.5 - 0.5 * width) * pixel_pitch(); }
    double y(int row) const { return (0.5 * height - row - 0.5) * pixel_pitch(); }
};

/// Azimuth in [0, 2 pi), zero along +x.
double azimuth(double x, double y);

enum class ImageKind { Intensity, Phase };

struct Image {
    GridSpec grid;
    ImageKind kind;
    /// Row-major, height x width.
    std::vector<double> values;

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * grid.width + col]; }
    double& at(int row, int col) { return values[static_cast<std::size_t>(row) * grid.width + col]; }
    /// Sum of values times pixel area.
    double integral() const;
};

/// Field matrix, rows = height, cols = width.
using Field = Eigen::MatrixXcd;

/// Unnormalized p = 0 LG amplitude (r/w)^|l| exp(-r^2/w^2) exp(i l phi).
Complex lg_amplitude(int ell_signed, double x, double y, double waist);

/// LG field sampled on pixel centres inside the circular aperture inscribed in
/// the frame (zero outside) and scaled so sum |F|^2 * pixel area = 1.
/// Throws std::domain_error for ell_signed = 0.
Field lg_field(int ell_signed, const GridSpec& grid);

/// |c+ F+l + c- F-l|^2 for a one-qubit OAM ket (either OAM basis).
Image intensity_image(const Ket& b_state, const GridSpec& grid);

enum class HologramTarget { SectorV, SectorH, Blazed };

std::string_view to_string(HologramTarget target);
/// "sector-v", "sector-h", "blazed".
HologramTarget parse_hologram_target(std::string_view text);

struct HologramSpec {
    int ell = 1;
    /// Grating period in pixels, >= 2.
    double pitch = 8.0;
    HologramTarget target = HologramTarget::SectorV;

    void validate() const;
};

/// Mod(sgn(sin(l phi)) + 2 pi x / pitch, 2 pi) with x the column index.
/// SectorH uses cos(l phi); Blazed drops the sign term. sgn(0) = +1.
Image sector_hologram(const HologramSpec& spec, const GridSpec& grid);

/// Sign of sin(l phi) (or cos for `use_cos`) at a pixel centre, evaluated
/// exactly from integer half-pixel offsets when possible. Returns +1 or -1.
int sector_sign(int ell, int col, int row, const GridSpec& grid, bool use_cos);

struct PoincarePoint {
    double x;
    double y;
    double z;
};

/// Point on the OAM Poincare sphere. |+l> is the south pole (z = -1), |-l>
/// the north pole, and |h_l> sits at x = +1. With circular amplitudes
/// (c+, c-): x = 2 Re(c+ conj c-), y = 2 Im(c+ conj c-), z = |c-|^2 - |c+|^2.
PoincarePoint poincare_coords(const Ket& b_state);

/// Binary PGM (P5, maxval 255). Intensity images are scaled linearly by their
/// maximum; phase images map [0, 2 pi) onto 0..255 as floor(256 v / 2 pi),
/// with a 1e-9 level slack so exact multiples of the step are not rounded down
/// and level 256 wrapping to 0.
std::vector<std::uint8_t> encode_pgm(const Image& image);
void write_pgm(const std::filesystem::path& path, const Image& image);

/// Raw little-endian float64 dump of the values, row-major.
std::vector<std::uint8_t> encode_raw(const Image& image);
void write_raw(const std::filesystem::path& path, const Image& image);

}  // namespace spinorbit::optics
