#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "spinorbit/optics.hpp"
#include "spinorbit/protocol.hpp"

namespace spinorbit::testing {

/// Bilinear sample of an image at physical coordinates (x, y).
inline double sample_bilinear(const optics::Image& img, double x, double y) {
    const auto& g = img.grid;
    const double p = g.pixel_pitch();
    const double fc = x / p + 0.5 * g.width - 0.5;
    const double fr = 0.5 * g.height - 0.5 - y / p;
    const int c0 = static_cast<int>(std::floor(fc));
    const int r0 = static_cast<int>(std::floor(fr));
    const double tc = fc - c0, tr = fr - r0;
    auto px = [&](int r, int c) {
        r = std::clamp(r, 0, g.height - 1);
        c = std::clamp(c, 0, g.width - 1);
        return img.at(r, c);
    };
    return (1 - tr) * ((1 - tc) * px(r0, c0) + tc * px(r0, c0 + 1)) +
           tr * ((1 - tc) * px(r0 + 1, c0) + tc * px(r0 + 1, c0 + 1));
}

/// Intensity sampled on a circle of radius r at `samples` equally spaced azimuths.
inline std::vector<double> azimuthal_profile(const optics::Image& img, double r, int samples) {
    std::vector<double> out(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / samples;
        out[static_cast<std::size_t>(k)] = sample_bilinear(img, r * std::cos(phi), r * std::sin(phi));
    }
    return out;
}

/// Number of contiguous arcs of the circular profile above half its maximum.
/// A profile that never drops below half maximum (a ring) has no lobes.
inline int count_lobes(const std::vector<double>& profile) {
    const double half = 0.5 * *std::max_element(profile.begin(), profile.end());
    const std::size_t n = profile.size();
    int lobes = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (profile[i] > half && profile[(i + n - 1) % n] <= half) ++lobes;
    }
    return lobes;
}

/// Normalized cross-correlation of two equal-length value sets.
inline double ncc(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

struct TeleportPanel {
    std::string input;
    /// Angular factor of the expected intensity.
    double (*angular)(double phi);
    bool superposition;
};

inline std::vector<TeleportPanel> teleport_panels() {
    using std::numbers::pi;
    return {
        {"L", [](double) { return 1.0; }, false},
        {"H", [](double phi) { return std::pow(std::cos(2 * phi), 2); }, true},
        {"A", [](double phi) { return std::pow(std::cos(2 * phi + pi / 4), 2); }, true},
        {"V", [](double phi) { return std::pow(std::sin(2 * phi), 2); }, true},
        {"D", [](double phi) { return std::pow(std::cos(2 * phi - pi / 4), 2); }, true},
    };
}

/// r^4 exp(-2 r^2) times the panel's angular factor at every pixel centre (l = 2, w = 1).
inline std::vector<double> panel_analytic(const TeleportPanel& panel, const optics::GridSpec& g) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(g.width) * g.height);
    for (int row = 0; row < g.height; ++row) {
        for (int col = 0; col < g.width; ++col) {
            const double x = g.x(col) / g.waist, y = g.y(row) / g.waist;
            const double r2 = x * x + y * y;
            out.push_back(r2 * r2 * std::exp(-2 * r2) * panel.angular(std::atan2(y, x)));
        }
    }
    return out;
}

inline optics::Image panel_render(const std::string& input, const optics::GridSpec& g) {
    const auto result = protocol::teleport(protocol::InputPolarization::named(input), 2, protocol::BellLabel::PhiPlus);
    return optics::intensity_image(result.b_state, g);
}

}  // namespace spinorbit::testing
