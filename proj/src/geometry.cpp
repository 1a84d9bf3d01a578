// SPDX-License-Identifier: Apache-2.0

#include "wpsn/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "wpsn/errors.hpp"
#include "wpsn/rng.hpp"

namespace wpsn {

namespace {

// <antenna position, unit direction> for spherical coordinates; reduces
// to d * sin(theta) * cos(phi - phi_ant) for horizontal-plane elements.
double position_projection(const SphericalPosition& ant, double elevation_rad,
                           double azimuth_rad) {
    return ant.radius_m * (std::sin(ant.elevation_rad) * std::sin(elevation_rad) *
                               std::cos(azimuth_rad - ant.azimuth_rad) +
                           std::cos(ant.elevation_rad) * std::cos(elevation_rad));
}

}  // namespace

AntennaLayout build_layout(ArrayKind kind, int n_antennas, double spacing_or_radius_m) {
    if (n_antennas < 1) {
        throw std::invalid_argument("build_layout: antenna count must be at least 1, got " +
                                    std::to_string(n_antennas));
    }
    if (!(spacing_or_radius_m > 0.0)) {
        throw std::invalid_argument("build_layout: spacing/radius must be positive, got " +
                                    std::to_string(spacing_or_radius_m));
    }

    AntennaLayout layout;
    layout.kind = kind;
    layout.positions.resize(static_cast<std::size_t>(n_antennas));

    const double n_d = static_cast<double>(n_antennas);
    for (int n = 1; n <= n_antennas; ++n) {
        SphericalPosition& pos = layout.positions[static_cast<std::size_t>(n - 1)];
        pos.elevation_rad = kPi / 2.0;
        if (kind == ArrayKind::linear) {
            // Elements along one axis, half on each side of the origin.
            if (n < (n_d + 1.0) / 2.0) {
                pos.radius_m = ((n_d - 1.0) / 2.0 - (n - 1)) * spacing_or_radius_m;
                pos.azimuth_rad = kPi;
            } else {
                pos.radius_m = ((n - 1) - (n_d - 1.0) / 2.0) * spacing_or_radius_m;
                pos.azimuth_rad = 0.0;
            }
        } else {
            pos.radius_m = spacing_or_radius_m;
            pos.azimuth_rad = 2.0 * kPi * static_cast<double>(n) / n_d;
        }
    }
    if (kind == ArrayKind::linear) {
        layout.element_spacing_m = spacing_or_radius_m;
    } else {
        layout.ring_radius_m = spacing_or_radius_m;
    }
    return layout;
}

double RadioConstants::tx_gain_toward(double /*elevation_rad*/, double azimuth_rad) const {
    if (tx_gain_table.empty()) return tx_element_gain;

    // Periodic linear interpolation over azimuth.
    const double two_pi = 2.0 * kPi;
    double az = std::fmod(azimuth_rad, two_pi);
    if (az < 0.0) az += two_pi;

    const std::size_t n = tx_gain_table.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& [a0, g0] = tx_gain_table[i];
        const auto& [a1raw, g1] = tx_gain_table[(i + 1) % n];
        double a1 = a1raw;
        if (i + 1 == n) a1 += two_pi;  // wrap segment
        double x = az;
        if (x < a0) x += two_pi;
        if (x >= a0 && x <= a1 && a1 > a0) {
            const double t = (x - a0) / (a1 - a0);
            return g0 + t * (g1 - g0);
        }
    }
    return tx_gain_table.front().second;
}

void RadioConstants::validate() const {
    if (!(wavelength_m > 0.0)) {
        throw std::invalid_argument("radio: wavelength_m must be positive");
    }
    if (!(tx_element_gain > 0.0) || !(rx_gain > 0.0)) {
        throw std::invalid_argument("radio: antenna gains must be positive");
    }
    for (const auto& [az, gain] : tx_gain_table) {
        (void)az;
        if (!(gain > 0.0)) {
            throw std::invalid_argument("radio: tx_gain_table gains must be positive");
        }
    }
}

std::complex<double> array_factor(const AntennaLayout& layout, const BeamWeights& weights,
                                  double elevation_rad, double azimuth_rad,
                                  double wavelength_m) {
    if (weights.size() != layout.size()) {
        throw std::invalid_argument("array_factor: " + std::to_string(weights.size()) +
                                    " weights for " + std::to_string(layout.size()) +
                                    " antennas");
    }
    if (!(wavelength_m > 0.0)) {
        throw std::invalid_argument("array_factor: wavelength must be positive");
    }
    const double wavenumber = 2.0 * kPi / wavelength_m;
    std::complex<double> sum{0.0, 0.0};
    for (int n = 0; n < layout.size(); ++n) {
        const double phase =
            wavenumber * position_projection(layout.positions[static_cast<std::size_t>(n)],
                                             elevation_rad, azimuth_rad);
        sum += weights[n] * std::polar(1.0, phase);
    }
    return sum;
}

ChannelMatrix channel_matrix(const AntennaLayout& layout,
                             const std::vector<NodePlacement>& placements,
                             const RadioConstants& radio) {
    if (placements.empty()) {
        throw std::invalid_argument("channel_matrix: no node placements given");
    }
    radio.validate();

    const int k_nodes = static_cast<int>(placements.size());
    const int n_ant = layout.size();
    const double wavenumber = 2.0 * kPi / radio.wavelength_m;

    ChannelMatrix gains(k_nodes, n_ant);
    for (int k = 0; k < k_nodes; ++k) {
        const NodePlacement& node = placements[static_cast<std::size_t>(k)];
        if (!(node.radius_m > 0.0)) {
            throw DegenerateGeometryError("channel_matrix: node " + std::to_string(k + 1) +
                                          " sits at the array reference point");
        }
        const double amplitude =
            radio.wavelength_m / (4.0 * kPi * node.radius_m) *
            std::sqrt(radio.tx_gain_toward(node.elevation_rad, node.azimuth_rad) *
                      radio.rx_gain);
        for (int n = 0; n < n_ant; ++n) {
            const double phase =
                wavenumber * position_projection(layout.positions[static_cast<std::size_t>(n)],
                                                 node.elevation_rad, node.azimuth_rad);
            gains(k, n) = std::polar(amplitude, phase);
        }
    }
    return gains;
}

ChannelMatrix perturb_channel(const ChannelMatrix& channel, double sigma_rel, RngStream& rng) {
    if (sigma_rel < 0.0) {
        throw std::invalid_argument("perturb_channel: sigma must be nonnegative");
    }
    if (sigma_rel == 0.0) return channel;
    const double scale = sigma_rel / std::sqrt(2.0);
    ChannelMatrix out = channel;
    for (Eigen::Index k = 0; k < out.rows(); ++k) {
        for (Eigen::Index n = 0; n < out.cols(); ++n) {
            const std::complex<double> noise{scale * rng.normal01(), scale * rng.normal01()};
            out(k, n) *= (1.0 + noise);
        }
    }
    return out;
}

}  // namespace wpsn
