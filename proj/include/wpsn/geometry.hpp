// SPDX-License-Identifier: Apache-2.0
//
// Antenna-array layouts, the array factor, and the deterministic
// line-of-sight channel matrix between a multi-antenna power beacon and
// single-antenna sensor nodes.

#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace wpsn {

class RngStream;

inline constexpr double kPi = 3.141592653589793238462643;
inline constexpr double kSpeedOfLightMps = 299792458.0;

// K x N complex gains, one row per node, one column per beacon antenna.
// Entries carry sqrt(W)-per-unit-weight units so that |h^T w|^2 is watts
// when |w_n|^2 is the transmit power of antenna n.
using ChannelMatrix = Eigen::MatrixXcd;

// Complex per-antenna transmit weights; |w_n|^2 is the antenna-n power.
using BeamWeights = Eigen::VectorXcd;

enum class ArrayKind { linear, circular };

struct SphericalPosition {
    double radius_m = 0.0;
    double elevation_rad = kPi / 2.0;
    double azimuth_rad = 0.0;
};

struct AntennaLayout {
    ArrayKind kind = ArrayKind::linear;
    double element_spacing_m = 0.0;  // linear arrays
    double ring_radius_m = 0.0;      // circular arrays
    std::vector<SphericalPosition> positions;

    int size() const { return static_cast<int>(positions.size()); }
};

// Linear arrays are laid out symmetrically about the origin along the
// azimuth-0/azimuth-pi axis; circular arrays place element n at azimuth
// 2*pi*n/N on a ring. All elements sit in the horizontal plane.
AntennaLayout build_layout(ArrayKind kind, int n_antennas, double spacing_or_radius_m);

struct NodePlacement {
    double radius_m = 1.0;
    double azimuth_rad = 0.0;
    double elevation_rad = kPi / 2.0;
};

struct RadioConstants {
    double wavelength_m = kSpeedOfLightMps / 920.0e6;
    double tx_element_gain = 1.0;  // linear gain, isotropic unless a table is set
    double rx_gain = 1.0;

    // Optional azimuthal element pattern as (azimuth_rad, linear_gain)
    // samples, interpolated periodically over 2*pi. Empty means isotropic.
    std::vector<std::pair<double, double>> tx_gain_table;

    double tx_gain_toward(double elevation_rad, double azimuth_rad) const;
    void validate() const;
};

// Sum of w_n * exp(j*(2*pi/wavelength) * <antenna position, unit direction>).
std::complex<double> array_factor(const AntennaLayout& layout, const BeamWeights& weights,
                                  double elevation_rad, double azimuth_rad,
                                  double wavelength_m);

// Friis amplitude per node times the per-antenna steering phasor:
//   h_{k,n} = wavelength/(4*pi*d_k) * sqrt(g_t*g_r) * exp(j*phase_{k,n}).
ChannelMatrix channel_matrix(const AntennaLayout& layout,
                             const std::vector<NodePlacement>& placements,
                             const RadioConstants& radio);

// Multiplicative complex-Gaussian perturbation h * (1 + CN(0, sigma^2)),
// a stand-in for imperfect channel knowledge at the beacon.
ChannelMatrix perturb_channel(const ChannelMatrix& channel, double sigma_rel, RngStream& rng);

}  // namespace wpsn
