// SPDX-License-Identifier: Apache-2.0
//
// Sensor-node energy model: supercapacitor storage with leakage,
// mode-dependent loads (constant-resistance plus constant-current),
// continuous-time evolution within a frame, and the discrete per-frame
// update used by the controller.

#pragma once

#include <array>
#include <utility>
#include <vector>

namespace wpsn {

enum class Mode { idle = 0, act = 1, rx = 2, tx = 3 };
inline constexpr std::array<Mode, 4> kAllModes{Mode::idle, Mode::act, Mode::rx, Mode::tx};

struct ModeLoad {
    double resistance_ohm = 1.0e5;  // constant-resistance load
    double current_a = 0.0;         // constant-current load
    double duration_s = 0.0;        // time in this mode during an awake frame
};

struct ModeLoads {
    std::array<ModeLoad, 4> by_mode{};

    ModeLoad& operator[](Mode m) { return by_mode[static_cast<int>(m)]; }
    const ModeLoad& operator[](Mode m) const { return by_mode[static_cast<int>(m)]; }
};

struct SupercapParams {
    double capacitance_f = 0.1;
    double leak_resistance_ohm = 1.0e6;
    double e_max_j = 0.18;
    double e_min_j = 0.02;  // below this the node blacks out

    void validate() const;
};

struct FrameTiming {
    double t_frame_s = 1.0;
    double t_es_s = 0.85;  // energy-transfer slot, tail of the frame
    int training_slots = 8;
    double training_slot_s = 0.01;

    void validate() const;
};

struct EnergyParams {
    SupercapParams cap;
    ModeLoads loads;
    FrameTiming timing;
    double eta = 0.3;                  // RF-to-DC harvesting efficiency
    double revive_threshold_j = 0.02;  // blacked-out node recovers at this level

    void validate() const;
    static EnergyParams defaults();
};

struct NodeEnergyState {
    double stored_j = 0.0;
    bool alive = true;
};

// Load power at stored energy E: 2E/(C*R_mode) + sqrt(2/C)*I_mode*sqrt(E),
// i.e. V^2/R + I*V at the supercapacitor voltage V = sqrt(2E/C).
double consumed_power(Mode mode, double e_j, const ModeLoads& loads, const SupercapParams& cap);

double leakage_power(double e_j, const SupercapParams& cap);

double harvested_power(double receive_w, double eta);

struct FrameEnergies {
    double delta_plus_j = 0.0;   // harvested during one frame
    double delta_minus_j = 0.0;  // consumed during one frame (leakage included)
};

// Frame totals with the load powers frozen at the frame-start energy.
// Sleep frames spend the whole frame idle; awake frames follow the mode
// durations. Leakage is folded into the always-consumed part.
FrameEnergies frame_energies(int activity, double e_j, double receive_w,
                             const EnergyParams& params);

struct KappaVarphi {
    double kappa_j = 0.0;   // extra energy to spend a frame awake
    double varphi_j = 0.0;  // energy consumed even when asleep
};

// Decomposition delta_minus(a, E) = kappa(E)*a + varphi(E).
KappaVarphi kappa_varphi(double e_j, const EnergyParams& params);

// E' = clamp(E + delta_plus - delta_minus, [0, e_max]); the alive flag
// clears below e_min and returns once stored energy reaches the revive
// threshold.
NodeEnergyState frame_update(const NodeEnergyState& state, double receive_w, int activity,
                             const EnergyParams& params);

// eta*T_es*r - kappa(E)*sigma - varphi(E): mean stored-energy change per
// frame when the node wakes with probability sigma.
double expected_variation(double receive_w, double sigma, double e_j,
                          const EnergyParams& params);

using ModeSchedule = std::vector<std::pair<Mode, double>>;

// Fixed-step RK4 over the frame's mode schedule. Harvesting is active
// only during the energy-transfer slot (the last t_es_s of the frame);
// stored energy is clamped to [0, e_max] throughout.
double integrate_frame(double e0_j, double receive_w, const ModeSchedule& schedule,
                       const EnergyParams& params, double dt_s = 1e-3);

}  // namespace wpsn
