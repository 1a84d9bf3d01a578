// SPDX-License-Identifier: Apache-2.0

#include "wpsn/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wpsn {

void SupercapParams::validate() const {
    if (!(capacitance_f > 0.0)) {
        throw std::invalid_argument("supercap: capacitance_f must be positive");
    }
    if (!(leak_resistance_ohm > 0.0)) {
        throw std::invalid_argument("supercap: leak_resistance_ohm must be positive");
    }
    if (!(e_min_j >= 0.0) || !(e_min_j < e_max_j)) {
        throw std::invalid_argument("supercap: need 0 <= e_min_j < e_max_j");
    }
}

void FrameTiming::validate() const {
    if (!(t_frame_s > 0.0) || !(t_es_s > 0.0)) {
        throw std::invalid_argument("timing: frame and energy-slot lengths must be positive");
    }
    if (t_es_s > t_frame_s) {
        throw std::invalid_argument("timing: t_es_s cannot exceed t_frame_s");
    }
    if (training_slots < 0 || !(training_slot_s >= 0.0)) {
        throw std::invalid_argument("timing: training slot count/length must be nonnegative");
    }
    if (static_cast<double>(training_slots) * training_slot_s > t_frame_s - t_es_s + 1e-12) {
        throw std::invalid_argument("timing: training slots do not fit before the energy slot");
    }
}

void EnergyParams::validate() const {
    cap.validate();
    timing.validate();
    if (!(eta > 0.0) || eta > 1.0) {
        throw std::invalid_argument("energy: eta must lie in (0, 1]");
    }
    if (!(revive_threshold_j >= cap.e_min_j)) {
        throw std::invalid_argument("energy: revive threshold below e_min_j");
    }
    double awake_total = 0.0;
    for (Mode m : kAllModes) {
        const ModeLoad& load = loads[m];
        if (!(load.resistance_ohm > 0.0)) {
            throw std::invalid_argument("energy: mode resistances must be positive");
        }
        if (load.current_a < 0.0) {
            throw std::invalid_argument("energy: mode currents must be nonnegative");
        }
        if (load.duration_s < 0.0) {
            throw std::invalid_argument("energy: mode durations must be nonnegative");
        }
        awake_total += load.duration_s;
    }
    if (std::abs(awake_total - timing.t_frame_s) > 1e-9) {
        throw std::invalid_argument("energy: awake mode durations must sum to t_frame_s");
    }
}

EnergyParams EnergyParams::defaults() {
    EnergyParams p;
    p.cap = SupercapParams{};  // 0.1 F, 1 MOhm leak, 0.18 J max, 0.02 J min
    p.timing = FrameTiming{};  // 1 s frame, 0.85 s energy slot
    p.eta = 0.3;
    p.revive_threshold_j = p.cap.e_min_j;

    // All modes share the quiescent resistive path. Activity costs come
    // from the constant-current draws of the radio and MCU, calibrated so
    // an awake frame costs about 2.77e-4 J more than a sleep frame at
    // mid-range storage.
    for (Mode m : kAllModes) p.loads[m].resistance_ohm = 1.0e5;
    p.loads[Mode::idle].current_a = 2.0e-6;
    p.loads[Mode::rx].current_a = 3.0e-3;
    p.loads[Mode::act].current_a = 1.72e-3;
    p.loads[Mode::tx].current_a = 5.0e-3;

    p.loads[Mode::rx].duration_s = 0.02;
    p.loads[Mode::act].duration_s = 0.05;
    p.loads[Mode::tx].duration_s = 0.01;
    p.loads[Mode::idle].duration_s = p.timing.t_frame_s - 0.08;
    return p;
}

double consumed_power(Mode mode, double e_j, const ModeLoads& loads, const SupercapParams& cap) {
    if (e_j < 0.0) {
        throw std::invalid_argument("consumed_power: negative stored energy");
    }
    const ModeLoad& load = loads[mode];
    return 2.0 * e_j / (cap.capacitance_f * load.resistance_ohm) +
           std::sqrt(2.0 / cap.capacitance_f) * load.current_a * std::sqrt(e_j);
}

double leakage_power(double e_j, const SupercapParams& cap) {
    if (e_j < 0.0) {
        throw std::invalid_argument("leakage_power: negative stored energy");
    }
    return 2.0 * e_j / (cap.capacitance_f * cap.leak_resistance_ohm);
}

double harvested_power(double receive_w, double eta) {
    if (!(eta > 0.0) || eta > 1.0) {
        throw std::invalid_argument("harvested_power: eta must lie in (0, 1]");
    }
    if (receive_w < 0.0) {
        throw std::invalid_argument("harvested_power: negative receive power");
    }
    return eta * receive_w;
}

KappaVarphi kappa_varphi(double e_j, const EnergyParams& params) {
    const double t_frame = params.timing.t_frame_s;
    const double leak_j = leakage_power(e_j, params.cap) * t_frame;
    const double sleep_j = consumed_power(Mode::idle, e_j, params.loads, params.cap) * t_frame;
    double awake_j = 0.0;
    for (Mode m : kAllModes) {
        awake_j += consumed_power(m, e_j, params.loads, params.cap) * params.loads[m].duration_s;
    }
    // Leakage belongs to the always-consumed part; it cancels out of the
    // activation cost.
    return KappaVarphi{awake_j - sleep_j, sleep_j + leak_j};
}

FrameEnergies frame_energies(int activity, double e_j, double receive_w,
                             const EnergyParams& params) {
    if (activity != 0 && activity != 1) {
        throw std::invalid_argument("frame_energies: activity must be 0 or 1");
    }
    const KappaVarphi kv = kappa_varphi(e_j, params);
    FrameEnergies out;
    out.delta_plus_j = harvested_power(receive_w, params.eta) * params.timing.t_es_s;
    out.delta_minus_j = kv.varphi_j + kv.kappa_j * activity;
    return out;
}

NodeEnergyState frame_update(const NodeEnergyState& state, double receive_w, int activity,
                             const EnergyParams& params) {
    const FrameEnergies fe = frame_energies(activity, state.stored_j, receive_w, params);
    double e_next = state.stored_j + fe.delta_plus_j - fe.delta_minus_j;
    e_next = std::clamp(e_next, 0.0, params.cap.e_max_j);

    NodeEnergyState next;
    next.stored_j = e_next;
    if (state.alive) {
        next.alive = e_next >= params.cap.e_min_j;
    } else {
        next.alive = e_next >= params.revive_threshold_j;
    }
    return next;
}

double expected_variation(double receive_w, double sigma, double e_j,
                          const EnergyParams& params) {
    if (sigma < 0.0 || sigma > 1.0) {
        throw std::invalid_argument("expected_variation: sigma must lie in [0, 1]");
    }
    const KappaVarphi kv = kappa_varphi(e_j, params);
    return harvested_power(receive_w, params.eta) * params.timing.t_es_s - kv.kappa_j * sigma -
           kv.varphi_j;
}

namespace {

double net_power(double e_j, Mode mode, double inflow_w, const EnergyParams& params) {
    const double e = std::max(e_j, 0.0);
    return inflow_w - consumed_power(mode, e, params.loads, params.cap) -
           leakage_power(e, params.cap);
}

// RK4 over one interval with constant mode and inflow.
double integrate_segment(double e, Mode mode, double inflow_w, double duration_s, double dt_s,
                         const EnergyParams& params) {
    if (duration_s <= 0.0) return e;
    const long steps = std::max(1L, static_cast<long>(std::ceil(duration_s / dt_s)));
    const double h = duration_s / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) {
        const double k1 = net_power(e, mode, inflow_w, params);
        const double k2 = net_power(e + 0.5 * h * k1, mode, inflow_w, params);
        const double k3 = net_power(e + 0.5 * h * k2, mode, inflow_w, params);
        const double k4 = net_power(e + h * k3, mode, inflow_w, params);
        e += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        e = std::clamp(e, 0.0, params.cap.e_max_j);
    }
    return e;
}

}  // namespace

double integrate_frame(double e0_j, double receive_w, const ModeSchedule& schedule,
                       const EnergyParams& params, double dt_s) {
    if (!(dt_s > 0.0)) {
        throw std::invalid_argument("integrate_frame: dt must be positive");
    }
    if (e0_j < 0.0) {
        throw std::invalid_argument("integrate_frame: negative initial energy");
    }
    const double inflow_w = harvested_power(receive_w, params.eta);
    const double harvest_start = params.timing.t_frame_s - params.timing.t_es_s;

    double e = std::min(e0_j, params.cap.e_max_j);
    double t = 0.0;
    for (const auto& [mode, duration] : schedule) {
        const double t_end = t + duration;
        // Split at the start of the energy-transfer slot so the inflow
        // discontinuity never lands mid-step.
        if (t < harvest_start && t_end > harvest_start) {
            e = integrate_segment(e, mode, 0.0, harvest_start - t, dt_s, params);
            e = integrate_segment(e, mode, inflow_w, t_end - harvest_start, dt_s, params);
        } else {
            const double inflow = (t >= harvest_start) ? inflow_w : 0.0;
            e = integrate_segment(e, mode, inflow, duration, dt_s, params);
        }
        t = t_end;
    }
    return e;
}

}  // namespace wpsn
