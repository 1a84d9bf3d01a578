// SPDX-License-Identifier: Apache-2.0
//
// Frame-by-frame simulation of the beacon/node protocol: per-frame
// controller decisions, Bernoulli activity sampling, discrete energy
// updates, timed scenario events, and metric recording.

#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "wpsn/controller.hpp"
#include "wpsn/rng.hpp"

namespace wpsn {

enum class BeamMode { beam_splitting, time_sharing };

struct MoveNodeAction {
    int node = 0;  // zero-based
    NodePlacement placement;
};

struct SetBudgetAction {
    PowerBudget budget;
};

struct SetControllerAction {
    ControllerConfig config;
};

using ScenarioAction = std::variant<MoveNodeAction, SetBudgetAction, SetControllerAction>;

struct ScenarioEvent {
    long frame = 0;
    ScenarioAction action;
};

struct Scenario {
    AntennaLayout layout;
    RadioConstants radio;
    std::vector<NodePlacement> placements;
    EnergyParams energy = EnergyParams::defaults();
    PowerBudget budget;
    ControllerConfig controller;
    std::vector<ScenarioEvent> events;  // sorted by frame
    long frames = 20000;
    std::uint64_t seed = 1;
    BeamMode mode = BeamMode::beam_splitting;
    double initial_energy_j = -1.0;  // negative: start at e_max/2
    double warmup_fraction = 0.05;   // leading frames excluded from summaries
    double csi_error_sigma = 0.0;    // per-frame relative channel perturbation

    void validate() const;
    double resolved_initial_energy() const;
    long warmup_frames() const;
};

struct RunSummary {
    double avg_sum_utility = 0.0;
    double avg_sum_deficiency_j = 0.0;
    double min_energy_j = 0.0;
    int min_energy_node = -1;
    Eigen::VectorXd avg_awake_ratio;   // per node, post warm-up
    Eigen::VectorXd avg_deficiency_j;  // per node, post warm-up
};

struct TimeSeries {
    // One row per frame; energies are sampled at the start of the frame.
    Eigen::MatrixXcd weights;          // frame x antenna
    Eigen::MatrixXd receive_power_w;   // frame x node
    Eigen::MatrixXd stored_energy_j;   // frame x node
    Eigen::MatrixXd deficiency_j;      // frame x node
    Eigen::MatrixXd awake_ratio;       // frame x node
    Eigen::MatrixXi activity;          // frame x node
    Eigen::MatrixXi alive;             // frame x node
    Eigen::VectorXd sum_utility;       // per frame
    Eigen::VectorXd final_energy_j;    // per node, after the last frame
    std::vector<std::uint8_t> final_alive;
    long warmup_frames = 0;
    RunSummary summary;

    long frame_count() const { return receive_power_w.rows(); }
    int node_count() const { return static_cast<int>(receive_power_w.cols()); }
};

int sample_activity(double sigma, RngStream& rng);

// Mode sequence of one frame. Asleep frames idle throughout; awake frames
// run receive, active, a back-off idle gap, transmit, then idle for the
// remainder. Durations always sum to the frame length; an oversized
// back-off is truncated.
ModeSchedule mode_schedule(bool awake, const EnergyParams& params, double backoff_s);

// Summary over frames [warmup, end), recomputed purely from the rows.
RunSummary compute_summary(const TimeSeries& series, long warmup_frames);

TimeSeries run(const Scenario& scenario);

}  // namespace wpsn
