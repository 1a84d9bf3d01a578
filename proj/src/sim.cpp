// SPDX-License-Identifier: Apache-2.0

#include "wpsn/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wpsn {

namespace {

constexpr std::uint64_t kActivityPurpose = 1;
constexpr std::uint64_t kCsiPurpose = 2;

}  // namespace

void Scenario::validate() const {
    if (layout.size() < 1) {
        throw std::invalid_argument("scenario: empty antenna layout");
    }
    if (placements.empty()) {
        throw std::invalid_argument("scenario: no nodes placed");
    }
    radio.validate();
    energy.validate();
    budget.validate();
    controller.validate();
    if (frames < 0) {
        throw std::invalid_argument("scenario: negative frame count");
    }
    if (warmup_fraction < 0.0 || warmup_fraction >= 1.0) {
        throw std::invalid_argument("scenario: warmup_fraction must lie in [0, 1)");
    }
    if (csi_error_sigma < 0.0) {
        throw std::invalid_argument("scenario: csi_error_sigma must be nonnegative");
    }
    if (initial_energy_j > energy.cap.e_max_j) {
        throw std::invalid_argument("scenario: initial energy exceeds storage capacity");
    }

    long previous = -1;
    for (const ScenarioEvent& event : events) {
        // Events beyond the horizon are allowed; they simply never fire.
        if (event.frame < 0) {
            throw std::invalid_argument("scenario: event at negative frame " +
                                        std::to_string(event.frame));
        }
        if (event.frame < previous) {
            throw std::invalid_argument("scenario: events must be sorted by frame");
        }
        previous = event.frame;
        if (const auto* move = std::get_if<MoveNodeAction>(&event.action)) {
            if (move->node < 0 || move->node >= static_cast<int>(placements.size())) {
                throw std::invalid_argument("scenario: event moves unknown node " +
                                            std::to_string(move->node + 1));
            }
            if (!(move->placement.radius_m > 0.0)) {
                throw std::invalid_argument("scenario: event moves node to zero radius");
            }
        } else if (const auto* setb = std::get_if<SetBudgetAction>(&event.action)) {
            setb->budget.validate();
        } else if (const auto* setc = std::get_if<SetControllerAction>(&event.action)) {
            setc->config.validate();
        }
    }
}

double Scenario::resolved_initial_energy() const {
    return initial_energy_j < 0.0 ? 0.5 * energy.cap.e_max_j : initial_energy_j;
}

long Scenario::warmup_frames() const {
    return static_cast<long>(std::floor(static_cast<double>(frames) * warmup_fraction));
}

int sample_activity(double sigma, RngStream& rng) {
    if (sigma < 0.0 || sigma > 1.0) {
        throw std::invalid_argument("sample_activity: sigma must lie in [0, 1]");
    }
    return rng.bernoulli(sigma);
}

ModeSchedule mode_schedule(bool awake, const EnergyParams& params, double backoff_s) {
    const double t_frame = params.timing.t_frame_s;
    if (!awake) return {{Mode::idle, t_frame}};

    const double t_rx = params.loads[Mode::rx].duration_s;
    const double t_act = params.loads[Mode::act].duration_s;
    const double t_tx = params.loads[Mode::tx].duration_s;
    const double idle_total = t_frame - t_rx - t_act - t_tx;
    const double backoff = std::clamp(backoff_s, 0.0, idle_total);

    ModeSchedule schedule;
    schedule.reserve(5);
    const auto push = [&](Mode m, double d) {
        if (d > 0.0) schedule.emplace_back(m, d);
    };
    push(Mode::rx, t_rx);
    push(Mode::act, t_act);
    push(Mode::idle, backoff);
    push(Mode::tx, t_tx);
    push(Mode::idle, idle_total - backoff);
    return schedule;
}

RunSummary compute_summary(const TimeSeries& series, long warmup_frames) {
    RunSummary s;
    const long frames = series.frame_count();
    const int nodes = series.node_count();
    s.avg_awake_ratio = Eigen::VectorXd::Zero(nodes);
    s.avg_deficiency_j = Eigen::VectorXd::Zero(nodes);
    s.min_energy_j = std::numeric_limits<double>::quiet_NaN();
    if (frames == 0 || warmup_frames >= frames) return s;

    const long tail = frames - warmup_frames;
    s.avg_sum_utility = series.sum_utility.tail(tail).mean();
    for (int k = 0; k < nodes; ++k) {
        s.avg_awake_ratio[k] = series.awake_ratio.col(k).tail(tail).mean();
        s.avg_deficiency_j[k] = series.deficiency_j.col(k).tail(tail).mean();
    }
    s.avg_sum_deficiency_j = s.avg_deficiency_j.sum();

    s.min_energy_j = std::numeric_limits<double>::infinity();
    for (long t = warmup_frames; t < frames; ++t) {
        for (int k = 0; k < nodes; ++k) {
            if (series.stored_energy_j(t, k) < s.min_energy_j) {
                s.min_energy_j = series.stored_energy_j(t, k);
                s.min_energy_node = k;
            }
        }
    }
    for (int k = 0; k < nodes; ++k) {
        if (series.final_energy_j[k] < s.min_energy_j) {
            s.min_energy_j = series.final_energy_j[k];
            s.min_energy_node = k;
        }
    }
    return s;
}

TimeSeries run(const Scenario& scenario) {
    scenario.validate();

    const long frames = scenario.frames;
    const int nodes = static_cast<int>(scenario.placements.size());
    const int antennas = scenario.layout.size();

    TimeSeries series;
    series.weights.resize(frames, antennas);
    series.receive_power_w.resize(frames, nodes);
    series.stored_energy_j.resize(frames, nodes);
    series.deficiency_j.resize(frames, nodes);
    series.awake_ratio.resize(frames, nodes);
    series.activity.resize(frames, nodes);
    series.alive.resize(frames, nodes);
    series.sum_utility.resize(frames);
    series.final_energy_j = Eigen::VectorXd::Zero(nodes);
    series.final_alive.assign(static_cast<std::size_t>(nodes), 1);
    series.warmup_frames = scenario.warmup_frames();

    // Mutable run state; scenario events rewrite it between frames.
    std::vector<NodePlacement> placements = scenario.placements;
    PowerBudget budget = scenario.budget;
    ControllerConfig controller = scenario.controller;
    ChannelMatrix channel = channel_matrix(scenario.layout, placements, scenario.radio);
    TsSolution ts;
    bool ts_stale = true;

    std::vector<NodeEnergyState> state(static_cast<std::size_t>(nodes));
    for (auto& ns : state) {
        ns.stored_j = scenario.resolved_initial_energy();
        ns.alive = ns.stored_j >= scenario.energy.cap.e_min_j;
    }

    std::vector<RngStream> activity_rng;
    activity_rng.reserve(static_cast<std::size_t>(nodes));
    for (int k = 0; k < nodes; ++k) {
        activity_rng.emplace_back(
            derive_seed(scenario.seed, kActivityPurpose, static_cast<std::uint64_t>(k)));
    }
    RngStream csi_rng(derive_seed(scenario.seed, kCsiPurpose, 0));

    std::size_t next_event = 0;
    for (long t = 0; t < frames; ++t) {
        while (next_event < scenario.events.size() &&
               scenario.events[next_event].frame == t) {
            const ScenarioAction& action = scenario.events[next_event].action;
            if (const auto* move = std::get_if<MoveNodeAction>(&action)) {
                placements[static_cast<std::size_t>(move->node)] = move->placement;
                channel = channel_matrix(scenario.layout, placements, scenario.radio);
                ts_stale = true;
            } else if (const auto* setb = std::get_if<SetBudgetAction>(&action)) {
                budget = setb->budget;
                ts_stale = true;
            } else if (const auto* setc = std::get_if<SetControllerAction>(&action)) {
                controller = setc->config;
            }
            ++next_event;
        }

        // The beacon decides from its channel knowledge; energy flows
        // through the true channel.
        ChannelMatrix perturbed;
        if (scenario.csi_error_sigma > 0.0) {
            perturbed = perturb_channel(channel, scenario.csi_error_sigma, csi_rng);
        }
        const ChannelMatrix& known = scenario.csi_error_sigma > 0.0 ? perturbed : channel;

        Eigen::VectorXd stored(nodes);
        for (int k = 0; k < nodes; ++k) stored[k] = state[static_cast<std::size_t>(k)].stored_j;
        const Eigen::VectorXd omega = deficiency(stored, scenario.energy.cap.e_max_j);

        BeamWeights weights;
        if (scenario.mode == BeamMode::beam_splitting) {
            weights = select_weights(known, omega, budget);
        } else {
            if (ts_stale || scenario.csi_error_sigma > 0.0) {
                ts = ts_solution(known, budget);
                ts_stale = false;
            }
            // One single-node beam per frame, the one serving the largest
            // deficiency-weighted receive power.
            Eigen::Index best = 0;
            (ts.power_matrix * omega).maxCoeff(&best);
            weights = ts.weights_per_node[static_cast<std::size_t>(best)];
        }

        const ReceivePowerVector power = receive_power(channel, weights);

        double sum_utility = 0.0;
        for (int k = 0; k < nodes; ++k) {
            NodeEnergyState& ns = state[static_cast<std::size_t>(k)];
            double sigma = 0.0;
            if (ns.alive) {
                const double kappa = kappa_varphi(ns.stored_j, scenario.energy).kappa_j;
                sigma = std::max(awake_ratio(omega[k], kappa, controller),
                                 controller.sigma_min);
            }
            const int activity =
                sample_activity(sigma, activity_rng[static_cast<std::size_t>(k)]);

            series.stored_energy_j(t, k) = ns.stored_j;
            series.deficiency_j(t, k) = omega[k];
            series.awake_ratio(t, k) = sigma;
            series.activity(t, k) = activity;
            series.alive(t, k) = ns.alive ? 1 : 0;
            sum_utility += utility(sigma, controller.utility_exponent);

            ns = frame_update(ns, power[k], activity, scenario.energy);
        }
        series.weights.row(t) = weights.transpose();
        series.receive_power_w.row(t) = power.transpose();
        series.sum_utility[t] = sum_utility;
    }

    for (int k = 0; k < nodes; ++k) {
        series.final_energy_j[k] = state[static_cast<std::size_t>(k)].stored_j;
        series.final_alive[static_cast<std::size_t>(k)] =
            state[static_cast<std::size_t>(k)].alive ? 1 : 0;
    }
    series.summary = compute_summary(series, series.warmup_frames);
    return series;
}

}  // namespace wpsn
