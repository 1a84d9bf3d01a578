// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "support/oracles.hpp"
#include "wpsn/rng.hpp"
#include "wpsn/sim.hpp"

using namespace wpsn;

namespace {

Scenario three_node_scenario(long frames = 600) {
    Scenario sc;
    sc.layout = build_layout(ArrayKind::circular, 8, 0.21);
    sc.placements = {{1.5, 0.0, kPi / 2},
                     {1.5, 2.0 * kPi / 3.0, kPi / 2},
                     {1.5, 4.0 * kPi / 3.0, kPi / 2}};
    sc.frames = frames;
    sc.seed = 99;
    return sc;
}

}  // namespace

TEST_CASE("activity sampling matches its probability") {
    RngStream rng(1);
    for (int i = 0; i < 100; ++i) {
        CHECK(sample_activity(0.0, rng) == 0);
        CHECK(sample_activity(1.0, rng) == 1);
    }
    long sum = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) sum += sample_activity(0.5, rng);
    CHECK(std::abs(sum / static_cast<double>(draws) - 0.5) < 0.005);
    CHECK_THROWS_AS(sample_activity(1.5, rng), std::invalid_argument);
}

TEST_CASE("mode schedules cover the frame exactly") {
    const auto params = EnergyParams::defaults();

    const auto asleep = mode_schedule(false, params, 0.0);
    REQUIRE(asleep.size() == 1);
    CHECK(asleep[0].first == Mode::idle);
    CHECK(asleep[0].second == params.timing.t_frame_s);

    RngStream rng(4);
    for (int i = 0; i < 50; ++i) {
        const double backoff = rng.uniform(0.0, 3.0);  // often oversized
        const auto schedule = mode_schedule(true, params, backoff);
        double total = 0.0;
        for (const auto& [mode, duration] : schedule) {
            CHECK(duration > 0.0);
            total += duration;
        }
        CHECK(total == doctest::Approx(params.timing.t_frame_s).epsilon(1e-12));
    }

    // Zero back-off produces the contiguous rx/act/tx/idle sequence.
    const auto contiguous = mode_schedule(true, params, 0.0);
    REQUIRE(contiguous.size() == 4);
    CHECK(contiguous[0].first == Mode::rx);
    CHECK(contiguous[1].first == Mode::act);
    CHECK(contiguous[2].first == Mode::tx);
    CHECK(contiguous[3].first == Mode::idle);
}

TEST_CASE("zero frames produce an empty series") {
    auto sc = three_node_scenario(0);
    const auto series = run(sc);
    CHECK(series.frame_count() == 0);
    CHECK(series.summary.min_energy_node == -1);
}

TEST_CASE("identical scenario and seed reproduce the series bit for bit") {
    const auto sc = three_node_scenario(300);
    const auto a = run(sc);
    const auto b = run(sc);
    CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.receive_power_w - b.receive_power_w).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.stored_energy_j - b.stored_energy_j).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.awake_ratio - b.awake_ratio).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.activity - b.activity).cwiseAbs().maxCoeff() == 0);
    CHECK(a.summary.avg_sum_utility == b.summary.avg_sum_utility);
}

TEST_CASE("abundant power pins the awake ratio at one") {
    Scenario sc;
    sc.layout = build_layout(ArrayKind::circular, 8, 0.21);
    sc.placements = {{0.5, 0.0, kPi / 2}};
    sc.frames = 400;
    sc.seed = 3;
    const auto series = run(sc);
    for (long t = series.warmup_frames; t < series.frame_count(); ++t) {
        CHECK(series.awake_ratio(t, 0) == 1.0);
        CHECK(series.alive(t, 0) == 1);
    }
}

TEST_CASE("recorded frames obey the energy bookkeeping") {
    auto sc = three_node_scenario(400);
    sc.initial_energy_j = 0.09;
    const auto series = run(sc);
    for (int k = 0; k < series.node_count(); ++k) {
        double running = series.stored_energy_j(0, k);
        for (long t = 0; t < series.frame_count(); ++t) {
            CHECK(series.stored_energy_j(t, k) == running);
            const auto fe = frame_energies(series.activity(t, k), running,
                                           series.receive_power_w(t, k), sc.energy);
            running = std::clamp(running + fe.delta_plus_j - fe.delta_minus_j, 0.0,
                                 sc.energy.cap.e_max_j);
        }
        CHECK(series.final_energy_j[k] == running);

        // Telescoped sum equals the net change when no clamp fired.
        double harvested = 0.0, consumed = 0.0;
        bool clamped = false;
        double e = series.stored_energy_j(0, k);
        for (long t = 0; t < series.frame_count(); ++t) {
            const auto fe = frame_energies(series.activity(t, k), e,
                                           series.receive_power_w(t, k), sc.energy);
            const double raw = e + fe.delta_plus_j - fe.delta_minus_j;
            if (raw > sc.energy.cap.e_max_j || raw < 0.0) clamped = true;
            harvested += fe.delta_plus_j;
            consumed += fe.delta_minus_j;
            e = std::clamp(raw, 0.0, sc.energy.cap.e_max_j);
        }
        if (!clamped) {
            CHECK(std::abs((series.final_energy_j[k] - series.stored_energy_j(0, k)) -
                           (harvested - consumed)) < 1e-9);
        }
    }
}

TEST_CASE("summaries are recomputable from the recorded rows") {
    const auto sc = three_node_scenario(500);
    const auto series = run(sc);
    const auto redo = compute_summary(series, series.warmup_frames);
    CHECK(series.summary.avg_sum_utility == doctest::Approx(redo.avg_sum_utility).epsilon(1e-12));
    CHECK(series.summary.avg_sum_deficiency_j ==
          doctest::Approx(redo.avg_sum_deficiency_j).epsilon(1e-12));
    CHECK(series.summary.min_energy_j == redo.min_energy_j);

    // The per-frame utility column matches the recorded ratios.
    for (long t = 0; t < series.frame_count(); ++t) {
        double expected = 0.0;
        for (int k = 0; k < series.node_count(); ++k) {
            expected += utility(series.awake_ratio(t, k), sc.controller.utility_exponent);
        }
        CHECK(series.sum_utility[t] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("move events change the channel at the scheduled frame") {
    auto sc = three_node_scenario(60);
    sc.csi_error_sigma = 0.0;
    sc.events.push_back({30, MoveNodeAction{2, {2.5, 4.0 * kPi / 3.0, kPi / 2}}});
    const auto series = run(sc);

    // Receive power of the moved node drops right at the event frame.
    const double before = series.receive_power_w.col(2).segment(0, 30).mean();
    const double after = series.receive_power_w.col(2).segment(30, 30).mean();
    CHECK(after < before);

    // The rows up to the event match the run without the event.
    auto base = sc;
    base.events.clear();
    const auto reference = run(base);
    CHECK((series.receive_power_w.topRows(30) - reference.receive_power_w.topRows(30))
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("invalid scenarios are rejected before running") {
    auto sc = three_node_scenario(100);
    sc.events.push_back({50, SetBudgetAction{{0.14, 0.5}}});
    sc.events.push_back({20, SetBudgetAction{{0.14, 0.5}}});  // unsorted
    CHECK_THROWS_AS(run(sc), std::invalid_argument);

    // An event beyond the horizon is legal and must never fire.
    auto sc2 = three_node_scenario(100);
    sc2.events.push_back({500, SetBudgetAction{{0.01, 0.02}}});
    auto plain = three_node_scenario(100);
    CHECK((run(sc2).receive_power_w - run(plain).receive_power_w).cwiseAbs().maxCoeff() ==
          0.0);

    auto sc3 = three_node_scenario(100);
    sc3.events.push_back({10, MoveNodeAction{7, {1.0, 0.0, kPi / 2}}});  // unknown node
    CHECK_THROWS_AS(run(sc3), std::invalid_argument);
}

TEST_CASE("time-sharing mode uses one single-node beam per frame") {
    auto sc = three_node_scenario(120);
    sc.mode = BeamMode::time_sharing;
    const auto series = run(sc);

    const auto channel = channel_matrix(sc.layout, sc.placements, sc.radio);
    const auto ts = ts_solution(channel, sc.budget);
    for (long t = 0; t < series.frame_count(); ++t) {
        // The frame's weights must equal one of the single-node beams, and
        // specifically the one maximizing the deficiency-weighted power.
        const Eigen::VectorXcd w = series.weights.row(t);
        Eigen::VectorXd omega = series.deficiency_j.row(t);
        Eigen::Index expected_beam = 0;
        (ts.power_matrix * omega).maxCoeff(&expected_beam);
        CHECK((w - ts.weights_per_node[expected_beam]).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("channel uncertainty affects decisions but not the physics") {
    auto sc = three_node_scenario(150);
    sc.csi_error_sigma = 0.1;
    const auto series = run(sc);

    // Recorded receive powers must come from the true channel.
    const auto channel = channel_matrix(sc.layout, sc.placements, sc.radio);
    for (long t = 0; t < series.frame_count(); ++t) {
        const Eigen::VectorXcd w = series.weights.row(t);
        const auto r = receive_power(channel, w);
        CHECK((series.receive_power_w.row(t).transpose() - r).cwiseAbs().maxCoeff() < 1e-15);
    }
    const auto again = run(sc);
    CHECK((series.receive_power_w - again.receive_power_w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a starved node blacks out, idles, and revives on recovery") {
    Scenario sc;
    sc.layout = build_layout(ArrayKind::circular, 8, 0.21);
    sc.placements = {{1.0, 0.0, kPi / 2}, {2.9, kPi, kPi / 2}};
    sc.frames = 3000;
    sc.seed = 17;
    sc.initial_energy_j = 0.021;  // just above blackout
    sc.budget = {0.002, 0.016};   // far too little for the distant node
    sc.events.push_back({1500, SetBudgetAction{{0.14, 1.12}}});  // power restored
    const auto series = run(sc);

    bool died = false;
    bool revived_with_power = false;
    for (long t = 1; t < series.frame_count(); ++t) {
        if (series.alive(t, 1) == 0) {
            died = true;
            CHECK(series.awake_ratio(t, 1) == 0.0);
            CHECK(series.activity(t, 1) == 0);
        }
        if (died && t > 1500 && series.alive(t, 1) == 1) revived_with_power = true;
    }
    CHECK(died);
    CHECK(revived_with_power);
    CHECK(series.final_alive[1] == 1);
}
