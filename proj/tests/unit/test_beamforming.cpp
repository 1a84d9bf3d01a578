// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "wpsn/beamforming.hpp"
#include "wpsn/errors.hpp"
#include "wpsn/geometry.hpp"
#include "wpsn/rng.hpp"

using namespace wpsn;

namespace {

const PowerBudget kDesk{0.14, 1.12};

ChannelMatrix two_by_two_orthogonal() {
    ChannelMatrix h(2, 2);
    h << std::complex<double>(1.0, 0.0), std::complex<double>(0.0, 1.0),
        std::complex<double>(0.0, 1.0), std::complex<double>(1.0, 0.0);
    // rows: (1, i) and (i, 1); h1^T conj(h2) = 1*(-i) + i*1 = 0
    return h;
}

}  // namespace

TEST_CASE("receive power basics") {
    const auto h = oracles::random_channel(3, 4, 21);
    CHECK(receive_power(h, BeamWeights::Zero(4)).maxCoeff() == 0.0);

    ChannelMatrix scalar(1, 1);
    scalar << std::complex<double>(0.01, 0.0);
    BeamWeights w(1);
    w << std::complex<double>(std::sqrt(0.14), 0.0);
    CHECK(receive_power(scalar, w)[0] == doctest::Approx(1.4e-5).epsilon(1e-12));

    CHECK_THROWS_AS(receive_power(h, BeamWeights::Ones(3)), std::invalid_argument);
}

TEST_CASE("inner-product and trace forms of receive power agree") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto h = oracles::random_channel(2, 5, 100 + seed);
        RngStream rng(seed);
        BeamWeights w(5);
        for (int n = 0; n < 5; ++n) w[n] = {rng.normal01(), rng.normal01()};
        const auto r = receive_power(h, w);
        for (int k = 0; k < 2; ++k) {
            const double via_trace = oracles::trace_receive_power(h.row(k), w);
            CHECK(r[k] == doctest::Approx(via_trace).epsilon(1e-12));
        }
    }
}

TEST_CASE("single-node beam: per-antenna-only regime caps every antenna") {
    const auto h = oracles::random_channel(1, 6, 7);
    const PowerBudget budget{0.14, 6 * 0.14 * 1.5};
    const auto w = ts_weights(h.row(0), budget);
    for (int n = 0; n < 6; ++n) {
        CHECK(std::abs(w[n]) == doctest::Approx(std::sqrt(0.14)).epsilon(1e-14));
        // Phase conjugation: h_n * w_n must be real positive.
        CHECK(std::arg(h(0, n) * w[n]) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("single-node beam: total-only regime is the matched filter") {
    const auto h = oracles::random_channel(1, 6, 8);
    const PowerBudget budget{0.5, 0.2};  // p_tot <= p_ant
    const auto w = ts_weights(h.row(0), budget);
    const Eigen::VectorXcd expected =
        h.row(0).conjugate().transpose() * (std::sqrt(0.2) / h.row(0).norm());
    CHECK((w - expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(w.squaredNorm() == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("two-antenna water-filling matches the grid oracle") {
    Eigen::VectorXcd row(2);
    row << std::complex<double>(1.0, 0.0), std::complex<double>(2.0, 0.0);
    const PowerBudget budget{1.0, 1.5};
    const auto w = ts_weights(row, budget);
    CHECK(std::abs(w[0]) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(std::abs(w[1]) == doctest::Approx(1.0).epsilon(1e-12));

    const double objective = std::abs((row.transpose() * w)(0));
    CHECK(objective == doctest::Approx(0.5 * std::sqrt(2.0) + 2.0).epsilon(1e-12));

    const double grid = oracles::grid_two_antenna_objective(1.0, 2.0, 1.0, 1.5);
    CHECK(objective >= grid - 1e-3);
}

TEST_CASE("water-filling satisfies feasibility and complementary slackness") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        RngStream rng(400 + seed);
        const int n = 2 + static_cast<int>(rng.raw() % 5);
        const auto h = oracles::random_channel(1, n, 500 + seed);
        const PowerBudget budget{rng.uniform(0.05, 0.3),
                                 rng.uniform(0.1, 1.4) * n * 0.2};
        const auto w = ts_weights(h.row(0), budget);
        REQUIRE(weights_feasible(w, budget));

        // Recover the dual price from an uncapped antenna if there is one.
        const double cap = std::sqrt(budget.p_ant_w);
        double dual = -1.0;
        for (int j = 0; j < n; ++j) {
            if (std::abs(w[j]) < cap - 1e-9) {
                dual = std::abs(h(0, j)) / (2.0 * std::abs(w[j]));
                break;
            }
        }
        if (dual > 0.0) {
            // Total budget must then be tight, and every uncapped antenna
            // must sit exactly at gain/(2*dual).
            CHECK(w.squaredNorm() == doctest::Approx(budget.p_tot_w).epsilon(1e-9));
            for (int j = 0; j < n; ++j) {
                if (std::abs(w[j]) < cap - 1e-9) {
                    CHECK(std::abs(w[j]) ==
                          doctest::Approx(std::abs(h(0, j)) / (2.0 * dual)).epsilon(1e-9));
                }
            }
        }
        // Never better than an unconstrained ascent oracle, never worse.
        const double objective = std::abs((h.row(0) * w)(0));
        const double reference = oracles::ascent_magnitude_objective(
            h.row(0).cwiseAbs().transpose(), budget.p_ant_w, budget.p_tot_w, 4000);
        CHECK(objective >= reference - 1e-4 * std::abs(reference));
    }
}

TEST_CASE("water-filling is scale covariant") {
    const auto h = oracles::random_channel(1, 5, 9);
    const PowerBudget budget{0.14, 0.5};
    const auto w1 = ts_weights(h.row(0), budget);
    const auto w2 = ts_weights(Eigen::VectorXcd(7.5 * h.row(0)), budget);
    CHECK((w1.cwiseAbs() - w2.cwiseAbs()).maxCoeff() < 1e-12);

    const double r1 = receive_power(h, w1)[0];
    const double r2 = receive_power(ChannelMatrix(7.5 * h), w2)[0];
    CHECK(r2 == doctest::Approx(7.5 * 7.5 * r1).epsilon(1e-12));
}

TEST_CASE("all-zero channel row is rejected") {
    CHECK_THROWS_AS(ts_weights(Eigen::VectorXcd::Zero(4), kDesk), DegenerateChannelError);
}

TEST_CASE("time-sharing solution fills the power matrix") {
    const auto h = oracles::random_channel(3, 6, 10);
    const auto ts = ts_solution(h, kDesk);
    REQUIRE(ts.power_matrix.rows() == 3);

    // Row i must be the receive powers under beam i, and the diagonal the
    // column maximum: a node's own beam maximizes its power.
    for (int i = 0; i < 3; ++i) {
        const auto powers = receive_power(h, ts.weights_per_node[i]);
        CHECK((ts.power_matrix.row(i).transpose() - powers).cwiseAbs().maxCoeff() < 1e-15);
        for (int k = 0; k < 3; ++k) {
            CHECK(ts.power_matrix(k, k) >= ts.power_matrix(i, k) - 1e-12);
        }
    }

    Eigen::VectorXd tau = Eigen::VectorXd::Zero(3);
    tau[0] = 1.0;
    CHECK((ts.average_power(tau) - ts.power_matrix.row(0).transpose()).cwiseAbs().maxCoeff() <
          1e-15);
    CHECK_THROWS_AS(ts.average_power(Eigen::VectorXd::Constant(3, 0.5)),
                    std::invalid_argument);
}

TEST_CASE("orthogonal channel rows give zero cross power in the total-only regime") {
    const auto h = two_by_two_orthogonal();
    const auto ts = ts_solution(h, PowerBudget{5.0, 1.0});
    CHECK(ts.power_matrix(0, 1) < 1e-15);
    CHECK(ts.power_matrix(1, 0) < 1e-15);
}

TEST_CASE("beam-splitting with one node reduces to the matched filter") {
    const auto h = oracles::random_channel(1, 6, 11);
    const PowerBudget budget{2.0, 1.0};
    const auto w_bs = bs_weights(h, Eigen::VectorXd::Ones(1), budget);
    const auto w_ts = ts_weights(h.row(0), budget);
    CHECK(oracles::cosine(w_bs, w_ts) >= 1.0 - 1e-12);
    CHECK(w_bs.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("one-hot weighting recovers the single-node power") {
    const auto h = oracles::random_channel(3, 5, 12);
    const PowerBudget budget{2.0, 1.0};
    const auto ts = ts_solution(h, budget);
    for (int k = 0; k < 3; ++k) {
        Eigen::VectorXd alpha = Eigen::VectorXd::Zero(3);
        alpha[k] = 1.0;
        const auto w = bs_weights(h, alpha, budget);
        CHECK(receive_power(h, w)[k] ==
              doctest::Approx(ts.power_matrix(k, k)).epsilon(1e-9));
    }
}

TEST_CASE("beam-splitting equals the reference solver without antenna caps") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto h = oracles::random_channel(2, 4, 700 + seed);
        Eigen::VectorXd alpha(2);
        alpha << 0.5, 0.5;
        const PowerBudget budget{2.0, 1.0};
        const auto w = bs_weights(h, alpha, budget);
        const double objective = alpha.dot(receive_power(h, w).matrix());
        OracleConfig cfg;
        cfg.restarts = 6;
        cfg.seed = 900 + seed;
        const auto ref = bs_weights_oracle(h, alpha, budget, cfg);
        CHECK(objective == doctest::Approx(ref.objective).epsilon(1e-6));
    }
}

TEST_CASE("beam-splitting weights ignore the scale of the weighting vector") {
    const auto h = oracles::random_channel(3, 6, 13);
    Eigen::VectorXd alpha(3);
    alpha << 0.2, 0.5, 0.3;
    const auto w1 = bs_weights(h, alpha, kDesk);
    const auto w2 = bs_weights(h, Eigen::VectorXd(123.0 * alpha), kDesk);
    CHECK((w1 - w2).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("invalid weighting vectors are rejected") {
    const auto h = oracles::random_channel(2, 3, 14);
    Eigen::VectorXd negative(2);
    negative << 0.5, -0.5;
    CHECK_THROWS_AS(bs_weights(h, negative, kDesk), std::invalid_argument);
    CHECK_THROWS_AS(bs_weights(h, Eigen::VectorXd::Zero(2), kDesk), std::invalid_argument);
    CHECK_THROWS_AS(bs_weights(h, Eigen::VectorXd::Ones(3), kDesk), std::invalid_argument);
}

TEST_CASE("reference solver handles the scalar antenna case") {
    ChannelMatrix h(2, 1);
    h << std::complex<double>(0.3, 0.4), std::complex<double>(-0.1, 0.2);
    Eigen::VectorXd alpha(2);
    alpha << 0.7, 0.3;
    const PowerBudget budget{0.14, 0.1};
    const auto res = bs_weights_oracle(h, alpha, budget);
    const double p = std::min(budget.p_ant_w, budget.p_tot_w);
    const double expected = p * (alpha[0] * std::norm(h(0, 0)) + alpha[1] * std::norm(h(1, 0)));
    CHECK(res.objective == doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::norm(res.weights[0]) == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("reference solver never loses to the closed-form beams") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        RngStream rng(3000 + seed);
        const int k = 1 + static_cast<int>(rng.raw() % 3);
        const int n = 2 + static_cast<int>(rng.raw() % 5);
        const auto h = oracles::random_channel(k, n, 4000 + seed);
        Eigen::VectorXd alpha(k);
        for (int i = 0; i < k; ++i) alpha[i] = rng.uniform(0.01, 1.0);
        const PowerBudget budget{rng.uniform(0.05, 0.3), rng.uniform(0.05, 1.2)};

        const auto w = bs_weights(h, alpha, budget);
        const double objective = alpha.dot(receive_power(h, w).matrix());
        OracleConfig cfg;
        cfg.restarts = 3;
        cfg.max_iterations = 120;
        cfg.seed = seed;
        const auto ref = bs_weights_oracle(h, alpha, budget, cfg);
        REQUIRE(weights_feasible(ref.weights, budget));
        CHECK(ref.objective >= objective - 1e-9);
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("region samples are feasible, deterministic, and bounded by the beams") {
    const auto h = oracles::random_channel(1, 6, 15);
    const auto samples = sample_region(h, kDesk, 500, 77);
    const auto again = sample_region(h, kDesk, 500, 77);
    CHECK((samples - again).cwiseAbs().maxCoeff() == 0.0);

    const double best = receive_power(h, ts_weights(h.row(0), kDesk))[0];
    for (int i = 0; i < samples.rows(); ++i) {
        CHECK(samples(i, 0) <= best + 1e-9);
    }
}

TEST_CASE("no region sample dominates the weighted-beam frontier") {
    const auto layout = build_layout(ArrayKind::circular, 8, 0.21);
    const auto h = channel_matrix(
        layout, {{2.0, 0.0, kPi / 2}, {2.0, kPi / 2, kPi / 2}}, RadioConstants{});
    const PowerBudget budget{0.14, 0.56};
    const auto samples = sample_region(h, budget, 2000, 5);

    RngStream rng(6);
    for (int probe = 0; probe < 20; ++probe) {
        Eigen::VectorXd alpha(2);
        alpha << rng.uniform01() + 1e-3, rng.uniform01() + 1e-3;
        OracleConfig cfg;
        cfg.restarts = 6;
        cfg.seed = 60 + probe;
        const auto frontier =
            receive_power(h, bs_weights_oracle(h, alpha, budget, cfg).weights);
        for (int i = 0; i < samples.rows(); ++i) {
            const bool dominates = samples(i, 0) > frontier[0] + 1e-9 &&
                                   samples(i, 1) > frontier[1] + 1e-9;
            CHECK_FALSE(dominates);
        }
    }
}

TEST_CASE("hyperplane weights satisfy their defining property") {
    TsSolution ts;
    ts.power_matrix.resize(1, 1);
    ts.power_matrix << 4.0;
    CHECK(beta_vector(ts)[0] == doctest::Approx(0.25).epsilon(1e-14));

    TsSolution sym;
    sym.power_matrix.resize(2, 2);
    sym.power_matrix << 3.0, 1.0, 1.0, 3.0;
    const auto beta = beta_vector(sym);
    CHECK(beta[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(beta[1] == doctest::Approx(0.25).epsilon(1e-12));

    const auto h = oracles::random_channel(3, 6, 16, 0.01);
    const auto full = ts_solution(h, kDesk);
    const auto b = beta_vector(full);
    const Eigen::VectorXd residual =
        full.power_matrix * b - Eigen::VectorXd::Ones(3);
    CHECK(residual.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("ill-conditioned power matrices are flagged as degenerate") {
    TsSolution ts;
    ts.power_matrix.resize(2, 2);
    ts.power_matrix << 1.0, 1.0, 1.0, 1.0 + 1e-12;
    CHECK_THROWS_AS(beta_vector(ts), DegenerateGeometryError);

    // Co-located nodes end-to-end.
    const auto layout = build_layout(ArrayKind::circular, 8, 0.21);
    const NodePlacement node{2.0, 1.0, kPi / 2};
    const auto h = channel_matrix(layout, {node, node}, RadioConstants{});
    CHECK_THROWS_AS(beam_splitting_gain(h, kDesk), DegenerateGeometryError);
}

TEST_CASE("beam-splitting gain is one for a single node") {
    const auto layout = build_layout(ArrayKind::circular, 8, 0.21);
    const auto h = channel_matrix(layout, {{2.0, 0.3, kPi / 2}}, RadioConstants{});
    CHECK(beam_splitting_gain(h, kDesk) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("beam-splitting gain is at least one and label-invariant") {
    const auto layout = build_layout(ArrayKind::circular, 8, 0.21);
    for (double sep_deg : {20.0, 60.0, 140.0}) {
        const double sep = sep_deg * kPi / 180.0;
        const std::vector<NodePlacement> fwd{{2.0, 0.0, kPi / 2}, {2.0, sep, kPi / 2}};
        const std::vector<NodePlacement> rev{{2.0, sep, kPi / 2}, {2.0, 0.0, kPi / 2}};
        const double g1 = beam_splitting_gain(channel_matrix(layout, fwd, RadioConstants{}), kDesk);
        const double g2 = beam_splitting_gain(channel_matrix(layout, rev, RadioConstants{}), kDesk);
        CHECK(g1 >= 1.0 - 1e-9);
        CHECK(g1 == doctest::Approx(g2).epsilon(1e-9));
    }
}

TEST_CASE("every optimizer output respects both power caps") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        RngStream rng(8000 + seed);
        const int k = 1 + static_cast<int>(rng.raw() % 3);
        const int n = 1 + static_cast<int>(rng.raw() % 8);
        const auto h = oracles::random_channel(k, n, 9000 + seed);
        const PowerBudget budget{rng.uniform(0.05, 0.3), rng.uniform(0.05, 2.0)};
        const auto ts = ts_solution(h, budget);
        for (const auto& w : ts.weights_per_node) CHECK(weights_feasible(w, budget));
        Eigen::VectorXd alpha(k);
        for (int i = 0; i < k; ++i) alpha[i] = rng.uniform01() + 1e-6;
        CHECK(weights_feasible(bs_weights(h, alpha, budget), budget));
    }
}
