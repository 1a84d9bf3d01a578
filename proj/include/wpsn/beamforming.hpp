// SPDX-License-Identifier: Apache-2.0
//
// Energy-beamforming optimizers under per-antenna and total transmit
// power caps: the single-node water-filling beam, the multi-node
// beam-splitting beam built from the principal eigenvector of the
// weighted channel Gram matrix, receive-power-region sampling, and the
// beam-splitting gain metric.

#pragma once

#include <cstdint>
#include <vector>

#include "wpsn/geometry.hpp"

namespace wpsn {

// Absolute slack, in watts, allowed on the power constraints.
inline constexpr double kPowerTolW = 1e-9;

struct PowerBudget {
    double p_ant_w = 0.14;  // per-antenna cap
    double p_tot_w = 1.12;  // total cap

    void validate() const;
};

// Nonnegative receive powers in watts, one entry per node.
using ReceivePowerVector = Eigen::VectorXd;

// r_k = |h_k^T w|^2.
ReceivePowerVector receive_power(const ChannelMatrix& channel, const BeamWeights& weights);

bool weights_feasible(const BeamWeights& weights, const PowerBudget& budget,
                      double tol_w = kPowerTolW);

// Beam that maximizes the receive power of one node: phase-conjugate of
// the channel row, magnitudes from water-filling across antennas. Every
// antenna either sits at the per-antenna cap or at |h_n|/(2*dual_price).
BeamWeights ts_weights(const Eigen::VectorXcd& channel_row, const PowerBudget& budget);

struct TsSolution {
    std::vector<BeamWeights> weights_per_node;  // beam focused on node i
    Eigen::MatrixXd power_matrix;               // row i: receive powers under beam i
    Eigen::VectorXd dual_price;                 // water-filling multiplier per node

    // Average receive power vector when beam i runs for proportion[i] of
    // the time; proportions must lie on the simplex.
    ReceivePowerVector average_power(const Eigen::VectorXd& proportions) const;
};

TsSolution ts_solution(const ChannelMatrix& channel, const PowerBudget& budget);

// Beam maximizing sum_k alpha_k * r_k. Exact (principal eigenvector of
// sum_k alpha_k h_k^* h_k^T) while the per-antenna caps are slack;
// otherwise the eigenvector is water-filled like a channel row, keeping
// only the largest-eigenvalue term of the objective.
BeamWeights bs_weights(const ChannelMatrix& channel, const Eigen::VectorXd& alpha,
                       const PowerBudget& budget);

struct OracleConfig {
    int restarts = 16;
    int max_iterations = 400;
    double tolerance = 1e-12;   // relative objective improvement stop
    double step_scale = 1.0;    // step = step_scale / principal eigenvalue
    std::uint64_t seed = 0x5eedbeef;
};

struct OracleResult {
    BeamWeights weights;
    double objective = 0.0;
    int iterations = 0;  // total across restarts
};

// Reference solver for the same weighted-sum objective: projected
// gradient ascent with random restarts plus the closed-form candidates
// as starting points, so its best value never falls below theirs.
OracleResult bs_weights_oracle(const ChannelMatrix& channel, const Eigen::VectorXd& alpha,
                               const PowerBudget& budget, const OracleConfig& config = {});

// Random feasible beams: uniform phases, per-antenna power uniform in
// [0, p_ant], then scaled onto the total cap. Row i depends only on
// (seed, i), so batches may be generated concurrently in any order.
Eigen::MatrixXd sample_region(const ChannelMatrix& channel, const PowerBudget& budget,
                              int n_samples, std::uint64_t seed);

// Weight vector beta with beta^T r = 1 on every time-sharing receive
// power vector; solves the K x K system against the all-ones vector.
Eigen::VectorXd beta_vector(const TsSolution& ts, double condition_cap = 1e8);

// beta^T r under the beam-splitting beam for that same beta. The
// denominator max_i beta^T r^(i) equals one by construction of beta.
double beam_splitting_gain(const ChannelMatrix& channel, const PowerBudget& budget);

// Same metric with the reference solver in place of bs_weights.
double beam_splitting_gain_oracle(const ChannelMatrix& channel, const PowerBudget& budget,
                                  const OracleConfig& config = {});

}  // namespace wpsn
