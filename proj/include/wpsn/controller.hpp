// SPDX-License-Identifier: Apache-2.0
//
// Energy-neutral controller: concave awake-ratio utility, the static
// optimum of the sum-utility problem under energy neutrality, and the
// per-frame drift-plus-penalty minimizers that pick the beam (weighted by
// stored-energy deficiency) and the awake frame ratios.

#pragma once

#include "wpsn/beamforming.hpp"
#include "wpsn/energy.hpp"

namespace wpsn {

struct ControllerConfig {
    double penalty_weight_j2 = 5e-6;   // utility weight against quadratic drift
    double utility_exponent = 0.0;     // psi < 1; zero selects the log branch
    double neutrality_margin_j = 1e-6; // required per-frame energy surplus
    double sigma_min = 1e-4;           // simulator floor: nodes must report sometimes

    void validate() const;
};

// Stands in for -infinity at sigma = 0 so comparisons stay well ordered
// without dragging IEEE infinities through downstream arithmetic.
inline constexpr double kUtilityFloor = -1e30;

// (sigma^psi - 1)/psi, and ln(sigma) in the psi -> 0 limit.
double utility(double sigma, double psi);

// e_max - E_k, elementwise, floored at zero.
Eigen::VectorXd deficiency(const Eigen::VectorXd& stored_j, double e_max_j);

// Beam-splitting beam with the deficiency vector as the receive power
// weights; with nothing deficient any feasible beam works and the
// uniform all-caps beam is returned.
BeamWeights select_weights(const ChannelMatrix& channel, const Eigen::VectorXd& deficiency_j,
                           const PowerBudget& budget);

// Closed-form maximizer of utility(sigma) - (kappa/lambda)*deficiency*sigma
// over [0, 1]: min{ ((kappa/lambda)*deficiency)^(1/(psi-1)), 1 }.
double awake_ratio(double deficiency_j, double kappa_j, const ControllerConfig& config);

struct ControlDecision {
    BeamWeights weights;
    Eigen::VectorXd awake_ratios;
    Eigen::VectorXd deficiency_j;
};

// One frame of the joint decision from current stored energies.
ControlDecision decide(const ChannelMatrix& channel, const Eigen::VectorXd& stored_j,
                       const EnergyParams& params, const PowerBudget& budget,
                       const ControllerConfig& config);

struct StaticOptConfig {
    int alpha_samples = 2000;   // Dirichlet-uniform frontier probes
    int refine_rounds = 20;     // supporting-hyperplane refinement passes
    int fw_iterations = 300;    // mixture optimization steps
    std::uint64_t seed = 0x57a71c;
};

struct StaticOptimum {
    bool feasible = true;
    int binding_node = -1;  // node with the worst margin when infeasible
    ReceivePowerVector r_star;
    Eigen::VectorXd sigma_star;
    double u_star = 0.0;
    int alpha_samples = 0;  // grid resolution the answer was computed at
};

// Best sum utility subject to every node keeping a nonnegative expected
// energy variation (with margin) for all storage levels in range. The
// receive power vector ranges over the convex hull of the achievable
// region, searched through frontier probes plus time-sharing mixtures.
StaticOptimum static_optimum(const ChannelMatrix& channel, const EnergyParams& params,
                             const PowerBudget& budget, const ControllerConfig& config,
                             const StaticOptConfig& opt = {});

// Conservative constant bounding half the summed second moment of the
// per-frame stored-energy change, maximized over receive powers up to
// each node's time-sharing maximum, awake ratios, and storage levels.
double drift_bound(const EnergyParams& params, const PowerBudget& budget,
                   const ChannelMatrix& channel, int energy_grid = 65);

struct BoundReport {
    double u_star = 0.0;
    double drift_bound_j2 = 0.0;
    double utility_lower_bound = 0.0;
    double deficiency_upper_bound_j = 0.0;
};

// Long-run guarantees of the drift-plus-penalty controller:
//   time-average sum utility    >= u_star - drift_bound/penalty_weight
//   time-average sum deficiency <= (drift_bound - penalty_weight*u_star)/margin.
// A zero margin leaves the deficiency bound unbounded.
BoundReport performance_bounds(double u_star, double drift_bound_j2,
                               const ControllerConfig& config);

}  // namespace wpsn
