// SPDX-License-Identifier: Apache-2.0

#include "wpsn/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpsn/errors.hpp"
#include "wpsn/rng.hpp"

namespace wpsn {

void ControllerConfig::validate() const {
    if (!(penalty_weight_j2 > 0.0)) {
        throw std::invalid_argument("controller: penalty_weight_j2 must be positive");
    }
    if (utility_exponent >= 1.0) {
        throw UnsupportedConfigError(
            "controller: utility_exponent must be below 1 (the awake-ratio closed form "
            "degenerates at 1)");
    }
    if (neutrality_margin_j < 0.0) {
        throw std::invalid_argument("controller: neutrality_margin_j must be nonnegative");
    }
    if (sigma_min < 0.0 || sigma_min > 1.0) {
        throw std::invalid_argument("controller: sigma_min must lie in [0, 1]");
    }
}

double utility(double sigma, double psi) {
    if (sigma < 0.0 || sigma > 1.0) {
        throw std::invalid_argument("utility: sigma must lie in [0, 1], got " +
                                    std::to_string(sigma));
    }
    if (sigma == 0.0 && psi <= 0.0) return kUtilityFloor;
    if (psi == 0.0) return std::log(sigma);
    return (std::pow(sigma, psi) - 1.0) / psi;
}

Eigen::VectorXd deficiency(const Eigen::VectorXd& stored_j, double e_max_j) {
    return (e_max_j - stored_j.array()).max(0.0);
}

BeamWeights select_weights(const ChannelMatrix& channel, const Eigen::VectorXd& deficiency_j,
                           const PowerBudget& budget) {
    budget.validate();
    if (deficiency_j.size() != channel.rows()) {
        throw std::invalid_argument("select_weights: deficiency count mismatch");
    }
    if (!(deficiency_j.maxCoeff() > 0.0)) {
        // Everything full: any feasible beam is optimal.
        const Eigen::Index n = channel.cols();
        const double mag =
            std::sqrt(std::min(budget.p_ant_w, budget.p_tot_w / static_cast<double>(n)));
        return BeamWeights::Constant(n, std::complex<double>(mag, 0.0));
    }
    return bs_weights(channel, deficiency_j.cwiseMax(0.0), budget);
}

double awake_ratio(double deficiency_j, double kappa_j, const ControllerConfig& config) {
    config.validate();
    const double psi = config.utility_exponent;
    if (kappa_j < 0.0) {
        throw std::invalid_argument("awake_ratio: negative activation cost");
    }
    // No deficiency or no activation cost: utility alone decides, and it
    // is maximized by staying awake.
    if (deficiency_j <= 0.0 || kappa_j == 0.0) return 1.0;
    const double argument = kappa_j / config.penalty_weight_j2 * deficiency_j;
    return std::min(std::pow(argument, 1.0 / (psi - 1.0)), 1.0);
}

ControlDecision decide(const ChannelMatrix& channel, const Eigen::VectorXd& stored_j,
                       const EnergyParams& params, const PowerBudget& budget,
                       const ControllerConfig& config) {
    ControlDecision d;
    d.deficiency_j = deficiency(stored_j, params.cap.e_max_j);
    d.weights = select_weights(channel, d.deficiency_j, budget);
    d.awake_ratios.resize(stored_j.size());
    for (Eigen::Index k = 0; k < stored_j.size(); ++k) {
        const double kappa = kappa_varphi(stored_j[k], params).kappa_j;
        d.awake_ratios[k] = awake_ratio(d.deficiency_j[k], kappa, config);
    }
    return d;
}

namespace {

constexpr double kSigmaEvalFloor = 1e-12;

struct NeutralityModel {
    double eta_tes = 0.0;     // joules harvested per watt of receive power
    double kappa_bar = 0.0;   // range-worst activation cost
    double varphi_bar = 0.0;  // range-worst base consumption
    double margin = 0.0;
    double psi = 0.0;

    double sigma_of(double r) const {
        return std::clamp((eta_tes * r - varphi_bar - margin) / kappa_bar, kSigmaEvalFloor,
                          1.0);
    }
    double value(const Eigen::VectorXd& r) const {
        double u = 0.0;
        for (Eigen::Index k = 0; k < r.size(); ++k) u += utility(sigma_of(r[k]), psi);
        return u;
    }
    Eigen::VectorXd gradient(const Eigen::VectorXd& r) const {
        Eigen::VectorXd g(r.size());
        for (Eigen::Index k = 0; k < r.size(); ++k) {
            const double sigma = sigma_of(r[k]);
            g[k] = sigma >= 1.0 ? 0.0
                                : std::pow(sigma, psi - 1.0) * eta_tes / kappa_bar;
        }
        return g;
    }
};

// Concave maximization along the segment from a to b by ternary search.
template <typename F>
double line_search(const F& value, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (value(a + m1 * (b - a)) < value(a + m2 * (b - a))) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    return 0.5 * (lo + hi);
}

double range_worst(const EnergyParams& params, int grid, bool want_kappa) {
    double worst = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double e = params.cap.e_min_j +
                         (params.cap.e_max_j - params.cap.e_min_j) * i /
                             static_cast<double>(grid - 1);
        const KappaVarphi kv = kappa_varphi(e, params);
        worst = std::max(worst, want_kappa ? kv.kappa_j : kv.varphi_j);
    }
    return worst;
}

}  // namespace

StaticOptimum static_optimum(const ChannelMatrix& channel, const EnergyParams& params,
                             const PowerBudget& budget, const ControllerConfig& config,
                             const StaticOptConfig& opt) {
    params.validate();
    config.validate();
    const Eigen::Index k_nodes = channel.rows();

    NeutralityModel model;
    model.eta_tes = params.eta * params.timing.t_es_s;
    model.kappa_bar = range_worst(params, 65, true);
    model.varphi_bar = range_worst(params, 65, false);
    model.margin = config.neutrality_margin_j;
    model.psi = config.utility_exponent;
    if (!(model.kappa_bar > 0.0)) {
        throw std::invalid_argument("static_optimum: zero activation cost over the whole range");
    }

    StaticOptimum result;
    result.alpha_samples = opt.alpha_samples;

    // Candidate frontier points: the time-sharing beams plus weighted
    // beam-splitting probes across the simplex.
    const TsSolution ts = ts_solution(channel, budget);
    std::vector<Eigen::VectorXd> cand;
    for (Eigen::Index i = 0; i < k_nodes; ++i) cand.push_back(ts.power_matrix.row(i));
    cand.push_back(receive_power(channel,
                                 bs_weights(channel, Eigen::VectorXd::Ones(k_nodes), budget)));
    RngStream rng(opt.seed);
    for (int s = 0; s < opt.alpha_samples; ++s) {
        Eigen::VectorXd alpha(k_nodes);
        for (Eigen::Index k = 0; k < k_nodes; ++k) {
            alpha[k] = -std::log(std::max(rng.uniform01(), 1e-300));
        }
        alpha /= alpha.sum();
        cand.push_back(receive_power(channel, bs_weights(channel, alpha, budget)));
    }

    const auto frank_wolfe = [&](auto&& value, auto&& gradient, Eigen::VectorXd r) {
        for (int it = 0; it < opt.fw_iterations; ++it) {
            const Eigen::VectorXd g = gradient(r);
            int best = 0;
            double best_score = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < cand.size(); ++c) {
                const double score = g.dot(cand[c]);
                if (score > best_score) {
                    best_score = score;
                    best = static_cast<int>(c);
                }
            }
            const double gamma = line_search(value, r, cand[static_cast<std::size_t>(best)]);
            r += gamma * (cand[static_cast<std::size_t>(best)] - r);
        }
        return r;
    };

    // Feasibility: maximize the worst per-node margin over the hull.
    const auto min_margin = [&](const Eigen::VectorXd& r) {
        double worst = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < r.size(); ++k) {
            worst = std::min(worst, model.eta_tes * r[k] - model.varphi_bar);
        }
        return worst;
    };
    const auto min_margin_grad = [&](const Eigen::VectorXd& r) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(r.size());
        Eigen::Index worst_k = 0;
        double worst = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < r.size(); ++k) {
            const double m = model.eta_tes * r[k] - model.varphi_bar;
            if (m < worst) {
                worst = m;
                worst_k = k;
            }
        }
        g[worst_k] = model.eta_tes;
        return g;
    };

    Eigen::VectorXd start = Eigen::VectorXd::Zero(k_nodes);
    for (Eigen::Index i = 0; i < k_nodes; ++i) {
        start += ts.power_matrix.row(i).transpose() / static_cast<double>(k_nodes);
    }
    const Eigen::VectorXd fair = frank_wolfe(min_margin, min_margin_grad, start);
    if (min_margin(fair) < model.margin) {
        Eigen::Index worst_k = 0;
        (fair * model.eta_tes).minCoeff(&worst_k);
        result.feasible = false;
        result.binding_node = static_cast<int>(worst_k);
        result.r_star = fair;
        result.sigma_star = Eigen::VectorXd::Zero(k_nodes);
        result.u_star = kUtilityFloor;
        return result;
    }

    // Utility maximization, with supporting-hyperplane refinement: the
    // gradient at the current best point proposes a new alpha probe.
    Eigen::VectorXd r_best =
        frank_wolfe([&](const Eigen::VectorXd& r) { return model.value(r); },
                    [&](const Eigen::VectorXd& r) { return model.gradient(r); }, fair);
    for (int round = 0; round < opt.refine_rounds; ++round) {
        Eigen::VectorXd alpha = model.gradient(r_best).cwiseMax(0.0);
        if (!(alpha.maxCoeff() > 0.0)) break;
        alpha /= alpha.sum();
        cand.push_back(receive_power(channel, bs_weights(channel, alpha, budget)));
        r_best = frank_wolfe([&](const Eigen::VectorXd& r) { return model.value(r); },
                             [&](const Eigen::VectorXd& r) { return model.gradient(r); },
                             r_best);
    }

    result.r_star = r_best;
    result.sigma_star.resize(k_nodes);
    for (Eigen::Index k = 0; k < k_nodes; ++k) {
        result.sigma_star[k] = model.sigma_of(r_best[k]);
    }
    result.u_star = model.value(r_best);
    return result;
}

double drift_bound(const EnergyParams& params, const PowerBudget& budget,
                   const ChannelMatrix& channel, int energy_grid) {
    params.validate();
    if (energy_grid < 2) {
        throw std::invalid_argument("drift_bound: energy grid needs at least 2 points");
    }
    const double eta_tes = params.eta * params.timing.t_es_s;

    double total = 0.0;
    for (Eigen::Index k = 0; k < channel.rows(); ++k) {
        // A silent node can still drain energy; its receive power is zero.
        const double r_max =
            channel.row(k).cwiseAbs().maxCoeff() > 0.0
                ? receive_power(channel, ts_weights(channel.row(k), budget))[k]
                : 0.0;
        double best = 0.0;
        for (int i = 0; i < energy_grid; ++i) {
            const double e = params.cap.e_min_j +
                             (params.cap.e_max_j - params.cap.e_min_j) * i /
                                 static_cast<double>(energy_grid - 1);
            const KappaVarphi kv = kappa_varphi(e, params);
            for (const double sigma : {0.0, 1.0}) {
                // Quadratic in r with positive curvature: endpoints suffice.
                for (const double r : {0.0, r_max}) {
                    const double harvested = eta_tes * r;
                    const double v = harvested * harvested -
                                     2.0 * harvested * (kv.kappa_j * sigma + kv.varphi_j) +
                                     (kv.kappa_j * kv.kappa_j +
                                      2.0 * kv.kappa_j * kv.varphi_j) *
                                         sigma +
                                     kv.varphi_j * kv.varphi_j;
                    best = std::max(best, v);
                }
            }
        }
        total += best;
    }
    return 0.5 * total;
}

BoundReport performance_bounds(double u_star, double drift_bound_j2,
                               const ControllerConfig& config) {
    config.validate();
    BoundReport report;
    report.u_star = u_star;
    report.drift_bound_j2 = drift_bound_j2;
    report.utility_lower_bound = u_star - drift_bound_j2 / config.penalty_weight_j2;
    report.deficiency_upper_bound_j =
        config.neutrality_margin_j > 0.0
            ? (drift_bound_j2 - config.penalty_weight_j2 * u_star) /
                  config.neutrality_margin_j
            : std::numeric_limits<double>::infinity();
    return report;
}

}  // namespace wpsn
