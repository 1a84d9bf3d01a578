// SPDX-License-Identifier: Apache-2.0

#include "wpsn/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "wpsn/errors.hpp"
#include "wpsn/rng.hpp"

namespace wpsn {

void PowerBudget::validate() const {
    if (!(p_ant_w > 0.0) || !(p_tot_w > 0.0)) {
        throw std::invalid_argument("budget: power caps must be positive");
    }
}

ReceivePowerVector receive_power(const ChannelMatrix& channel, const BeamWeights& weights) {
    if (channel.cols() != weights.size()) {
        throw std::invalid_argument("receive_power: " + std::to_string(weights.size()) +
                                    " weights for " + std::to_string(channel.cols()) +
                                    " antennas");
    }
    return (channel * weights).cwiseAbs2();
}

bool weights_feasible(const BeamWeights& weights, const PowerBudget& budget, double tol_w) {
    for (Eigen::Index n = 0; n < weights.size(); ++n) {
        if (std::norm(weights[n]) > budget.p_ant_w + tol_w) return false;
    }
    return weights.squaredNorm() <= budget.p_tot_w + tol_w;
}

namespace {

struct Waterfill {
    Eigen::VectorXd magnitudes;
    double dual_price = 0.0;
};

// Maximize sum_n g_n x_n subject to x_n^2 <= p_ant and sum x_n^2 <= p_tot.
// Antennas below the cap get x_n = g_n/(2*dual); the dual price has a
// closed form once the set of capped antennas is known. Ties between
// equal gains break by antenna index (the objective does not care).
Waterfill waterfill_magnitudes(const Eigen::VectorXd& gains, const PowerBudget& budget) {
    const int n = static_cast<int>(gains.size());
    const double cap = std::sqrt(budget.p_ant_w);

    // Total cap slack for every feasible point: all antennas at the cap.
    if (budget.p_tot_w >= static_cast<double>(n) * budget.p_ant_w) {
        return {Eigen::VectorXd::Constant(n, cap), 0.0};
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return gains[a] < gains[b]; });

    // Find the smallest gain whose cap-boundary dual already satisfies the
    // total constraint; everything above it stays capped.
    int i_star = n + 1;
    double below_sq = 0.0;  // sum of squared gains strictly below i_star
    for (int i = 1; i <= n; ++i) {
        const double g = gains[order[static_cast<std::size_t>(i - 1)]];
        if (g <= 0.0) continue;  // zero-gain antennas never transmit here
        const double dual_i = g / (2.0 * cap);
        const double total =
            below_sq / (4.0 * dual_i * dual_i) + (n - i + 1) * budget.p_ant_w;
        if (total <= budget.p_tot_w) {
            i_star = i;
            break;
        }
        below_sq += g * g;
    }

    double dual = 0.0;
    if (i_star == n + 1) {
        // No antenna reaches the cap: pure matched-filter scaling.
        dual = 0.5 * std::sqrt(gains.squaredNorm() / budget.p_tot_w);
    } else if (below_sq > 0.0) {
        const double headroom = budget.p_tot_w - (n - i_star + 1) * budget.p_ant_w;
        dual = 0.5 * std::sqrt(below_sq / headroom);
    }
    // below_sq == 0 leaves dual at zero: the capped antennas alone fit in
    // the total budget and everything below them has zero gain.

    Eigen::VectorXd x(n);
    for (int j = 0; j < n; ++j) {
        if (dual > 0.0) {
            x[j] = std::min(gains[j] / (2.0 * dual), cap);
        } else {
            x[j] = gains[j] > 0.0 ? cap : 0.0;
        }
    }
    return {std::move(x), dual};
}

BeamWeights apply_conjugate_phases(const Eigen::VectorXcd& row, const Eigen::VectorXd& mags) {
    BeamWeights w(row.size());
    for (Eigen::Index j = 0; j < row.size(); ++j) {
        const double phase = (row[j] == std::complex<double>{0.0, 0.0}) ? 0.0 : -std::arg(row[j]);
        w[j] = std::polar(mags[j], phase);
    }
    return w;
}

void normalize_global_phase(BeamWeights& w) {
    const double top = w.cwiseAbs().maxCoeff();
    if (top <= 0.0) return;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        if (std::abs(w[j]) > 1e-12 * top) {
            w *= std::polar(1.0, -std::arg(w[j]));
            return;
        }
    }
}

struct TsBeam {
    BeamWeights weights;
    double dual_price = 0.0;
};

TsBeam ts_beam(const Eigen::VectorXcd& row, const PowerBudget& budget) {
    budget.validate();
    if (row.size() == 0) {
        throw std::invalid_argument("ts_weights: empty channel row");
    }
    const Eigen::VectorXd gains = row.cwiseAbs();
    if (!(gains.maxCoeff() > 0.0)) {
        throw DegenerateChannelError("ts_weights: channel row is all zero");
    }
    Waterfill wf = waterfill_magnitudes(gains, budget);
    return {apply_conjugate_phases(row, wf.magnitudes), wf.dual_price};
}

Eigen::MatrixXcd weighted_gram(const ChannelMatrix& channel, const Eigen::VectorXd& alpha) {
    const Eigen::Index n = channel.cols();
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < channel.rows(); ++k) {
        if (alpha[k] <= 0.0) continue;
        v.noalias() +=
            alpha[k] * (channel.row(k).conjugate().transpose() * channel.row(k));
    }
    // Exact Hermitian symmetry for the eigensolver.
    return 0.5 * (v + v.adjoint()).eval();
}

void check_alpha(const ChannelMatrix& channel, const Eigen::VectorXd& alpha) {
    if (alpha.size() != channel.rows()) {
        throw std::invalid_argument("alpha has " + std::to_string(alpha.size()) +
                                    " entries for " + std::to_string(channel.rows()) +
                                    " nodes");
    }
    if (alpha.minCoeff() < -1e-12) {
        throw std::invalid_argument("alpha entries must be nonnegative");
    }
    if (!(alpha.maxCoeff() > 0.0)) {
        throw std::invalid_argument("alpha must have at least one positive entry");
    }
}

double weighted_objective(const ChannelMatrix& channel, const Eigen::VectorXd& alpha,
                          const BeamWeights& w) {
    return alpha.dot((channel * w).cwiseAbs2().matrix());
}

}  // namespace

BeamWeights ts_weights(const Eigen::VectorXcd& channel_row, const PowerBudget& budget) {
    return ts_beam(channel_row, budget).weights;
}

ReceivePowerVector TsSolution::average_power(const Eigen::VectorXd& proportions) const {
    if (proportions.size() != power_matrix.rows()) {
        throw std::invalid_argument("average_power: proportion count mismatch");
    }
    if (proportions.minCoeff() < -1e-12 || std::abs(proportions.sum() - 1.0) > 1e-9) {
        throw std::invalid_argument("average_power: proportions must lie on the simplex");
    }
    return power_matrix.transpose() * proportions;
}

TsSolution ts_solution(const ChannelMatrix& channel, const PowerBudget& budget) {
    budget.validate();
    const Eigen::Index k_nodes = channel.rows();
    if (k_nodes < 1) {
        throw std::invalid_argument("ts_solution: empty channel matrix");
    }
    TsSolution out;
    out.weights_per_node.reserve(static_cast<std::size_t>(k_nodes));
    out.power_matrix.resize(k_nodes, k_nodes);
    out.dual_price.resize(k_nodes);
    for (Eigen::Index i = 0; i < k_nodes; ++i) {
        TsBeam beam = ts_beam(channel.row(i), budget);
        out.power_matrix.row(i) = receive_power(channel, beam.weights);
        out.dual_price[i] = beam.dual_price;
        out.weights_per_node.push_back(std::move(beam.weights));
    }
    return out;
}

BeamWeights bs_weights(const ChannelMatrix& channel, const Eigen::VectorXd& alpha,
                       const PowerBudget& budget) {
    budget.validate();
    check_alpha(channel, alpha);

    const Eigen::MatrixXcd v = weighted_gram(channel, alpha);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(v);
    if (es.info() != Eigen::Success) {
        throw NumericError("bs_weights: eigensolver failed on a " +
                           std::to_string(v.rows()) + "x" + std::to_string(v.cols()) +
                           " matrix (info=" + std::to_string(es.info()) + ")");
    }
    const Eigen::VectorXcd principal = es.eigenvectors().col(v.rows() - 1);

    BeamWeights w;
    if (budget.p_tot_w <= budget.p_ant_w) {
        // Per-antenna caps cannot bind: scale the eigenvector directly.
        w = std::sqrt(budget.p_tot_w) * principal;
    } else {
        // Treat the conjugate eigenvector like a channel row and water-fill.
        w = ts_weights(principal.conjugate(), budget);
        // Keeping only the largest-eigenvalue term is an approximation and
        // can lose to a plain single-node beam when the top eigenvalues
        // nearly tie; keep whichever candidate scores best, so the result
        // never falls below any single-node beam.
        double best = weighted_objective(channel, alpha, w);
        for (Eigen::Index k = 0; k < channel.rows(); ++k) {
            if (!(alpha[k] > 0.0) || !(channel.row(k).cwiseAbs().maxCoeff() > 0.0)) continue;
            BeamWeights candidate = ts_weights(channel.row(k), budget);
            const double value = weighted_objective(channel, alpha, candidate);
            if (value > best) {
                best = value;
                w = std::move(candidate);
            }
        }
    }
    normalize_global_phase(w);
    return w;
}

OracleResult bs_weights_oracle(const ChannelMatrix& channel, const Eigen::VectorXd& alpha,
                               const PowerBudget& budget, const OracleConfig& config) {
    budget.validate();
    check_alpha(channel, alpha);
    const Eigen::Index n = channel.cols();

    const Eigen::MatrixXcd v = weighted_gram(channel, alpha);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(v);
    if (es.info() != Eigen::Success) {
        throw NumericError("bs_weights_oracle: eigensolver failed");
    }
    const double top_eig = std::max(es.eigenvalues()(v.rows() - 1), 1e-300);
    const double step = config.step_scale / top_eig;

    const auto project = [&](BeamWeights& w) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double p = std::norm(w[j]);
            if (p > budget.p_ant_w) w[j] *= std::sqrt(budget.p_ant_w / p);
        }
        const double tot = w.squaredNorm();
        if (tot > budget.p_tot_w) w *= std::sqrt(budget.p_tot_w / tot);
    };
    const auto inflate = [&](BeamWeights& w) {
        // Push an interior point onto the nearest binding constraint.
        const double tot = w.squaredNorm();
        if (!(tot > 0.0)) return;
        double c = std::sqrt(budget.p_tot_w / tot);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double p = std::norm(w[j]);
            if (p > 0.0) c = std::min(c, std::sqrt(budget.p_ant_w / p));
        }
        if (c > 1.0) w *= c;
    };

    std::vector<BeamWeights> starts;
    starts.push_back(bs_weights(channel, alpha, budget));
    for (Eigen::Index k = 0; k < channel.rows(); ++k) {
        if (alpha[k] > 0.0 && channel.row(k).cwiseAbs().maxCoeff() > 0.0) {
            starts.push_back(ts_weights(channel.row(k), budget));
        }
    }
    for (int r = 0; r < config.restarts; ++r) {
        RngStream rng(derive_seed(config.seed, 0xacce55, static_cast<std::uint64_t>(r)));
        BeamWeights w(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            w[j] = std::polar(std::sqrt(rng.uniform01() * budget.p_ant_w),
                              rng.uniform(0.0, 2.0 * kPi));
        }
        starts.push_back(std::move(w));
    }

    OracleResult best;
    best.objective = -1.0;
    int total_iters = 0;
    for (BeamWeights w : starts) {
        project(w);
        inflate(w);
        double f = weighted_objective(channel, alpha, w);
        if (f > best.objective) best = {w, f, 0};
        int stall = 0;
        for (int it = 0; it < config.max_iterations; ++it) {
            ++total_iters;
            w += step * (v * w);
            project(w);
            const double f_new = weighted_objective(channel, alpha, w);
            if (f_new > best.objective) best = {w, f_new, 0};
            if (f_new - f <= config.tolerance * std::max(std::abs(f_new), 1e-30)) {
                if (++stall >= 3) break;
            } else {
                stall = 0;
            }
            f = f_new;
        }
    }
    inflate(best.weights);
    best.objective = std::max(best.objective, weighted_objective(channel, alpha, best.weights));
    normalize_global_phase(best.weights);
    best.iterations = total_iters;
    return best;
}

Eigen::MatrixXd sample_region(const ChannelMatrix& channel, const PowerBudget& budget,
                              int n_samples, std::uint64_t seed) {
    budget.validate();
    if (n_samples < 0) {
        throw std::invalid_argument("sample_region: negative sample count");
    }
    const Eigen::Index n = channel.cols();
    Eigen::MatrixXd out(n_samples, channel.rows());
    for (int i = 0; i < n_samples; ++i) {
        RngStream rng(derive_seed(seed, 0x7e910, static_cast<std::uint64_t>(i)));
        BeamWeights w(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            w[j] = std::polar(std::sqrt(rng.uniform01() * budget.p_ant_w),
                              rng.uniform(0.0, 2.0 * kPi));
        }
        const double tot = w.squaredNorm();
        if (tot > budget.p_tot_w) w *= std::sqrt(budget.p_tot_w / tot);
        out.row(i) = receive_power(channel, w);
    }
    return out;
}

Eigen::VectorXd beta_vector(const TsSolution& ts, double condition_cap) {
    const Eigen::MatrixXd& m = ts.power_matrix;
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw std::invalid_argument("beta_vector: power matrix must be square");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double s_max = svd.singularValues()(0);
    const double s_min = svd.singularValues()(m.rows() - 1);
    if (!(s_min > 0.0) || s_max / s_min > condition_cap) {
        throw DegenerateGeometryError(
            "beta_vector: time-sharing power matrix is ill-conditioned "
            "(nodes co-located or nearly so)");
    }
    return svd.solve(Eigen::VectorXd::Ones(m.rows()));
}

namespace {

struct GainSetup {
    Eigen::VectorXd beta;
    double best_single = 0.0;  // max over single-node beams of beta^T r
};

// The hyperplane weights put every single-node beam at beta^T r = 1, so
// the gain denominator is one whenever beta is componentwise valid. A
// strongly dominated node can push its weight negative; those entries are
// floored at zero and the denominator computed in the general ratio form.
GainSetup gain_setup(const ChannelMatrix& channel, const PowerBudget& budget) {
    const TsSolution ts = ts_solution(channel, budget);
    GainSetup setup;
    setup.beta = beta_vector(ts).cwiseMax(0.0);
    if (!(setup.beta.maxCoeff() > 0.0)) {
        throw DegenerateGeometryError("beam_splitting_gain: hyperplane weights vanished");
    }
    setup.best_single = (ts.power_matrix * setup.beta).maxCoeff();
    return setup;
}

}  // namespace

double beam_splitting_gain(const ChannelMatrix& channel, const PowerBudget& budget) {
    const GainSetup setup = gain_setup(channel, budget);
    const BeamWeights w = bs_weights(channel, setup.beta, budget);
    return setup.beta.dot(receive_power(channel, w)) / setup.best_single;
}

double beam_splitting_gain_oracle(const ChannelMatrix& channel, const PowerBudget& budget,
                                  const OracleConfig& config) {
    const GainSetup setup = gain_setup(channel, budget);
    return bs_weights_oracle(channel, setup.beta, budget, config).objective /
           setup.best_single;
}

}  // namespace wpsn
