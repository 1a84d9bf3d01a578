// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: loads a scenario configuration, runs one of the
// analysis or simulation subcommands, and writes CSV files plus a one-line
// summary. Exit codes: 0 ok, 1 usage, 2 configuration, 3 numeric/infeasible,
// 4 I/O.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpsn/config.hpp"
#include "wpsn/controller.hpp"
#include "wpsn/errors.hpp"
#include "wpsn/rng.hpp"
#include "wpsn/sim.hpp"

namespace fs = std::filesystem;
using namespace wpsn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<long> frames;
    bool time_sharing = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "scenario configuration file")
        ->required();
    cmd->add_option("--out", opts.out_dir, "output directory (created if missing)");
    cmd->add_option("--seed", opts.seed, "override the scenario seed");
    cmd->add_option("--frames", opts.frames, "override the frame count");
    cmd->add_flag("--ts", opts.time_sharing, "force time-sharing beam mode");
}

Scenario load_scenario(const CommonOptions& opts) {
    auto result = parse_config_file(opts.config_path);
    if (!result.ok()) {
        for (const auto& err : result.errors) {
            std::cerr << opts.config_path << ": " << err.to_string() << "\n";
        }
        throw std::system_error(std::make_error_code(std::errc::invalid_argument),
                                "configuration rejected");
    }
    Scenario scenario = std::move(*result.scenario);
    if (opts.seed) scenario.seed = *opts.seed;
    if (opts.frames) scenario.frames = *opts.frames;
    if (opts.time_sharing) scenario.mode = BeamMode::time_sharing;
    return scenario;
}

class CsvFile {
public:
    CsvFile(const fs::path& path, const std::vector<std::string>& header) : path_(path) {
        fs::create_directories(path.parent_path());
        out_.open(path);
        if (!out_) {
            throw std::ios_base::failure("cannot open '" + path.string() + "' for writing");
        }
        write_strings(header);
    }

    void write_strings(const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out_ << ",";
            out_ << row[i];
        }
        out_ << "\n";
    }

    // Full-precision numbers with an optional trailing label column.
    void write(const std::vector<double>& values, const std::string& tail = {}) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ",";
            out_ << format_full(values[i]);
        }
        if (!tail.empty()) out_ << "," << tail;
        out_ << "\n";
    }

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
    std::ofstream out_;
};

std::string csv_num(double v) { return format_full(v); }

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string token = text.substr(pos, comma - pos);
        if (!token.empty()) values.push_back(std::stod(token));
        pos = comma + 1;
    }
    return values;
}

// ------------------------------------------------------------ subcommands

int cmd_region(const CommonOptions& opts, int samples, int alpha_grid) {
    const Scenario sc = load_scenario(opts);
    const auto channel = channel_matrix(sc.layout, sc.placements, sc.radio);
    const int nodes = static_cast<int>(channel.rows());

    std::vector<std::string> header{"sample_id"};
    for (int k = 1; k <= nodes; ++k) header.push_back("r" + std::to_string(k) + "_w");
    header.push_back("kind");
    CsvFile csv(fs::path(opts.out_dir) / "region.csv", header);

    const auto cloud = sample_region(channel, sc.budget, samples, sc.seed);
    long row_id = 0;
    for (int i = 0; i < cloud.rows(); ++i) {
        std::vector<double> row{static_cast<double>(row_id++)};
        for (int k = 0; k < nodes; ++k) row.push_back(cloud(i, k));
        csv.write(row, "random");
    }

    RngStream rng(derive_seed(sc.seed, 0xF0, 0));
    for (int i = 0; i < alpha_grid; ++i) {
        Eigen::VectorXd alpha(nodes);
        for (int k = 0; k < nodes; ++k) {
            alpha[k] = -std::log(std::max(rng.uniform01(), 1e-300));
        }
        alpha /= alpha.sum();
        const auto r = receive_power(channel, bs_weights(channel, alpha, sc.budget));
        std::vector<double> row{static_cast<double>(row_id++)};
        for (int k = 0; k < nodes; ++k) row.push_back(r[k]);
        csv.write(row, "pareto");
    }

    const auto ts = ts_solution(channel, sc.budget);
    for (int i = 0; i < nodes; ++i) {
        std::vector<double> row{static_cast<double>(row_id++)};
        for (int k = 0; k < nodes; ++k) row.push_back(ts.power_matrix(i, k));
        csv.write(row, "ts");
    }

    std::cout << "region: " << row_id << " rows (" << samples << " random, " << alpha_grid
              << " pareto, " << nodes << " ts) -> " << csv.path().string() << "\n";
    return kExitOk;
}

int cmd_gain(const CommonOptions& opts, const std::string& azimuths_arg,
             const std::string& ptots_arg, bool with_oracle) {
    const Scenario sc = load_scenario(opts);
    const int nodes = static_cast<int>(sc.placements.size());
    const double radius = sc.placements.front().radius_m;

    CsvFile csv(fs::path(opts.out_dir) / "gain.csv",
                {"sweep", "value", "gamma", "gamma_oracle"});

    OracleConfig oracle_cfg;
    oracle_cfg.seed = derive_seed(sc.seed, 0xF1, 0);

    long rows = 0;
    double max_gain = 0.0;
    const auto emit = [&](const char* sweep, double value, const ChannelMatrix& channel,
                          const PowerBudget& budget) {
        const double gain = beam_splitting_gain(channel, budget);
        const double oracle =
            with_oracle ? beam_splitting_gain_oracle(channel, budget, oracle_cfg) : gain;
        csv.write_strings({sweep, csv_num(value), csv_num(gain), csv_num(oracle)});
        max_gain = std::max(max_gain, gain);
        ++rows;
    };

    // Azimuth sweep: node k sits at k times the separation, same radius.
    for (double az_deg : parse_list(azimuths_arg)) {
        std::vector<NodePlacement> placements;
        for (int k = 0; k < nodes; ++k) {
            placements.push_back({radius, k * az_deg * kPi / 180.0, kPi / 2});
        }
        emit("azimuth_deg", az_deg, channel_matrix(sc.layout, placements, sc.radio),
             sc.budget);
    }

    // Total-power sweep at the configured node placements.
    const auto channel = channel_matrix(sc.layout, sc.placements, sc.radio);
    for (double p_tot : parse_list(ptots_arg)) {
        emit("p_tot_w", p_tot, channel, PowerBudget{sc.budget.p_ant_w, p_tot});
    }

    std::cout << "gain: " << rows << " rows, max gamma " << format_full(max_gain) << " -> "
              << csv.path().string() << "\n";
    return kExitOk;
}

int cmd_simulate(const CommonOptions& opts) {
    const Scenario sc = load_scenario(opts);
    const auto series = run(sc);
    const int nodes = series.node_count();
    const int antennas = static_cast<int>(series.weights.cols());

    std::vector<std::string> header{"frame"};
    for (int n = 1; n <= antennas; ++n) {
        header.push_back("w" + std::to_string(n) + "_mag");
        header.push_back("w" + std::to_string(n) + "_phase_rad");
    }
    for (int k = 1; k <= nodes; ++k) {
        const std::string id = std::to_string(k);
        header.push_back("r" + id + "_w");
        header.push_back("e" + id + "_j");
        header.push_back("deficiency" + id + "_j");
        header.push_back("sigma" + id);
        header.push_back("activity" + id);
        header.push_back("alive" + id);
    }
    CsvFile csv(fs::path(opts.out_dir) / "timeseries.csv", header);

    for (long t = 0; t < series.frame_count(); ++t) {
        std::vector<double> row{static_cast<double>(t)};
        for (int n = 0; n < antennas; ++n) {
            row.push_back(std::abs(series.weights(t, n)));
            row.push_back(std::arg(series.weights(t, n)));
        }
        for (int k = 0; k < nodes; ++k) {
            row.push_back(series.receive_power_w(t, k));
            row.push_back(series.stored_energy_j(t, k));
            row.push_back(series.deficiency_j(t, k));
            row.push_back(series.awake_ratio(t, k));
            row.push_back(series.activity(t, k));
            row.push_back(series.alive(t, k));
        }
        csv.write(row);
    }

    const auto& s = series.summary;
    std::cout << "simulate: frames=" << series.frame_count() << " min_energy_j="
              << format_full(s.min_energy_j) << " min_energy_node=" << (s.min_energy_node + 1)
              << " avg_sum_utility=" << format_full(s.avg_sum_utility)
              << " avg_sum_deficiency_j=" << format_full(s.avg_sum_deficiency_j) << " -> "
              << csv.path().string() << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonOptions& opts, const std::string& lambdas_arg,
              const std::string& psis_arg, const std::string& modes_arg) {
    const Scenario base = load_scenario(opts);
    const auto lambdas = parse_list(lambdas_arg);
    const auto psis = parse_list(psis_arg);
    std::vector<BeamMode> modes;
    if (modes_arg.find("bs") != std::string::npos) modes.push_back(BeamMode::beam_splitting);
    if (modes_arg.find("ts") != std::string::npos) modes.push_back(BeamMode::time_sharing);
    if (modes.empty() || lambdas.empty() || psis.empty()) {
        std::cerr << "sweep: empty sweep lists\n";
        return kExitUsage;
    }

    struct Job {
        double lambda, psi;
        BeamMode mode;
        std::future<TimeSeries> result;
    };
    std::vector<Job> jobs;
    for (BeamMode mode : modes) {
        for (double lambda : lambdas) {
            for (double psi : psis) {
                Scenario sc = base;
                sc.mode = mode;
                sc.controller.penalty_weight_j2 = lambda;
                sc.controller.utility_exponent = psi;
                jobs.push_back(
                    {lambda, psi, mode,
                     std::async(std::launch::async, [sc]() { return run(sc); })});
            }
        }
    }

    CsvFile csv(fs::path(opts.out_dir) / "sweep.csv",
                {"penalty_weight_j2", "utility_exponent", "mode", "avg_sum_utility",
                 "avg_sum_deficiency_j", "awake_ratio_spread", "min_energy_j"});
    for (auto& job : jobs) {
        const TimeSeries series = job.result.get();
        const auto& s = series.summary;
        const double spread =
            s.avg_awake_ratio.size() > 0
                ? s.avg_awake_ratio.maxCoeff() - s.avg_awake_ratio.minCoeff()
                : 0.0;
        csv.write_strings({csv_num(job.lambda), csv_num(job.psi),
                           job.mode == BeamMode::beam_splitting ? "bs" : "ts",
                           csv_num(s.avg_sum_utility), csv_num(s.avg_sum_deficiency_j),
                           csv_num(spread), csv_num(s.min_energy_j)});
    }
    std::cout << "sweep: " << jobs.size() << " runs -> " << csv.path().string() << "\n";
    return kExitOk;
}

int cmd_static_opt(const CommonOptions& opts, int alpha_grid) {
    const Scenario sc = load_scenario(opts);
    const auto channel = channel_matrix(sc.layout, sc.placements, sc.radio);
    StaticOptConfig cfg;
    cfg.alpha_samples = alpha_grid;
    cfg.seed = derive_seed(sc.seed, 0xF2, 0);
    const auto result = static_optimum(channel, sc.energy, sc.budget, sc.controller, cfg);

    if (!result.feasible) {
        std::cerr << "static-opt: infeasible; node " << (result.binding_node + 1)
                  << " cannot meet the neutrality margin at any achievable power\n";
        return kExitNumeric;
    }

    CsvFile csv(fs::path(opts.out_dir) / "static_opt.csv",
                {"node", "r_star_w", "sigma_star"});
    for (int k = 0; k < result.r_star.size(); ++k) {
        csv.write({static_cast<double>(k + 1), result.r_star[k], result.sigma_star[k]});
    }
    std::cout << "static-opt: u_star=" << format_full(result.u_star) << " alpha_samples="
              << result.alpha_samples << " -> " << csv.path().string() << "\n";
    return kExitOk;
}

int cmd_bounds(const CommonOptions& opts, int alpha_grid) {
    const Scenario sc = load_scenario(opts);
    const auto channel = channel_matrix(sc.layout, sc.placements, sc.radio);
    StaticOptConfig cfg;
    cfg.alpha_samples = alpha_grid;
    cfg.seed = derive_seed(sc.seed, 0xF2, 0);
    const auto optimum = static_optimum(channel, sc.energy, sc.budget, sc.controller, cfg);
    if (!optimum.feasible) {
        std::cerr << "bounds: infeasible; node " << (optimum.binding_node + 1)
                  << " cannot meet the neutrality margin\n";
        return kExitNumeric;
    }
    const double drift = drift_bound(sc.energy, sc.budget, channel);
    const auto report = performance_bounds(optimum.u_star, drift, sc.controller);

    CsvFile csv(fs::path(opts.out_dir) / "bounds.csv",
                {"u_star", "drift_bound_j2", "utility_lower_bound",
                 "deficiency_upper_bound_j", "penalty_weight_j2", "neutrality_margin_j"});
    csv.write({report.u_star, report.drift_bound_j2, report.utility_lower_bound,
               report.deficiency_upper_bound_j, sc.controller.penalty_weight_j2,
               sc.controller.neutrality_margin_j});

    std::cout << "bounds: u_star=" << format_full(report.u_star)
              << " utility_lb=" << format_full(report.utility_lower_bound)
              << " deficiency_ub_j=" << format_full(report.deficiency_upper_bound_j) << " -> "
              << csv.path().string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-antenna wireless power transfer: beamforming analysis and "
                 "energy-neutral network simulation"};
    app.require_subcommand(1);

    CommonOptions region_opts, gain_opts, sim_opts, sweep_opts, static_opts, bounds_opts;

    auto* region = app.add_subcommand("region", "sample the receive power region");
    add_common(region, region_opts);
    int samples = 10000;
    int region_alpha = 50;
    region->add_option("--samples", samples, "random beam samples");
    region->add_option("--alpha-grid", region_alpha, "frontier probes");

    auto* gain = app.add_subcommand("gain", "beam-splitting gain sweeps");
    add_common(gain, gain_opts);
    std::string azimuths = "10,20,30,40,50,60,70,80,90,100,110,120,130,140,150,160,170,180";
    std::string ptots;
    bool with_oracle = false;
    gain->add_option("--azimuths", azimuths, "azimuth separations in degrees");
    gain->add_option("--ptots", ptots, "total power sweep in watts");
    gain->add_flag("--oracle", with_oracle, "also evaluate the reference solver");

    auto* simulate = app.add_subcommand("simulate", "run the frame simulation");
    add_common(simulate, sim_opts);

    auto* sweep = app.add_subcommand("sweep", "grid of simulations over parameters");
    add_common(sweep, sweep_opts);
    std::string lambdas = "5e-7,5e-6,5e-5";
    std::string psis = "0,0.25,0.5,0.75";
    std::string modes = "bs,ts";
    sweep->add_option("--lambdas", lambdas, "penalty weights");
    sweep->add_option("--psis", psis, "utility exponents");
    sweep->add_option("--modes", modes, "beam modes (bs, ts)");

    auto* static_opt = app.add_subcommand("static-opt", "static optimum of the sum utility");
    add_common(static_opt, static_opts);
    int alpha_grid = 2000;
    static_opt->add_option("--alpha-grid", alpha_grid, "frontier probes");

    auto* bounds = app.add_subcommand("bounds", "long-run performance bounds");
    add_common(bounds, bounds_opts);
    int bounds_alpha = 2000;
    bounds->add_option("--alpha-grid", bounds_alpha, "frontier probes");

    CLI11_PARSE(app, argc, argv);

    try {
        if (region->parsed()) return cmd_region(region_opts, samples, region_alpha);
        if (gain->parsed()) return cmd_gain(gain_opts, azimuths, ptots, with_oracle);
        if (simulate->parsed()) return cmd_simulate(sim_opts);
        if (sweep->parsed()) return cmd_sweep(sweep_opts, lambdas, psis, modes);
        if (static_opt->parsed()) return cmd_static_opt(static_opts, alpha_grid);
        if (bounds->parsed()) return cmd_bounds(bounds_opts, bounds_alpha);
    } catch (const std::system_error&) {
        return kExitConfig;
    } catch (const std::ios_base::failure& ex) {
        std::cerr << "i/o error: " << ex.what() << "\n";
        return kExitIo;
    } catch (const DegenerateGeometryError& ex) {
        std::cerr << "numeric error: " << ex.what() << "\n";
        return kExitNumeric;
    } catch (const DegenerateChannelError& ex) {
        std::cerr << "numeric error: " << ex.what() << "\n";
        return kExitNumeric;
    } catch (const NumericError& ex) {
        std::cerr << "numeric error: " << ex.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
