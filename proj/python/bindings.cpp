// SPDX-License-Identifier: Apache-2.0
//
// Python bindings for the core operations: channel construction, the
// beamforming optimizers, the energy model, the energy-neutral controller,
// and the frame simulator.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wpsn/config.hpp"
#include "wpsn/controller.hpp"
#include "wpsn/errors.hpp"
#include "wpsn/rng.hpp"
#include "wpsn/sim.hpp"

namespace py = pybind11;
using namespace wpsn;

namespace {

std::string config_error_text(const ParseResult& result) {
    std::string text = "configuration rejected:";
    for (const auto& err : result.errors) {
        text += "\n  " + err.to_string();
    }
    return text;
}

}  // namespace

PYBIND11_MODULE(_wpsn, m) {
    m.doc() = "Multi-antenna wireless power transfer: beamforming, energy modeling, "
              "and energy-neutral network simulation.";

    py::register_exception<DegenerateGeometryError>(m, "DegenerateGeometryError");
    py::register_exception<DegenerateChannelError>(m, "DegenerateChannelError");
    py::register_exception<NumericError>(m, "NumericError");
    py::register_exception<UnsupportedConfigError>(m, "UnsupportedConfigError");

    // ---------------------------------------------------------- geometry
    py::enum_<ArrayKind>(m, "ArrayKind")
        .value("linear", ArrayKind::linear)
        .value("circular", ArrayKind::circular);

    py::class_<SphericalPosition>(m, "SphericalPosition")
        .def(py::init<>())
        .def_readwrite("radius_m", &SphericalPosition::radius_m)
        .def_readwrite("elevation_rad", &SphericalPosition::elevation_rad)
        .def_readwrite("azimuth_rad", &SphericalPosition::azimuth_rad);

    py::class_<AntennaLayout>(m, "AntennaLayout")
        .def(py::init<>())
        .def_readwrite("kind", &AntennaLayout::kind)
        .def_readwrite("element_spacing_m", &AntennaLayout::element_spacing_m)
        .def_readwrite("ring_radius_m", &AntennaLayout::ring_radius_m)
        .def_readwrite("positions", &AntennaLayout::positions)
        .def("__len__", &AntennaLayout::size);

    py::class_<NodePlacement>(m, "NodePlacement")
        .def(py::init<double, double, double>(), py::arg("radius_m"),
             py::arg("azimuth_rad"), py::arg("elevation_rad") = kPi / 2)
        .def_readwrite("radius_m", &NodePlacement::radius_m)
        .def_readwrite("azimuth_rad", &NodePlacement::azimuth_rad)
        .def_readwrite("elevation_rad", &NodePlacement::elevation_rad);

    py::class_<RadioConstants>(m, "RadioConstants")
        .def(py::init<>())
        .def_readwrite("wavelength_m", &RadioConstants::wavelength_m)
        .def_readwrite("tx_element_gain", &RadioConstants::tx_element_gain)
        .def_readwrite("rx_gain", &RadioConstants::rx_gain)
        .def_readwrite("tx_gain_table", &RadioConstants::tx_gain_table)
        .def("tx_gain_toward", &RadioConstants::tx_gain_toward, py::arg("elevation_rad"),
             py::arg("azimuth_rad"));

    m.def("build_layout", &build_layout, py::arg("kind"), py::arg("n_antennas"),
          py::arg("spacing_or_radius_m"));
    m.def("array_factor", &array_factor, py::arg("layout"), py::arg("weights"),
          py::arg("elevation_rad"), py::arg("azimuth_rad"), py::arg("wavelength_m"));
    m.def("channel_matrix", &channel_matrix, py::arg("layout"), py::arg("placements"),
          py::arg("radio"));

    // ------------------------------------------------------- beamforming
    py::class_<PowerBudget>(m, "PowerBudget")
        .def(py::init<double, double>(), py::arg("p_ant_w") = 0.14,
             py::arg("p_tot_w") = 1.12)
        .def_readwrite("p_ant_w", &PowerBudget::p_ant_w)
        .def_readwrite("p_tot_w", &PowerBudget::p_tot_w);

    py::class_<TsSolution>(m, "TsSolution")
        .def_readonly("weights_per_node", &TsSolution::weights_per_node)
        .def_readonly("power_matrix", &TsSolution::power_matrix)
        .def_readonly("dual_price", &TsSolution::dual_price)
        .def("average_power", &TsSolution::average_power, py::arg("proportions"));

    py::class_<OracleConfig>(m, "OracleConfig")
        .def(py::init<>())
        .def_readwrite("restarts", &OracleConfig::restarts)
        .def_readwrite("max_iterations", &OracleConfig::max_iterations)
        .def_readwrite("tolerance", &OracleConfig::tolerance)
        .def_readwrite("step_scale", &OracleConfig::step_scale)
        .def_readwrite("seed", &OracleConfig::seed);

    py::class_<OracleResult>(m, "OracleResult")
        .def_readonly("weights", &OracleResult::weights)
        .def_readonly("objective", &OracleResult::objective)
        .def_readonly("iterations", &OracleResult::iterations);

    m.def("receive_power", &receive_power, py::arg("channel"), py::arg("weights"));
    m.def("weights_feasible", &weights_feasible, py::arg("weights"), py::arg("budget"),
          py::arg("tol_w") = kPowerTolW);
    m.def("ts_weights", &ts_weights, py::arg("channel_row"), py::arg("budget"));
    m.def("ts_solution", &ts_solution, py::arg("channel"), py::arg("budget"));
    m.def("bs_weights", &bs_weights, py::arg("channel"), py::arg("alpha"), py::arg("budget"));
    m.def("bs_weights_oracle", &bs_weights_oracle, py::arg("channel"), py::arg("alpha"),
          py::arg("budget"), py::arg("config") = OracleConfig{});
    m.def("sample_region", &sample_region, py::arg("channel"), py::arg("budget"),
          py::arg("n_samples"), py::arg("seed"));
    m.def("beta_vector", &beta_vector, py::arg("ts"), py::arg("condition_cap") = 1e8);
    m.def("beam_splitting_gain", &beam_splitting_gain, py::arg("channel"), py::arg("budget"));
    m.def("beam_splitting_gain_oracle", &beam_splitting_gain_oracle, py::arg("channel"),
          py::arg("budget"), py::arg("config") = OracleConfig{});

    // ------------------------------------------------------------ energy
    py::enum_<Mode>(m, "Mode")
        .value("idle", Mode::idle)
        .value("act", Mode::act)
        .value("rx", Mode::rx)
        .value("tx", Mode::tx);

    py::class_<ModeLoad>(m, "ModeLoad")
        .def(py::init<>())
        .def_readwrite("resistance_ohm", &ModeLoad::resistance_ohm)
        .def_readwrite("current_a", &ModeLoad::current_a)
        .def_readwrite("duration_s", &ModeLoad::duration_s);

    py::class_<ModeLoads>(m, "ModeLoads")
        .def(py::init<>())
        .def("__getitem__",
             [](ModeLoads& loads, Mode mode) -> ModeLoad& { return loads[mode]; },
             py::return_value_policy::reference_internal)
        .def("__setitem__",
             [](ModeLoads& loads, Mode mode, const ModeLoad& load) { loads[mode] = load; });

    py::class_<SupercapParams>(m, "SupercapParams")
        .def(py::init<>())
        .def_readwrite("capacitance_f", &SupercapParams::capacitance_f)
        .def_readwrite("leak_resistance_ohm", &SupercapParams::leak_resistance_ohm)
        .def_readwrite("e_max_j", &SupercapParams::e_max_j)
        .def_readwrite("e_min_j", &SupercapParams::e_min_j);

    py::class_<FrameTiming>(m, "FrameTiming")
        .def(py::init<>())
        .def_readwrite("t_frame_s", &FrameTiming::t_frame_s)
        .def_readwrite("t_es_s", &FrameTiming::t_es_s)
        .def_readwrite("training_slots", &FrameTiming::training_slots)
        .def_readwrite("training_slot_s", &FrameTiming::training_slot_s);

    py::class_<EnergyParams>(m, "EnergyParams")
        .def(py::init<>())
        .def_static("defaults", &EnergyParams::defaults)
        .def_readwrite("cap", &EnergyParams::cap)
        .def_readwrite("loads", &EnergyParams::loads)
        .def_readwrite("timing", &EnergyParams::timing)
        .def_readwrite("eta", &EnergyParams::eta)
        .def_readwrite("revive_threshold_j", &EnergyParams::revive_threshold_j)
        .def("validate", &EnergyParams::validate);

    py::class_<NodeEnergyState>(m, "NodeEnergyState")
        .def(py::init<double, bool>(), py::arg("stored_j"), py::arg("alive") = true)
        .def_readwrite("stored_j", &NodeEnergyState::stored_j)
        .def_readwrite("alive", &NodeEnergyState::alive);

    py::class_<FrameEnergies>(m, "FrameEnergies")
        .def_readonly("delta_plus_j", &FrameEnergies::delta_plus_j)
        .def_readonly("delta_minus_j", &FrameEnergies::delta_minus_j);

    py::class_<KappaVarphi>(m, "KappaVarphi")
        .def_readonly("kappa_j", &KappaVarphi::kappa_j)
        .def_readonly("varphi_j", &KappaVarphi::varphi_j);

    m.def("consumed_power", &consumed_power, py::arg("mode"), py::arg("e_j"),
          py::arg("loads"), py::arg("cap"));
    m.def("leakage_power", &leakage_power, py::arg("e_j"), py::arg("cap"));
    m.def("harvested_power", &harvested_power, py::arg("receive_w"), py::arg("eta"));
    m.def("frame_energies", &frame_energies, py::arg("activity"), py::arg("e_j"),
          py::arg("receive_w"), py::arg("params"));
    m.def("kappa_varphi", &kappa_varphi, py::arg("e_j"), py::arg("params"));
    m.def("frame_update", &frame_update, py::arg("state"), py::arg("receive_w"),
          py::arg("activity"), py::arg("params"));
    m.def("expected_variation", &expected_variation, py::arg("receive_w"), py::arg("sigma"),
          py::arg("e_j"), py::arg("params"));
    m.def("integrate_frame", &integrate_frame, py::arg("e0_j"), py::arg("receive_w"),
          py::arg("schedule"), py::arg("params"), py::arg("dt_s") = 1e-3);

    // -------------------------------------------------------- controller
    py::class_<ControllerConfig>(m, "ControllerConfig")
        .def(py::init<>())
        .def_readwrite("penalty_weight_j2", &ControllerConfig::penalty_weight_j2)
        .def_readwrite("utility_exponent", &ControllerConfig::utility_exponent)
        .def_readwrite("neutrality_margin_j", &ControllerConfig::neutrality_margin_j)
        .def_readwrite("sigma_min", &ControllerConfig::sigma_min);

    py::class_<ControlDecision>(m, "ControlDecision")
        .def_readonly("weights", &ControlDecision::weights)
        .def_readonly("awake_ratios", &ControlDecision::awake_ratios)
        .def_readonly("deficiency_j", &ControlDecision::deficiency_j);

    py::class_<StaticOptConfig>(m, "StaticOptConfig")
        .def(py::init<>())
        .def_readwrite("alpha_samples", &StaticOptConfig::alpha_samples)
        .def_readwrite("refine_rounds", &StaticOptConfig::refine_rounds)
        .def_readwrite("fw_iterations", &StaticOptConfig::fw_iterations)
        .def_readwrite("seed", &StaticOptConfig::seed);

    py::class_<StaticOptimum>(m, "StaticOptimum")
        .def_readonly("feasible", &StaticOptimum::feasible)
        .def_readonly("binding_node", &StaticOptimum::binding_node)
        .def_readonly("r_star", &StaticOptimum::r_star)
        .def_readonly("sigma_star", &StaticOptimum::sigma_star)
        .def_readonly("u_star", &StaticOptimum::u_star)
        .def_readonly("alpha_samples", &StaticOptimum::alpha_samples);

    py::class_<BoundReport>(m, "BoundReport")
        .def_readonly("u_star", &BoundReport::u_star)
        .def_readonly("drift_bound_j2", &BoundReport::drift_bound_j2)
        .def_readonly("utility_lower_bound", &BoundReport::utility_lower_bound)
        .def_readonly("deficiency_upper_bound_j", &BoundReport::deficiency_upper_bound_j);

    m.def("utility", &utility, py::arg("sigma"), py::arg("psi"));
    m.def("deficiency", &deficiency, py::arg("stored_j"), py::arg("e_max_j"));
    m.def("select_weights", &select_weights, py::arg("channel"), py::arg("deficiency_j"),
          py::arg("budget"));
    m.def("awake_ratio", &awake_ratio, py::arg("deficiency_j"), py::arg("kappa_j"),
          py::arg("config"));
    m.def("decide", &decide, py::arg("channel"), py::arg("stored_j"), py::arg("params"),
          py::arg("budget"), py::arg("config"));
    m.def("static_optimum", &static_optimum, py::arg("channel"), py::arg("params"),
          py::arg("budget"), py::arg("config"), py::arg("opt") = StaticOptConfig{});
    m.def("drift_bound", &drift_bound, py::arg("params"), py::arg("budget"),
          py::arg("channel"), py::arg("energy_grid") = 65);
    m.def("performance_bounds", &performance_bounds, py::arg("u_star"),
          py::arg("drift_bound_j2"), py::arg("config"));

    // --------------------------------------------------------- simulator
    py::enum_<BeamMode>(m, "BeamMode")
        .value("beam_splitting", BeamMode::beam_splitting)
        .value("time_sharing", BeamMode::time_sharing);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("layout", &Scenario::layout)
        .def_readwrite("radio", &Scenario::radio)
        .def_readwrite("placements", &Scenario::placements)
        .def_readwrite("energy", &Scenario::energy)
        .def_readwrite("budget", &Scenario::budget)
        .def_readwrite("controller", &Scenario::controller)
        .def_readwrite("frames", &Scenario::frames)
        .def_readwrite("seed", &Scenario::seed)
        .def_readwrite("mode", &Scenario::mode)
        .def_readwrite("initial_energy_j", &Scenario::initial_energy_j)
        .def_readwrite("warmup_fraction", &Scenario::warmup_fraction)
        .def_readwrite("csi_error_sigma", &Scenario::csi_error_sigma)
        .def("validate", &Scenario::validate)
        .def("clear_events", [](Scenario& s) { s.events.clear(); })
        .def("add_move_event",
             [](Scenario& s, long frame, int node, const NodePlacement& placement) {
                 s.events.push_back({frame, MoveNodeAction{node, placement}});
             },
             py::arg("frame"), py::arg("node"), py::arg("placement"))
        .def("add_budget_event",
             [](Scenario& s, long frame, const PowerBudget& budget) {
                 s.events.push_back({frame, SetBudgetAction{budget}});
             },
             py::arg("frame"), py::arg("budget"))
        .def("add_controller_event",
             [](Scenario& s, long frame, const ControllerConfig& config) {
                 s.events.push_back({frame, SetControllerAction{config}});
             },
             py::arg("frame"), py::arg("config"));

    py::class_<RunSummary>(m, "RunSummary")
        .def_readonly("avg_sum_utility", &RunSummary::avg_sum_utility)
        .def_readonly("avg_sum_deficiency_j", &RunSummary::avg_sum_deficiency_j)
        .def_readonly("min_energy_j", &RunSummary::min_energy_j)
        .def_readonly("min_energy_node", &RunSummary::min_energy_node)
        .def_readonly("avg_awake_ratio", &RunSummary::avg_awake_ratio)
        .def_readonly("avg_deficiency_j", &RunSummary::avg_deficiency_j);

    py::class_<TimeSeries>(m, "TimeSeries")
        .def_readonly("weights", &TimeSeries::weights)
        .def_readonly("receive_power_w", &TimeSeries::receive_power_w)
        .def_readonly("stored_energy_j", &TimeSeries::stored_energy_j)
        .def_readonly("deficiency_j", &TimeSeries::deficiency_j)
        .def_readonly("awake_ratio", &TimeSeries::awake_ratio)
        .def_readonly("activity", &TimeSeries::activity)
        .def_readonly("alive", &TimeSeries::alive)
        .def_readonly("sum_utility", &TimeSeries::sum_utility)
        .def_readonly("final_energy_j", &TimeSeries::final_energy_j)
        .def_readonly("final_alive", &TimeSeries::final_alive)
        .def_readonly("warmup_frames", &TimeSeries::warmup_frames)
        .def_readonly("summary", &TimeSeries::summary)
        .def("frame_count", &TimeSeries::frame_count)
        .def("node_count", &TimeSeries::node_count);

    m.def("run", &run, py::arg("scenario"),
          py::call_guard<py::gil_scoped_release>());

    // ----------------------------------------------------- configuration
    m.def("parse_config", [](const std::string& text) {
        const auto result = parse_config(text);
        if (!result.ok()) throw py::value_error(config_error_text(result));
        return *result.scenario;
    });
    m.def("parse_config_file", [](const std::string& path) {
        const auto result = parse_config_file(path);
        if (!result.ok()) throw py::value_error(config_error_text(result));
        return *result.scenario;
    });
    m.def("emit_config", &emit_config, py::arg("scenario"));
}
