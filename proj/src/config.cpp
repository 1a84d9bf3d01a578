// SPDX-License-Identifier: Apache-2.0

#include "wpsn/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wpsn {

std::string ConfigError::to_string() const {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!key.empty()) out += key + ": ";
    out += message;
    return out;
}

std::string format_full(double value) {
    char buf[40];
    if (value == std::floor(value) && std::abs(value) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%.0f", value);
        return buf;
    }
    // Shortest representation that still parses back to the same double.
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) return buf;
    }
    return buf;
}

namespace {

constexpr double kDegPerRad = 180.0 / kPi;

struct Line {
    int number;
    std::string section;
    std::string key;
    std::string value;
};

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text) { tokenize(text); }

    ParseResult parse();

private:
    void tokenize(std::string_view text);
    void error(const Line& ln, std::string key, std::string message) {
        errors_.push_back({ln.number, std::move(key), std::move(message)});
    }

    bool number(const Line& ln, const std::string& token, double& out) {
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size() || errno == ERANGE) {
            error(ln, ln.section + "." + ln.key, "not a number: '" + token + "'");
            return false;
        }
        out = v;
        return true;
    }
    bool number(const Line& ln, double& out) { return number(ln, ln.value, out); }

    bool integer(const Line& ln, long& out) {
        long v = 0;
        auto [p, ec] = std::from_chars(ln.value.data(), ln.value.data() + ln.value.size(), v);
        if (ec != std::errc{} || p != ln.value.data() + ln.value.size()) {
            error(ln, ln.section + "." + ln.key, "not an integer: '" + ln.value + "'");
            return false;
        }
        out = v;
        return true;
    }

    // Applies "value must satisfy pred" with a uniform message.
    void require(const Line& ln, bool ok, const std::string& what) {
        if (!ok) error(ln, ln.section + "." + ln.key, what);
    }

    void handle_array(const Line& ln, Scenario& s);
    void handle_nodes(const Line& ln, Scenario& s);
    void handle_budget(const Line& ln, Scenario& s);
    void handle_energy(const Line& ln, Scenario& s);
    void handle_controller(const Line& ln, Scenario& s);
    void handle_sim(const Line& ln, Scenario& s);
    void handle_events(const Line& ln, Scenario& s);

    std::vector<Line> lines_;
    std::vector<ConfigError> errors_;

    // Layout inputs are collected first; the layout is built afterwards.
    ArrayKind array_kind_ = ArrayKind::linear;
    bool have_kind_ = false;
    long n_antennas_ = 0;
    double spacing_ = 0.0;
    double ring_radius_ = 0.0;

    struct RawEvent {
        int line;
        long frame;
        std::vector<std::string> args;
    };
    std::vector<RawEvent> raw_events_;
};

void Parser::tokenize(std::string_view text) {
    int number = 0;
    std::string section;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        ++number;
        std::string line{text.substr(pos, nl - pos)};
        pos = nl + 1;

        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                errors_.push_back({number, "", "malformed section header '" + line + "'"});
                continue;
            }
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            static const char* known[] = {"array", "nodes",  "budget", "energy",
                                          "controller", "sim", "events"};
            if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
                    return section == k;
                }) == std::end(known)) {
                errors_.push_back({number, section, "unknown section"});
                section.clear();
            }
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            errors_.push_back({number, "", "expected 'key = value', got '" + line + "'"});
            continue;
        }
        if (section.empty()) {
            errors_.push_back({number, "", "key outside any section"});
            continue;
        }
        lines_.push_back({number, section, trim(std::string_view(line).substr(0, eq)),
                          trim(std::string_view(line).substr(eq + 1))});
    }
    if (number == 0) {
        errors_.push_back({0, "", "empty configuration"});
    }
}

void Parser::handle_array(const Line& ln, Scenario& s) {
    double v = 0.0;
    if (ln.key == "kind") {
        have_kind_ = true;
        if (ln.value == "linear") {
            array_kind_ = ArrayKind::linear;
        } else if (ln.value == "circular") {
            array_kind_ = ArrayKind::circular;
        } else {
            error(ln, "array.kind", "must be 'linear' or 'circular'");
        }
    } else if (ln.key == "antennas") {
        long n = 0;
        if (integer(ln, n)) {
            require(ln, n >= 1, "must be at least 1");
            n_antennas_ = n;
        }
    } else if (ln.key == "spacing_m") {
        if (number(ln, v)) {
            require(ln, v > 0.0, "must be positive");
            spacing_ = v;
        }
    } else if (ln.key == "ring_radius_m") {
        if (number(ln, v)) {
            require(ln, v > 0.0, "must be positive");
            ring_radius_ = v;
        }
    } else if (ln.key == "wavelength_m") {
        if (number(ln, v)) {
            require(ln, v > 0.0, "must be positive");
            s.radio.wavelength_m = v;
        }
    } else if (ln.key == "tx_gain") {
        if (number(ln, v)) {
            require(ln, v > 0.0, "must be positive");
            s.radio.tx_element_gain = v;
        }
    } else if (ln.key == "rx_gain") {
        if (number(ln, v)) {
            require(ln, v > 0.0, "must be positive");
            s.radio.rx_gain = v;
        }
    } else {
        error(ln, "array." + ln.key, "unknown key");
    }
}

void Parser::handle_nodes(const Line& ln, Scenario& s) {
    if (ln.key != "node") {
        error(ln, "nodes." + ln.key, "unknown key (expected repeated 'node' entries)");
        return;
    }
    const auto tokens = split_ws(ln.value);
    if (tokens.size() != 2) {
        error(ln, "nodes.node", "expected '<radius_m> <azimuth_deg>'");
        return;
    }
    double radius = 0.0, azimuth_deg = 0.0;
    if (!number(ln, tokens[0], radius) || !number(ln, tokens[1], azimuth_deg)) return;
    if (!(radius > 0.0)) {
        error(ln, "nodes.node", "radius must be positive");
        return;
    }
    s.placements.push_back({radius, azimuth_deg / kDegPerRad, kPi / 2.0});
}

void Parser::handle_budget(const Line& ln, Scenario& s) {
    double v = 0.0;
    if (ln.key == "p_ant_w") {
        if (number(ln, v)) {
            require(ln, v > 0.0, "must be positive");
            s.budget.p_ant_w = v;
        }
    } else if (ln.key == "p_tot_w") {
        if (number(ln, v)) {
            require(ln, v > 0.0, "must be positive");
            s.budget.p_tot_w = v;
        }
    } else {
        error(ln, "budget." + ln.key, "unknown key");
    }
}

void Parser::handle_energy(const Line& ln, Scenario& s) {
    EnergyParams& e = s.energy;
    double v = 0.0;
    const auto positive = [&](double& field) {
        if (number(ln, v)) {
            require(ln, v > 0.0, "must be positive");
            field = v;
        }
    };
    const auto nonnegative = [&](double& field) {
        if (number(ln, v)) {
            require(ln, v >= 0.0, "must be nonnegative");
            field = v;
        }
    };

    if (ln.key == "capacitance_f") {
        positive(e.cap.capacitance_f);
    } else if (ln.key == "leak_resistance_ohm") {
        positive(e.cap.leak_resistance_ohm);
    } else if (ln.key == "e_max_j") {
        positive(e.cap.e_max_j);
    } else if (ln.key == "e_min_j") {
        nonnegative(e.cap.e_min_j);
    } else if (ln.key == "eta") {
        if (number(ln, v)) {
            require(ln, v > 0.0 && v <= 1.0, "must lie in (0, 1]");
            e.eta = v;
        }
    } else if (ln.key == "revive_threshold_j") {
        nonnegative(e.revive_threshold_j);
    } else if (ln.key == "t_frame_s") {
        positive(e.timing.t_frame_s);
    } else if (ln.key == "t_es_s") {
        positive(e.timing.t_es_s);
    } else if (ln.key == "training_slots") {
        long n = 0;
        if (integer(ln, n)) {
            require(ln, n >= 0, "must be nonnegative");
            e.timing.training_slots = static_cast<int>(n);
        }
    } else if (ln.key == "training_slot_s") {
        nonnegative(e.timing.training_slot_s);
    } else if (ln.key == "t_rx_s") {
        nonnegative(e.loads[Mode::rx].duration_s);
    } else if (ln.key == "t_act_s") {
        nonnegative(e.loads[Mode::act].duration_s);
    } else if (ln.key == "t_tx_s") {
        nonnegative(e.loads[Mode::tx].duration_s);
    } else if (ln.key == "idle_resistance_ohm") {
        positive(e.loads[Mode::idle].resistance_ohm);
    } else if (ln.key == "act_resistance_ohm") {
        positive(e.loads[Mode::act].resistance_ohm);
    } else if (ln.key == "rx_resistance_ohm") {
        positive(e.loads[Mode::rx].resistance_ohm);
    } else if (ln.key == "tx_resistance_ohm") {
        positive(e.loads[Mode::tx].resistance_ohm);
    } else if (ln.key == "idle_current_a") {
        nonnegative(e.loads[Mode::idle].current_a);
    } else if (ln.key == "act_current_a") {
        nonnegative(e.loads[Mode::act].current_a);
    } else if (ln.key == "rx_current_a") {
        nonnegative(e.loads[Mode::rx].current_a);
    } else if (ln.key == "tx_current_a") {
        nonnegative(e.loads[Mode::tx].current_a);
    } else {
        error(ln, "energy." + ln.key, "unknown key");
    }
}

void Parser::handle_controller(const Line& ln, Scenario& s) {
    ControllerConfig& c = s.controller;
    double v = 0.0;
    if (ln.key == "penalty_weight_j2") {
        if (number(ln, v)) {
            require(ln, v > 0.0, "must be positive");
            c.penalty_weight_j2 = v;
        }
    } else if (ln.key == "utility_exponent") {
        if (number(ln, v)) {
            require(ln, v < 1.0, "must be below 1");
            c.utility_exponent = v;
        }
    } else if (ln.key == "neutrality_margin_j") {
        if (number(ln, v)) {
            require(ln, v >= 0.0, "must be nonnegative");
            c.neutrality_margin_j = v;
        }
    } else if (ln.key == "sigma_min") {
        if (number(ln, v)) {
            require(ln, v >= 0.0 && v <= 1.0, "must lie in [0, 1]");
            c.sigma_min = v;
        }
    } else {
        error(ln, "controller." + ln.key, "unknown key");
    }
}

void Parser::handle_sim(const Line& ln, Scenario& s) {
    double v = 0.0;
    if (ln.key == "frames") {
        long n = 0;
        if (integer(ln, n)) {
            require(ln, n >= 0, "must be nonnegative");
            s.frames = n;
        }
    } else if (ln.key == "seed") {
        std::uint64_t u = 0;
        auto [p, ec] = std::from_chars(ln.value.data(), ln.value.data() + ln.value.size(), u);
        if (ec != std::errc{} || p != ln.value.data() + ln.value.size()) {
            error(ln, "sim.seed", "not an unsigned integer: '" + ln.value + "'");
        } else {
            s.seed = u;
        }
    } else if (ln.key == "mode") {
        if (ln.value == "bs") {
            s.mode = BeamMode::beam_splitting;
        } else if (ln.value == "ts") {
            s.mode = BeamMode::time_sharing;
        } else {
            error(ln, "sim.mode", "must be 'bs' or 'ts'");
        }
    } else if (ln.key == "initial_energy_j") {
        if (number(ln, v)) {
            require(ln, v >= 0.0, "must be nonnegative");
            s.initial_energy_j = v;
        }
    } else if (ln.key == "warmup_fraction") {
        if (number(ln, v)) {
            require(ln, v >= 0.0 && v < 1.0, "must lie in [0, 1)");
            s.warmup_fraction = v;
        }
    } else if (ln.key == "csi_error_sigma") {
        if (number(ln, v)) {
            require(ln, v >= 0.0, "must be nonnegative");
            s.csi_error_sigma = v;
        }
    } else {
        error(ln, "sim." + ln.key, "unknown key");
    }
}

void Parser::handle_events(const Line& ln, Scenario&) {
    if (ln.key != "event") {
        error(ln, "events." + ln.key, "unknown key (expected repeated 'event' entries)");
        return;
    }
    auto tokens = split_ws(ln.value);
    if (tokens.size() < 2) {
        error(ln, "events.event", "expected '<frame> <action> ...'");
        return;
    }
    long frame = 0;
    auto [p, ec] = std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), frame);
    if (ec != std::errc{} || p != tokens[0].data() + tokens[0].size() || frame < 0) {
        error(ln, "events.event", "bad frame index '" + tokens[0] + "'");
        return;
    }
    raw_events_.push_back({ln.number, frame, {tokens.begin() + 1, tokens.end()}});
}

ParseResult Parser::parse() {
    ParseResult result;
    Scenario s;
    s.energy = EnergyParams::defaults();

    for (const Line& ln : lines_) {
        if (ln.section == "array") {
            handle_array(ln, s);
        } else if (ln.section == "nodes") {
            handle_nodes(ln, s);
        } else if (ln.section == "budget") {
            handle_budget(ln, s);
        } else if (ln.section == "energy") {
            handle_energy(ln, s);
        } else if (ln.section == "controller") {
            handle_controller(ln, s);
        } else if (ln.section == "sim") {
            handle_sim(ln, s);
        } else if (ln.section == "events") {
            handle_events(ln, s);
        }
    }

    // Array assembly.
    if (!have_kind_) {
        errors_.push_back({0, "array.kind", "missing (must be 'linear' or 'circular')"});
    }
    if (n_antennas_ < 1) {
        errors_.push_back({0, "array.antennas", "missing or invalid"});
    }
    if (have_kind_ && n_antennas_ >= 1) {
        const double extent = array_kind_ == ArrayKind::linear ? spacing_ : ring_radius_;
        const char* key =
            array_kind_ == ArrayKind::linear ? "array.spacing_m" : "array.ring_radius_m";
        if (!(extent > 0.0)) {
            errors_.push_back({0, key, "missing for this array kind"});
        } else {
            s.layout = build_layout(array_kind_, static_cast<int>(n_antennas_), extent);
        }
    }
    if (s.placements.empty()) {
        errors_.push_back({0, "nodes.node", "at least one node is required"});
    }

    // Awake idle time is whatever the frame leaves over.
    const double awake = s.energy.loads[Mode::rx].duration_s +
                         s.energy.loads[Mode::act].duration_s +
                         s.energy.loads[Mode::tx].duration_s;
    if (awake > s.energy.timing.t_frame_s + 1e-12) {
        errors_.push_back({0, "energy.t_rx_s",
                           "rx + act + tx durations exceed the frame length"});
    } else {
        s.energy.loads[Mode::idle].duration_s = s.energy.timing.t_frame_s - awake;
    }

    // Events, now that the node count is known.
    for (const RawEvent& ev : raw_events_) {
        const Line pseudo{ev.line, "events", "event", ""};
        ScenarioEvent event;
        event.frame = ev.frame;
        const auto& a = ev.args;
        const auto num_at = [&](std::size_t i, double& out) {
            return number(pseudo, a[i], out);
        };
        if (a[0] == "move_node" && a.size() == 4) {
            double node = 0, radius = 0, az = 0;
            if (num_at(1, node) && num_at(2, radius) && num_at(3, az)) {
                const int idx = static_cast<int>(node) - 1;
                if (idx < 0 || idx >= static_cast<int>(s.placements.size()) ||
                    node != std::floor(node)) {
                    error(pseudo, "events.event",
                          "move_node: unknown node '" + a[1] + "'");
                } else if (!(radius > 0.0)) {
                    error(pseudo, "events.event", "move_node: radius must be positive");
                } else {
                    event.action = MoveNodeAction{idx, {radius, az / kDegPerRad, kPi / 2.0}};
                    s.events.push_back(event);
                }
            }
        } else if (a[0] == "set_budget" && a.size() == 3) {
            double ant = 0, tot = 0;
            if (num_at(1, ant) && num_at(2, tot)) {
                if (!(ant > 0.0) || !(tot > 0.0)) {
                    error(pseudo, "events.event", "set_budget: powers must be positive");
                } else {
                    event.action = SetBudgetAction{{ant, tot}};
                    s.events.push_back(event);
                }
            }
        } else if (a[0] == "set_controller" && a.size() == 4) {
            double lambda = 0, psi = 0, margin = 0;
            if (num_at(1, lambda) && num_at(2, psi) && num_at(3, margin)) {
                if (!(lambda > 0.0) || psi >= 1.0 || margin < 0.0) {
                    error(pseudo, "events.event", "set_controller: parameters out of range");
                } else {
                    ControllerConfig cc = s.controller;
                    cc.penalty_weight_j2 = lambda;
                    cc.utility_exponent = psi;
                    cc.neutrality_margin_j = margin;
                    event.action = SetControllerAction{cc};
                    s.events.push_back(event);
                }
            }
        } else {
            error(pseudo, "events.event",
                  "unknown action or wrong argument count: '" + a[0] + "'");
        }
    }
    std::stable_sort(s.events.begin(), s.events.end(),
                     [](const ScenarioEvent& x, const ScenarioEvent& y) {
                         return x.frame < y.frame;
                     });

    if (errors_.empty()) {
        try {
            s.validate();
        } catch (const std::exception& ex) {
            errors_.push_back({0, "", ex.what()});
        }
    }

    result.errors = std::move(errors_);
    if (result.errors.empty()) result.scenario = std::move(s);
    return result;
}

}  // namespace

ParseResult parse_config(std::string_view text) {
    return Parser(text).parse();
}

ParseResult parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.errors.push_back({0, "", "cannot open '" + path + "'"});
        return r;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string emit_config(const Scenario& s) {
    std::ostringstream out;
    const auto num = [](double v) { return format_full(v); };

    out << "[array]\n";
    out << "kind = " << (s.layout.kind == ArrayKind::linear ? "linear" : "circular") << "\n";
    out << "antennas = " << s.layout.size() << "\n";
    if (s.layout.kind == ArrayKind::linear) {
        out << "spacing_m = " << num(s.layout.element_spacing_m) << "\n";
    } else {
        out << "ring_radius_m = " << num(s.layout.ring_radius_m) << "\n";
    }
    out << "wavelength_m = " << num(s.radio.wavelength_m) << "\n";
    out << "tx_gain = " << num(s.radio.tx_element_gain) << "\n";
    out << "rx_gain = " << num(s.radio.rx_gain) << "\n";

    out << "\n[nodes]\n";
    for (const NodePlacement& node : s.placements) {
        out << "node = " << num(node.radius_m) << " " << num(node.azimuth_rad * kDegPerRad)
            << "\n";
    }

    out << "\n[budget]\n";
    out << "p_ant_w = " << num(s.budget.p_ant_w) << "\n";
    out << "p_tot_w = " << num(s.budget.p_tot_w) << "\n";

    const EnergyParams& e = s.energy;
    out << "\n[energy]\n";
    out << "capacitance_f = " << num(e.cap.capacitance_f) << "\n";
    out << "leak_resistance_ohm = " << num(e.cap.leak_resistance_ohm) << "\n";
    out << "e_max_j = " << num(e.cap.e_max_j) << "\n";
    out << "e_min_j = " << num(e.cap.e_min_j) << "\n";
    out << "eta = " << num(e.eta) << "\n";
    out << "revive_threshold_j = " << num(e.revive_threshold_j) << "\n";
    out << "t_frame_s = " << num(e.timing.t_frame_s) << "\n";
    out << "t_es_s = " << num(e.timing.t_es_s) << "\n";
    out << "training_slots = " << e.timing.training_slots << "\n";
    out << "training_slot_s = " << num(e.timing.training_slot_s) << "\n";
    out << "t_rx_s = " << num(e.loads[Mode::rx].duration_s) << "\n";
    out << "t_act_s = " << num(e.loads[Mode::act].duration_s) << "\n";
    out << "t_tx_s = " << num(e.loads[Mode::tx].duration_s) << "\n";
    out << "idle_resistance_ohm = " << num(e.loads[Mode::idle].resistance_ohm) << "\n";
    out << "act_resistance_ohm = " << num(e.loads[Mode::act].resistance_ohm) << "\n";
    out << "rx_resistance_ohm = " << num(e.loads[Mode::rx].resistance_ohm) << "\n";
    out << "tx_resistance_ohm = " << num(e.loads[Mode::tx].resistance_ohm) << "\n";
    out << "idle_current_a = " << num(e.loads[Mode::idle].current_a) << "\n";
    out << "act_current_a = " << num(e.loads[Mode::act].current_a) << "\n";
    out << "rx_current_a = " << num(e.loads[Mode::rx].current_a) << "\n";
    out << "tx_current_a = " << num(e.loads[Mode::tx].current_a) << "\n";

    const ControllerConfig& c = s.controller;
    out << "\n[controller]\n";
    out << "penalty_weight_j2 = " << num(c.penalty_weight_j2) << "\n";
    out << "utility_exponent = " << num(c.utility_exponent) << "\n";
    out << "neutrality_margin_j = " << num(c.neutrality_margin_j) << "\n";
    out << "sigma_min = " << num(c.sigma_min) << "\n";

    out << "\n[sim]\n";
    out << "frames = " << s.frames << "\n";
    out << "seed = " << s.seed << "\n";
    out << "mode = " << (s.mode == BeamMode::beam_splitting ? "bs" : "ts") << "\n";
    if (s.initial_energy_j >= 0.0) {
        out << "initial_energy_j = " << num(s.initial_energy_j) << "\n";
    }
    out << "warmup_fraction = " << num(s.warmup_fraction) << "\n";
    out << "csi_error_sigma = " << num(s.csi_error_sigma) << "\n";

    if (!s.events.empty()) {
        out << "\n[events]\n";
        for (const ScenarioEvent& event : s.events) {
            out << "event = " << event.frame << " ";
            if (const auto* move = std::get_if<MoveNodeAction>(&event.action)) {
                out << "move_node " << (move->node + 1) << " " << num(move->placement.radius_m)
                    << " " << num(move->placement.azimuth_rad * kDegPerRad);
            } else if (const auto* setb = std::get_if<SetBudgetAction>(&event.action)) {
                out << "set_budget " << num(setb->budget.p_ant_w) << " "
                    << num(setb->budget.p_tot_w);
            } else if (const auto* setc = std::get_if<SetControllerAction>(&event.action)) {
                out << "set_controller " << num(setc->config.penalty_weight_j2) << " "
                    << num(setc->config.utility_exponent) << " "
                    << num(setc->config.neutrality_margin_j);
            }
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace wpsn
