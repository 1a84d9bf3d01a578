// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration files: a sectioned key-value format with full
// validation. Parsing reports every error found, not just the first.
// Angles are degrees in files and radians everywhere else.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wpsn/sim.hpp"

namespace wpsn {

struct ConfigError {
    int line = 0;            // 1-based; 0 for file-level errors
    std::string key;         // "section.key" when known
    std::string message;

    std::string to_string() const;
};

struct ParseResult {
    std::optional<Scenario> scenario;
    std::vector<ConfigError> errors;

    bool ok() const { return scenario.has_value(); }
};

ParseResult parse_config(std::string_view text);
ParseResult parse_config_file(const std::string& path);

// Canonical text form; parse(emit(s)) reproduces s (angles up to the
// degree/radian conversion rounding).
std::string emit_config(const Scenario& scenario);

// Shortest decimal that round-trips the exact double value.
std::string format_full(double value);

}  // namespace wpsn
