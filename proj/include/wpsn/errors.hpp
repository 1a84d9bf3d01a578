// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

namespace wpsn {

// Node geometry makes a computation singular (zero range, co-located
// nodes, ill-conditioned time-sharing power matrix).
struct DegenerateGeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A channel row carries no usable gain.
struct DegenerateChannelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative numeric routine failed to converge.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Controller configuration outside the supported parameter domain.
struct UnsupportedConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace wpsn
