/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#pragma once

#include <cstdint>
#include <limits>

namespace qccd {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;
using IonId = std::uint32_t;
using Qubit = std::uint32_t;
using GateId = std::uint32_t;
using PzId = std::uint32_t;

/// Sentinel for an edge-to-edge pair with no admissible route.
inline constexpr std::uint32_t UNREACHABLE =
    std::numeric_limits<std::uint32_t>::max();

} // namespace qccd
