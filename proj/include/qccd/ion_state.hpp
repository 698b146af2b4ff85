/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#pragma once

#include "qccd/device_graph.hpp"
#include "qccd/types.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qccd {

/**
 * Occupancy of the device: which ion sits on which edge. Ions `0..q-1` carry
 * circuit qubits `0..q-1`; any further ions are fillers.
 */
class IonState {
public:
  IonState() = default;
  IonState(const std::size_t numEdges, const std::size_t numIons)
      : placement_(numIons, UNPLACED), occupancy_(numEdges) {}

  [[nodiscard]] std::size_t numIons() const { return placement_.size(); }
  [[nodiscard]] std::size_t numEdges() const { return occupancy_.size(); }

  [[nodiscard]] EdgeId edgeOf(const IonId ion) const {
    return placement_.at(ion);
  }
  [[nodiscard]] const std::vector<IonId>& ionsOn(const EdgeId e) const {
    return occupancy_.at(e);
  }
  [[nodiscard]] bool empty(const EdgeId e) const {
    return occupancy_.at(e).empty();
  }
  [[nodiscard]] const std::vector<EdgeId>& placement() const {
    return placement_;
  }

  void place(const IonId ion, const EdgeId e) {
    if (placement_.at(ion) != UNPLACED) {
      throw std::logic_error("ion " + std::to_string(ion) + " already placed");
    }
    placement_[ion] = e;
    occupancy_.at(e).push_back(ion);
  }

  void relocate(const IonId ion, const EdgeId to) {
    auto& from = occupancy_.at(placement_.at(ion));
    from.erase(std::find(from.begin(), from.end(), ion));
    placement_[ion] = to;
    occupancy_.at(to).push_back(ion);
  }

  /// Placement and occupancy agree and no edge exceeds its capacity.
  [[nodiscard]] bool consistent(const DeviceGraph& graph) const {
    if (occupancy_.size() != graph.numEdges()) {
      return false;
    }
    std::size_t seen = 0;
    for (EdgeId e = 0; e < occupancy_.size(); ++e) {
      if (occupancy_[e].size() > graph.edge(e).capacity) {
        return false;
      }
      for (const IonId ion : occupancy_[e]) {
        if (ion >= placement_.size() || placement_[ion] != e) {
          return false;
        }
        ++seen;
      }
    }
    return seen == placement_.size();
  }

  bool operator==(const IonState& other) const {
    return placement_ == other.placement_;
  }

  static constexpr EdgeId UNPLACED = UNREACHABLE;

private:
  std::vector<EdgeId> placement_;
  std::vector<std::vector<IonId>> occupancy_;
};

/// Fills every memory edge with one ion; the edge order is a seeded shuffle.
[[nodiscard]] inline IonState initialPlacement(const DeviceGraph& graph,
                                               const std::uint64_t seed) {
  std::vector<EdgeId> order(graph.numMemoryEdges());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  IonState state(graph.numEdges(), order.size());
  for (IonId ion = 0; ion < order.size(); ++ion) {
    state.place(ion, order[ion]);
  }
  return state;
}

} // namespace qccd
