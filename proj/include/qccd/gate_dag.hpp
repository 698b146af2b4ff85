/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#pragma once

#include "qccd/circuit.hpp"
#include "qccd/types.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qccd {

/**
 * Dependency DAG of a circuit. Gate u precedes gate v iff u is the latest
 * earlier gate acting on one of v's qubits. Nodes are removed as gates finish;
 * the front layer holds every remaining gate without remaining predecessors.
 */
class GateDag {
public:
  GateDag() = default;
  explicit GateDag(const Circuit& circuit)
      : succs_(circuit.size()), preds_(circuit.size()),
        pending_(circuit.size(), 0), removed_(circuit.size(), false),
        remaining_(circuit.size()) {
    std::vector<std::optional<GateId>> last(circuit.numQubits());
    for (const auto& g : circuit.gates()) {
      for (const Qubit q : g.qubits) {
        if (const auto prev = last[q]) {
          auto& out = succs_[*prev];
          if (std::find(out.begin(), out.end(), g.id) == out.end()) {
            out.push_back(g.id);
            preds_[g.id].push_back(*prev);
            ++pending_[g.id];
          }
        }
        last[q] = g.id;
      }
    }
    for (GateId g = 0; g < circuit.size(); ++g) {
      if (pending_[g] == 0) {
        front_.insert(g);
      }
    }
  }

  [[nodiscard]] bool empty() const { return remaining_ == 0; }
  [[nodiscard]] std::size_t remaining() const { return remaining_; }
  [[nodiscard]] std::size_t size() const { return succs_.size(); }

  /// Remaining gates without unfinished predecessors, ascending.
  [[nodiscard]] std::vector<GateId> frontLayer() const {
    return {front_.begin(), front_.end()};
  }
  [[nodiscard]] bool inFrontLayer(const GateId g) const {
    return front_.contains(g);
  }
  [[nodiscard]] bool contains(const GateId g) const {
    return g < removed_.size() && !removed_[g];
  }

  [[nodiscard]] std::span<const GateId> successors(const GateId g) const {
    return succs_.at(g);
  }
  [[nodiscard]] std::span<const GateId> predecessors(const GateId g) const {
    return preds_.at(g);
  }

  /// All dependency pairs (u, v) of the original circuit.
  [[nodiscard]] std::vector<std::pair<GateId, GateId>> edges() const {
    std::vector<std::pair<GateId, GateId>> result;
    for (GateId u = 0; u < succs_.size(); ++u) {
      for (const GateId v : succs_[u]) {
        result.emplace_back(u, v);
      }
    }
    return result;
  }

  /// Removes finished gates. Throws std::logic_error if any of them still has
  /// an unfinished predecessor or was already removed.
  void remove(const std::span<const GateId> gates) {
    for (const GateId g : gates) {
      if (!front_.contains(g)) {
        throw std::logic_error("gate " + std::to_string(g) +
                               " is not in the front layer");
      }
    }
    for (const GateId g : gates) {
      front_.erase(g);
      removed_[g] = true;
      --remaining_;
      for (const GateId s : succs_[g]) {
        if (--pending_[s] == 0) {
          front_.insert(s);
        }
      }
    }
  }

private:
  std::vector<std::vector<GateId>> succs_;
  std::vector<std::vector<GateId>> preds_;
  std::vector<std::size_t> pending_;
  std::vector<bool> removed_;
  std::set<GateId> front_;
  std::size_t remaining_ = 0;
};

[[nodiscard]] inline GateDag buildDag(const Circuit& circuit) {
  return GateDag(circuit);
}

/// Longest dependency chain weighted by gate duration; a makespan lower bound.
[[nodiscard]] inline std::size_t criticalPathLength(const Circuit& circuit) {
  const GateDag dag(circuit);
  std::vector<std::size_t> finish(circuit.size(), 0);
  std::size_t best = 0;
  for (const auto& g : circuit.gates()) {
    std::size_t start = 0;
    for (const GateId p : dag.predecessors(g.id)) {
      start = std::max(start, finish[p]);
    }
    finish[g.id] = start + g.duration;
    best = std::max(best, finish[g.id]);
  }
  return best;
}

} // namespace qccd
