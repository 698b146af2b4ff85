/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#pragma once

#include "qccd/circuit.hpp"
#include "qccd/device_graph.hpp"
#include "qccd/ion_state.hpp"
#include "qccd/types.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qccd {

/// Qubits as nodes, two-qubit gate counts as symmetric edge weights.
class InteractionGraph {
public:
  InteractionGraph() = default;
  explicit InteractionGraph(const std::size_t numQubits)
      : numQubits_(numQubits) {}

  void addInteraction(const Qubit a, const Qubit b,
                      const std::uint32_t weight = 1) {
    if (a == b) {
      throw std::invalid_argument("interaction graph has no self-loops");
    }
    if (a >= numQubits_ || b >= numQubits_) {
      throw std::out_of_range("qubit out of range");
    }
    weights_[key(a, b)] += weight;
  }

  [[nodiscard]] std::uint32_t weight(const Qubit a, const Qubit b) const {
    if (a == b) {
      return 0;
    }
    const auto it = weights_.find(key(a, b));
    return it == weights_.end() ? 0 : it->second;
  }

  [[nodiscard]] std::size_t numQubits() const { return numQubits_; }
  /// Keys are ordered pairs (min, max).
  [[nodiscard]] const std::map<std::pair<Qubit, Qubit>, std::uint32_t>&
  edges() const {
    return weights_;
  }

private:
  static std::pair<Qubit, Qubit> key(const Qubit a, const Qubit b) {
    return {std::min(a, b), std::max(a, b)};
  }

  std::size_t numQubits_ = 0;
  std::map<std::pair<Qubit, Qubit>, std::uint32_t> weights_;
};

[[nodiscard]] inline InteractionGraph interactionGraph(const Circuit& circuit) {
  InteractionGraph graph(circuit.numQubits());
  for (const auto& g : circuit.gates()) {
    if (g.isTwoQubit()) {
      graph.addInteraction(g.qubits[0], g.qubits[1]);
    }
  }
  return graph;
}

[[nodiscard]] inline std::uint64_t cutWeight(const InteractionGraph& graph,
                                             const std::span<const Qubit> a,
                                             const std::span<const Qubit> b) {
  std::uint64_t cut = 0;
  for (const Qubit x : a) {
    for (const Qubit y : b) {
      cut += graph.weight(x, y);
    }
  }
  return cut;
}

struct Bisection {
  std::vector<Qubit> a;
  std::vector<Qubit> b;
  /// Cut of the seeded starting split, kept for diagnostics.
  std::uint64_t initialCut = 0;
  std::uint64_t cut = 0;
};

/**
 * Kernighan-Lin bisection of `subset`. The start is a seeded random split
 * with `sizeA` nodes in the first half (default: the larger half of a
 * balanced split). Passes of greedy pair swaps repeat while the best prefix
 * of a pass has a positive total gain. Both halves are returned sorted.
 */
[[nodiscard]] inline Bisection
klBisect(const InteractionGraph& graph, const std::span<const Qubit> subset,
         const std::uint64_t seed,
         const std::optional<std::size_t> sizeA = std::nullopt) {
  const std::size_t count = subset.size();
  if (count < 2) {
    throw std::invalid_argument("bisection needs at least two nodes");
  }
  const std::size_t na = sizeA.value_or((count + 1) / 2);
  if (na < 1 || na >= count) {
    throw std::invalid_argument("bisection sizes must both be non-zero");
  }
  std::vector<std::int64_t> w(count * count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const auto x = static_cast<std::int64_t>(graph.weight(subset[i], subset[j]));
      w[i * count + j] = x;
      w[j * count + i] = x;
    }
  }
  const auto weight = [&w, count](const std::size_t i, const std::size_t j) {
    return w[i * count + j];
  };

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> inA(count, false);
  for (std::size_t k = 0; k < na; ++k) {
    inA[order[k]] = true;
  }
  const auto currentCut = [&] {
    std::int64_t cut = 0;
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = i + 1; j < count; ++j) {
        if (inA[i] != inA[j]) {
          cut += weight(i, j);
        }
      }
    }
    return cut;
  };
  const auto startCut = currentCut();

  while (true) {
    std::vector<std::int64_t> d(count, 0);
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < count; ++j) {
        if (i != j) {
          d[i] += inA[i] != inA[j] ? weight(i, j) : -weight(i, j);
        }
      }
    }
    std::vector<bool> locked(count, false);
    std::vector<std::pair<std::size_t, std::size_t>> swaps;
    std::vector<std::int64_t> gains;
    const std::size_t rounds = std::min(na, count - na);
    for (std::size_t round = 0; round < rounds; ++round) {
      std::int64_t best = std::numeric_limits<std::int64_t>::min();
      std::pair<std::size_t, std::size_t> pick{0, 0};
      for (std::size_t i = 0; i < count; ++i) {
        if (locked[i] || !inA[i]) {
          continue;
        }
        for (std::size_t j = 0; j < count; ++j) {
          if (locked[j] || inA[j]) {
            continue;
          }
          const auto gain = d[i] + d[j] - 2 * weight(i, j);
          if (gain > best) {
            best = gain;
            pick = {i, j};
          }
        }
      }
      const auto [a, b] = pick;
      locked[a] = true;
      locked[b] = true;
      swaps.push_back(pick);
      gains.push_back(best);
      for (std::size_t k = 0; k < count; ++k) {
        if (locked[k]) {
          continue;
        }
        // a moves to B and b moves to A
        if (inA[k]) {
          d[k] += 2 * weight(k, a) - 2 * weight(k, b);
        } else {
          d[k] += 2 * weight(k, b) - 2 * weight(k, a);
        }
      }
    }
    std::int64_t total = 0;
    std::int64_t bestTotal = 0;
    std::size_t bestPrefix = 0;
    for (std::size_t k = 0; k < gains.size(); ++k) {
      total += gains[k];
      if (total > bestTotal) {
        bestTotal = total;
        bestPrefix = k + 1;
      }
    }
    if (bestPrefix == 0) {
      break;
    }
    for (std::size_t k = 0; k < bestPrefix; ++k) {
      inA[swaps[k].first] = false;
      inA[swaps[k].second] = true;
    }
  }

  Bisection result;
  for (std::size_t i = 0; i < count; ++i) {
    (inA[i] ? result.a : result.b).push_back(subset[i]);
  }
  std::sort(result.a.begin(), result.a.end());
  std::sort(result.b.begin(), result.b.end());
  result.initialCut = static_cast<std::uint64_t>(startCut);
  result.cut = static_cast<std::uint64_t>(currentCut());
  return result;
}

/// Home processing zone of every qubit.
struct Partition {
  std::vector<PzId> assignment;
  std::vector<std::size_t> partSizes;
  std::size_t numPzs = 0;

  [[nodiscard]] PzId of(const Qubit q) const { return assignment.at(q); }
  [[nodiscard]] std::vector<Qubit> members(const PzId pz) const {
    std::vector<Qubit> result;
    for (Qubit q = 0; q < assignment.size(); ++q) {
      if (assignment[q] == pz) {
        result.push_back(q);
      }
    }
    return result;
  }
};

/**
 * Repeated KL bisection of the interaction graph. Every part carries the
 * number of processing zones it still has to serve; the part serving the most
 * zones (then the largest, then the lowest index) is split next, with sizes
 * proportional to the zones each half will serve. The first half keeps the
 * part index, the second half gets the next free index. Qubits that no gate
 * touches are spread over the smallest parts afterwards.
 */
[[nodiscard]] inline Partition partition(const Circuit& circuit,
                                         const std::size_t numPzs,
                                         const std::uint64_t seed) {
  if (numPzs < 1) {
    throw std::invalid_argument("need at least one processing zone");
  }
  const auto graph = interactionGraph(circuit);
  std::vector<bool> used(circuit.numQubits(), false);
  for (const auto& g : circuit.gates()) {
    for (const Qubit q : g.qubits) {
      used[q] = true;
    }
  }
  struct Part {
    std::vector<Qubit> qubits;
    std::size_t zones;
  };
  std::vector<Part> parts;
  {
    Part all{{}, numPzs};
    for (Qubit q = 0; q < circuit.numQubits(); ++q) {
      if (used[q]) {
        all.qubits.push_back(q);
      }
    }
    if (!all.qubits.empty()) {
      parts.push_back(std::move(all));
    }
  }
  std::uint64_t splits = 0;
  while (true) {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts[i].zones < 2 || parts[i].qubits.size() < 2) {
        continue;
      }
      if (!pick || parts[i].zones > parts[*pick].zones ||
          (parts[i].zones == parts[*pick].zones &&
           parts[i].qubits.size() > parts[*pick].qubits.size())) {
        pick = i;
      }
    }
    if (!pick) {
      break;
    }
    const std::size_t zones = parts[*pick].zones;
    const std::size_t zonesA = (zones + 1) / 2;
    const std::size_t size = parts[*pick].qubits.size();
    std::size_t sizeA = (size * zonesA + zones - 1) / zones;
    sizeA = std::clamp<std::size_t>(sizeA, 1, size - 1);
    auto halves = klBisect(graph, parts[*pick].qubits, seed + splits++, sizeA);
    parts[*pick] = Part{std::move(halves.a), zonesA};
    parts.push_back(Part{std::move(halves.b), zones - zonesA});
  }

  const std::size_t wanted = std::min(numPzs, circuit.numQubits());
  while (parts.size() < wanted) {
    parts.push_back(Part{{}, 1});
  }
  for (Qubit q = 0; q < circuit.numQubits(); ++q) {
    if (used[q]) {
      continue;
    }
    std::size_t smallest = 0;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      if (parts[i].qubits.size() < parts[smallest].qubits.size()) {
        smallest = i;
      }
    }
    parts[smallest].qubits.push_back(q);
  }

  Partition result;
  result.numPzs = numPzs;
  result.assignment.assign(circuit.numQubits(), 0);
  result.partSizes.assign(numPzs, 0);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (const Qubit q : parts[i].qubits) {
      result.assignment[q] = static_cast<PzId>(i);
    }
    result.partSizes[i] = parts[i].qubits.size();
  }
  return result;
}

/// Distance from an ion's edge to the core of a processing zone.
[[nodiscard]] inline std::uint32_t distanceToPz(const DeviceGraph& graph,
                                                const IonState& state,
                                                const IonId ion,
                                                const PzId pz) {
  return graph.distance(state.edgeOf(ion), graph.pz(pz).core);
}

/**
 * Processing zone for a two-qubit gate: the shared home zone when both qubits
 * have one, otherwise the zone with the smallest summed distance of both ions
 * to its core (lowest id on ties). Qubit q is carried by ion q.
 */
[[nodiscard]] inline PzId assignGatePz(const Gate& gate,
                                       const Partition& partition,
                                       const IonState& state,
                                       const DeviceGraph& graph) {
  if (!gate.isTwoQubit()) {
    throw std::invalid_argument("dynamic assignment is for two-qubit gates");
  }
  const Qubit a = gate.qubits[0];
  const Qubit b = gate.qubits[1];
  if (partition.of(a) == partition.of(b)) {
    return partition.of(a);
  }
  PzId best = 0;
  std::uint64_t bestCost = std::numeric_limits<std::uint64_t>::max();
  for (PzId p = 0; p < graph.numPzs(); ++p) {
    const std::uint64_t cost =
        std::uint64_t{distanceToPz(graph, state, a, p)} +
        distanceToPz(graph, state, b, p);
    if (cost < bestCost) {
      bestCost = cost;
      best = p;
    }
  }
  return best;
}

} // namespace qccd
