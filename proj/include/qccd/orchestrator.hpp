/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#pragma once

#include "qccd/circuit.hpp"
#include "qccd/device_graph.hpp"
#include "qccd/gate_dag.hpp"
#include "qccd/ion_state.hpp"
#include "qccd/partitioner.hpp"
#include "qccd/schedule.hpp"
#include "qccd/shuttling.hpp"
#include "qccd/types.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qccd {

enum class Policy : std::uint8_t {
  /// Candidates are all front-layer gates of a zone.
  Dag,
  /// Candidate is the earliest unexecuted gate of a zone in input order.
  Naive,
};

[[nodiscard]] inline const char* toString(const Policy policy) {
  return policy == Policy::Dag ? "dag" : "naive";
}

[[nodiscard]] inline Policy policyFromString(const std::string& name) {
  if (name == "dag") {
    return Policy::Dag;
  }
  if (name == "naive") {
    return Policy::Naive;
  }
  throw std::invalid_argument("unknown policy '" + name + "'");
}

struct CompileConfig {
  std::uint64_t seed = 0;
  Policy policy = Policy::Dag;
  /// Move ions of waiting candidates toward their zone while it is busy.
  bool prefetch = true;
  /// Steps without any progress before giving up; default 10 x |E|.
  std::optional<std::size_t> stallLimit;
  /// Start state; default is the seeded full placement.
  std::optional<IonState> initialState;
  /// Qubit homes; default is the seeded KL partition.
  std::optional<Partition> homes;
  /// Longest rotation cycle; default 6 x max(v, h).
  std::optional<std::size_t> maxCycleLength;
};

class DeadlockError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/**
 * Candidate whose ions are closest to the core of `pz` in total, lowest id on
 * ties. std::nullopt for an empty candidate set. Qubit q is carried by ion q.
 */
[[nodiscard]] inline std::optional<GateId>
selectBestGate(const DeviceGraph& graph, const IonState& state,
               const Circuit& circuit, const PzId pz,
               const std::span<const GateId> candidates) {
  std::optional<GateId> best;
  std::uint64_t bestCost = std::numeric_limits<std::uint64_t>::max();
  for (const GateId g : candidates) {
    std::uint64_t cost = 0;
    for (const Qubit q : circuit.gate(g).qubits) {
      cost += distanceToPz(graph, state, q, pz);
    }
    if (cost < bestCost || (cost == bestCost && best && g < *best)) {
      bestCost = cost;
      best = g;
    }
  }
  return best;
}

namespace detail {

struct ActiveGate {
  GateId gate = 0;
  std::size_t end = 0;
};

inline std::string stateDump(const DeviceGraph& graph, const IonState& state,
                             const std::size_t t,
                             const std::vector<std::optional<GateId>>& selected) {
  std::ostringstream out;
  out << "no progress by step " << t << "\n";
  for (PzId p = 0; p < selected.size(); ++p) {
    out << "zone " << p << ": selected ";
    if (selected[p]) {
      out << *selected[p];
    } else {
      out << "-";
    }
    out << ", core {";
    for (const IonId i : state.ionsOn(graph.pz(p).core)) {
      out << ' ' << i;
    }
    out << " }\n";
  }
  out << "placement:";
  for (IonId i = 0; i < state.numIons(); ++i) {
    out << ' ' << i << '@' << state.edgeOf(i);
  }
  return out.str();
}

} // namespace detail

/**
 * Schedules `circuit` on `graph`. Outer loop: recompute the front layer, pick
 * one gate per zone. Inner loop: start gates whose ions are resident, run one
 * shuttling step, complete gates; repeat until some gate completes.
 *
 * Throws std::invalid_argument for an unusable configuration and
 * DeadlockError when nothing progresses for the configured number of steps,
 * or when ions keep moving for ten times that long without any gate running.
 */
[[nodiscard]] inline Schedule compile(const Circuit& circuit,
                                      const DeviceGraph& graph,
                                      const CompileConfig& config = {}) {
  const std::size_t numPzs = graph.numPzs();
  if (numPzs == 0) {
    throw std::invalid_argument("device has no processing zone");
  }
  if (graph.numMemoryEdges() < circuit.numQubits()) {
    throw std::invalid_argument("more qubits than memory edges");
  }
  IonState state = config.initialState
                       ? *config.initialState
                       : initialPlacement(graph, config.seed);
  if (state.numEdges() != graph.numEdges() ||
      state.numIons() < circuit.numQubits() || !state.consistent(graph)) {
    throw std::invalid_argument("initial state does not fit the device");
  }
  const Partition homes = config.homes
                              ? *config.homes
                              : partition(circuit, numPzs, config.seed);
  if (homes.assignment.size() != circuit.numQubits()) {
    throw std::invalid_argument("partition does not cover the circuit");
  }
  for (const PzId p : homes.assignment) {
    if (p >= numPzs) {
      throw std::invalid_argument("partition names an unknown zone");
    }
  }

  Schedule schedule;
  schedule.meta = ScheduleMeta{graph.params(), numPzs, config.seed,
                               toString(config.policy), circuit.gateTimes()};
  schedule.circuit = circuit;
  schedule.initialPlacement = state.placement();

  const auto& params = graph.params();
  StepContext ctx;
  ctx.maxCycleLength =
      config.maxCycleLength.value_or(6 * std::max(params.v, params.h));
  const std::size_t stallLimit =
      config.stallLimit.value_or(10 * graph.numEdges());

  GateDag dag(circuit);
  std::vector<std::optional<PzId>> zoneCache(circuit.size());
  const auto zoneOf = [&](const GateId g) {
    if (!zoneCache[g]) {
      const Gate& gate = circuit.gate(g);
      zoneCache[g] = gate.isTwoQubit() ? assignGatePz(gate, homes, state, graph)
                                       : homes.of(gate.qubits[0]);
    }
    return *zoneCache[g];
  };
  std::vector<bool> finished(circuit.size(), false);
  std::vector<std::optional<detail::ActiveGate>> active(numPzs);
  std::size_t t = 0;
  std::size_t idle = 0;
  // moves alone are not progress forever: catches ions shuffling in circles
  std::size_t sinceGate = 0;

  while (!dag.empty()) {
    const auto front = dag.frontLayer();
    for (const GateId g : front) {
      zoneOf(g);
    }
    std::vector<std::vector<GateId>> candidates(numPzs);
    if (config.policy == Policy::Dag) {
      for (const GateId g : front) {
        candidates[zoneOf(g)].push_back(g);
      }
    } else {
      for (PzId p = 0; p < numPzs; ++p) {
        for (GateId g = 0; g < circuit.size(); ++g) {
          if (!finished[g] && zoneOf(g) == p) {
            if (dag.inFrontLayer(g)) {
              candidates[p].push_back(g);
            }
            break;
          }
        }
      }
    }
    std::vector<std::optional<GateId>> selected(numPzs);
    for (PzId p = 0; p < numPzs; ++p) {
      selected[p] = active[p] ? std::optional<GateId>{active[p]->gate}
                              : selectBestGate(graph, state, circuit, p,
                                               candidates[p]);
    }

    std::vector<GateId> done;
    while (done.empty()) {
      TimeStepRecord record;
      record.t = t;
      for (PzId p = 0; p < numPzs; ++p) {
        if (active[p] || !selected[p]) {
          continue;
        }
        const Gate& gate = circuit.gate(*selected[p]);
        const bool resident = std::all_of(
            gate.qubits.begin(), gate.qubits.end(), [&](const Qubit q) {
              return state.edgeOf(q) == graph.pz(p).core;
            });
        if (resident) {
          active[p] = detail::ActiveGate{gate.id, t + gate.duration - 1};
          record.gateStarts.emplace_back(gate.id, p);
        }
      }

      ctx.busy.assign(numPzs, false);
      ctx.pinned.assign(numPzs, {});
      ctx.evictee.assign(numPzs, std::nullopt);
      std::vector<bool> neededElsewhere(state.numIons(), false);
      for (PzId p = 0; p < numPzs; ++p) {
        ctx.busy[p] = active[p].has_value();
        if (selected[p]) {
          for (const Qubit q : circuit.gate(*selected[p]).qubits) {
            ctx.pinned[p].push_back(q);
            neededElsewhere[q] = true;
          }
        }
      }
      const auto isPinned = [&](const PzId p, const IonId ion) {
        return std::find(ctx.pinned[p].begin(), ctx.pinned[p].end(), ion) !=
               ctx.pinned[p].end();
      };
      const auto isCandidateIon = [&](const PzId p, const IonId ion) {
        for (const GateId g : candidates[p]) {
          const auto& qs = circuit.gate(g).qubits;
          if (std::find(qs.begin(), qs.end(), ion) != qs.end()) {
            return true;
          }
        }
        return false;
      };
      const auto nearerFirst = [&](const PzId p) {
        return [&, p](const IonId a, const IonId b) {
          const auto da = distanceToPz(graph, state, a, p);
          const auto db = distanceToPz(graph, state, b, p);
          return da != db ? da < db : a < b;
        };
      };

      PriorityQueue queue(numPzs);
      for (PzId p = 0; p < numPzs; ++p) {
        const auto& zone = graph.pz(p);
        const auto& core = state.ionsOn(zone.core);
        std::optional<IonId> evictee;
        int evicteeRank = 3;
        for (const IonId ion : core) {
          if (isPinned(p, ion)) {
            continue;
          }
          const int rank = neededElsewhere[ion] ? 0
                           : !isCandidateIon(p, ion) ? 1
                                                     : 2;
          if (rank < evicteeRank || (rank == evicteeRank && ion < *evictee)) {
            evictee = ion;
            evicteeRank = rank;
          }
        }
        ctx.evictee[p] = evictee;
        if (ctx.busy[p]) {
          continue;
        }
        if (std::any_of(zone.exitPath.begin(), zone.exitPath.end(),
                        [&](const EdgeId e) { return !state.empty(e); })) {
          queue.push(p, Request{RequestKind::Drain, p, 0, true});
        }
        if (!selected[p]) {
          continue;
        }
        std::vector<IonId> outside;
        for (const Qubit q : circuit.gate(*selected[p]).qubits) {
          if (state.edgeOf(q) != zone.core) {
            outside.push_back(q);
          }
        }
        std::sort(outside.begin(), outside.end(), nearerFirst(p));
        const bool full = core.size() >= zone.capacity;
        const bool needSlot = outside.size() > zone.capacity - core.size();
        if (needSlot && evictee && full) {
          queue.push(p, Request{RequestKind::Evict, p, *evictee, true});
        }
        for (const IonId ion : outside) {
          queue.push(p, Request{RequestKind::Toward, p, ion, true});
        }
        if (needSlot && evictee && !full) {
          queue.push(p, Request{RequestKind::Evict, p, *evictee, false});
        }
      }
      if (config.prefetch && config.policy == Policy::Dag) {
        for (PzId p = 0; p < numPzs; ++p) {
          std::vector<IonId> waiting;
          for (const GateId g : candidates[p]) {
            if (selected[p] && g == *selected[p]) {
              continue;
            }
            for (const Qubit q : circuit.gate(g).qubits) {
              if (state.edgeOf(q) != graph.pz(p).core) {
                waiting.push_back(q);
              }
            }
          }
          std::sort(waiting.begin(), waiting.end(), nearerFirst(p));
          for (const IonId ion : waiting) {
            queue.push(p, Request{RequestKind::Toward, p, ion, false}, 1);
          }
        }
      }

      record.moves = planTimestep(graph, state, queue, ctx);
      executeMoves(graph, state, record.moves);

      bool running = false;
      for (PzId p = 0; p < numPzs; ++p) {
        if (active[p] && active[p]->end == t) {
          done.push_back(active[p]->gate);
          record.gateCompletions.push_back(active[p]->gate);
          finished[active[p]->gate] = true;
          active[p].reset();
        }
        running = running || active[p].has_value();
      }
      const bool progress = !record.moves.empty() ||
                            !record.gateStarts.empty() || !done.empty() ||
                            running;
      idle = progress ? 0 : idle + 1;
      const bool gateActivity =
          !record.gateStarts.empty() || !done.empty() || running;
      sinceGate = gateActivity ? 0 : sinceGate + 1;
      schedule.steps.push_back(std::move(record));
      ++t;
      if (idle >= stallLimit || sinceGate >= 10 * stallLimit) {
        throw DeadlockError(detail::stateDump(graph, state, t, selected));
      }
    }
    dag.remove(done);
  }
  schedule.makespan = t;
  schedule.finalPlacement = state.placement();
  return schedule;
}

/// compile() with the input-order candidate rule.
[[nodiscard]] inline Schedule naiveCompile(const Circuit& circuit,
                                           const DeviceGraph& graph,
                                           CompileConfig config = {}) {
  config.policy = Policy::Naive;
  return compile(circuit, graph, config);
}

} // namespace qccd
