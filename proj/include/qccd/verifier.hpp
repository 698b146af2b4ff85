/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#pragma once

#include "qccd/circuit.hpp"
#include "qccd/device_graph.hpp"
#include "qccd/schedule.hpp"
#include "qccd/types.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace qccd {

struct Violation {
  std::size_t step = 0;
  std::string kind;
  std::string detail;
};

struct VerificationStats {
  std::size_t makespan = 0;
  std::size_t totalMoves = 0;
  std::vector<std::size_t> gatesPerPz;
  /// Fraction of the makespan each zone spent running gates.
  std::vector<double> utilization;
};

struct VerificationReport {
  bool valid = true;
  std::vector<Violation> violations;
  VerificationStats stats;
  /// Placement reached by the replay.
  std::vector<EdgeId> finalPlacement;

  [[nodiscard]] bool has(const std::string& kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&kind](const Violation& v) { return v.kind == kind; });
  }
};

[[nodiscard]] inline Json toJson(const VerificationReport& report) {
  Json violations = Json::array();
  for (const auto& v : report.violations) {
    violations.push_back(
        {{"step", v.step}, {"kind", v.kind}, {"detail", v.detail}});
  }
  return {{"valid", report.valid},
          {"violations", violations},
          {"stats",
           {{"makespan", report.stats.makespan},
            {"total_moves", report.stats.totalMoves},
            {"gates_per_pz", report.stats.gatesPerPz},
            {"utilization", report.stats.utilization}}}};
}

namespace detail {

class Replay {
public:
  Replay(const Schedule& schedule, const DeviceGraph& graph,
         const Circuit& circuit, const std::vector<EdgeId>& initial)
      : s_(schedule), g_(graph), c_(circuit), where_(initial) {}

  VerificationReport run() {
    report_.stats.gatesPerPz.assign(g_.numPzs(), 0);
    report_.stats.utilization.assign(g_.numPzs(), 0.0);
    if (s_.meta.arch != g_.params() || s_.meta.pzs != g_.numPzs()) {
      flag(0, "arch_mismatch", "schedule was built for another device");
    }
    if (!checkInitial()) {
      return finish();
    }
    buildDependencies();
    started_.assign(c_.size(), std::nullopt);
    startPz_.assign(c_.size(), 0);
    completed_.assign(c_.size(), std::nullopt);
    for (std::size_t i = 0; i < s_.steps.size(); ++i) {
      replayStep(i, s_.steps[i]);
    }
    checkEnd();
    return finish();
  }

private:
  void flag(const std::size_t step, std::string kind, std::string detail) {
    report_.violations.push_back(
        Violation{step, std::move(kind), std::move(detail)});
  }

  [[nodiscard]] std::vector<std::vector<IonId>> occupancy() const {
    std::vector<std::vector<IonId>> occ(g_.numEdges());
    for (IonId ion = 0; ion < where_.size(); ++ion) {
      occ[where_[ion]].push_back(ion);
    }
    return occ;
  }

  bool checkInitial() {
    if (where_.size() < c_.numQubits()) {
      flag(0, "initial_placement", "fewer ions than qubits");
      return false;
    }
    for (const EdgeId e : where_) {
      if (e >= g_.numEdges()) {
        flag(0, "initial_placement", "edge " + std::to_string(e) + " unknown");
        return false;
      }
    }
    const auto occ = occupancy();
    for (EdgeId e = 0; e < occ.size(); ++e) {
      if (occ[e].size() > g_.edge(e).capacity) {
        flag(0, "initial_placement",
             "edge " + std::to_string(e) + " over capacity");
        return false;
      }
    }
    return true;
  }

  void buildDependencies() {
    preds_.assign(c_.size(), {});
    std::vector<std::optional<GateId>> last(c_.numQubits());
    for (const auto& gate : c_.gates()) {
      for (const Qubit q : gate.qubits) {
        if (last[q] && std::find(preds_[gate.id].begin(), preds_[gate.id].end(),
                                 *last[q]) == preds_[gate.id].end()) {
          preds_[gate.id].push_back(*last[q]);
        }
        last[q] = gate.id;
      }
    }
  }

  [[nodiscard]] bool pzBusy(const PzId p, const std::size_t t) const {
    for (GateId g = 0; g < c_.size(); ++g) {
      if (started_[g] && startPz_[g] == p && *started_[g] <= t &&
          t < *started_[g] + c_.gate(g).duration) {
        return true;
      }
    }
    return false;
  }

  /// Node shared by two edges that lets an ion pass from `a` into `b`.
  [[nodiscard]] std::optional<NodeId> passage(const EdgeId a,
                                              const EdgeId b) const {
    const Edge& ea = g_.edge(a);
    const Edge& eb = g_.edge(b);
    const bool aDirected = ea.zone != Zone::Memory;
    const bool bDirected = eb.zone != Zone::Memory;
    // leaving a zone always ends in the memory zone
    if (ea.zone == Zone::Exit && eb.zone != Zone::Memory &&
        eb.zone != Zone::Exit) {
      return std::nullopt;
    }
    for (const NodeId x : {ea.from, ea.to}) {
      if (!eb.touches(x)) {
        continue;
      }
      if (aDirected && x != ea.to) {
        continue;
      }
      if (bDirected && x != eb.from) {
        continue;
      }
      return x;
    }
    return std::nullopt;
  }

  /// Checks the edge sequence; returns false if it is not a legal route.
  bool checkShape(const std::size_t t, const Move& move) {
    const auto& edges = move.edges;
    const std::set<EdgeId> distinct(edges.begin(), edges.end());
    if (distinct.size() != edges.size()) {
      flag(t, "invalid_move", "edge repeated in a move");
      return false;
    }
    const bool cycle = move.kind == MoveKind::Cycle;
    if (cycle) {
      if (edges.size() < 3) {
        flag(t, "invalid_move", "cycle shorter than three edges");
        return false;
      }
      for (const EdgeId e : edges) {
        if (!g_.isMemory(e)) {
          flag(t, "invalid_move",
               "cycle leaves the memory zone at edge " + std::to_string(e));
          return false;
        }
      }
    }
    const std::size_t links = cycle ? edges.size() : edges.size() - 1;
    std::vector<NodeId> via;
    for (std::size_t i = 0; i < links; ++i) {
      const EdgeId a = edges[i];
      const EdgeId b = edges[(i + 1) % edges.size()];
      const auto x = passage(a, b);
      if (!x) {
        flag(t, "invalid_move",
             "no legal passage from edge " + std::to_string(a) + " to " +
                 std::to_string(b));
        return false;
      }
      via.push_back(*x);
    }
    // every edge must be crossed end to end, not entered and left at one node
    for (std::size_t i = 1; i < via.size(); ++i) {
      if (via[i] == via[i - 1]) {
        flag(t, "invalid_move", "route turns back at a node");
        return false;
      }
    }
    if (cycle && via.front() == via.back()) {
      flag(t, "invalid_move", "route turns back at a node");
      return false;
    }
    return true;
  }

  void replayStep(const std::size_t index, const TimeStepRecord& step) {
    const std::size_t t = index;
    if (step.t != index) {
      flag(t, "time", "expected t=" + std::to_string(index) + ", got " +
                          std::to_string(step.t));
    }
    // gate starts see the state at the beginning of the step
    for (const auto& [g, p] : step.gateStarts) {
      if (g >= c_.size()) {
        flag(t, "unknown_gate", "gate " + std::to_string(g));
        continue;
      }
      if (p >= g_.numPzs()) {
        flag(t, "unknown_pz", "zone " + std::to_string(p));
        continue;
      }
      if (started_[g]) {
        flag(t, "duplicate_gate", "gate " + std::to_string(g) +
                                      " started twice");
        continue;
      }
      for (const Qubit q : c_.gate(g).qubits) {
        if (where_[q] != g_.pz(p).core) {
          flag(t, "not_resident", "ion " + std::to_string(q) +
                                      " not in core of zone " +
                                      std::to_string(p));
        }
      }
      if (pzBusy(p, t)) {
        flag(t, "pz_conflict", "zone " + std::to_string(p) + " already busy");
      }
      for (const GateId u : preds_[g]) {
        if (!completed_[u] || *completed_[u] >= t) {
          flag(t, "dependency", "gate " + std::to_string(g) +
                                    " starts before gate " +
                                    std::to_string(u) + " completed");
        }
      }
      started_[g] = t;
      startPz_[g] = p;
      ++report_.stats.gatesPerPz[p];
    }

    const auto occ = occupancy();
    std::vector<bool> usedEdge(g_.numEdges(), false);
    std::vector<bool> usedNode(g_.numNodes(), false);
    std::vector<bool> moved(where_.size(), false);
    std::vector<std::pair<IonId, EdgeId>> hops;
    for (const auto& move : step.moves) {
      ++report_.stats.totalMoves;
      if (move.edges.empty()) {
        flag(t, "invalid_move", "move without edges");
        continue;
      }
      if (std::any_of(move.edges.begin(), move.edges.end(),
                      [this](const EdgeId e) { return e >= g_.numEdges(); })) {
        flag(t, "unknown_edge", "move names an unknown edge");
        continue;
      }
      const bool shapeOk = checkShape(t, move);
      std::set<NodeId> nodes;
      for (const EdgeId e : move.edges) {
        if (usedEdge[e]) {
          flag(t, "overlap", "edge " + std::to_string(e) + " in two moves");
        }
        nodes.insert(g_.edge(e).from);
        nodes.insert(g_.edge(e).to);
        const auto& pz = g_.edge(e).pz;
        if (pz && pzBusy(*pz, t)) {
          flag(t, "busy_pz", "edge " + std::to_string(e) +
                                 " belongs to busy zone " +
                                 std::to_string(*pz));
        }
      }
      for (const NodeId n : nodes) {
        if (usedNode[n]) {
          flag(t, "overlap", "node " + std::to_string(n) + " in two moves");
        }
      }
      for (const EdgeId e : move.edges) {
        usedEdge[e] = true;
      }
      for (const NodeId n : nodes) {
        usedNode[n] = true;
      }
      if (!shapeOk) {
        continue;
      }
      checkMovers(t, move, occ, moved, hops);
    }
    for (const auto& [ion, to] : hops) {
      where_[ion] = to;
    }
    const auto after = occupancy();
    for (EdgeId e = 0; e < after.size(); ++e) {
      if (after[e].size() > g_.edge(e).capacity) {
        flag(t, "capacity", "edge " + std::to_string(e) + " holds " +
                                std::to_string(after[e].size()) + " ions");
      }
    }

    for (const GateId g : step.gateCompletions) {
      if (g >= c_.size()) {
        flag(t, "unknown_gate", "gate " + std::to_string(g));
        continue;
      }
      if (!started_[g]) {
        flag(t, "completion_time", "gate " + std::to_string(g) +
                                       " completes without a start");
        continue;
      }
      if (completed_[g]) {
        flag(t, "duplicate_gate", "gate " + std::to_string(g) +
                                      " completed twice");
        continue;
      }
      if (*started_[g] + c_.gate(g).duration - 1 != t) {
        flag(t, "completion_time",
             "gate " + std::to_string(g) + " started at " +
                 std::to_string(*started_[g]) + " must complete at " +
                 std::to_string(*started_[g] + c_.gate(g).duration - 1));
      }
      completed_[g] = t;
    }
  }

  void checkMovers(const std::size_t t, const Move& move,
                   const std::vector<std::vector<IonId>>& occ,
                   std::vector<bool>& moved,
                   std::vector<std::pair<IonId, EdgeId>>& hops) {
    const auto& edges = move.edges;
    const bool cycle = move.kind == MoveKind::Cycle;
    std::set<IonId> listed;
    for (const IonId ion : move.ions) {
      if (ion >= where_.size()) {
        flag(t, "unknown_ion", "ion " + std::to_string(ion));
        return;
      }
      if (!listed.insert(ion).second || moved[ion]) {
        flag(t, "duplicate_ion", "ion " + std::to_string(ion) +
                                     " listed twice");
        return;
      }
      moved[ion] = true;
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const bool last = !cycle && i + 1 == edges.size();
      const EdgeId e = edges[i];
      std::size_t leaving = 0;
      for (const IonId ion : occ[e]) {
        if (listed.count(ion) == 0) {
          continue;
        }
        if (last) {
          flag(t, "ion_mismatch", "ion " + std::to_string(ion) +
                                      " cannot leave the end of a path");
          return;
        }
        ++leaving;
        hops.emplace_back(ion, edges[(i + 1) % edges.size()]);
      }
      if (last) {
        continue;
      }
      if (g_.edge(e).zone == Zone::Core) {
        // a core passes on exactly one chosen ion
        if (leaving != 1) {
          flag(t, "ion_mismatch", "core edge " + std::to_string(e) +
                                      " must release exactly one ion");
        }
      } else if (leaving != occ[e].size()) {
        flag(t, "ion_mismatch", "ions on edge " + std::to_string(e) +
                                    " are not all moved");
      }
    }
    for (const IonId ion : listed) {
      if (std::find(edges.begin(), edges.end(), where_[ion]) == edges.end()) {
        flag(t, "ion_mismatch", "ion " + std::to_string(ion) +
                                    " is not on its move");
      }
    }
  }

  void checkEnd() {
    const std::size_t end = s_.steps.size();
    for (GateId g = 0; g < c_.size(); ++g) {
      if (!started_[g]) {
        flag(end, "unexecuted_gate", "gate " + std::to_string(g));
      } else if (!completed_[g]) {
        flag(end, "uncompleted_gate", "gate " + std::to_string(g));
      }
    }
    if (s_.makespan != end) {
      flag(end, "makespan", "reported " + std::to_string(s_.makespan) +
                                ", replayed " + std::to_string(end));
    }
    if (s_.finalPlacement != where_) {
      flag(end, "final_placement", "reported placement differs from replay");
    }
    for (GateId g = 0; g < c_.size(); ++g) {
      if (started_[g] && startPz_[g] < g_.numPzs() && end > 0) {
        report_.stats.utilization[startPz_[g]] +=
            static_cast<double>(c_.gate(g).duration) / static_cast<double>(end);
      }
    }
  }

  VerificationReport finish() {
    report_.stats.makespan = s_.steps.size();
    report_.finalPlacement = where_;
    report_.valid = report_.violations.empty();
    return std::move(report_);
  }

  const Schedule& s_;
  const DeviceGraph& g_;
  const Circuit& c_;
  std::vector<EdgeId> where_;
  std::vector<std::vector<GateId>> preds_;
  std::vector<std::optional<std::size_t>> started_;
  std::vector<PzId> startPz_;
  std::vector<std::optional<std::size_t>> completed_;
  VerificationReport report_;
};

} // namespace detail

/**
 * Replays `schedule` from `initialPlacement` (ion i on edge
 * initialPlacement[i]) and collects every violated constraint. Never throws
 * on malformed ids; those become violations.
 */
[[nodiscard]] inline VerificationReport
verify(const Schedule& schedule, const DeviceGraph& graph,
       const Circuit& circuit, const std::vector<EdgeId>& initialPlacement) {
  return detail::Replay(schedule, graph, circuit, initialPlacement).run();
}

/// Uses the circuit and initial placement stored in the schedule.
[[nodiscard]] inline VerificationReport verify(const Schedule& schedule,
                                               const DeviceGraph& graph) {
  return verify(schedule, graph, schedule.circuit, schedule.initialPlacement);
}

enum class Mutation : std::uint8_t {
  DropMove,
  DuplicateMove,
  DropGate,
  EarlyStart,
  LateCompletion,
  DuplicateIon,
  BusyZonePath,
  ReversePath,
  WrongZone,
};

inline constexpr Mutation ALL_MUTATIONS[] = {
    Mutation::DropMove,       Mutation::DuplicateMove, Mutation::DropGate,
    Mutation::EarlyStart,     Mutation::LateCompletion, Mutation::DuplicateIon,
    Mutation::BusyZonePath,   Mutation::ReversePath,   Mutation::WrongZone,
};

[[nodiscard]] inline const char* toString(const Mutation m) {
  switch (m) {
  case Mutation::DropMove:
    return "drop_move";
  case Mutation::DuplicateMove:
    return "duplicate_move";
  case Mutation::DropGate:
    return "drop_gate";
  case Mutation::EarlyStart:
    return "early_start";
  case Mutation::LateCompletion:
    return "late_completion";
  case Mutation::DuplicateIon:
    return "duplicate_ion";
  case Mutation::BusyZonePath:
    return "busy_zone_path";
  case Mutation::ReversePath:
    return "reverse_path";
  case Mutation::WrongZone:
    return "wrong_zone";
  }
  return "?";
}

/**
 * Applies one corruption to a schedule; `pick` selects among the eligible
 * sites (modulo their count). std::nullopt if the schedule has no site for
 * this mutation.
 */
[[nodiscard]] inline std::optional<Schedule>
mutate(const Schedule& schedule, const DeviceGraph& graph, const Mutation m,
       const std::size_t pick = 0) {
  Schedule s = schedule;
  std::vector<std::pair<std::size_t, std::size_t>> sites;
  const auto choose = [&sites, pick] { return sites[pick % sites.size()]; };
  const auto moveSites = [&](auto&& pred) {
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
      for (std::size_t k = 0; k < s.steps[i].moves.size(); ++k) {
        if (pred(s.steps[i].moves[k])) {
          sites.emplace_back(i, k);
        }
      }
    }
  };
  const auto startSites = [&](auto&& pred) {
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
      for (std::size_t k = 0; k < s.steps[i].gateStarts.size(); ++k) {
        if (pred(i, s.steps[i].gateStarts[k])) {
          sites.emplace_back(i, k);
        }
      }
    }
  };
  switch (m) {
  case Mutation::DropMove: {
    moveSites([](const Move& mv) { return !mv.ions.empty(); });
    if (sites.empty()) {
      return std::nullopt;
    }
    const auto [i, k] = choose();
    s.steps[i].moves.erase(s.steps[i].moves.begin() +
                           static_cast<std::ptrdiff_t>(k));
    return s;
  }
  case Mutation::DuplicateMove: {
    moveSites([](const Move&) { return true; });
    if (sites.empty()) {
      return std::nullopt;
    }
    const auto [i, k] = choose();
    Move copy = s.steps[i].moves[k];
    copy.ions.clear();
    s.steps[i].moves.push_back(copy);
    return s;
  }
  case Mutation::DropGate: {
    startSites([](std::size_t, const auto&) { return true; });
    if (sites.empty()) {
      return std::nullopt;
    }
    const auto [i, k] = choose();
    const GateId g = s.steps[i].gateStarts[k].first;
    s.steps[i].gateStarts.erase(s.steps[i].gateStarts.begin() +
                                static_cast<std::ptrdiff_t>(k));
    for (auto& step : s.steps) {
      std::erase(step.gateCompletions, g);
    }
    return s;
  }
  case Mutation::EarlyStart: {
    startSites([](const std::size_t i, const auto&) { return i > 0; });
    if (sites.empty()) {
      return std::nullopt;
    }
    const auto [i, k] = choose();
    const auto start = s.steps[i].gateStarts[k];
    s.steps[i].gateStarts.erase(s.steps[i].gateStarts.begin() +
                                static_cast<std::ptrdiff_t>(k));
    s.steps[i - 1].gateStarts.push_back(start);
    return s;
  }
  case Mutation::LateCompletion: {
    for (std::size_t i = 0; i + 1 < s.steps.size(); ++i) {
      for (std::size_t k = 0; k < s.steps[i].gateCompletions.size(); ++k) {
        sites.emplace_back(i, k);
      }
    }
    if (sites.empty()) {
      return std::nullopt;
    }
    const auto [i, k] = choose();
    const GateId g = s.steps[i].gateCompletions[k];
    s.steps[i].gateCompletions.erase(s.steps[i].gateCompletions.begin() +
                                     static_cast<std::ptrdiff_t>(k));
    s.steps[i + 1].gateCompletions.push_back(g);
    return s;
  }
  case Mutation::DuplicateIon: {
    moveSites([](const Move& mv) { return !mv.ions.empty(); });
    if (sites.empty()) {
      return std::nullopt;
    }
    const auto [i, k] = choose();
    auto& ions = s.steps[i].moves[k].ions;
    ions.push_back(ions.front());
    return s;
  }
  case Mutation::BusyZonePath: {
    const auto& gates = s.circuit.gates();
    startSites([&](std::size_t, const auto& start) {
      return start.first < gates.size() && start.second < graph.numPzs();
    });
    if (sites.empty()) {
      return std::nullopt;
    }
    const auto [i, k] = choose();
    const PzId p = s.steps[i].gateStarts[k].second;
    const auto& zone = graph.pz(p);
    // shuttle along the exit chain of the zone while its gate runs
    std::vector<EdgeId> edges(zone.exitPath.begin(), zone.exitPath.end());
    edges.insert(edges.begin(), zone.core);
    s.steps[i].moves.push_back(Move{MoveKind::Path, edges, {}});
    return s;
  }
  case Mutation::ReversePath: {
    moveSites([&graph](const Move& mv) {
      return mv.kind == MoveKind::Path && mv.edges.size() >= 2 &&
             std::any_of(mv.edges.begin(), mv.edges.end(),
                         [&graph](const EdgeId e) {
                           return e < graph.numEdges() && !graph.isMemory(e);
                         });
    });
    if (sites.empty()) {
      return std::nullopt;
    }
    const auto [i, k] = choose();
    auto& edges = s.steps[i].moves[k].edges;
    std::reverse(edges.begin(), edges.end());
    return s;
  }
  case Mutation::WrongZone: {
    if (graph.numPzs() < 2) {
      return std::nullopt;
    }
    startSites([](std::size_t, const auto&) { return true; });
    if (sites.empty()) {
      return std::nullopt;
    }
    const auto [i, k] = choose();
    auto& p = s.steps[i].gateStarts[k].second;
    p = static_cast<PzId>((p + 1) % graph.numPzs());
    return s;
  }
  }
  return std::nullopt;
}

} // namespace qccd
