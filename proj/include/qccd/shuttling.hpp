/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#pragma once

#include "qccd/device_graph.hpp"
#include "qccd/ion_state.hpp"
#include "qccd/types.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qccd {

enum class MoveKind : std::uint8_t { Cycle, Path };

[[nodiscard]] inline const char* toString(const MoveKind kind) {
  return kind == MoveKind::Cycle ? "cycle" : "path";
}

/**
 * One shuttling operation of a time step. Every listed ion advances by one
 * edge along `edges`; for a cycle the last edge wraps around to the first.
 * Ions on the final edge of a path stay where they are.
 */
struct Move {
  MoveKind kind = MoveKind::Path;
  std::vector<EdgeId> edges;
  std::vector<IonId> ions;

  bool operator==(const Move&) const = default;
};

/// Every node touched by the move's edges, sorted and unique.
[[nodiscard]] inline std::vector<NodeId> touchedNodes(const DeviceGraph& graph,
                                                      const Move& move) {
  std::vector<NodeId> nodes;
  for (const EdgeId e : move.edges) {
    nodes.push_back(graph.edge(e).from);
    nodes.push_back(graph.edge(e).to);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

/**
 * Next edge on a shortest route from the ion toward the core of `pz`
 * (lowest edge id on ties). std::nullopt when the ion already sits in that
 * core.
 */
[[nodiscard]] inline std::optional<EdgeId>
desiredNextEdge(const DeviceGraph& graph, const IonState& state,
                const IonId ion, const PzId pz) {
  const EdgeId cur = state.edgeOf(ion);
  const EdgeId core = graph.pz(pz).core;
  if (cur == core) {
    return std::nullopt;
  }
  const auto d = graph.distance(cur, core);
  if (d == UNREACHABLE) {
    throw std::logic_error("processing zone unreachable from edge " +
                           std::to_string(cur));
  }
  for (const EdgeId next : graph.successors(cur)) {
    if (graph.distance(next, core) + 1 == d) {
      return next;
    }
  }
  throw std::logic_error("no shortest-path successor");
}

/**
 * Shortest closed loop of memory edges that starts on the ion's edge and
 * continues over `firstStep`, lexicographically smallest edge sequence on
 * ties. Returns std::nullopt when the shortest loop is longer than
 * `maxLength`. Throws std::invalid_argument if the two edges are not adjacent
 * memory edges.
 */
[[nodiscard]] inline std::optional<Move>
findCycle(const DeviceGraph& graph, const IonState& state, const IonId ion,
          const EdgeId firstStep,
          const std::size_t maxLength = static_cast<std::size_t>(-1)) {
  const EdgeId start = state.edgeOf(ion);
  if (!graph.isMemory(start) || !graph.isMemory(firstStep) ||
      start == firstStep) {
    throw std::invalid_argument("cycles only run over distinct memory edges");
  }
  const Edge& e0 = graph.edge(start);
  const Edge& e1 = graph.edge(firstStep);
  NodeId pivot = 0;
  if (e1.touches(e0.to)) {
    pivot = e0.to;
  } else if (e1.touches(e0.from)) {
    pivot = e0.from;
  } else {
    throw std::invalid_argument("first step is not adjacent to the ion's edge");
  }
  const NodeId home = e0.other(pivot);
  const NodeId resume = e1.other(pivot);

  // distances to `home` over memory edges, never entering the pivot
  std::vector<std::uint32_t> dist(graph.numNodes(), UNREACHABLE);
  std::deque<NodeId> queue{home};
  dist[home] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (const EdgeId f : graph.incidentMemory(u)) {
      const NodeId w = graph.edge(f).other(u);
      if (w != pivot && dist[w] == UNREACHABLE) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  if (dist[resume] == UNREACHABLE) {
    throw std::runtime_error("no cycle through edge " +
                             std::to_string(firstStep));
  }
  if (dist[resume] + 2 > maxLength) {
    return std::nullopt;
  }
  Move move{MoveKind::Cycle, {start, firstStep}, {}};
  NodeId cur = resume;
  while (cur != home) {
    for (const EdgeId f : graph.incidentMemory(cur)) {
      const NodeId w = graph.edge(f).other(cur);
      if (w != pivot && dist[w] + 1 == dist[cur]) {
        move.edges.push_back(f);
        cur = w;
        break;
      }
    }
  }
  for (const EdgeId e : move.edges) {
    for (const IonId i : state.ionsOn(e)) {
      move.ions.push_back(i);
    }
  }
  return move;
}

/// Node and edge exclusions for route searches that extend a partial move.
struct Exclusions {
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;

  [[nodiscard]] bool hasNode(const NodeId n) const {
    return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
  }
  [[nodiscard]] bool hasEdge(const EdgeId e) const {
    return std::find(edges.begin(), edges.end(), e) != edges.end();
  }
};

/**
 * BFS from a junction over memory edges to the nearest free memory edge
 * (lowest id on ties). Returns the edge chain leading from the junction to
 * and including that edge, or std::nullopt when the memory zone is full.
 */
[[nodiscard]] inline std::optional<std::vector<EdgeId>>
nearestFreeMemoryRoute(const DeviceGraph& graph, const IonState& state,
                       const NodeId junction, const Exclusions& excluded = {}) {
  std::vector<std::uint32_t> dist(graph.numNodes(), UNREACHABLE);
  std::vector<EdgeId> parent(graph.numNodes(), 0);
  std::deque<NodeId> queue{junction};
  dist[junction] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (const EdgeId f : graph.incidentMemory(u)) {
      const NodeId w = graph.edge(f).other(u);
      if (dist[w] == UNREACHABLE && !excluded.hasEdge(f) &&
          !excluded.hasNode(w)) {
        dist[w] = dist[u] + 1;
        parent[w] = f;
        queue.push_back(w);
      }
    }
  }
  std::optional<std::pair<std::uint32_t, EdgeId>> best;
  NodeId bestNear = junction;
  for (EdgeId f = 0; f < graph.numMemoryEdges(); ++f) {
    if (!state.empty(f) || excluded.hasEdge(f)) {
      continue;
    }
    const Edge& edge = graph.edge(f);
    if (excluded.hasNode(edge.from) || excluded.hasNode(edge.to)) {
      continue;
    }
    const NodeId near = dist[edge.from] <= dist[edge.to] ? edge.from : edge.to;
    if (dist[near] == UNREACHABLE) {
      continue;
    }
    const std::pair<std::uint32_t, EdgeId> key{dist[near] + 1, f};
    if (!best || key < *best) {
      best = key;
      bestNear = near;
    }
  }
  if (!best) {
    return std::nullopt;
  }
  std::vector<EdgeId> route{best->second};
  for (NodeId cur = bestNear; cur != junction;) {
    const EdgeId f = parent[cur];
    route.push_back(f);
    cur = graph.edge(f).other(cur);
  }
  std::reverse(route.begin(), route.end());
  return route;
}

namespace detail {

/// Ions that leave `edges[i]` for `edges[i + 1]`; a core contributes only
/// `coreIon`.
inline std::vector<IonId> pathMovers(const DeviceGraph& graph,
                                     const IonState& state,
                                     const std::span<const EdgeId> edges,
                                     const std::optional<IonId> coreIon) {
  std::vector<IonId> ions;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (graph.edge(edges[i]).zone == Zone::Core) {
      if (coreIon) {
        ions.push_back(*coreIon);
      }
    } else {
      for (const IonId ion : state.ionsOn(edges[i])) {
        ions.push_back(ion);
      }
    }
  }
  return ions;
}

/**
 * Extends `path` (whose last edge is `route.front()`, already holding a mover)
 * along the chain `route`: stops right after the front-most occupied chain
 * edge, or continues into the memory zone when the chain is full up to its
 * end.
 */
inline bool extendThroughChain(const DeviceGraph& graph, const IonState& state,
                               std::vector<EdgeId>& path,
                               const std::vector<EdgeId>& route,
                               const NodeId junction,
                               const Exclusions& excluded) {
  std::size_t front = 0;
  for (std::size_t k = 1; k < route.size(); ++k) {
    if (!state.empty(route[k])) {
      front = k;
    }
  }
  if (front + 1 < route.size()) {
    path.insert(path.end(), route.begin() + 1,
                route.begin() + static_cast<std::ptrdiff_t>(front) + 2);
    return true;
  }
  const auto tail = nearestFreeMemoryRoute(graph, state, junction, excluded);
  if (!tail) {
    return false;
  }
  path.insert(path.end(), route.begin() + 1, route.end());
  path.insert(path.end(), tail->begin(), tail->end());
  return true;
}

inline Exclusions excludeMemoryPart(const DeviceGraph& graph,
                                    const std::span<const EdgeId> edges,
                                    const NodeId junction) {
  Exclusions ex;
  for (const EdgeId e : edges) {
    if (graph.isMemory(e)) {
      ex.edges.push_back(e);
      for (const NodeId n : {graph.edge(e).from, graph.edge(e).to}) {
        if (n != junction) {
          ex.nodes.push_back(n);
        }
      }
    }
  }
  return ex;
}

} // namespace detail

/**
 * Path out of a processing zone starting at `from`, which is either the core
 * (then `coreIon` names the leaving ion) or an occupied exit edge. The path
 * ends right after the front-most ion of the exit chain; if that ion sits on
 * the last exit edge, it continues from the boundary junction to the nearest
 * free memory edge. std::nullopt when no free memory edge is reachable.
 */
[[nodiscard]] inline std::optional<Move>
planExitPath(const DeviceGraph& graph, const IonState& state, const PzId pz,
             const EdgeId from, const std::optional<IonId> coreIon = std::nullopt,
             const Exclusions& excluded = {}) {
  const auto& zone = graph.pz(pz);
  const Edge& start = graph.edge(from);
  if (start.pz != pz || (start.zone != Zone::Core && start.zone != Zone::Exit)) {
    throw std::invalid_argument("exit paths start at the core or exit chain");
  }
  std::vector<EdgeId> route{from};
  if (start.zone == Zone::Core) {
    if (!coreIon || state.edgeOf(*coreIon) != from) {
      throw std::invalid_argument("exiting ion is not in the core");
    }
    route.insert(route.end(), zone.exitPath.begin(), zone.exitPath.end());
  } else {
    if (state.empty(from)) {
      throw std::invalid_argument("exit path starts on an empty edge");
    }
    route.insert(route.end(),
                 zone.exitPath.begin() +
                     static_cast<std::ptrdiff_t>(start.chainIndex) + 1,
                 zone.exitPath.end());
  }
  std::vector<EdgeId> path{from};
  if (!detail::extendThroughChain(graph, state, path, route, zone.junction,
                                  excluded)) {
    return std::nullopt;
  }
  return Move{MoveKind::Path, path,
              detail::pathMovers(graph, state, path, coreIon)};
}

/**
 * Path from the ion's edge (a memory edge at the boundary junction, or an
 * entry edge) along the entry chain of `pz`. Ions ahead are pushed forward;
 * the head only enters the core if it has a free slot, or if `evictee` leaves
 * the core in the same step (the path then continues through the exit chain).
 * std::nullopt when the move is blocked.
 */
[[nodiscard]] inline std::optional<Move>
planEntryPath(const DeviceGraph& graph, const IonState& state, const IonId ion,
              const PzId pz, const std::optional<IonId> evictee = std::nullopt) {
  const auto& zone = graph.pz(pz);
  const EdgeId cur = state.edgeOf(ion);
  const Edge& here = graph.edge(cur);
  std::vector<EdgeId> route{cur};
  if (here.zone == Zone::Memory) {
    if (!here.touches(zone.junction)) {
      throw std::invalid_argument("ion is not at the entry of the zone");
    }
    route.insert(route.end(), zone.entryPath.begin(), zone.entryPath.end());
  } else if (here.zone == Zone::Entry && here.pz == pz) {
    route.insert(route.end(),
                 zone.entryPath.begin() +
                     static_cast<std::ptrdiff_t>(here.chainIndex) + 1,
                 zone.entryPath.end());
  } else {
    throw std::invalid_argument("ion is not on the way into the zone");
  }
  std::size_t front = 0;
  for (std::size_t k = 1; k < route.size(); ++k) {
    if (!state.empty(route[k])) {
      front = k;
    }
  }
  std::vector<EdgeId> path;
  if (front + 1 < route.size()) {
    path.assign(route.begin(),
                route.begin() + static_cast<std::ptrdiff_t>(front) + 2);
    return Move{MoveKind::Path, path,
                detail::pathMovers(graph, state, path, std::nullopt)};
  }
  path = route;
  path.push_back(zone.core);
  if (state.ionsOn(zone.core).size() < zone.capacity) {
    return Move{MoveKind::Path, path,
                detail::pathMovers(graph, state, path, std::nullopt)};
  }
  if (!evictee || state.edgeOf(*evictee) != zone.core) {
    return std::nullopt;
  }
  std::vector<EdgeId> exitRoute{zone.core};
  exitRoute.insert(exitRoute.end(), zone.exitPath.begin(), zone.exitPath.end());
  if (!detail::extendThroughChain(
          graph, state, path, exitRoute, zone.junction,
          detail::excludeMemoryPart(graph, path, zone.junction))) {
    return std::nullopt;
  }
  return Move{MoveKind::Path, path,
              detail::pathMovers(graph, state, path, evictee)};
}

/**
 * Evicts `ion` from the core of `pz`. With `pullEntry`, the ions queued at the
 * end of the entry chain move up in the same step and the head takes the
 * freed slot.
 */
[[nodiscard]] inline std::optional<Move>
planEviction(const DeviceGraph& graph, const IonState& state, const PzId pz,
             const IonId ion, const bool pullEntry) {
  const auto& zone = graph.pz(pz);
  if (!pullEntry || state.empty(zone.entryPath.back())) {
    return planExitPath(graph, state, pz, zone.core, ion);
  }
  std::size_t first = zone.entryPath.size() - 1;
  while (first > 0 && !state.empty(zone.entryPath[first - 1])) {
    --first;
  }
  return planEntryPath(graph, state, state.ionsOn(zone.entryPath[first]).front(),
                       pz, ion);
}

/// Moves the whole exit chain of `pz` forward, starting at its rear-most ion.
[[nodiscard]] inline std::optional<Move>
planDrain(const DeviceGraph& graph, const IonState& state, const PzId pz) {
  for (const EdgeId e : graph.pz(pz).exitPath) {
    if (!state.empty(e)) {
      return planExitPath(graph, state, pz, e);
    }
  }
  return std::nullopt;
}

enum class RequestKind : std::uint8_t {
  /// Advance an ion toward the core of a zone.
  Toward,
  /// Take an ion out of the core it sits in.
  Evict,
  /// Keep the exit chain of a zone moving.
  Drain,
};

struct Request {
  RequestKind kind = RequestKind::Toward;
  PzId pz = 0;
  IonId ion = 0;
  /// Toward: whether the ion may step onto the entry chain.
  /// Evict: whether the entry queue moves up into the freed slot.
  bool enter = true;
};

/**
 * Per-zone request lists. The global order visits tiers in ascending order;
 * within a tier, zones are interleaved round-robin starting at zone 0.
 */
class PriorityQueue {
public:
  explicit PriorityQueue(const std::size_t numPzs) : lists_(numPzs) {}

  /// Returns false (and drops the request) if the ion is already queued.
  bool push(const PzId pz, const Request& request, const unsigned tier = 0) {
    if (request.kind != RequestKind::Drain) {
      for (const auto& list : lists_) {
        for (const auto& [t, r] : list) {
          if (r.kind != RequestKind::Drain && r.ion == request.ion) {
            return false;
          }
        }
      }
    }
    lists_.at(pz).emplace_back(tier, request);
    return true;
  }

  [[nodiscard]] std::vector<Request> forPz(const PzId pz) const {
    std::vector<Request> out;
    for (const auto& [t, r] : lists_.at(pz)) {
      out.push_back(r);
    }
    return out;
  }

  [[nodiscard]] std::vector<Request> ordered() const {
    unsigned maxTier = 0;
    for (const auto& list : lists_) {
      for (const auto& [t, r] : list) {
        maxTier = std::max(maxTier, t);
      }
    }
    std::vector<Request> out;
    for (unsigned tier = 0; tier <= maxTier; ++tier) {
      std::vector<std::vector<Request>> columns(lists_.size());
      std::size_t depth = 0;
      for (std::size_t p = 0; p < lists_.size(); ++p) {
        for (const auto& [t, r] : lists_[p]) {
          if (t == tier) {
            columns[p].push_back(r);
          }
        }
        depth = std::max(depth, columns[p].size());
      }
      for (std::size_t k = 0; k < depth; ++k) {
        for (const auto& column : columns) {
          if (k < column.size()) {
            out.push_back(column[k]);
          }
        }
      }
    }
    return out;
  }

  [[nodiscard]] bool empty() const {
    return std::all_of(lists_.begin(), lists_.end(),
                       [](const auto& l) { return l.empty(); });
  }

private:
  std::vector<std::vector<std::pair<unsigned, Request>>> lists_;
};

struct StepContext {
  /// Zones with a running gate; no move may touch their edges.
  std::vector<bool> busy;
  /// Per zone, ions that must stay in its core.
  std::vector<std::vector<IonId>> pinned;
  /// Per zone, preferred ion to push out of a full core.
  std::vector<std::optional<IonId>> evictee;
  std::size_t maxCycleLength = static_cast<std::size_t>(-1);
};

namespace detail {

inline std::optional<IonId> pickEvictee(const DeviceGraph& graph,
                                        const IonState& state, const PzId pz,
                                        const StepContext& ctx) {
  if (pz < ctx.evictee.size() && ctx.evictee[pz]) {
    return ctx.evictee[pz];
  }
  std::optional<IonId> best;
  if (pz >= ctx.pinned.size()) {
    for (const IonId ion : state.ionsOn(graph.pz(pz).core)) {
      best = best ? std::min(*best, ion) : ion;
    }
    return best;
  }
  const auto& pinned = ctx.pinned[pz];
  for (const IonId ion : state.ionsOn(graph.pz(pz).core)) {
    if (std::find(pinned.begin(), pinned.end(), ion) == pinned.end() &&
        (!best || ion < *best)) {
      best = ion;
    }
  }
  return best;
}

inline std::optional<Move> moveToward(const DeviceGraph& graph,
                                      const IonState& state,
                                      const Request& request,
                                      const StepContext& ctx) {
  const EdgeId cur = state.edgeOf(request.ion);
  const Edge& here = graph.edge(cur);
  switch (here.zone) {
  case Zone::Core:
    if (here.pz == request.pz) {
      return std::nullopt;
    }
    return planExitPath(graph, state, *here.pz, cur, request.ion);
  case Zone::Exit:
    return planDrain(graph, state, *here.pz);
  case Zone::Entry:
    return planEntryPath(graph, state, request.ion, *here.pz,
                         pickEvictee(graph, state, *here.pz, ctx));
  case Zone::Memory:
    break;
  }
  const auto next = desiredNextEdge(graph, state, request.ion, request.pz);
  if (!next) {
    return std::nullopt;
  }
  if (graph.edge(*next).zone == Zone::Entry) {
    if (!request.enter) {
      return std::nullopt;
    }
    const PzId into = *graph.edge(*next).pz;
    return planEntryPath(graph, state, request.ion, into,
                         pickEvictee(graph, state, into, ctx));
  }
  if (state.empty(*next)) {
    return Move{MoveKind::Path, {cur, *next}, {request.ion}};
  }
  return findCycle(graph, state, request.ion, *next, ctx.maxCycleLength);
}

} // namespace detail

/// Builds the move a request asks for in the current state, if any.
[[nodiscard]] inline std::optional<Move>
planRequest(const DeviceGraph& graph, const IonState& state,
            const Request& request, const StepContext& ctx) {
  switch (request.kind) {
  case RequestKind::Toward:
    return detail::moveToward(graph, state, request, ctx);
  case RequestKind::Evict:
    return planEviction(graph, state, request.pz, request.ion, request.enter);
  case RequestKind::Drain:
    return planDrain(graph, state, request.pz);
  }
  return std::nullopt;
}

/**
 * Greedy conflict resolution for one time step: requests are visited in
 * priority order and a move is admitted iff it shares no edge and no node
 * with the moves admitted before it and does not touch a busy zone.
 */
[[nodiscard]] inline std::vector<Move>
planTimestep(const DeviceGraph& graph, const IonState& state,
             const PriorityQueue& queue, const StepContext& ctx) {
  std::vector<bool> usedEdges(graph.numEdges(), false);
  std::vector<bool> usedNodes(graph.numNodes(), false);
  std::vector<Move> admitted;
  for (const auto& request : queue.ordered()) {
    auto move = planRequest(graph, state, request, ctx);
    if (!move) {
      continue;
    }
    bool ok = true;
    for (const EdgeId e : move->edges) {
      const auto& pz = graph.edge(e).pz;
      if (usedEdges[e] || (pz && *pz < ctx.busy.size() && ctx.busy[*pz])) {
        ok = false;
        break;
      }
    }
    const auto nodes = touchedNodes(graph, *move);
    ok = ok && std::none_of(nodes.begin(), nodes.end(),
                            [&usedNodes](const NodeId n) { return usedNodes[n]; });
    if (!ok) {
      continue;
    }
    for (const EdgeId e : move->edges) {
      usedEdges[e] = true;
    }
    for (const NodeId n : nodes) {
      usedNodes[n] = true;
    }
    admitted.push_back(std::move(*move));
  }
  return admitted;
}

/**
 * Applies pairwise disjoint moves. Throws std::logic_error when moves overlap,
 * list an ion that is not on them, or leave an edge over capacity.
 */
inline void executeMoves(const DeviceGraph& graph, IonState& state,
                         const std::span<const Move> moves) {
  std::vector<bool> used(graph.numEdges(), false);
  std::vector<std::pair<IonId, EdgeId>> hops;
  for (const auto& move : moves) {
    for (const EdgeId e : move.edges) {
      if (used.at(e)) {
        throw std::logic_error("moves overlap on edge " + std::to_string(e));
      }
      used[e] = true;
    }
    for (const IonId ion : move.ions) {
      const auto it =
          std::find(move.edges.begin(), move.edges.end(), state.edgeOf(ion));
      if (it == move.edges.end()) {
        throw std::logic_error("ion " + std::to_string(ion) +
                               " is not on its move");
      }
      auto next = it + 1;
      if (next == move.edges.end()) {
        if (move.kind == MoveKind::Path) {
          throw std::logic_error("ion on the last edge of a path cannot move");
        }
        next = move.edges.begin();
      }
      hops.emplace_back(ion, *next);
    }
  }
  for (const auto& [ion, to] : hops) {
    state.relocate(ion, to);
  }
  for (const auto& move : moves) {
    for (const EdgeId e : move.edges) {
      if (state.ionsOn(e).size() > graph.edge(e).capacity) {
        throw std::logic_error("edge " + std::to_string(e) +
                               " over capacity after move");
      }
    }
  }
}

} // namespace qccd
