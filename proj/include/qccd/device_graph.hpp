/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#pragma once

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

enum class NodeKind : std::uint8_t { Major, Minor };

/// Which part of the device an edge belongs to.
enum class Zone : std::uint8_t { Memory, Entry, Core, Exit };

[[nodiscard]] inline const char* toString(const Zone zone) {
  switch (zone) {
  case Zone::Memory:
    return "memory";
  case Zone::Entry:
    return "entry";
  case Zone::Core:
    return "core";
  case Zone::Exit:
    return "exit";
  }
  return "?";
}

struct Node {
  NodeKind kind = NodeKind::Minor;
};

/**
 * A linear trap segment. Processing-zone edges are oriented: ions travel from
 * `from` to `to`. Memory edges are undirected and `from`/`to` carry no meaning.
 */
struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  Zone zone = Zone::Memory;
  std::uint32_t capacity = 1;
  std::optional<PzId> pz;
  /// Position inside the entry or exit chain of its processing zone.
  std::size_t chainIndex = 0;

  [[nodiscard]] bool touches(const NodeId node) const {
    return from == node || to == node;
  }
  [[nodiscard]] NodeId other(const NodeId node) const {
    return from == node ? to : from;
  }
};

struct GridParams {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t v = 0;
  std::size_t h = 0;

  [[nodiscard]] std::size_t memoryEdgeCount() const {
    return v * m * (n - 1) + h * n * (m - 1);
  }
  bool operator==(const GridParams&) const = default;
};

/**
 * A linear processing zone attached to the memory grid. Ions enter at the
 * boundary junction, travel along the entry chain into the core edge (where
 * gates execute) and leave through the exit chain back to the same junction.
 */
struct PZDescriptor {
  PzId id = 0;
  NodeId junction = 0;
  EdgeId core = 0;
  std::vector<EdgeId> entryPath;
  std::vector<EdgeId> exitPath;
  std::uint32_t capacity = 2;
};

class DeviceGraph {
public:
  DeviceGraph() = default;

  /// Memory-zone-only grid. Throws std::invalid_argument on degenerate sizes.
  static DeviceGraph grid(const GridParams& params) {
    if (params.m < 2 || params.n < 2) {
      throw std::invalid_argument("grid needs at least 2x2 junctions");
    }
    if (params.v < 1 || params.h < 1) {
      throw std::invalid_argument("grid segments need at least one edge");
    }
    DeviceGraph g;
    g.params_ = params;
    g.nodes_.assign(params.m * params.n, Node{NodeKind::Major});
    const auto segment = [&g](const NodeId a, const NodeId b,
                              const std::size_t len) {
      NodeId prev = a;
      for (std::size_t i = 0; i < len; ++i) {
        NodeId next = b;
        if (i + 1 < len) {
          next = static_cast<NodeId>(g.nodes_.size());
          g.nodes_.push_back(Node{NodeKind::Minor});
        }
        g.edges_.push_back(Edge{prev, next, Zone::Memory, 1, std::nullopt, 0});
        prev = next;
      }
    };
    for (std::size_t r = 0; r < params.m; ++r) {
      for (std::size_t c = 0; c + 1 < params.n; ++c) {
        segment(g.junctionAt(r, c), g.junctionAt(r, c + 1), params.v);
      }
    }
    for (std::size_t r = 0; r + 1 < params.m; ++r) {
      for (std::size_t c = 0; c < params.n; ++c) {
        segment(g.junctionAt(r, c), g.junctionAt(r + 1, c), params.h);
      }
    }
    g.numMemoryEdges_ = g.edges_.size();
    g.finalize();
    return g;
  }

  /**
   * Returns a copy of this graph extended by one processing zone attached at
   * a perimeter junction. The memory topology is left untouched.
   */
  [[nodiscard]] DeviceGraph withPz(const NodeId junction,
                                   const std::size_t entryLen,
                                   const std::size_t exitLen,
                                   const std::uint32_t capacity) const {
    if (junction >= params_.m * params_.n) {
      throw std::invalid_argument("unknown junction " +
                                  std::to_string(junction));
    }
    if (!isPerimeter(junction)) {
      throw std::invalid_argument("junction " + std::to_string(junction) +
                                  " is not on the grid perimeter");
    }
    if (entryLen < 1 || exitLen < 1) {
      throw std::invalid_argument("entry and exit paths need at least one edge");
    }
    if (capacity < 2) {
      throw std::invalid_argument(
          "processing zone capacity must admit two-qubit gates (>= 2)");
    }
    for (const auto& pz : pzs_) {
      if (pz.junction == junction) {
        throw std::invalid_argument("junction " + std::to_string(junction) +
                                    " already hosts a processing zone");
      }
    }
    DeviceGraph g = *this;
    PZDescriptor pz;
    pz.id = static_cast<PzId>(g.pzs_.size());
    pz.junction = junction;
    pz.capacity = capacity;
    const auto addNode = [&g] {
      g.nodes_.push_back(Node{NodeKind::Minor});
      return static_cast<NodeId>(g.nodes_.size() - 1);
    };
    const auto addEdge = [&g, &pz](const NodeId from, const NodeId to,
                                   const Zone zone, const std::uint32_t cap,
                                   const std::size_t index) {
      g.edges_.push_back(Edge{from, to, zone, cap, pz.id, index});
      return static_cast<EdgeId>(g.edges_.size() - 1);
    };
    NodeId prev = junction;
    for (std::size_t i = 0; i < entryLen; ++i) {
      const NodeId next = addNode();
      pz.entryPath.push_back(addEdge(prev, next, Zone::Entry, 1, i));
      prev = next;
    }
    const NodeId coreEnd = addNode();
    pz.core = addEdge(prev, coreEnd, Zone::Core, capacity, 0);
    prev = coreEnd;
    for (std::size_t i = 0; i < exitLen; ++i) {
      const NodeId next = (i + 1 == exitLen) ? junction : addNode();
      pz.exitPath.push_back(addEdge(prev, next, Zone::Exit, 1, i));
      prev = next;
    }
    g.pzs_.push_back(std::move(pz));
    g.finalize();
    return g;
  }

  [[nodiscard]] const GridParams& params() const { return params_; }
  [[nodiscard]] std::size_t numNodes() const { return nodes_.size(); }
  [[nodiscard]] std::size_t numEdges() const { return edges_.size(); }
  [[nodiscard]] std::size_t numMemoryEdges() const { return numMemoryEdges_; }
  [[nodiscard]] std::size_t numPzs() const { return pzs_.size(); }
  [[nodiscard]] const Node& node(const NodeId id) const { return nodes_.at(id); }
  [[nodiscard]] const Edge& edge(const EdgeId id) const { return edges_.at(id); }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const PZDescriptor& pz(const PzId id) const {
    return pzs_.at(id);
  }
  [[nodiscard]] const std::vector<PZDescriptor>& pzs() const { return pzs_; }

  [[nodiscard]] bool isMemory(const EdgeId e) const {
    return edges_[e].zone == Zone::Memory;
  }

  [[nodiscard]] NodeId junctionAt(const std::size_t row,
                                  const std::size_t col) const {
    return static_cast<NodeId>(row * params_.n + col);
  }
  [[nodiscard]] std::pair<std::size_t, std::size_t>
  junctionPosition(const NodeId id) const {
    return {id / params_.n, id % params_.n};
  }
  [[nodiscard]] bool isJunction(const NodeId id) const {
    return id < params_.m * params_.n;
  }
  [[nodiscard]] bool isPerimeter(const NodeId id) const {
    if (!isJunction(id)) {
      return false;
    }
    const auto [r, c] = junctionPosition(id);
    return r == 0 || c == 0 || r + 1 == params_.m || c + 1 == params_.n;
  }

  /// All edges incident to a node, in ascending id order.
  [[nodiscard]] std::span<const EdgeId> incident(const NodeId node) const {
    return incident_.at(node);
  }
  /// Memory edges incident to a node, in ascending id order.
  [[nodiscard]] std::span<const EdgeId> incidentMemory(const NodeId node) const {
    return incidentMemory_.at(node);
  }

  /**
   * Edges an ion on `e` may move to in one hop. Entry and exit chains are
   * one-way; an exit chain only returns to memory edges.
   */
  [[nodiscard]] std::span<const EdgeId> successors(const EdgeId e) const {
    return successors_.at(e);
  }

  /// The processing zone whose entry chain starts at `node`, if any.
  [[nodiscard]] std::optional<PzId> pzAtJunction(const NodeId node) const {
    for (const auto& pz : pzs_) {
      if (pz.junction == node) {
        return pz.id;
      }
    }
    return std::nullopt;
  }

  /// Minimal number of one-edge hops from `from` to `to`; UNREACHABLE if none.
  [[nodiscard]] std::uint32_t distance(const EdgeId from,
                                       const EdgeId to) const {
    return distances_.at(static_cast<std::size_t>(from) * edges_.size() + to);
  }

private:
  void finalize() {
    incident_.assign(nodes_.size(), {});
    incidentMemory_.assign(nodes_.size(), {});
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      incident_[edges_[e].from].push_back(e);
      incident_[edges_[e].to].push_back(e);
      if (edges_[e].zone == Zone::Memory) {
        incidentMemory_[edges_[e].from].push_back(e);
        incidentMemory_[edges_[e].to].push_back(e);
      }
    }
    successors_.assign(edges_.size(), {});
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      const Edge& edge = edges_[e];
      auto& out = successors_[e];
      switch (edge.zone) {
      case Zone::Memory:
        for (const NodeId end : {edge.from, edge.to}) {
          for (const EdgeId f : incidentMemory_[end]) {
            if (f != e) {
              out.push_back(f);
            }
          }
          if (const auto pz = pzAtJunction(end)) {
            out.push_back(pzs_[*pz].entryPath.front());
          }
        }
        break;
      case Zone::Entry: {
        const auto& pz = pzs_[*edge.pz];
        out.push_back(edge.chainIndex + 1 < pz.entryPath.size()
                          ? pz.entryPath[edge.chainIndex + 1]
                          : pz.core);
        break;
      }
      case Zone::Core:
        out.push_back(pzs_[*edge.pz].exitPath.front());
        break;
      case Zone::Exit: {
        const auto& pz = pzs_[*edge.pz];
        if (edge.chainIndex + 1 < pz.exitPath.size()) {
          out.push_back(pz.exitPath[edge.chainIndex + 1]);
        } else {
          for (const EdgeId f : incidentMemory_[pz.junction]) {
            out.push_back(f);
          }
        }
        break;
      }
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    const std::size_t count = edges_.size();
    distances_.assign(count * count, UNREACHABLE);
    std::deque<EdgeId> queue;
    for (EdgeId src = 0; src < count; ++src) {
      auto* row = &distances_[static_cast<std::size_t>(src) * count];
      row[src] = 0;
      queue.assign(1, src);
      while (!queue.empty()) {
        const EdgeId cur = queue.front();
        queue.pop_front();
        for (const EdgeId next : successors_[cur]) {
          if (row[next] == UNREACHABLE) {
            row[next] = row[cur] + 1;
            queue.push_back(next);
          }
        }
      }
    }
  }

  GridParams params_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::size_t numMemoryEdges_ = 0;
  std::vector<PZDescriptor> pzs_;
  std::vector<std::vector<EdgeId>> incident_;
  std::vector<std::vector<EdgeId>> incidentMemory_;
  std::vector<std::vector<EdgeId>> successors_;
  std::vector<std::uint32_t> distances_;
};

[[nodiscard]] inline DeviceGraph buildGrid(const std::size_t m,
                                           const std::size_t n,
                                           const std::size_t v,
                                           const std::size_t h) {
  return DeviceGraph::grid(GridParams{m, n, v, h});
}

[[nodiscard]] inline DeviceGraph attachPz(const DeviceGraph& graph,
                                          const NodeId junction,
                                          const std::size_t entryLen,
                                          const std::size_t exitLen,
                                          const std::uint32_t capacity) {
  return graph.withPz(junction, entryLen, exitLen, capacity);
}

/// Edge-hop distance; std::nullopt when the pair is unreachable.
[[nodiscard]] inline std::optional<std::uint32_t>
edgeDistance(const DeviceGraph& graph, const EdgeId from, const EdgeId to) {
  if (from >= graph.numEdges() || to >= graph.numEdges()) {
    throw std::out_of_range("edge id out of range");
  }
  const auto d = graph.distance(from, to);
  if (d == UNREACHABLE) {
    return std::nullopt;
  }
  return d;
}

/**
 * Perimeter junctions in clockwise order (row 0 drawn on top), starting at the
 * middle of the bottom row.
 */
[[nodiscard]] inline std::vector<NodeId>
perimeterJunctions(const GridParams& params) {
  const auto at = [&params](const std::size_t r, const std::size_t c) {
    return static_cast<NodeId>(r * params.n + c);
  };
  const std::size_t bottom = params.m - 1;
  const std::size_t right = params.n - 1;
  std::vector<NodeId> ring;
  for (std::size_t c = params.n / 2 + 1; c-- > 0;) {
    ring.push_back(at(bottom, c));
  }
  for (std::size_t r = bottom; r-- > 0;) {
    ring.push_back(at(r, 0));
  }
  for (std::size_t c = 1; c <= right; ++c) {
    ring.push_back(at(0, c));
  }
  for (std::size_t r = 1; r < bottom; ++r) {
    ring.push_back(at(r, right));
  }
  for (std::size_t c = right + 1; c-- > params.n / 2 + 1;) {
    ring.push_back(at(bottom, c));
  }
  return ring;
}

/// Evenly spread attachment junctions for `count` processing zones.
[[nodiscard]] inline std::vector<NodeId>
defaultPzJunctions(const GridParams& params, const std::size_t count) {
  const auto ring = perimeterJunctions(params);
  if (count > ring.size()) {
    throw std::invalid_argument("more processing zones than perimeter "
                                "junctions");
  }
  std::vector<NodeId> result;
  result.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    result.push_back(ring[i * ring.size() / count]);
  }
  return result;
}

} // namespace qccd
