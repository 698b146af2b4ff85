/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <stdexcept>
#include <tuple>

namespace qccd {
namespace {

std::size_t countKind(const DeviceGraph& g, const NodeKind kind) {
  std::size_t count = 0;
  for (NodeId n = 0; n < g.numNodes(); ++n) {
    count += g.node(n).kind == kind ? 1 : 0;
  }
  return count;
}

class GridSizes
    : public ::testing::TestWithParam<
          std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> {};

TEST_P(GridSizes, CountsFollowSegmentFormula) {
  const auto [m, n, v, h] = GetParam();
  const auto g = buildGrid(m, n, v, h);
  EXPECT_EQ(g.numEdges(), v * m * (n - 1) + h * n * (m - 1));
  EXPECT_EQ(g.numMemoryEdges(), g.numEdges());
  EXPECT_EQ(countKind(g, NodeKind::Major), m * n);
  EXPECT_EQ(countKind(g, NodeKind::Minor),
            (v - 1) * m * (n - 1) + (h - 1) * n * (m - 1));
  for (const auto& e : g.edges()) {
    EXPECT_EQ(e.capacity, 1U);
    EXPECT_EQ(e.zone, Zone::Memory);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Shapes, GridSizes,
    ::testing::Values(std::make_tuple(2, 2, 1, 1), std::make_tuple(3, 3, 1, 1),
                      std::make_tuple(4, 4, 3, 3), std::make_tuple(2, 5, 3, 1),
                      std::make_tuple(5, 2, 1, 4), std::make_tuple(3, 4, 2, 2)));

TEST(DeviceGraph, BenchmarkArchitectures) {
  EXPECT_EQ(buildGrid(3, 3, 1, 1).numEdges(), 12U);
  EXPECT_EQ(buildGrid(4, 4, 1, 1).numEdges(), 24U);
  EXPECT_EQ(buildGrid(3, 3, 3, 3).numEdges(), 36U);
  EXPECT_EQ(buildGrid(5, 5, 1, 1).numEdges(), 40U);
  EXPECT_EQ(buildGrid(3, 3, 5, 5).numEdges(), 60U);
  EXPECT_EQ(buildGrid(4, 4, 3, 3).numEdges(), 72U);
}

TEST(DeviceGraph, SmallestGridIsOneSquare) {
  const auto g = buildGrid(2, 2, 1, 1);
  ASSERT_EQ(g.numEdges(), 4U);
  for (NodeId j = 0; j < 4; ++j) {
    EXPECT_EQ(g.incident(j).size(), 2U);
  }
  EXPECT_EQ(perimeterJunctions(g.params()).size(), 4U);
}

TEST(DeviceGraph, RejectsDegenerateGrids) {
  EXPECT_THROW((void)buildGrid(1, 3, 1, 1), std::invalid_argument);
  EXPECT_THROW((void)buildGrid(3, 1, 1, 1), std::invalid_argument);
  EXPECT_THROW((void)buildGrid(3, 3, 0, 1), std::invalid_argument);
  EXPECT_THROW((void)buildGrid(3, 3, 1, 0), std::invalid_argument);
}

TEST(DeviceGraph, ZoneAddsChainOfFiveEdges) {
  const auto grid = buildGrid(3, 3, 1, 1);
  const auto g = attachPz(grid, 7, 2, 2, 2);
  EXPECT_EQ(g.numEdges(), grid.numEdges() + 5);
  EXPECT_EQ(g.numMemoryEdges(), 12U);
  ASSERT_EQ(g.numPzs(), 1U);
  const auto& pz = g.pz(0);
  EXPECT_EQ(pz.junction, 7U);
  ASSERT_EQ(pz.entryPath.size(), 2U);
  ASSERT_EQ(pz.exitPath.size(), 2U);
  EXPECT_EQ(g.edge(pz.core).capacity, 2U);
  EXPECT_EQ(g.edge(pz.core).zone, Zone::Core);
  // chain: junction -> entry -> core -> exit -> junction
  EXPECT_EQ(g.edge(pz.entryPath.front()).from, 7U);
  EXPECT_EQ(g.edge(pz.entryPath[0]).to, g.edge(pz.entryPath[1]).from);
  EXPECT_EQ(g.edge(pz.entryPath.back()).to, g.edge(pz.core).from);
  EXPECT_EQ(g.edge(pz.core).to, g.edge(pz.exitPath.front()).from);
  EXPECT_EQ(g.edge(pz.exitPath[0]).to, g.edge(pz.exitPath[1]).from);
  EXPECT_EQ(g.edge(pz.exitPath.back()).to, 7U);
  EXPECT_EQ(g.node(7).kind, NodeKind::Major);
  EXPECT_EQ(g.pzAtJunction(7), std::optional<PzId>{0});
  EXPECT_EQ(g.pzAtJunction(4), std::nullopt);
  // memory topology unchanged
  for (EdgeId e = 0; e < grid.numEdges(); ++e) {
    EXPECT_EQ(g.edge(e).from, grid.edge(e).from);
    EXPECT_EQ(g.edge(e).to, grid.edge(e).to);
  }
}

TEST(DeviceGraph, ZoneAttachmentErrors) {
  const auto grid = buildGrid(3, 3, 1, 1);
  EXPECT_THROW((void)attachPz(grid, 7, 2, 2, 1), std::invalid_argument);
  EXPECT_THROW((void)attachPz(grid, 4, 2, 2, 2), std::invalid_argument);
  EXPECT_THROW((void)attachPz(grid, 99, 2, 2, 2), std::invalid_argument);
  EXPECT_THROW((void)attachPz(grid, 7, 0, 2, 2), std::invalid_argument);
  EXPECT_THROW((void)attachPz(grid, 7, 2, 0, 2), std::invalid_argument);
  const auto once = attachPz(grid, 7, 2, 2, 2);
  EXPECT_THROW((void)attachPz(once, 7, 1, 1, 2), std::invalid_argument);
}

TEST(DeviceGraph, PerimeterRingProperties) {
  for (std::size_t m = 2; m <= 6; ++m) {
    for (std::size_t n = 2; n <= 6; ++n) {
      const GridParams p{m, n, 1, 1};
      const auto g = DeviceGraph::grid(p);
      const auto ring = perimeterJunctions(p);
      ASSERT_EQ(ring.size(), 2 * (m + n) - 4) << m << "x" << n;
      EXPECT_EQ(std::set<NodeId>(ring.begin(), ring.end()).size(), ring.size());
      EXPECT_EQ(ring.front(), g.junctionAt(m - 1, n / 2));
      for (std::size_t i = 0; i < ring.size(); ++i) {
        EXPECT_TRUE(g.isPerimeter(ring[i]));
        const auto [r1, c1] = g.junctionPosition(ring[i]);
        const auto [r2, c2] = g.junctionPosition(ring[(i + 1) % ring.size()]);
        const auto step = (r1 > r2 ? r1 - r2 : r2 - r1) + (c1 > c2 ? c1 - c2 : c2 - c1);
        EXPECT_EQ(step, 1U) << m << "x" << n << " at " << i;
      }
    }
  }
}

TEST(DeviceGraph, FourZonesOnePerSide) {
  const GridParams p{4, 4, 1, 1};
  const auto junctions = defaultPzJunctions(p, 4);
  EXPECT_EQ(junctions, (std::vector<NodeId>{14, 8, 1, 7}));
  auto g = DeviceGraph::grid(p);
  for (const NodeId j : junctions) {
    g = g.withPz(j, 2, 2, 2);
  }
  ASSERT_EQ(g.numPzs(), 4U);
  std::set<EdgeId> seen;
  for (const auto& pz : g.pzs()) {
    std::vector<EdgeId> chain = pz.entryPath;
    chain.push_back(pz.core);
    chain.insert(chain.end(), pz.exitPath.begin(), pz.exitPath.end());
    for (const EdgeId e : chain) {
      EXPECT_FALSE(g.isMemory(e));
      EXPECT_TRUE(seen.insert(e).second);
    }
  }
  EXPECT_THROW((void)defaultPzJunctions(p, 13), std::invalid_argument);
}

TEST(DeviceGraph, DistancesMatchBruteForce) {
  for (const auto& arch : {defaultArch({3, 3, 1, 1}, 2), defaultArch({3, 4, 2, 1}, 3),
                           defaultArch({2, 2, 1, 1}, 1),
                           ArchSpec{{3, 3, 1, 1}, {{6, 1, 3, 3}}}}) {
    const auto g = buildDevice(arch);
    const auto oracle = test::bruteForceDistances(g);
    for (EdgeId a = 0; a < g.numEdges(); ++a) {
      for (EdgeId b = 0; b < g.numEdges(); ++b) {
        EXPECT_EQ(edgeDistance(g, a, b), oracle[a][b]) << a << "->" << b;
      }
    }
  }
}

TEST(DeviceGraph, DistanceProperties) {
  const auto g = buildDevice(defaultArch({4, 4, 2, 1}, 3));
  const auto mem = g.numMemoryEdges();
  for (EdgeId a = 0; a < g.numEdges(); ++a) {
    EXPECT_EQ(edgeDistance(g, a, a), 0U);
  }
  for (EdgeId a = 0; a < mem; ++a) {
    for (EdgeId b = 0; b < mem; ++b) {
      ASSERT_TRUE(edgeDistance(g, a, b));
      EXPECT_EQ(edgeDistance(g, a, b), edgeDistance(g, b, a));
      for (EdgeId c = 0; c < mem; c += 3) {
        EXPECT_LE(*edgeDistance(g, a, c), *edgeDistance(g, a, b) + *edgeDistance(g, b, c));
      }
    }
  }
  for (const auto& pz : g.pzs()) {
    for (std::size_t i = 0; i < pz.entryPath.size(); ++i) {
      EXPECT_EQ(edgeDistance(g, pz.entryPath[i], pz.core), pz.entryPath.size() - i);
      // one-way: the core never leads back into its entry chain
      EXPECT_FALSE(edgeDistance(g, pz.core, pz.entryPath[i]).has_value() &&
                   *edgeDistance(g, pz.core, pz.entryPath[i]) <
                       pz.exitPath.size() + 2);
    }
    for (std::size_t i = 0; i < pz.exitPath.size(); ++i) {
      for (const EdgeId m : g.incidentMemory(pz.junction)) {
        EXPECT_EQ(edgeDistance(g, pz.exitPath[i], m), pz.exitPath.size() - i);
      }
    }
  }
  // adjacent memory edges
  const auto& e0 = g.edge(0);
  for (const EdgeId f : g.incidentMemory(e0.from)) {
    if (f != 0) {
      EXPECT_EQ(edgeDistance(g, 0, f), 1U);
    }
  }
  EXPECT_THROW((void)edgeDistance(g, 0, static_cast<EdgeId>(g.numEdges())),
               std::out_of_range);
}

TEST(IonState, InitialPlacementFillsMemory) {
  const auto g = buildDevice(defaultArch({3, 3, 1, 1}, 2));
  const auto s = initialPlacement(g, 7);
  EXPECT_EQ(s.numIons(), 12U);
  EXPECT_TRUE(s.consistent(g));
  for (EdgeId e = 0; e < g.numEdges(); ++e) {
    EXPECT_EQ(s.ionsOn(e).size(), g.isMemory(e) ? 1U : 0U);
  }
  EXPECT_EQ(s, initialPlacement(g, 7));
}

TEST(IonState, SeedsGiveDifferentPermutations) {
  const auto g = buildDevice(defaultArch({4, 4, 1, 1}, 1));
  const auto a = initialPlacement(g, 1);
  const auto b = initialPlacement(g, 2);
  EXPECT_TRUE(a.consistent(g));
  EXPECT_TRUE(b.consistent(g));
  EXPECT_NE(a.placement(), b.placement());
}

TEST(IonState, ConsistencyDetectsOverfill) {
  const auto g = buildDevice(defaultArch({2, 2, 1, 1}, 1));
  IonState s(g.numEdges(), 3);
  s.place(0, 0);
  s.place(1, 1);
  EXPECT_FALSE(s.consistent(g)); // ion 2 unplaced
  s.place(2, 1);
  EXPECT_FALSE(s.consistent(g)); // memory edge holds two
  EXPECT_THROW(s.place(0, 2), std::logic_error);
  s.relocate(2, g.pz(0).core);
  EXPECT_TRUE(s.consistent(g));
}

} // namespace
} // namespace qccd
