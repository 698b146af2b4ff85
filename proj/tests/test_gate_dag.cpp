/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <stdexcept>

namespace qccd {
namespace {

TEST(GateDag, ExampleFrontLayer) {
  const auto c = test::exampleCircuit();
  GateDag dag(c);
  EXPECT_EQ(dag.frontLayer(), (std::vector<GateId>{0, 6, 11}));
  EXPECT_EQ(dag.predecessors(8).size(), 2U);
  const std::vector<GateId> first{0, 6};
  dag.remove(first);
  EXPECT_EQ(dag.frontLayer(), (std::vector<GateId>{1, 7, 11}));
  EXPECT_EQ(dag.remaining(), c.size() - 2);
  EXPECT_FALSE(dag.contains(0));
}

TEST(GateDag, RemovingBlockedGateThrows) {
  GateDag dag(test::exampleCircuit());
  const std::vector<GateId> blocked{8};
  EXPECT_THROW(dag.remove(blocked), std::logic_error);
  const std::vector<GateId> ok{11};
  dag.remove(ok);
  EXPECT_THROW(dag.remove(ok), std::logic_error);
}

TEST(GateDag, DrainingVisitsEveryGateInDependencyOrder) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto c = randomCircuit(8, seed);
    GateDag dag(c);
    std::vector<bool> done(c.size(), false);
    std::mt19937_64 rng(seed);
    std::size_t rounds = 0;
    while (!dag.empty()) {
      auto front = dag.frontLayer();
      ASSERT_FALSE(front.empty());
      // front-layer gates act on disjoint qubits
      std::set<Qubit> qubits;
      for (const GateId g : front) {
        for (const Qubit q : c.gate(g).qubits) {
          EXPECT_TRUE(qubits.insert(q).second);
        }
        for (const GateId p : dag.predecessors(g)) {
          EXPECT_TRUE(done[p]);
        }
      }
      // remove a random non-empty subset
      std::shuffle(front.begin(), front.end(), rng);
      front.resize(1 + rng() % front.size());
      dag.remove(front);
      for (const GateId g : front) {
        done[g] = true;
      }
      ++rounds;
    }
    EXPECT_LE(rounds, c.size());
    EXPECT_TRUE(std::all_of(done.begin(), done.end(), [](bool b) { return b; }));
  }
}

TEST(GateDag, EdgesLinkConsecutiveGatesPerQubit) {
  const auto c = qft(5);
  const GateDag dag(c);
  std::set<std::pair<GateId, GateId>> expected;
  for (Qubit q = 0; q < c.numQubits(); ++q) {
    std::optional<GateId> last;
    for (const auto& g : c.gates()) {
      if (std::find(g.qubits.begin(), g.qubits.end(), q) != g.qubits.end()) {
        if (last) {
          expected.emplace(*last, g.id);
        }
        last = g.id;
      }
    }
  }
  const auto edges = dag.edges();
  const std::set<std::pair<GateId, GateId>> got(edges.begin(), edges.end());
  EXPECT_EQ(got, expected);
}

TEST(GateDag, EmptyCircuit) {
  const GateDag dag(Circuit(2));
  EXPECT_TRUE(dag.empty());
  EXPECT_TRUE(dag.frontLayer().empty());
}

} // namespace
} // namespace qccd
