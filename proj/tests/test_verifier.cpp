/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

namespace qccd {
namespace {

struct Fixture {
  DeviceGraph graph;
  Schedule schedule;
};

Fixture compiled(const std::size_t pzs = 2, const std::uint64_t seed = 5) {
  Fixture f{buildDevice(defaultArch({3, 3, 1, 1}, pzs)), {}};
  CompileConfig cfg;
  cfg.seed = seed;
  f.schedule = compile(qft(12), f.graph, cfg);
  return f;
}

TEST(Verifier, AcceptsCompiledSchedules) {
  const auto f = compiled();
  const auto r = verify(f.schedule, f.graph);
  EXPECT_TRUE(r.valid);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_EQ(r.stats.makespan, f.schedule.makespan);
  std::size_t gates = 0;
  for (const auto n : r.stats.gatesPerPz) {
    gates += n;
  }
  EXPECT_EQ(gates, f.schedule.circuit.size());
  std::size_t moves = 0;
  for (const auto& step : f.schedule.steps) {
    moves += step.moves.size();
  }
  EXPECT_EQ(r.stats.totalMoves, moves);
  for (const double u : r.stats.utilization) {
    EXPECT_GE(u, 0.0);
    EXPECT_LE(u, 1.0);
  }
}

TEST(Verifier, OrderOfDisjointMovesDoesNotMatter) {
  auto f = compiled(3, 8);
  std::mt19937_64 rng(4);
  for (auto& step : f.schedule.steps) {
    std::shuffle(step.moves.begin(), step.moves.end(), rng);
  }
  EXPECT_TRUE(verify(f.schedule, f.graph).valid);
}

TEST(Verifier, OverlappingCyclesFlagged) {
  auto f = compiled();
  // two rotations over the same square in one step
  const auto& e0 = f.graph.edge(0);
  EdgeId next = 0;
  for (const EdgeId e : f.graph.incidentMemory(e0.to)) {
    if (e != 0) {
      next = e;
      break;
    }
  }
  const auto state = test::stateWith(f.graph, f.schedule.initialPlacement);
  const auto cycle = *findCycle(f.graph, state, state.ionsOn(0).front(), next);
  f.schedule.steps.insert(f.schedule.steps.begin(),
                          TimeStepRecord{0, {cycle, cycle}, {}, {}});
  const auto r = verify(f.schedule, f.graph);
  EXPECT_FALSE(r.valid);
  EXPECT_TRUE(r.has("overlap"));
  EXPECT_EQ(r.violations.front().step, 0U);
}

TEST(Verifier, MissingGateFlagged) {
  auto f = compiled();
  const auto m = mutate(f.schedule, f.graph, Mutation::DropGate, 3);
  ASSERT_TRUE(m);
  const auto r = verify(*m, f.graph);
  EXPECT_FALSE(r.valid);
  EXPECT_TRUE(r.has("unexecuted_gate"));
}

TEST(Verifier, EachMutationIsCaught) {
  const std::map<Mutation, std::string> expectedKind{
      {Mutation::DuplicateMove, "overlap"},
      {Mutation::DropGate, "unexecuted_gate"},
      {Mutation::EarlyStart, "completion_time"},
      {Mutation::LateCompletion, "completion_time"},
      {Mutation::DuplicateIon, "duplicate_ion"},
      {Mutation::BusyZonePath, "busy_pz"},
      {Mutation::ReversePath, "invalid_move"},
      {Mutation::WrongZone, "not_resident"},
  };
  for (const std::uint64_t seed : {1, 2, 3}) {
    const auto f = compiled(2, seed);
    for (const auto kind : ALL_MUTATIONS) {
      for (std::size_t pick = 0; pick < 25; ++pick) {
        const auto m = mutate(f.schedule, f.graph, kind, pick * 7919);
        ASSERT_TRUE(m) << toString(kind);
        const auto r = verify(*m, f.graph);
        EXPECT_FALSE(r.valid) << toString(kind) << " pick " << pick;
        if (const auto it = expectedKind.find(kind); it != expectedKind.end()) {
          EXPECT_TRUE(r.has(it->second)) << toString(kind);
        }
      }
    }
  }
}

TEST(Verifier, MalformedIdsBecomeViolations) {
  auto f = compiled();
  auto s = f.schedule;
  s.steps[0].moves.push_back(Move{MoveKind::Path, {9999}, {}});
  s.steps[1].gateStarts.emplace_back(99999, 0);
  s.steps[2].gateStarts.emplace_back(0, 77);
  s.steps[3].gateCompletions.push_back(123456);
  s.steps[4].moves.push_back(Move{MoveKind::Cycle, {0, 1, 2}, {}});
  s.steps[5].moves.push_back(Move{MoveKind::Path, {}, {}});
  s.steps[6].t = 42;
  const auto r = verify(s, f.graph);
  EXPECT_FALSE(r.valid);
  for (const char* kind : {"unknown_edge", "unknown_gate", "unknown_pz", "invalid_move", "time"}) {
    EXPECT_TRUE(r.has(kind)) << kind;
  }
  auto wrong = f.schedule;
  wrong.initialPlacement[0] = 5000;
  EXPECT_TRUE(verify(wrong, f.graph).has("initial_placement"));
  wrong = f.schedule;
  wrong.makespan += 1;
  wrong.finalPlacement[0] = wrong.finalPlacement[1];
  const auto r2 = verify(wrong, f.graph);
  EXPECT_TRUE(r2.has("makespan"));
  EXPECT_TRUE(r2.has("final_placement"));
  const auto other = buildDevice(defaultArch({3, 3, 1, 1}, 3));
  EXPECT_TRUE(verify(f.schedule, other).has("arch_mismatch"));
}

TEST(Verifier, CapacityAndDependencyChecks) {
  const auto g = buildDevice(defaultArch({3, 3, 1, 1}, 1));
  const auto& pz = g.pz(0);
  Circuit c(2);
  c.add(GateKind::RX, {0});
  c.add(GateKind::RZZ, {0, 1});
  Schedule s;
  s.meta = ScheduleMeta{g.params(), 1, 0, "dag", {}};
  s.circuit = c;
  s.initialPlacement = {pz.core, pz.core};
  s.finalPlacement = s.initialPlacement;
  // rzz starts together with its predecessor
  s.steps.push_back(TimeStepRecord{0, {}, {{0, 0}, {1, 0}}, {0}});
  s.steps.push_back(TimeStepRecord{1, {}, {}, {}});
  s.steps.push_back(TimeStepRecord{2, {}, {}, {1}});
  s.makespan = 3;
  const auto r = verify(s, g);
  EXPECT_TRUE(r.has("dependency"));
  EXPECT_TRUE(r.has("pz_conflict"));

  // three ions pushed into a core of capacity two
  Schedule t = s;
  t.circuit = Circuit(3);
  t.initialPlacement = {pz.core, pz.core, pz.entryPath[1]};
  t.steps = {TimeStepRecord{0, {Move{MoveKind::Path, {pz.entryPath[1], pz.core}, {2}}}, {}, {}}};
  t.finalPlacement = {pz.core, pz.core, pz.core};
  t.makespan = 1;
  EXPECT_TRUE(verify(t, g).has("capacity"));

  // the core must hand over exactly one ion
  Schedule u = t;
  u.initialPlacement = {pz.core, pz.core, 0};
  u.steps = {TimeStepRecord{0, {Move{MoveKind::Path, {pz.core, pz.exitPath[0]}, {0, 1}}}, {}, {}}};
  u.finalPlacement = {pz.exitPath[0], pz.exitPath[0], 0};
  const auto ru = verify(u, g);
  EXPECT_TRUE(ru.has("ion_mismatch"));
  EXPECT_TRUE(ru.has("capacity"));
}

TEST(Verifier, ReportJson) {
  const auto f = compiled();
  auto m = *mutate(f.schedule, f.graph, Mutation::DropGate);
  const auto j = toJson(verify(m, f.graph));
  EXPECT_FALSE(j.at("valid").get<bool>());
  EXPECT_FALSE(j.at("violations").empty());
  EXPECT_TRUE(j.at("stats").contains("utilization"));
}

TEST(Schedule, JsonRoundTrip) {
  const auto f = compiled(3, 2);
  const auto text = dumpSchedule(f.schedule);
  const auto back = scheduleFromJson(Json::parse(text));
  EXPECT_EQ(back, f.schedule);
  EXPECT_EQ(dumpSchedule(back), text);
  EXPECT_THROW((void)scheduleFromJson(Json::parse("{\"meta\": {}}")), std::invalid_argument);
  const auto arch = defaultArch({4, 4, 3, 3}, 3, 1, 3, 4);
  EXPECT_EQ(archFromJson(toJson(arch)), arch);
  EXPECT_THROW((void)archFromJson(Json::parse("{\"grid\": {\"m\": 3}}")), std::invalid_argument);
}

TEST(Schedule, FieldOrderIsStable) {
  const auto f = compiled();
  const auto j = toJson(f.schedule);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) {
    keys.push_back(k);
  }
  EXPECT_EQ(keys, (std::vector<std::string>{"meta", "circuit", "initial_placement", "steps",
                                            "final_placement", "makespan"}));
  const auto& step = j.at("steps").at(0);
  std::vector<std::string> stepKeys;
  for (const auto& [k, v] : step.items()) {
    stepKeys.push_back(k);
  }
  EXPECT_EQ(stepKeys,
            (std::vector<std::string>{"t", "moves", "gate_starts", "gate_completions"}));
}

} // namespace
} // namespace qccd
