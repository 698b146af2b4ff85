/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#pragma once

#include "qccd/circuit.hpp"
#include "qccd/device_graph.hpp"
#include "qccd/shuttling.hpp"
#include "qccd/types.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qccd {

using Json = nlohmann::ordered_json;

/// Where a processing zone is attached and how it is shaped.
struct PzSpec {
  NodeId junction = 0;
  std::size_t entryLen = 2;
  std::size_t exitLen = 2;
  std::uint32_t capacity = 2;

  bool operator==(const PzSpec&) const = default;
};

struct ArchSpec {
  GridParams grid;
  std::vector<PzSpec> pzs;

  bool operator==(const ArchSpec&) const = default;
};

/// Grid with `count` equally shaped zones spread over the perimeter.
[[nodiscard]] inline ArchSpec defaultArch(const GridParams& grid,
                                          const std::size_t count,
                                          const std::size_t entryLen = 2,
                                          const std::size_t exitLen = 2,
                                          const std::uint32_t capacity = 2) {
  ArchSpec arch{grid, {}};
  for (const NodeId j : defaultPzJunctions(grid, count)) {
    arch.pzs.push_back(PzSpec{j, entryLen, exitLen, capacity});
  }
  return arch;
}

[[nodiscard]] inline DeviceGraph buildDevice(const ArchSpec& arch) {
  auto graph = DeviceGraph::grid(arch.grid);
  for (const auto& pz : arch.pzs) {
    graph = graph.withPz(pz.junction, pz.entryLen, pz.exitLen, pz.capacity);
  }
  return graph;
}

[[nodiscard]] inline Json toJson(const ArchSpec& arch) {
  Json pzs = Json::array();
  for (const auto& pz : arch.pzs) {
    pzs.push_back({{"junction", pz.junction},
                   {"entry_len", pz.entryLen},
                   {"exit_len", pz.exitLen},
                   {"capacity", pz.capacity}});
  }
  return {{"grid",
           {{"m", arch.grid.m},
            {"n", arch.grid.n},
            {"v", arch.grid.v},
            {"h", arch.grid.h}}},
          {"pzs", pzs}};
}

/// Throws std::invalid_argument on missing or mistyped fields.
[[nodiscard]] inline ArchSpec archFromJson(const Json& j) {
  try {
    ArchSpec arch;
    const auto& g = j.at("grid");
    arch.grid = GridParams{g.at("m").get<std::size_t>(),
                           g.at("n").get<std::size_t>(),
                           g.at("v").get<std::size_t>(),
                           g.at("h").get<std::size_t>()};
    for (const auto& p : j.at("pzs")) {
      PzSpec pz;
      pz.junction = p.at("junction").get<NodeId>();
      pz.entryLen = p.value("entry_len", pz.entryLen);
      pz.exitLen = p.value("exit_len", pz.exitLen);
      pz.capacity = p.value("capacity", pz.capacity);
      arch.pzs.push_back(pz);
    }
    return arch;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad architecture: ") + e.what());
  }
}

struct TimeStepRecord {
  std::size_t t = 0;
  std::vector<Move> moves;
  std::vector<std::pair<GateId, PzId>> gateStarts;
  std::vector<GateId> gateCompletions;

  bool operator==(const TimeStepRecord&) const = default;
};

struct ScheduleMeta {
  GridParams arch;
  std::size_t pzs = 0;
  std::uint64_t seed = 0;
  std::string policy = "dag";
  GateTimes gateTimes;

  bool operator==(const ScheduleMeta&) const = default;
};

/**
 * Output of a compile run. The circuit and both placements travel with the
 * schedule so that it can be replayed without re-running the compiler.
 */
struct Schedule {
  ScheduleMeta meta;
  Circuit circuit;
  std::vector<EdgeId> initialPlacement;
  std::vector<TimeStepRecord> steps;
  std::vector<EdgeId> finalPlacement;
  std::size_t makespan = 0;

  bool operator==(const Schedule&) const = default;
};

[[nodiscard]] inline Json toJson(const Move& move) {
  return {{"kind", toString(move.kind)},
          {"edges", move.edges},
          {"ions", move.ions}};
}

[[nodiscard]] inline Json toJson(const Circuit& circuit) {
  Json gates = Json::array();
  for (const auto& g : circuit.gates()) {
    gates.push_back({{"id", g.id},
                     {"kind", toString(g.kind)},
                     {"qubits", g.qubits},
                     {"angle", g.angle}});
  }
  return {{"num_qubits", circuit.numQubits()}, {"gates", gates}};
}

[[nodiscard]] inline Json toJson(const Schedule& s) {
  Json steps = Json::array();
  for (const auto& step : s.steps) {
    Json moves = Json::array();
    for (const auto& m : step.moves) {
      moves.push_back(toJson(m));
    }
    Json starts = Json::array();
    for (const auto& [g, p] : step.gateStarts) {
      starts.push_back({g, p});
    }
    steps.push_back({{"t", step.t},
                     {"moves", moves},
                     {"gate_starts", starts},
                     {"gate_completions", step.gateCompletions}});
  }
  return {{"meta",
           {{"arch",
             {{"m", s.meta.arch.m},
              {"n", s.meta.arch.n},
              {"v", s.meta.arch.v},
              {"h", s.meta.arch.h}}},
            {"pzs", s.meta.pzs},
            {"seed", s.meta.seed},
            {"policy", s.meta.policy},
            {"gate_times",
             {s.meta.gateTimes.singleQubit, s.meta.gateTimes.twoQubit}}}},
          {"circuit", toJson(s.circuit)},
          {"initial_placement", s.initialPlacement},
          {"steps", steps},
          {"final_placement", s.finalPlacement},
          {"makespan", s.makespan}};
}

[[nodiscard]] inline std::string dumpSchedule(const Schedule& s) {
  return toJson(s).dump(1) + "\n";
}

namespace detail {

inline GateKind gateKindFromString(const std::string& name) {
  for (const auto kind :
       {GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::RZZ}) {
    if (name == toString(kind)) {
      return kind;
    }
  }
  throw std::invalid_argument("unknown gate kind '" + name + "'");
}

} // namespace detail

/**
 * Parses a schedule document. Throws std::invalid_argument when the structure
 * is broken; ids are not range-checked here (that is the verifier's job).
 */
[[nodiscard]] inline Schedule scheduleFromJson(const Json& j) {
  try {
    Schedule s;
    const auto& meta = j.at("meta");
    const auto& arch = meta.at("arch");
    s.meta.arch = GridParams{arch.at("m").get<std::size_t>(),
                             arch.at("n").get<std::size_t>(),
                             arch.at("v").get<std::size_t>(),
                             arch.at("h").get<std::size_t>()};
    s.meta.pzs = meta.at("pzs").get<std::size_t>();
    s.meta.seed = meta.at("seed").get<std::uint64_t>();
    s.meta.policy = meta.at("policy").get<std::string>();
    const auto& times = meta.at("gate_times");
    s.meta.gateTimes = GateTimes{times.at(0).get<std::size_t>(),
                                 times.at(1).get<std::size_t>()};

    const auto& c = j.at("circuit");
    s.circuit = Circuit(c.at("num_qubits").get<std::size_t>(), s.meta.gateTimes);
    for (const auto& g : c.at("gates")) {
      s.circuit.add(detail::gateKindFromString(g.at("kind").get<std::string>()),
                    g.at("qubits").get<std::vector<Qubit>>(),
                    g.value("angle", 0.0));
    }
    s.initialPlacement = j.at("initial_placement").get<std::vector<EdgeId>>();
    s.finalPlacement = j.at("final_placement").get<std::vector<EdgeId>>();
    s.makespan = j.at("makespan").get<std::size_t>();
    for (const auto& st : j.at("steps")) {
      TimeStepRecord step;
      step.t = st.at("t").get<std::size_t>();
      for (const auto& m : st.at("moves")) {
        const auto kind = m.at("kind").get<std::string>();
        if (kind != "cycle" && kind != "path") {
          throw std::invalid_argument("unknown move kind '" + kind + "'");
        }
        step.moves.push_back(
            Move{kind == "cycle" ? MoveKind::Cycle : MoveKind::Path,
                 m.at("edges").get<std::vector<EdgeId>>(),
                 m.value("ions", std::vector<IonId>{})});
      }
      for (const auto& gs : st.at("gate_starts")) {
        step.gateStarts.emplace_back(gs.at(0).get<GateId>(),
                                     gs.at(1).get<PzId>());
      }
      step.gateCompletions =
          st.at("gate_completions").get<std::vector<GateId>>();
      s.steps.push_back(std::move(step));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad schedule: ") + e.what());
  }
}

} // namespace qccd
