/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#pragma once

#include "qccd/circuit.hpp"
#include "qccd/device_graph.hpp"
#include "qccd/orchestrator.hpp"
#include "qccd/schedule.hpp"
#include "qccd/verifier.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qccd {

struct RunConfig {
  GridParams grid{3, 3, 1, 1};
  std::size_t pzCount = 1;
  std::size_t entryLen = 2;
  std::size_t exitLen = 2;
  std::uint32_t capacity = 2;
  /// Explicit device; overrides the grid and zone fields above.
  std::optional<ArchSpec> arch;
  /// ghz:N, qft:N, random:N[:SEED] or a path to an OpenQASM file.
  std::string circuit = "qft:12";
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  GateTimes gateTimes;
  Policy policy = Policy::Dag;
  bool prefetch = true;

  [[nodiscard]] ArchSpec archSpec() const {
    return arch ? *arch
                : defaultArch(grid, pzCount, entryLen, exitLen, capacity);
  }

  /// Throws std::invalid_argument for non-positive or empty fields.
  void validate() const {
    if (!arch && (grid.m == 0 || grid.n == 0 || grid.v == 0 || grid.h == 0 ||
                  pzCount == 0 || entryLen == 0 || exitLen == 0 ||
                  capacity == 0)) {
      throw std::invalid_argument("numeric run fields must be positive");
    }
    if (seeds.empty()) {
      throw std::invalid_argument("at least one seed is required");
    }
    if (gateTimes.singleQubit == 0 || gateTimes.twoQubit == 0) {
      throw std::invalid_argument("gate times must be positive");
    }
  }
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::size_t makespan = 0;
  double cpuSeconds = 0.0;
  bool valid = false;
};

struct RunStats {
  std::size_t gateCount = 0;
  std::vector<SeedResult> perSeed;

  [[nodiscard]] double meanMakespan() const {
    if (perSeed.empty()) {
      return 0.0;
    }
    double sum = 0.0;
    for (const auto& r : perSeed) {
      sum += static_cast<double>(r.makespan);
    }
    return sum / static_cast<double>(perSeed.size());
  }
  [[nodiscard]] double meanCpuSeconds() const {
    double sum = 0.0;
    for (const auto& r : perSeed) {
      sum += r.cpuSeconds;
    }
    return perSeed.empty() ? 0.0 : sum / static_cast<double>(perSeed.size());
  }
};

namespace detail {

inline std::size_t parseCount(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw std::invalid_argument("bad " + what + " '" + text + "'");
  }
  return static_cast<std::size_t>(value);
}

} // namespace detail

/**
 * Builds the circuit named by a spec string: `ghz:N`, `qft:N`,
 * `random:N[:SEED]` (seed 1 by default), otherwise an OpenQASM file path.
 */
[[nodiscard]] inline Circuit makeCircuit(const std::string& spec,
                                         const GateTimes times = {}) {
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string family = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    if (family == "ghz") {
      return ghz(detail::parseCount(rest, "width"), times);
    }
    if (family == "qft") {
      return qft(detail::parseCount(rest, "width"), times);
    }
    if (family == "random") {
      std::uint64_t seed = 1;
      const auto second = rest.find(':');
      if (second != std::string::npos) {
        seed = detail::parseCount(rest.substr(second + 1), "circuit seed");
        rest = rest.substr(0, second);
      }
      return randomCircuit(detail::parseCount(rest, "width"), seed, times);
    }
  }
  std::ifstream in(spec);
  if (!in) {
    throw std::invalid_argument("unknown circuit '" + spec + "'");
  }
  std::stringstream text;
  text << in.rdbuf();
  return parseQasm(text.str(), times);
}

/// Called with every verified schedule, in seed order.
using ScheduleSink = std::function<void(std::uint64_t, const Schedule&)>;

/**
 * Compiles and verifies the circuit once per seed. Only the compile call is
 * timed. Throws std::runtime_error if any schedule fails verification.
 */
[[nodiscard]] inline RunStats runBenchmark(const RunConfig& config,
                                           const ScheduleSink& sink = {}) {
  config.validate();
  const Circuit circuit = makeCircuit(config.circuit, config.gateTimes);
  const DeviceGraph graph = buildDevice(config.archSpec());
  RunStats stats;
  stats.gateCount = circuit.size();
  for (const std::uint64_t seed : config.seeds) {
    CompileConfig cc;
    cc.seed = seed;
    cc.policy = config.policy;
    cc.prefetch = config.prefetch;
    const auto begin = std::chrono::steady_clock::now();
    const Schedule schedule = compile(circuit, graph, cc);
    const auto end = std::chrono::steady_clock::now();
    const auto report = verify(schedule, graph);
    if (!report.valid) {
      const auto& v = report.violations.front();
      throw std::runtime_error("seed " + std::to_string(seed) +
                               ": schedule invalid at step " +
                               std::to_string(v.step) + " (" + v.kind + ": " +
                               v.detail + ")");
    }
    if (sink) {
      sink(seed, schedule);
    }
    stats.perSeed.push_back(SeedResult{
        seed, schedule.makespan,
        std::chrono::duration<double>(end - begin).count(), report.valid});
  }
  return stats;
}

/// One run per zone count with everything else fixed.
[[nodiscard]] inline std::vector<RunStats>
sweep(const RunConfig& base, const std::vector<std::size_t>& pzCounts,
      const ScheduleSink& sink = {}) {
  if (pzCounts.empty()) {
    throw std::invalid_argument("sweep needs at least one zone count");
  }
  std::vector<RunStats> out;
  for (const std::size_t k : pzCounts) {
    RunConfig cfg = base;
    cfg.arch.reset();
    cfg.pzCount = k;
    out.push_back(runBenchmark(cfg, sink));
  }
  return out;
}

inline constexpr const char* CSV_HEADER =
    "arch,m,n,v,h,pzs,circuit,policy,seed,G,makespan,t_cpu";

/// Per-seed rows plus a `mean` row; `improvement` adds a trailing column.
inline void writeCsvRows(std::ostream& out, const RunConfig& config,
                         const RunStats& stats,
                         const std::optional<double> improvement = {}) {
  const auto arch = config.archSpec();
  const auto& g = arch.grid;
  std::ostringstream prefix;
  prefix << g.m << g.n << g.v << g.h << ',' << g.m << ',' << g.n << ','
         << g.v << ',' << g.h << ',' << arch.pzs.size() << ','
         << config.circuit << ',' << toString(config.policy) << ',';
  const auto tail = [&out, &improvement] {
    if (improvement) {
      out << ',' << std::fixed << std::setprecision(2) << *improvement;
    }
    out << '\n';
  };
  for (const auto& r : stats.perSeed) {
    out << prefix.str() << r.seed << ',' << stats.gateCount << ','
        << r.makespan << ',' << std::fixed << std::setprecision(6)
        << r.cpuSeconds;
    tail();
  }
  out << prefix.str() << "mean," << stats.gateCount << ',' << std::fixed
      << std::setprecision(2) << stats.meanMakespan() << ','
      << std::setprecision(6) << stats.meanCpuSeconds();
  tail();
}

/// Relative makespan reduction (percent) of each entry against the first.
[[nodiscard]] inline std::vector<double>
improvements(const std::vector<RunStats>& rows) {
  std::vector<double> out;
  for (const auto& r : rows) {
    const double base = rows.front().meanMakespan();
    out.push_back(base > 0.0 ? 100.0 * (1.0 - r.meanMakespan() / base) : 0.0);
  }
  return out;
}

} // namespace qccd
