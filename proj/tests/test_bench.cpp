/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace qccd {
namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    out.push_back(line);
  }
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) {
    out.push_back(f);
  }
  return out;
}

TEST(Bench, CircuitSpecs) {
  EXPECT_EQ(makeCircuit("ghz:12", {}).size(), 57U);
  EXPECT_EQ(makeCircuit("qft:12", {}).size(), 222U);
  EXPECT_EQ(makeCircuit("random:8", {}), randomCircuit(8, 1));
  EXPECT_EQ(makeCircuit("random:8:9", {}), randomCircuit(8, 9));
  EXPECT_EQ(makeCircuit("qft:3", GateTimes{2, 4}), qft(3, GateTimes{2, 4}));
  for (const char* bad : {"ghz:", "qft:x", "random:4:", "ghz:3z", "nope.qasm"}) {
    EXPECT_THROW((void)makeCircuit(bad, {}), std::invalid_argument) << bad;
  }
  const auto path = std::filesystem::temp_directory_path() / "qccd_bench_circuit.qasm";
  {
    std::ofstream out(path);
    out << toQasm(test::exampleCircuit());
  }
  EXPECT_EQ(makeCircuit(path.string(), {}), test::exampleCircuit());
  std::filesystem::remove(path);
}

TEST(Bench, RunAndCsv) {
  RunConfig cfg;
  cfg.circuit = "ghz:12";
  std::size_t sunk = 0;
  const auto stats = runBenchmark(cfg, [&sunk](std::uint64_t, const Schedule& s) {
    EXPECT_EQ(s.circuit.size(), 57U);
    ++sunk;
  });
  EXPECT_EQ(sunk, 5U);
  EXPECT_EQ(stats.gateCount, 57U);
  ASSERT_EQ(stats.perSeed.size(), 5U);
  double sum = 0;
  for (const auto& r : stats.perSeed) {
    EXPECT_TRUE(r.valid);
    EXPECT_GE(r.makespan, criticalPathLength(ghz(12)));
    sum += static_cast<double>(r.makespan);
  }
  EXPECT_DOUBLE_EQ(stats.meanMakespan(), sum / 5);

  std::ostringstream csv;
  writeCsvRows(csv, cfg, stats);
  const auto rows = lines(csv.str());
  ASSERT_EQ(rows.size(), 6U);
  const auto header = fields(CSV_HEADER);
  for (const auto& row : rows) {
    const auto f = fields(row);
    ASSERT_EQ(f.size(), header.size());
    EXPECT_EQ(f[0], "3311");
    EXPECT_EQ(f[5], "1");
    EXPECT_EQ(f[6], "ghz:12");
    EXPECT_EQ(f[7], "dag");
    EXPECT_EQ(f[9], "57");
  }
  EXPECT_EQ(fields(rows[0])[8], "1");
  EXPECT_EQ(fields(rows[5])[8], "mean");
}

TEST(Bench, SweepOfOneZoneCount) {
  RunConfig cfg;
  cfg.circuit = "qft:6";
  cfg.seeds = {1, 2};
  const auto rows = sweep(cfg, {1});
  ASSERT_EQ(rows.size(), 1U);
  EXPECT_EQ(improvements(rows), (std::vector<double>{0.0}));
  EXPECT_THROW((void)sweep(cfg, {}), std::invalid_argument);
}

TEST(Bench, RerunsMatchApartFromTiming) {
  RunConfig cfg;
  cfg.grid = {4, 4, 1, 1};
  cfg.pzCount = 2;
  cfg.circuit = "random:10:3";
  const auto a = runBenchmark(cfg);
  const auto b = runBenchmark(cfg);
  ASSERT_EQ(a.perSeed.size(), b.perSeed.size());
  for (std::size_t i = 0; i < a.perSeed.size(); ++i) {
    EXPECT_EQ(a.perSeed[i].makespan, b.perSeed[i].makespan);
  }
}

TEST(Bench, ValidateRejectsEmptyFields) {
  RunConfig cfg;
  cfg.seeds.clear();
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = RunConfig{};
  cfg.pzCount = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = RunConfig{};
  cfg.gateTimes.twoQubit = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = RunConfig{};
  cfg.circuit = "qft:13";
  EXPECT_THROW((void)runBenchmark(cfg), std::invalid_argument);
}

} // namespace
} // namespace qccd
