/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#include "qccd/qccd.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using namespace qccd;

std::vector<std::size_t> splitCounts(const std::string& text,
                                     const std::string& what) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    out.push_back(detail::parseCount(item, what));
  }
  if (out.empty()) {
    throw std::invalid_argument("empty " + what + " list");
  }
  return out;
}

Json readJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void writeFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
}

struct Options {
  std::string arch = "3,3,1,1";
  std::string archFile;
  std::string pzs = "1";
  std::size_t entryLen = 2;
  std::size_t exitLen = 2;
  std::uint32_t capacity = 2;
  std::string circuit = "qft:12";
  std::string seeds = "1,2,3,4,5";
  std::string policy = "dag";
  std::string gateTimes = "1,3";
  bool noPrefetch = false;
  std::string out;
  std::string stats;
  std::string dumpPartition;
};

void addRunOptions(CLI::App* cmd, Options& o, const bool sweepMode) {
  cmd->add_option("--arch", o.arch, "grid as m,n,v,h")->capture_default_str();
  if (!sweepMode) {
    cmd->add_option("--arch-file", o.archFile,
                    "architecture JSON (overrides --arch and --pzs)");
  }
  cmd->add_option("--pzs", o.pzs,
                  sweepMode ? "comma-separated zone counts" : "zone count")
      ->capture_default_str();
  cmd->add_option("--entry-len", o.entryLen)->capture_default_str();
  cmd->add_option("--exit-len", o.exitLen)->capture_default_str();
  cmd->add_option("--pz-capacity", o.capacity)->capture_default_str();
  cmd->add_option("--circuit", o.circuit,
                  "ghz:N | qft:N | random:N[:SEED] | file.qasm")
      ->capture_default_str();
  cmd->add_option("--seeds", o.seeds)->capture_default_str();
  cmd->add_option("--policy", o.policy, "dag | naive")
      ->check(CLI::IsMember({"dag", "naive"}))
      ->capture_default_str();
  cmd->add_option("--gate-times", o.gateTimes, "single,two")
      ->capture_default_str();
  cmd->add_flag("--no-prefetch", o.noPrefetch,
                "do not move ions of waiting gates ahead of time");
  cmd->add_option("--out", o.out, "directory for schedules");
  cmd->add_option("--stats", o.stats, "CSV statistics file");
  if (!sweepMode) {
    cmd->add_option("--dump-partition", o.dumpPartition,
                    "write the qubit partition of the first seed as JSON");
  }
}

RunConfig toRunConfig(const Options& o, const std::size_t pzCount) {
  RunConfig cfg;
  const auto grid = splitCounts(o.arch, "architecture");
  if (grid.size() != 4) {
    throw std::invalid_argument("--arch expects m,n,v,h");
  }
  cfg.grid = GridParams{grid[0], grid[1], grid[2], grid[3]};
  cfg.pzCount = pzCount;
  cfg.entryLen = o.entryLen;
  cfg.exitLen = o.exitLen;
  cfg.capacity = o.capacity;
  if (!o.archFile.empty()) {
    cfg.arch = archFromJson(readJson(o.archFile));
  }
  cfg.circuit = o.circuit;
  cfg.seeds.clear();
  for (const auto s : splitCounts(o.seeds, "seed")) {
    cfg.seeds.push_back(s);
  }
  const auto times = splitCounts(o.gateTimes, "gate time");
  if (times.size() != 2) {
    throw std::invalid_argument("--gate-times expects single,two");
  }
  cfg.gateTimes = GateTimes{times[0], times[1]};
  cfg.policy = policyFromString(o.policy);
  cfg.prefetch = !o.noPrefetch;
  return cfg;
}

ScheduleSink scheduleWriter(const std::string& dir, const RunConfig& cfg,
                            const bool perZoneDir) {
  if (dir.empty()) {
    return {};
  }
  std::filesystem::path root(dir);
  if (perZoneDir) {
    root /= "pzs" + std::to_string(cfg.archSpec().pzs.size());
  }
  std::filesystem::create_directories(root);
  writeFile(root / "arch.json", toJson(cfg.archSpec()).dump(1) + "\n");
  return [root](const std::uint64_t seed, const Schedule& s) {
    writeFile(root / ("schedule_seed" + std::to_string(seed) + ".json"),
              dumpSchedule(s));
  };
}

int runCompile(const Options& o) {
  const auto counts = splitCounts(o.pzs, "zone count");
  if (counts.size() != 1) {
    throw std::invalid_argument("compile takes one zone count; use sweep");
  }
  const RunConfig cfg = toRunConfig(o, counts.front());
  cfg.validate();
  if (!o.dumpPartition.empty()) {
    const auto circuit = makeCircuit(cfg.circuit, cfg.gateTimes);
    const auto part =
        partition(circuit, cfg.archSpec().pzs.size(), cfg.seeds.front());
    Json j = Json::object();
    for (Qubit q = 0; q < part.assignment.size(); ++q) {
      j[std::to_string(q)] = part.assignment[q];
    }
    writeFile(o.dumpPartition, j.dump(1) + "\n");
  }
  const auto stats = runBenchmark(cfg, scheduleWriter(o.out, cfg, false));
  std::ostringstream csv;
  csv << CSV_HEADER << '\n';
  writeCsvRows(csv, cfg, stats);
  if (o.stats.empty()) {
    std::cout << csv.str();
  } else {
    writeFile(o.stats, csv.str());
  }
  return 0;
}

int runSweep(const Options& o) {
  const auto counts = splitCounts(o.pzs, "zone count");
  std::vector<RunConfig> cfgs;
  std::vector<RunStats> rows;
  for (const auto k : counts) {
    cfgs.push_back(toRunConfig(o, k));
    rows.push_back(runBenchmark(cfgs.back(),
                                scheduleWriter(o.out, cfgs.back(), true)));
  }
  const auto gain = improvements(rows);
  std::ostringstream csv;
  csv << CSV_HEADER << ",improvement\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    writeCsvRows(csv, cfgs[i], rows[i], gain[i]);
  }
  if (o.stats.empty()) {
    std::cout << csv.str();
  } else {
    writeFile(o.stats, csv.str());
  }
  return 0;
}

int runVerify(const std::string& schedulePath, const std::string& archPath) {
  VerificationReport report;
  try {
    const auto schedule = scheduleFromJson(readJson(schedulePath));
    const auto graph = buildDevice(archFromJson(readJson(archPath)));
    report = verify(schedule, graph);
  } catch (const std::exception& e) {
    report.valid = false;
    report.violations.push_back(Violation{0, "malformed", e.what()});
  }
  std::cout << toJson(report).dump(2) << '\n';
  return report.valid ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shuttling and gate scheduler for grid-shaped QCCD devices"};
  app.require_subcommand(1);

  Options compileOpts;
  auto* compileCmd = app.add_subcommand("compile", "compile and verify a circuit");
  addRunOptions(compileCmd, compileOpts, false);

  Options sweepOpts;
  sweepOpts.pzs = "1,2,3,4";
  auto* sweepCmd = app.add_subcommand("sweep", "compile for several zone counts");
  addRunOptions(sweepCmd, sweepOpts, true);

  std::string schedulePath;
  std::string archPath;
  auto* verifyCmd = app.add_subcommand("verify", "check a schedule");
  verifyCmd->add_option("schedule", schedulePath)->required();
  verifyCmd->add_option("arch", archPath)->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*compileCmd) {
      return runCompile(compileOpts);
    }
    if (*sweepCmd) {
      return runSweep(sweepOpts);
    }
    return runVerify(schedulePath, archPath);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
