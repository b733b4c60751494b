#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "taskforge/random_gen.hpp"

namespace taskforge::harness {

struct BenchRow {
  int n = 0;
  int m = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double token_cost = 0;
  double opt_cost = 0;
  double token_ms = 0;
  double opt_ms = 0;
  std::size_t token_assigned = 0;
  std::size_t opt_assigned = 0;
  bool opt_ran = false;
  std::string status = "ok";  // ok | skipped-optimal | error: ...
};

struct Stat {
  double mean = 0;
  double min = 0;
  double max = 0;
  std::size_t count = 0;
};

struct BenchAggregate {
  int n = 0;
  int m = 0;
  Stat token_cost, opt_cost, token_ms, opt_ms;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<BenchAggregate> aggregates;
};

/// Runs every (n, m, trial) point of the config; per-trial failures are
/// recorded in the row status and the run continues.
BenchResult run_bench(const BenchConfig& config, std::ostream* progress = nullptr);

void write_csv(const BenchResult& result, std::ostream& out);

/// Plot-ready aggregate files, one per metric, rows "n m mean min max".
void write_gnuplot(const BenchResult& result, const std::filesystem::path& dir);

}  // namespace taskforge::harness
