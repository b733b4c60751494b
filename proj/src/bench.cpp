#include "taskforge/bench.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace taskforge::harness {

namespace {

Stat stat_over(const std::vector<double>& values) {
  Stat s;
  s.count = values.size();
  if (values.empty()) return s;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  double sum = 0;
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

BenchResult run_bench(const BenchConfig& config, std::ostream* progress) {
  config.validate();
  BenchResult result;
  for (int n : config.robot_counts) {
    for (int m : config.task_counts) {
      std::vector<double> token_costs, opt_costs, token_times, opt_times;
      for (int trial = 0; trial < config.trials; ++trial) {
        BenchRow row;
        row.n = n;
        row.m = m;
        row.trial = trial;
        row.seed = config.seed;
        const bool run_optimal = config.skip_optimal_above_robots == 0 ||
                                 n <= config.skip_optimal_above_robots;
        try {
          const Scenario s = generate_random(config, n, m, trial);
          PipelineOptions opts;
          opts.run_optimal = run_optimal;
          const AllocationReport rep = run_pipeline(s, opts);
          row.token_cost = rep.token_cost;
          row.token_ms = rep.token_ms;
          row.token_assigned = rep.token_assigned;
          token_costs.push_back(rep.token_cost);
          token_times.push_back(rep.token_ms);
          if (run_optimal) {
            row.opt_ran = true;
            row.opt_cost = rep.optimal_cost;
            row.opt_ms = rep.optimal_ms;
            row.opt_assigned = rep.optimal_assigned;
            opt_costs.push_back(rep.optimal_cost);
            opt_times.push_back(rep.optimal_ms);
          } else {
            row.status = "skipped-optimal";
          }
        } catch (const std::exception& e) {
          row.status = std::string("error: ") + e.what();
        }
        if (progress)
          *progress << "n=" << n << " m=" << m << " trial=" << trial << " "
                    << row.status << "\n";
        result.rows.push_back(std::move(row));
      }
      BenchAggregate agg;
      agg.n = n;
      agg.m = m;
      agg.token_cost = stat_over(token_costs);
      agg.opt_cost = stat_over(opt_costs);
      agg.token_ms = stat_over(token_times);
      agg.opt_ms = stat_over(opt_times);
      result.aggregates.push_back(agg);
    }
  }
  return result;
}

void write_csv(const BenchResult& result, std::ostream& out) {
  out << "n,m,trial,seed,token_cost,opt_cost,token_ms,opt_ms,"
         "token_assigned,opt_assigned,status\n";
  for (const BenchRow& r : result.rows) {
    out << r.n << "," << r.m << "," << r.trial << "," << r.seed << ",";
    if (r.status.rfind("error", 0) == 0) {
      out << ",,,,,," << r.status << "\n";
      continue;
    }
    out << fmt(r.token_cost) << ",";
    if (r.opt_ran) out << fmt(r.opt_cost);
    out << "," << fmt(r.token_ms) << ",";
    if (r.opt_ran) out << fmt(r.opt_ms);
    out << "," << r.token_assigned << ",";
    if (r.opt_ran) out << r.opt_assigned;
    out << "," << r.status << "\n";
  }
  for (const BenchAggregate& a : result.aggregates) {
    const struct {
      const char* name;
      double token_cost, opt_cost, token_ms, opt_ms;
    } stats[] = {
        {"agg_mean", a.token_cost.mean, a.opt_cost.mean, a.token_ms.mean,
         a.opt_ms.mean},
        {"agg_min", a.token_cost.min, a.opt_cost.min, a.token_ms.min,
         a.opt_ms.min},
        {"agg_max", a.token_cost.max, a.opt_cost.max, a.token_ms.max,
         a.opt_ms.max},
    };
    for (const auto& st : stats) {
      out << a.n << "," << a.m << ",,," << fmt(st.token_cost) << ",";
      if (a.opt_cost.count > 0) out << fmt(st.opt_cost);
      out << "," << fmt(st.token_ms) << ",";
      if (a.opt_ms.count > 0) out << fmt(st.opt_ms);
      out << ",,," << st.name << "\n";
    }
  }
}

void write_gnuplot(const BenchResult& result,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const struct {
    const char* file;
    Stat BenchAggregate::* stat;
  } metrics[] = {
      {"token_cost.dat", &BenchAggregate::token_cost},
      {"opt_cost.dat", &BenchAggregate::opt_cost},
      {"token_ms.dat", &BenchAggregate::token_ms},
      {"opt_ms.dat", &BenchAggregate::opt_ms},
  };
  for (const auto& metric : metrics) {
    std::ofstream out(dir / metric.file);
    out << "# n m mean min max\n";
    for (const BenchAggregate& a : result.aggregates) {
      const Stat& s = a.*(metric.stat);
      if (s.count == 0) continue;
      out << a.n << " " << a.m << " " << s.mean << " " << s.min << " " << s.max
          << "\n";
    }
  }
}

}  // namespace taskforge::harness
