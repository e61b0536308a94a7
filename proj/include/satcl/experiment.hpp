#pragma once

// Experiment drivers: multi-algorithm runs over a stream, and the
// cell-enumeration scaling sweep. CSV output is byte-deterministic unless
// timing columns are requested.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "satcl/algorithms.hpp"
#include "satcl/cl_engine.hpp"
#include "satcl/criteria.hpp"
#include "satcl/equivalence.hpp"
#include "satcl/error.hpp"
#include "satcl/generators.hpp"
#include "satcl/rng.hpp"

namespace satcl {

struct ExperimentOptions {
  bool timing = false;
  bool memory_check = true;
  std::size_t probes = 100;
  std::uint64_t seed = 0;
};

struct ExperimentRow {
  std::string algorithm;
  std::size_t t = 0;
  std::size_t forgetting = 0;
  std::size_t memory_size = 0;
  std::int64_t step_time_ns = 0;
  bool infeasible = false;
};

struct ExperimentVerdict {
  std::string algorithm;
  std::string verdict;  // MemoryVerdict::str(), or "skipped: <reason>"
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::vector<ExperimentVerdict> verdicts;
  std::vector<Trace> traces;
};

inline ExperimentResult run_experiment(const std::vector<EmpiricalTask>& stream, const std::vector<std::string>& algorithms,
                                       const Criterion& c, const ExperimentOptions& opt = {}) {
  if (algorithms.empty()) throw InvalidInput("no algorithms given");
  ExperimentResult res;
  for (const auto& name : algorithms) {
    const auto alg = make_algorithm(name);
    Trace trace = run(*alg, stream, c);
    for (const auto& rec : trace.records)
      res.rows.push_back({trace.algorithm, rec.t, forgetting_count(rec), rec.memory_size, rec.wall_time_ns, false});
    if (trace.infeasible_at) res.rows.push_back({trace.algorithm, *trace.infeasible_at, 0, 0, 0, true});

    if (opt.memory_check) {
      std::string verdict;
      try {
        verdict = perfect_memory_check(*alg, stream, c, opt.probes, opt.seed).str();
      } catch (const InvalidRegion& e) {
        verdict = std::string("skipped: ") + e.what();
      } catch (const InstanceTooLarge& e) {
        verdict = std::string("skipped: ") + e.what();
      }
      res.verdicts.push_back({trace.algorithm, verdict});
    }
    res.traces.push_back(std::move(trace));
  }
  return res;
}

inline ExperimentResult run_experiment(const StreamSpec& spec, const std::vector<std::string>& algorithms, const Criterion& c,
                                       const ExperimentOptions& opt = {}) {
  return run_experiment(generate(spec), algorithms, c, opt);
}

inline void write_experiment_csv(std::ostream& os, const ExperimentResult& res, bool timing) {
  os << "algorithm,t,forgetting_count,memory_size,step_time_us,infeasible\n";
  for (const auto& r : res.rows) {
    os << r.algorithm << ',' << r.t << ',';
    if (r.infeasible) {
      os << ",,,true\n";
      continue;
    }
    os << r.forgetting << ',' << r.memory_size << ',' << (timing ? format_micros(r.step_time_ns) : "0") << ",false\n";
  }
}

inline void write_verdicts_csv(std::ostream& os, const ExperimentResult& res) {
  os << "algorithm,verdict\n";
  for (const auto& v : res.verdicts) os << v.algorithm << ",\"" << v.verdict << "\"\n";
}

inline std::string verdicts_path(const std::string& out_path) { return out_path + ".verdicts.csv"; }

namespace detail {

template <class F>
void write_file(const std::string& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  body(out);
  out.flush();
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace detail

/// Writes the per-step CSV to `out_path` and, when verdicts were computed,
/// the perfect-memory verdicts to `<out_path>.verdicts.csv`.
inline void save_experiment(const std::string& out_path, const ExperimentResult& res, bool timing) {
  detail::write_file(out_path, [&](std::ostream& os) { write_experiment_csv(os, res, timing); });
  if (!res.verdicts.empty())
    detail::write_file(verdicts_path(out_path), [&](std::ostream& os) { write_verdicts_csv(os, res); });
}

// ---------------------------------------------------------------------------
// Scaling

struct ScalingRow {
  std::size_t q = 0;
  bool skipped = false;
  std::uint64_t lp_calls = 0;
  std::uint64_t lp_budget = 0;
  std::size_t cells = 0;
  std::int64_t time_ns = 0;
};

/// q single-atom PerSampleAbs slabs |x_i·θ − x_i·c_i| ≤ 1/2 with random
/// centers c_i and nonzero directions x_i.
inline std::vector<ConvexRegion> scaling_regions(std::size_t q, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  const Criterion c{CriterionKind::PerSampleAbs, Rat(1, 2)};
  std::vector<ConvexRegion> regions;
  for (std::size_t i = 0; i < q; ++i) {
    const Vec center = rng.grid_vec(d, Rat(-1), Rat(1), 4);
    Vec x;
    do x = rng.grid_vec(d, Rat(-2), Rat(2), 2);
    while (std::all_of(x.begin(), x.end(), [](const Rat& v) { return sgn(v) == 0; }));
    regions.push_back(sat_region(c, EmpiricalTask(i + 1, {{x, {dot(x, center)}}})));
  }
  return regions;
}

inline ScalingRow scaling_point(std::size_t q, std::size_t d, std::uint64_t seed) {
  ScalingRow row;
  row.q = q;
  const Arrangement arr(scaling_regions(q, d, seed));
  const auto start = std::chrono::steady_clock::now();
  try {
    const Enumeration e = enumerate_cells_with_stats(arr);
    row.lp_calls = e.stats.lp_calls;
    row.lp_budget = e.stats.lp_budget;
    row.cells = e.cells.size();
  } catch (const InstanceTooLarge&) {
    row.skipped = true;
    return row;
  }
  row.time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  return row;
}

inline std::vector<ScalingRow> scaling_experiment(std::size_t q_min, std::size_t q_max, std::size_t d, std::uint64_t seed) {
  if (q_min == 0 || q_max < q_min) throw InvalidInput("scaling needs 1 <= qmin <= qmax");
  if (d == 0) throw InvalidInput("scaling needs d >= 1");
  std::vector<ScalingRow> rows;
  for (std::size_t q = q_min; q <= q_max; ++q) rows.push_back(scaling_point(q, d, seed + q));
  return rows;
}

inline void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows, bool timing = true) {
  os << "q,lp_calls,cells,time_us\n";
  for (const auto& r : rows) {
    if (r.skipped) {
      os << r.q << ",skipped,skipped,skipped\n";
      continue;
    }
    os << r.q << ',' << r.lp_calls << ',' << r.cells << ',' << (timing ? format_micros(r.time_ns) : "0") << '\n';
  }
}

inline std::vector<ScalingRow> scaling_experiment(std::size_t q_min, std::size_t q_max, std::size_t d, std::uint64_t seed,
                                                  const std::string& out_path, bool timing = true) {
  auto rows = scaling_experiment(q_min, q_max, d, seed);
  detail::write_file(out_path, [&](std::ostream& os) { write_scaling_csv(os, rows, timing); });
  return rows;
}

}  // namespace satcl
