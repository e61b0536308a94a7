#pragma once

// Command-line front end. `cli()` returns the process exit code:
// 0 success, 1 invalid input or usage, 2 internal error.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "satcl/algorithms.hpp"
#include "satcl/criteria.hpp"
#include "satcl/equivalence.hpp"
#include "satcl/error.hpp"
#include "satcl/experiment.hpp"
#include "satcl/generators.hpp"
#include "satcl/rational.hpp"
#include "satcl/task_io.hpp"

namespace satcl {

namespace detail {

struct StreamFlags {
  std::string spec = "planted";
  std::string tasks;  // a task count T, or a task file path
  std::size_t n_per_task = 4;
  std::string epsilon = "1/2";
  std::string margin = "1/8";
  std::string offset;  // ';'-separated rationals
  std::string criterion;
};

inline void add_stream_flags(CLI::App* cmd, StreamFlags& f, bool with_criterion = true) {
  cmd->add_option("--spec", f.spec, "stream family: planted|adversarial|singleton|ball");
  cmd->add_option("--tasks", f.tasks, "task count T, or a task file");
  cmd->add_option("--n-per-task", f.n_per_task, "atoms per generated task");
  cmd->add_option("--epsilon", f.epsilon, "criterion tolerance (rational)");
  cmd->add_option("--margin", f.margin, "generator margin (rational)");
  cmd->add_option("--offset", f.offset, "singleton point a, ';'-separated rationals");
  if (with_criterion) cmd->add_option("--criterion", f.criterion, "per-sample|mean-abs|mean-sq");
}

inline bool is_count(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

inline Vec parse_vec(const std::string& s) {
  Vec v;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ';')) v.push_back(parse_rat(part));
  return v;
}

inline StreamSpec stream_spec(const StreamFlags& f, std::uint64_t seed, std::size_t dim) {
  StreamSpec s;
  s.kind = parse_stream_kind(f.spec);
  s.seed = seed;
  s.d = dim;
  const bool two_task = s.kind == StreamKind::AdversarialShift || s.kind == StreamKind::SingletonSat;
  s.T = f.tasks.empty() ? (two_task ? 2 : 5) : std::stoull(f.tasks);
  s.n_per_task = f.n_per_task;
  s.epsilon = parse_rat(f.epsilon);
  s.margin = parse_rat(f.margin);
  if (!f.offset.empty()) s.offset = parse_vec(f.offset);
  return s;
}

struct ResolvedStream {
  std::vector<EmpiricalTask> tasks;
  Criterion criterion;
};

inline ResolvedStream resolve_stream(const StreamFlags& f, std::uint64_t seed, std::size_t dim) {
  ResolvedStream r;
  CriterionKind natural = CriterionKind::PerSampleAbs;
  if (!f.tasks.empty() && !is_count(f.tasks)) {
    r.tasks = read_tasks(f.tasks);
    if (r.tasks.front().dim_x() == 0) natural = CriterionKind::MeanSqEuclid;
  } else {
    const StreamSpec spec = stream_spec(f, seed, dim);
    r.tasks = generate(spec);
    natural = natural_criterion(spec.kind);
  }
  r.criterion.kind = f.criterion.empty() ? natural : parse_criterion_kind(f.criterion);
  r.criterion.epsilon = parse_rat(f.epsilon);
  if (r.criterion.epsilon < 0) throw InvalidInput("epsilon must be non-negative");
  return r;
}

// Runs `body` against the file at `path`, or against `out` when path is empty.
template <class F>
void emit(const std::string& path, std::ostream& out, F&& body) {
  if (path.empty()) {
    body(out);
    return;
  }
  write_file(path, body);
}

}  // namespace detail

inline int cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Exact continual-learning toolkit over Sat regions", "satcl"};
  app.fallthrough();
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::size_t dim = 2;
  app.add_option("--seed", seed, "random seed")->envname("SATCL_SEED");
  app.add_option("--dim", dim, "parameter dimension d");

  bool timing = false;
  std::string out_path;
  std::vector<std::string> algs;
  std::size_t probes = 100;
  std::size_t q_min = 1, q_max = 10;

  detail::StreamFlags gen_flags;
  auto* gen = app.add_subcommand("gen", "generate a task stream file");
  detail::add_stream_flags(gen, gen_flags, false);
  gen->add_option("--out", out_path, "output task file (stdout if omitted)");

  detail::StreamFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "run algorithms over a stream and write per-step CSV");
  detail::add_stream_flags(run_cmd, run_flags);
  run_cmd->add_option("--alg", algs, "algorithm: exact | replay[:k=N|inf] | reg:lambda=L (repeatable)")->required();
  run_cmd->add_option("--out", out_path, "output CSV (stdout if omitted)");
  run_cmd->add_option("--probes", probes, "probe budget of the perfect-memory check");
  run_cmd->add_flag("--timing", timing, "fill step_time_us with measured wall time");

  detail::StreamFlags cells_flags;
  auto* cells_cmd = app.add_subcommand("cells", "enumerate the cells of a task file's Sat arrangement");
  cells_cmd->add_option("--tasks", cells_flags.tasks, "task file")->required();
  cells_cmd->add_option("--criterion", cells_flags.criterion, "per-sample|mean-abs|mean-sq");
  cells_cmd->add_option("--epsilon", cells_flags.epsilon, "criterion tolerance (rational)");
  cells_cmd->add_option("--out", out_path, "output CSV (stdout if omitted)");

  detail::StreamFlags check_flags;
  auto* check_cmd = app.add_subcommand("check-memory", "decide perfect memory for algorithms on a stream");
  detail::add_stream_flags(check_cmd, check_flags);
  check_cmd->add_option("--alg", algs, "algorithm (repeatable)")->required();
  check_cmd->add_option("--probes", probes, "random probe budget");

  auto* scaling_cmd = app.add_subcommand("scaling", "measure cell-enumeration cost against the number of regions");
  scaling_cmd->add_option("--qmin", q_min, "smallest region count");
  scaling_cmd->add_option("--qmax", q_max, "largest region count");
  scaling_cmd->add_option("--out", out_path, "output CSV (stdout if omitted)");
  scaling_cmd->add_flag("--timing", timing, "fill time_us with measured wall time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      if (!gen_flags.tasks.empty() && !detail::is_count(gen_flags.tasks))
        throw InvalidInput("gen: --tasks must be a task count");
      const auto tasks = generate(detail::stream_spec(gen_flags, seed, dim));
      detail::emit(out_path, out, [&](std::ostream& os) { os << format_tasks(tasks); });
    } else if (*run_cmd) {
      const auto s = detail::resolve_stream(run_flags, seed, dim);
      ExperimentOptions opt;
      opt.timing = timing;
      opt.probes = probes;
      opt.seed = seed;
      const auto res = run_experiment(s.tasks, algs, s.criterion, opt);
      if (out_path.empty()) {
        write_experiment_csv(out, res, timing);
      } else {
        save_experiment(out_path, res, timing);
        for (const auto& v : res.verdicts) out << v.algorithm << ": " << v.verdict << '\n';
      }
    } else if (*cells_cmd) {
      const auto s = detail::resolve_stream(cells_flags, seed, dim);
      std::vector<ConvexRegion> regions;
      for (const auto& t : s.tasks) regions.push_back(sat_region(s.criterion, t));
      const auto cells = enumerate_cells(Arrangement(std::move(regions)));
      detail::emit(out_path, out, [&](std::ostream& os) { write_cells_csv(os, cells); });
    } else if (*check_cmd) {
      const auto s = detail::resolve_stream(check_flags, seed, dim);
      for (const auto& name : algs) {
        const auto alg = make_algorithm(name);
        out << alg->name() << ": " << perfect_memory_check(*alg, s.tasks, s.criterion, probes, seed).str() << '\n';
      }
    } else if (*scaling_cmd) {
      const auto rows = scaling_experiment(q_min, q_max, dim, seed);
      detail::emit(out_path, out, [&](std::ostream& os) { write_scaling_csv(os, rows, timing); });
    }
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const InvalidSpec& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const InvalidRegion& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const TaskTooLarge& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const InstanceTooLarge& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::out_of_range& e) {
    err << "error: value out of range: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace satcl
