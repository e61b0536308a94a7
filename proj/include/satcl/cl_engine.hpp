#pragma once

// The CL and Idealized CL recursions, traces, and optimality checks.
//
// A step realizes the two update maps in order:
//   θ_t = A_θ(θ_{t−1}, I_{t−1}, P̂_t)
//   I_t = A_I(θ_t,     I_{t−1}, P̂_t)

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "satcl/criteria.hpp"
#include "satcl/error.hpp"
#include "satcl/geometry.hpp"
#include "satcl/rational.hpp"

namespace satcl {

// ---------------------------------------------------------------------------
// Memory payloads

struct NoMemory {
  friend bool operator==(const NoMemory&, const NoMemory&) = default;
};

/// Sat_{1:t} itself.
struct ExactMemory {
  ConvexRegion constraints;
  friend bool operator==(const ExactMemory&, const ExactMemory&) = default;
};

inline constexpr std::size_t kUnboundedCoreset = std::numeric_limits<std::size_t>::max();

/// At most k atoms kept per task.
struct ReplayMemory {
  std::vector<Atom> coreset;
  std::size_t k = kUnboundedCoreset;
  std::string policy = "max-residual";
  Criterion criterion;
  friend bool operator==(const ReplayMemory&, const ReplayMemory&) = default;
};

/// Previous parameter and penalty weight.
struct RegMemory {
  Vec anchor;
  Rat lambda;
  friend bool operator==(const RegMemory&, const RegMemory&) = default;
};

/// I_t. size() is the reported memory metric: constraints for exact,
/// atoms for replay, one anchor point for the regularizer.
struct Memory {
  std::variant<NoMemory, ExactMemory, ReplayMemory, RegMemory> payload;

  std::size_t size() const {
    struct {
      std::size_t operator()(const NoMemory&) const { return 0; }
      std::size_t operator()(const ExactMemory& m) const { return m.constraints.constraint_count(); }
      std::size_t operator()(const ReplayMemory& m) const { return m.coreset.size(); }
      std::size_t operator()(const RegMemory&) const { return 1; }
    } v;
    return std::visit(v, payload);
  }

  friend bool operator==(const Memory&, const Memory&) = default;
};

inline std::string serialize(const Memory& m) {
  struct {
    std::string operator()(const NoMemory&) const { return "none"; }
    std::string operator()(const ExactMemory& mem) const {
      const auto& r = mem.constraints;
      if (r.is_empty_tag()) return "exact:empty";
      std::string out = "exact:";
      for (const auto& h : r.halfspaces()) out += "[" + join(h.normal, ',') + "|" + to_string(h.offset) + "]";
      for (const auto& b : r.balls()) out += "(" + join(b.center, ',') + "|" + to_string(b.radius_sq) + ")";
      return out;
    }
    std::string operator()(const ReplayMemory& mem) const {
      std::string out = "replay:";
      for (const auto& a : mem.coreset) out += "[" + join(a.x, ',') + "|" + join(a.y, ',') + "]";
      return out;
    }
    std::string operator()(const RegMemory& mem) const {
      return "reg:" + join(mem.anchor, ',') + "|" + to_string(mem.lambda);
    }
  } v;
  return std::visit(v, m.payload);
}

/// (θ_t, I_t) after t tasks.
struct CLState {
  Vec theta;
  Memory memory;
  std::size_t t = 0;

  friend bool operator==(const CLState&, const CLState&) = default;
};

// ---------------------------------------------------------------------------
// Algorithm interfaces

class CLAlgorithm {
 public:
  virtual ~CLAlgorithm() = default;

  virtual std::string name() const = 0;

  /// (θ_0, I_0): the origin and the algorithm's empty memory.
  virtual CLState init(std::size_t dim) const { return {Vec(dim, Rat(0)), Memory{}, 0}; }

  virtual Vec update_theta(const CLState& prev, const EmpiricalTask& task, const Criterion& c) const = 0;
  virtual Memory update_memory(const Vec& theta, const CLState& prev, const EmpiricalTask& task,
                               const Criterion& c) const = 0;

  CLState step(const CLState& prev, const EmpiricalTask& task, const Criterion& c) const {
    Vec theta = update_theta(prev, task, c);
    Memory memory = update_memory(theta, prev, task, c);
    return {std::move(theta), std::move(memory), prev.t + 1};
  }

  /// True when both maps read the task only through Sat(P̂_t).
  virtual bool liftable() const { return false; }

  virtual Vec update_theta_region(const CLState&, const ConvexRegion&) const {
    throw NotLiftable(name() + " reads raw atoms, not satisfaction regions");
  }
  virtual Memory update_memory_region(const Vec&, const CLState&, const ConvexRegion&) const {
    throw NotLiftable(name() + " reads raw atoms, not satisfaction regions");
  }
};

/// Steps consume Sat(P̂_t) instead of P̂_t.
class IdealizedCLAlgorithm {
 public:
  explicit IdealizedCLAlgorithm(std::shared_ptr<const CLAlgorithm> base) : base_(std::move(base)) {}

  std::string name() const { return "idealized(" + base_->name() + ")"; }
  CLState init(std::size_t dim) const { return base_->init(dim); }

  CLState step(const CLState& prev, const ConvexRegion& region) const {
    Vec theta = base_->update_theta_region(prev, region);
    Memory memory = base_->update_memory_region(theta, prev, region);
    return {std::move(theta), std::move(memory), prev.t + 1};
  }

 private:
  std::shared_ptr<const CLAlgorithm> base_;
};

/// Constructive direction of the CL → Idealized CL equivalence: the lifted
/// maps are the algorithm's own maps evaluated on Sat(P̂_t).
inline IdealizedCLAlgorithm lift_to_idealized(std::shared_ptr<const CLAlgorithm> alg) {
  if (!alg->liftable()) throw NotLiftable(alg->name() + " reads raw atoms, not satisfaction regions");
  return IdealizedCLAlgorithm(std::move(alg));
}

// ---------------------------------------------------------------------------
// Traces

struct TraceRecord {
  std::size_t t = 0;
  Vec theta;
  std::size_t memory_size = 0;
  std::vector<bool> satisfied;  // C(θ_t, P̂_i) for i = 1..t
  std::int64_t wall_time_ns = 0;
};

struct Trace {
  std::string algorithm;
  std::vector<TraceRecord> records;
  std::optional<std::size_t> infeasible_at;  // step whose update failed
  std::string infeasible_reason;

  bool complete() const noexcept { return !infeasible_at.has_value(); }
};

namespace detail {

inline std::size_t stream_dim(const std::vector<EmpiricalTask>& stream, const Criterion& c) {
  if (stream.empty()) throw InvalidInput("empty task stream");
  const std::size_t d = parameter_dim(c, stream.front());
  for (const auto& task : stream)
    if (parameter_dim(c, task) != d) throw InvalidInput("task stream mixes dimensions");
  return d;
}

}  // namespace detail

/// Runs init then one step per task, recording satisfaction of every task
/// seen so far. An Infeasible step truncates the trace with a marker.
inline Trace run(const CLAlgorithm& alg, const std::vector<EmpiricalTask>& stream, const Criterion& c) {
  const std::size_t d = detail::stream_dim(stream, c);
  Trace trace;
  trace.algorithm = alg.name();
  CLState state = alg.init(d);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    try {
      state = alg.step(state, stream[i], c);
    } catch (const Infeasible& e) {
      trace.infeasible_at = i + 1;
      trace.infeasible_reason = e.what();
      return trace;
    }
    const auto elapsed = std::chrono::steady_clock::now() - start;
    TraceRecord rec;
    rec.t = state.t;
    rec.theta = state.theta;
    rec.memory_size = state.memory.size();
    rec.wall_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count();
    for (std::size_t j = 0; j <= i; ++j) rec.satisfied.push_back(evaluate_criterion(c, state.theta, stream[j]));
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

/// Idealized run over Sat regions; satisfaction bits are region memberships.
inline Trace run_idealized(const IdealizedCLAlgorithm& alg, const std::vector<ConvexRegion>& regions) {
  if (regions.empty()) throw InvalidInput("empty region stream");
  Trace trace;
  trace.algorithm = alg.name();
  CLState state = alg.init(regions.front().dim());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    try {
      state = alg.step(state, regions[i]);
    } catch (const Infeasible& e) {
      trace.infeasible_at = i + 1;
      trace.infeasible_reason = e.what();
      return trace;
    }
    const auto elapsed = std::chrono::steady_clock::now() - start;
    TraceRecord rec;
    rec.t = state.t;
    rec.theta = state.theta;
    rec.memory_size = state.memory.size();
    rec.wall_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count();
    for (std::size_t j = 0; j <= i; ++j) rec.satisfied.push_back(contains(regions[j], state.theta));
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

/// Optimality (i): every recorded satisfaction bit is 1. Truncated traces
/// are not optimal.
inline bool check_optimality(const Trace& trace) {
  if (!trace.complete()) return false;
  for (const auto& rec : trace.records)
    for (bool bit : rec.satisfied)
      if (!bit) return false;
  return true;
}

/// Σ_{i≤t} (1 − C(θ_t, P̂_i)) for one record.
inline std::size_t forgetting_count(const TraceRecord& rec) {
  std::size_t n = 0;
  for (bool bit : rec.satisfied) n += bit ? 0 : 1;
  return n;
}

inline std::string bitstring(const std::vector<bool>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (bool b : bits) s += b ? '1' : '0';
  return s;
}

inline std::string format_micros(std::int64_t ns) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%03lld", static_cast<long long>(ns / 1000), static_cast<long long>(ns % 1000));
  return buf;
}

/// CSV: t,theta,memory_size,satisfied,wall_time_us. With timing off the time
/// column is written as 0 so the bytes depend on inputs only.
inline void write_trace_csv(std::ostream& os, const Trace& trace, bool timing = true) {
  os << "t,theta,memory_size,satisfied,wall_time_us\n";
  for (const auto& r : trace.records)
    os << r.t << ',' << join(r.theta) << ',' << r.memory_size << ',' << bitstring(r.satisfied) << ','
       << (timing ? format_micros(r.wall_time_ns) : std::string("0")) << '\n';
  if (trace.infeasible_at) os << *trace.infeasible_at << ",INFEASIBLE,,,\n";
}

// ---------------------------------------------------------------------------
// Sat-invariance (optimality condition ii)

/// The oracle set C_t = h(θ_t, I_t) each memory payload can rebuild:
/// exact memory is Sat_{1:t} itself, a coreset yields the Sat region of its
/// atoms pooled into one task, and an anchor-only memory yields {θ_t}.
/// Before any task (no payload) the set is the whole space.
inline ConvexRegion reconstruct_oracle_set(const CLState& state) {
  const std::size_t d = state.theta.size();
  struct {
    const CLState& s;
    std::size_t d;
    ConvexRegion operator()(const NoMemory&) const { return ConvexRegion::whole(d); }
    ConvexRegion operator()(const ExactMemory& m) const { return m.constraints; }
    ConvexRegion operator()(const ReplayMemory& m) const {
      if (m.coreset.empty()) return ConvexRegion::whole(d);
      return sat_region(m.criterion, EmpiricalTask(0, m.coreset));
    }
    ConvexRegion operator()(const RegMemory&) const { return point_region(s.theta); }
  } v{state, d};
  return std::visit(v, state.memory.payload);
}

/// Stepping the initial state with either task of a Sat-equal pair must give
/// identical θ and identical reconstructed oracle sets.
inline bool check_sat_invariance(const CLAlgorithm& alg, const Criterion& c,
                                 const std::vector<std::pair<EmpiricalTask, EmpiricalTask>>& pairs) {
  for (const auto& [a, b] : pairs) {
    const CLState s0 = alg.init(parameter_dim(c, a));
    const CLState sa = alg.step(s0, a, c);
    const CLState sb = alg.step(s0, b, c);
    if (sa.theta != sb.theta) return false;
    if (canonical(reconstruct_oracle_set(sa)) != canonical(reconstruct_oracle_set(sb))) return false;
  }
  return true;
}

}  // namespace satcl
