#pragma once

// Empirical tasks, optimality criteria and their satisfaction regions.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "satcl/error.hpp"
#include "satcl/geometry.hpp"
#include "satcl/rational.hpp"

namespace satcl {

/// One atom (x, y) of an empirical measure. x is empty for output-only
/// tasks; scalar outputs are stored as a one-coordinate y.
struct Atom {
  Vec x;
  Vec y;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// The empirical measure (1/n) Σ δ_(y_i, x_i) of task `id`.
class EmpiricalTask {
 public:
  EmpiricalTask(std::size_t id, std::vector<Atom> atoms) : id_(id), atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw InvalidInput("task " + std::to_string(id_) + " has no atoms");
    for (const auto& a : atoms_)
      if (a.x.size() != dim_x() || a.y.size() != dim_y())
        throw InvalidInput("task " + std::to_string(id_) + ": atoms disagree on dimensions");
    if (dim_y() == 0) throw InvalidInput("task " + std::to_string(id_) + ": outputs must have dimension >= 1");
  }

  std::size_t id() const noexcept { return id_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  std::size_t dim_x() const noexcept { return atoms_.front().x.size(); }
  std::size_t dim_y() const noexcept { return atoms_.front().y.size(); }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  friend bool operator==(const EmpiricalTask&, const EmpiricalTask&) = default;

 private:
  std::size_t id_;
  std::vector<Atom> atoms_;
};

enum class CriterionKind { PerSampleAbs, MeanAbs, MeanSqEuclid };

struct Criterion {
  CriterionKind kind = CriterionKind::PerSampleAbs;
  Rat epsilon = Rat(1, 2);

  friend bool operator==(const Criterion&, const Criterion&) = default;
};

/// Largest task the MeanAbs H-representation accepts (2^n halfspaces).
inline constexpr std::size_t kSignCap = 12;

inline std::string_view to_string(CriterionKind k) {
  switch (k) {
    case CriterionKind::PerSampleAbs: return "per-sample";
    case CriterionKind::MeanAbs: return "mean-abs";
    case CriterionKind::MeanSqEuclid: return "mean-sq";
  }
  return "?";
}

inline CriterionKind parse_criterion_kind(std::string_view s) {
  if (s == "per-sample" || s == "PerSampleAbs") return CriterionKind::PerSampleAbs;
  if (s == "mean-abs" || s == "MeanAbs") return CriterionKind::MeanAbs;
  if (s == "mean-sq" || s == "MeanSqEuclid") return CriterionKind::MeanSqEuclid;
  throw InvalidInput("unknown criterion '" + std::string(s) + "'");
}

/// Parameter dimension d implied by the task under the criterion.
inline std::size_t parameter_dim(const Criterion& c, const EmpiricalTask& task) {
  if (c.kind == CriterionKind::MeanSqEuclid) {
    if (task.dim_x() != 0) throw InvalidInput("mean-sq criterion needs output-only atoms");
    return task.dim_y();
  }
  if (task.dim_y() != 1) throw InvalidInput("absolute-residual criteria need scalar outputs");
  if (task.dim_x() == 0) throw InvalidInput("absolute-residual criteria need inputs");
  return task.dim_x();
}

/// Residual y − θᵀx of a scalar-output atom.
inline Rat residual(const Atom& a, const Vec& theta) { return a.y[0] - dot(theta, a.x); }

/// C(θ, P̂) ∈ {0, 1}, evaluated exactly.
inline bool evaluate_criterion(const Criterion& c, const Vec& theta, const EmpiricalTask& task) {
  if (theta.size() != parameter_dim(c, task)) throw InvalidInput("criterion: parameter dimension mismatch");
  switch (c.kind) {
    case CriterionKind::PerSampleAbs:
      for (const auto& a : task.atoms())
        if (abs(residual(a, theta)) > c.epsilon) return false;
      return true;
    case CriterionKind::MeanAbs: {
      Rat total = 0;
      for (const auto& a : task.atoms()) total += abs(residual(a, theta));
      return total <= c.epsilon * static_cast<long>(task.size());
    }
    case CriterionKind::MeanSqEuclid: {
      Rat total = 0;
      for (const auto& a : task.atoms()) total += squared_distance(a.y, theta);
      return total <= c.epsilon * static_cast<long>(task.size());
    }
  }
  return false;
}

namespace detail {

// normal·θ ≤ offset; a zero normal is either vacuous or makes the region empty.
struct HalfspaceCollector {
  std::size_t dim;
  std::vector<Halfspace> hs;
  bool empty = false;

  void add(Vec normal, Rat offset) {
    if (is_zero(normal)) {
      if (offset < 0) empty = true;
      return;
    }
    hs.push_back({std::move(normal), std::move(offset)});
  }

  ConvexRegion finish() && {
    if (empty) return ConvexRegion::empty(dim);
    return canonical(ConvexRegion::from(dim, std::move(hs)));
  }
};

inline Vec negated(Vec v) {
  for (auto& x : v) x = -x;
  return v;
}

}  // namespace detail

/// Sat(P̂) as a region, returned in canonical (normalized, sorted,
/// deduplicated) form so Sat-equal tasks of the kinds above map to identical
/// constraint lists.
///
/// PerSampleAbs: the 2n halfspaces  x_i·θ ≤ y_i + ε  and  −x_i·θ ≤ ε − y_i.
/// MeanAbs: one halfspace per sign pattern s ∈ {−1, +1}^n,
///   −(Σ s_i x_i)·θ ≤ nε − Σ s_i y_i, which is the exact H-representation of
///   Σ|y_i − θᵀx_i| ≤ nε.
/// MeanSqEuclid: (1/n)Σ‖y_i − θ‖² = ‖θ − ȳ‖² + Var, so the ball centered at ȳ
///   with squared radius ε − Var (Empty when ε < Var).
inline ConvexRegion sat_region(const Criterion& c, const EmpiricalTask& task) {
  const std::size_t d = parameter_dim(c, task);
  const long n = static_cast<long>(task.size());
  switch (c.kind) {
    case CriterionKind::PerSampleAbs: {
      detail::HalfspaceCollector col{d, {}};
      for (const auto& a : task.atoms()) {
        col.add(a.x, a.y[0] + c.epsilon);
        col.add(detail::negated(a.x), c.epsilon - a.y[0]);
      }
      return std::move(col).finish();
    }
    case CriterionKind::MeanAbs: {
      if (task.size() > kSignCap)
        throw TaskTooLarge("mean-abs region needs 2^" + std::to_string(task.size()) + " halfspaces (cap 2^" +
                           std::to_string(kSignCap) + ")");
      detail::HalfspaceCollector col{d, {}};
      const std::size_t patterns = std::size_t{1} << task.size();
      for (std::size_t mask = 0; mask < patterns; ++mask) {
        Vec normal(d, Rat(0));
        Rat offset = c.epsilon * n;
        for (std::size_t i = 0; i < task.size(); ++i) {
          const auto& a = task.atoms()[i];
          const int s = (mask >> i) & 1U ? -1 : 1;
          for (std::size_t j = 0; j < d; ++j) normal[j] -= s * a.x[j];
          offset -= s * a.y[0];
        }
        col.add(std::move(normal), std::move(offset));
      }
      return std::move(col).finish();
    }
    case CriterionKind::MeanSqEuclid: {
      Vec mean(d, Rat(0));
      for (const auto& a : task.atoms())
        for (std::size_t j = 0; j < d; ++j) mean[j] += a.y[j];
      for (auto& m : mean) m /= n;
      Rat var = 0;
      for (const auto& a : task.atoms()) var += squared_distance(a.y, mean);
      var /= n;
      if (c.epsilon < var) return ConvexRegion::empty(d);
      return ConvexRegion::from(d, {}, {Ball{std::move(mean), c.epsilon - var}});
    }
  }
  throw InvalidInput("unknown criterion kind");
}

/// Checks the defining identity C(θ, P̂) = 1 ⟺ θ ∈ Sat(P̂) on every probe.
inline bool region_criterion_consistency(const Criterion& c, const EmpiricalTask& task, const std::vector<Vec>& probes) {
  const ConvexRegion region = sat_region(c, task);
  for (const auto& p : probes)
    if (evaluate_criterion(c, p, task) != contains(region, p)) return false;
  return true;
}

}  // namespace satcl
