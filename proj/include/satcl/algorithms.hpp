#pragma once

// Concrete CL algorithms: exact (keeps Sat_{1:t}), replay over a coreset,
// and a quadratic-penalty regularizer.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "satcl/cl_engine.hpp"
#include "satcl/criteria.hpp"
#include "satcl/error.hpp"
#include "satcl/geometry.hpp"
#include "satcl/lp.hpp"
#include "satcl/rational.hpp"

namespace satcl {

/// Stores Sat_{1:t} and answers with its clipped Chebyshev center.
class ExactAlgorithm final : public CLAlgorithm {
 public:
  explicit ExactAlgorithm(Rat bound = kDefaultBound) : bound_(std::move(bound)) {}

  std::string name() const override { return "exact"; }

  CLState init(std::size_t dim) const override { return {Vec(dim, Rat(0)), Memory{ExactMemory{ConvexRegion::whole(dim)}}, 0}; }

  bool liftable() const override { return true; }

  Vec update_theta(const CLState& prev, const EmpiricalTask& task, const Criterion& c) const override {
    return update_theta_region(prev, sat_region(c, task));
  }
  Memory update_memory(const Vec& theta, const CLState& prev, const EmpiricalTask& task,
                       const Criterion& c) const override {
    return update_memory_region(theta, prev, sat_region(c, task));
  }

  Vec update_theta_region(const CLState& prev, const ConvexRegion& region) const override {
    const ConvexRegion joint = intersect(stored(prev), region);
    const std::size_t t = prev.t + 1;
    if (joint.is_polytope()) {
      if (lp_feasible(joint).empty()) throw Infeasible(t);
      try {
        return chebyshev_center(joint, bound_);
      } catch (const InfeasibleRegion&) {
        throw Infeasible(t, "Sat_{1:t} lies outside the clipping box");
      }
    }
    const Feasibility f = ball_feasible(joint);
    if (f.empty()) throw Infeasible(t);
    if (!f.feasible()) throw Infeasible(t, "ball intersection undecided within the iteration budget");
    return f.witness;
  }

  Memory update_memory_region(const Vec&, const CLState& prev, const ConvexRegion& region) const override {
    return Memory{ExactMemory{intersect(stored(prev), region)}};
  }

 private:
  static const ConvexRegion& stored(const CLState& s) {
    const auto* m = std::get_if<ExactMemory>(&s.memory.payload);
    if (!m) throw InvalidInput("exact algorithm stepped with a foreign memory payload");
    return m->constraints;
  }

  Rat bound_;
};

/// Refits on the coreset plus the current task, then keeps the k atoms of
/// the task with the largest residual under the new θ (ties: lower index).
///
/// The fit minimizes the maximum absolute residual, an exact LP
///   min s  s.t.  ±(y_i − θᵀx_i) ≤ s,
/// for the absolute-residual criteria, and is the coreset mean for mean-sq.
class ReplayAlgorithm final : public CLAlgorithm {
 public:
  explicit ReplayAlgorithm(std::size_t k = kUnboundedCoreset) : k_(k) {
    if (k_ == 0) throw InvalidInput("replay needs k >= 1");
  }

  std::string name() const override {
    return "replay:k=" + (k_ == kUnboundedCoreset ? std::string("inf") : std::to_string(k_));
  }

  CLState init(std::size_t dim) const override {
    ReplayMemory m;
    m.k = k_;
    return {Vec(dim, Rat(0)), Memory{m}, 0};
  }

  Vec update_theta(const CLState& prev, const EmpiricalTask& task, const Criterion& c) const override {
    std::vector<Atom> pool = stored(prev).coreset;
    pool.insert(pool.end(), task.atoms().begin(), task.atoms().end());
    return fit(pool, c, parameter_dim(c, task));
  }

  Memory update_memory(const Vec& theta, const CLState& prev, const EmpiricalTask& task,
                       const Criterion& c) const override {
    ReplayMemory m = stored(prev);
    m.criterion = c;
    for (std::size_t idx : select(theta, task, c)) m.coreset.push_back(task.atoms()[idx]);
    return Memory{std::move(m)};
  }

  /// Indices of the stored atoms, in ascending index order.
  std::vector<std::size_t> select(const Vec& theta, const EmpiricalTask& task, const Criterion& c) const {
    std::vector<std::size_t> order(task.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (k_ >= task.size()) return order;
    std::vector<Rat> score;
    score.reserve(task.size());
    for (const auto& a : task.atoms())
      score.push_back(c.kind == CriterionKind::MeanSqEuclid ? squared_distance(a.y, theta) : abs(residual(a, theta)));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return score[i] > score[j]; });
    order.resize(k_);
    std::sort(order.begin(), order.end());
    return order;
  }

  static Vec fit(const std::vector<Atom>& pool, const Criterion& c, std::size_t d) {
    if (c.kind == CriterionKind::MeanSqEuclid) {
      Vec mean(d, Rat(0));
      for (const auto& a : pool)
        for (std::size_t j = 0; j < d; ++j) mean[j] += a.y[j];
      for (auto& m : mean) m /= static_cast<long>(pool.size());
      return mean;
    }
    // Columns θ_1..θ_d (free) then s ≥ 0; maximize −s.
    lp::Problem p;
    for (const auto& a : pool) {
      Vec up(a.x), down(d + 1, Rat(0));
      up.push_back(Rat(-1));
      for (std::size_t j = 0; j < d; ++j) down[j] = -a.x[j];
      down[d] = -1;
      p.A.push_back(std::move(up));
      p.b.push_back(a.y[0]);
      p.A.push_back(std::move(down));
      p.b.push_back(-a.y[0]);
    }
    p.c.assign(d + 1, Rat(0));
    p.c[d] = -1;
    p.free.assign(d + 1, true);
    p.free[d] = false;
    auto res = lp::solve(p);
    if (res.status != lp::Status::Optimal) throw Error("replay fit: minimax LP did not reach an optimum");
    res.x.resize(d);
    return res.x;
  }

  std::size_t k() const noexcept { return k_; }

 private:
  static const ReplayMemory& stored(const CLState& s) {
    const auto* m = std::get_if<ReplayMemory>(&s.memory.payload);
    if (!m) throw InvalidInput("replay algorithm stepped with a foreign memory payload");
    return *m;
  }

  std::size_t k_;
};

struct RegOptions {
  std::size_t iters = 2000;
  double eta = 1.0;
};

/// Minimizes Σ_i max(0, |y_i − θᵀx_i| − ε) + λ‖θ − anchor‖² by subgradient
/// descent from the anchor with normalized steps η/√k, and keeps the best
/// iterate by objective value. Only θ_t is carried forward.
class RegAlgorithm final : public CLAlgorithm {
 public:
  explicit RegAlgorithm(Rat lambda, RegOptions opt = {}) : lambda_(std::move(lambda)), opt_(opt) {
    if (lambda_ < 0) throw InvalidInput("regularizer weight must be non-negative");
  }

  std::string name() const override { return "reg:lambda=" + to_string(lambda_); }

  CLState init(std::size_t dim) const override { return {Vec(dim, Rat(0)), Memory{RegMemory{Vec(dim, Rat(0)), lambda_}}, 0}; }

  Vec update_theta(const CLState& prev, const EmpiricalTask& task, const Criterion& c) const override {
    if (c.kind == CriterionKind::MeanSqEuclid) throw InvalidInput("regularizer supports absolute-residual criteria only");
    const std::size_t d = parameter_dim(c, task);
    const auto* m = std::get_if<RegMemory>(&prev.memory.payload);
    if (!m) throw InvalidInput("regularizer stepped with a foreign memory payload");
    const std::vector<double> anchor = to_double(m->anchor);
    const double lambda = lambda_.get_d();
    const double eps = c.epsilon.get_d();
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    for (const auto& a : task.atoms()) {
      xs.push_back(to_double(a.x));
      ys.push_back(a.y[0].get_d());
    }

    auto objective = [&](const std::vector<double>& th, std::vector<double>* grad) {
      double f = 0.0;
      if (grad) grad->assign(d, 0.0);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        double pred = 0.0;
        for (std::size_t j = 0; j < d; ++j) pred += xs[i][j] * th[j];
        const double r = ys[i] - pred;
        const double excess = std::abs(r) - eps;
        if (excess > 0.0) {
          f += excess;
          // d|y − θx|/dθ = −sign(r)·x
          if (grad)
            for (std::size_t j = 0; j < d; ++j) (*grad)[j] -= (r > 0 ? 1.0 : -1.0) * xs[i][j];
        }
      }
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = th[j] - anchor[j];
        f += lambda * diff * diff;
        if (grad) (*grad)[j] += 2.0 * lambda * diff;
      }
      return f;
    };

    std::vector<double> theta = anchor, best = anchor, g;
    double best_f = objective(theta, nullptr);
    for (std::size_t k = 1; k <= opt_.iters; ++k) {
      objective(theta, &g);
      double norm = 0.0;
      for (double v : g) norm += v * v;
      norm = std::sqrt(norm);
      if (norm == 0.0) break;
      const double step = opt_.eta / std::sqrt(static_cast<double>(k));
      for (std::size_t j = 0; j < d; ++j) theta[j] -= step * g[j] / norm;
      const double f = objective(theta, nullptr);
      if (f < best_f) {
        best_f = f;
        best = theta;
      }
    }
    Vec out;
    out.reserve(d);
    for (double v : best) out.push_back(from_double(v));
    return out;
  }

  Memory update_memory(const Vec& theta, const CLState&, const EmpiricalTask&, const Criterion&) const override {
    return Memory{RegMemory{theta, lambda_}};
  }

  /// F(θ) in exact arithmetic, for tests.
  static Rat objective(const Vec& theta, const Vec& anchor, const Rat& lambda, const EmpiricalTask& task, const Criterion& c) {
    Rat f = 0;
    for (const auto& a : task.atoms()) {
      const Rat excess = abs(residual(a, theta)) - c.epsilon;
      if (excess > 0) f += excess;
    }
    return f + lambda * squared_distance(theta, anchor);
  }

  const Rat& lambda() const noexcept { return lambda_; }

 private:
  Rat lambda_;
  RegOptions opt_;
};

/// "exact", "replay:k=<int>" (or k=inf), "reg:lambda=<rat>".
inline std::shared_ptr<const CLAlgorithm> make_algorithm(std::string_view spec) {
  if (spec == "exact") return std::make_shared<ExactAlgorithm>();
  if (spec == "replay") return std::make_shared<ReplayAlgorithm>();
  constexpr std::string_view replay = "replay:k=";
  constexpr std::string_view reg = "reg:lambda=";
  if (spec.substr(0, replay.size()) == replay) {
    const auto value = spec.substr(replay.size());
    if (value == "inf" || value == "full") return std::make_shared<ReplayAlgorithm>();
    if (value.empty() || value.find_first_not_of("0123456789") != std::string_view::npos)
      throw InvalidInput("bad replay size in '" + std::string(spec) + "'");
    return std::make_shared<ReplayAlgorithm>(std::stoull(std::string(value)));
  }
  if (spec.substr(0, reg.size()) == reg) return std::make_shared<RegAlgorithm>(parse_rat(spec.substr(reg.size())));
  throw InvalidInput("unknown algorithm '" + std::string(spec) + "'");
}

inline CLState exact_step(const CLState& s, const EmpiricalTask& task, const Criterion& c) {
  return ExactAlgorithm{}.step(s, task, c);
}

inline CLState replay_step(const CLState& s, const EmpiricalTask& task, const Criterion& c) {
  const auto* m = std::get_if<ReplayMemory>(&s.memory.payload);
  if (!m) throw InvalidInput("replay_step needs a replay memory");
  return ReplayAlgorithm{m->k}.step(s, task, c);
}

inline CLState reg_step(const CLState& s, const EmpiricalTask& task, const Criterion& c) {
  const auto* m = std::get_if<RegMemory>(&s.memory.payload);
  if (!m) throw InvalidInput("reg_step needs a regularizer memory");
  return RegAlgorithm{m->lambda}.step(s, task, c);
}

}  // namespace satcl
