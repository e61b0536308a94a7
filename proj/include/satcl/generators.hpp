#pragma once

// Seeded task-stream families. All sampled coordinates are dyadic
// rationals k/2^10, so every stream is exact and a pure function of its spec.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "satcl/criteria.hpp"
#include "satcl/error.hpp"
#include "satcl/rational.hpp"
#include "satcl/rng.hpp"

namespace satcl {

enum class StreamKind { PlantedFeasible, AdversarialShift, SingletonSat, BallMeans };

inline StreamKind parse_stream_kind(std::string_view s) {
  if (s == "planted") return StreamKind::PlantedFeasible;
  if (s == "adversarial") return StreamKind::AdversarialShift;
  if (s == "singleton") return StreamKind::SingletonSat;
  if (s == "ball") return StreamKind::BallMeans;
  throw InvalidSpec("unknown stream kind '" + std::string(s) + "' (planted|adversarial|singleton|ball)");
}

inline std::string_view to_string(StreamKind k) {
  switch (k) {
    case StreamKind::PlantedFeasible: return "planted";
    case StreamKind::AdversarialShift: return "adversarial";
    case StreamKind::SingletonSat: return "singleton";
    case StreamKind::BallMeans: return "ball";
  }
  return "?";
}

struct StreamSpec {
  StreamKind kind = StreamKind::PlantedFeasible;
  std::uint64_t seed = 0;
  std::size_t d = 2;
  std::size_t T = 5;
  std::size_t n_per_task = 4;
  Rat epsilon = Rat(1, 2);
  Rat margin = Rat(1, 8);
  std::optional<Vec> offset;  // SingletonSat: the point a (drawn from the seed when unset)
};

struct GeneratedStream {
  std::vector<EmpiricalTask> tasks;
  std::optional<Vec> planted;  // a point known to lie in every Sat region
};

namespace detail {

inline Vec planted_point(Rng& rng, std::size_t d) { return rng.grid_vec(d, Rat(-1), Rat(1)); }

inline GeneratedStream planted_stream(const StreamSpec& s) {
  if (s.margin <= 0 || s.margin >= s.epsilon) throw InvalidSpec("planted stream needs 0 < margin < epsilon");
  if (s.n_per_task == 0) throw InvalidSpec("planted stream needs n_per_task >= 1");
  Rng rng(s.seed);
  GeneratedStream out;
  out.planted = planted_point(rng, s.d);
  const Rat slack = s.epsilon - s.margin;
  for (std::size_t t = 1; t <= s.T; ++t) {
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < s.n_per_task; ++i) {
      Vec x = rng.grid_vec(s.d, Rat(-2), Rat(2));
      const Rat noise = rng.grid(-slack, slack);
      atoms.push_back({x, {dot(*out.planted, x) + noise}});
    }
    out.tasks.emplace_back(t, std::move(atoms));
  }
  return out;
}

// Two tasks in d = 2 under PerSampleAbs (scaled here for ε = 1/2):
//
//   task 1: x = (0, 4),      y = 0    ->  |θ₂| ≤ ε/4               (thin slab)
//   task 2: x = (100, 100),  y = 250  ->  |θ₁ + θ₂ − 5/2| ≤ ε/100
//           x = (1/8, −1/8), y = 0    ->  |θ₁ − θ₂| ≤ 8ε           (long strip)
//
// (5/2, 0) lies in both regions for ε ≥ 5/16, and it is a point of the 1/8
// grid. A regularizer anchored at θ₁ = 0 (task 1 is satisfied at the origin,
// so it never moves) minimizes 100·max(0, 5/2 − ε/100 − θ₁ − θ₂) + λ‖θ‖² at
// t = 2. Along θ = s(1, 1) the hinge slope is 200 while the penalty slope is
// 4λs = 40s for λ = 10, so the minimizer is the boundary point
// s = (5/2 − ε/100)/2 ≈ 5/4. Its θ₂ ≈ 5/4 exceeds ε/4 for every ε < 5, so
// the regularizer leaves Sat₁ even though Sat₁ ∩ Sat₂ is nonempty.
inline GeneratedStream adversarial_stream(const StreamSpec& s) {
  if (s.d != 2 || s.T != 2) throw InvalidSpec("adversarial stream is fixed at d = 2, T = 2");
  if (s.epsilon < Rat(1, 2) || s.epsilon > 2) throw InvalidSpec("adversarial stream needs 1/2 <= epsilon <= 2");
  GeneratedStream out;
  out.tasks.emplace_back(1, std::vector<Atom>{{{Rat(0), Rat(4)}, {Rat(0)}}});
  out.tasks.emplace_back(2, std::vector<Atom>{{{Rat(100), Rat(100)}, {Rat(250)}}, {{Rat(1, 8), Rat(-1, 8)}, {Rat(0)}}});
  out.planted = Vec{Rat(5, 2), Rat(0)};
  return out;
}

// Task 1 atoms (e_j, a_j), task 2 atoms (e_j, a_j + 2ε): the boxes
// [a − ε, a + ε] and [a + ε, a + 3ε] meet only in the point a + ε.
inline GeneratedStream singleton_stream(const StreamSpec& s) {
  if (s.T != 2) throw InvalidSpec("singleton stream has exactly two tasks");
  if (s.d == 0) throw InvalidSpec("singleton stream needs d >= 1");
  Vec a;
  if (s.offset) {
    if (s.offset->size() != s.d) throw InvalidSpec("singleton offset dimension mismatch");
    a = *s.offset;
  } else {
    Rng rng(s.seed);
    a = rng.grid_vec(s.d, Rat(-1), Rat(1), 4);
  }
  std::vector<Atom> first, second;
  for (std::size_t j = 0; j < s.d; ++j) {
    Vec e(s.d, Rat(0));
    e[j] = 1;
    first.push_back({e, {a[j]}});
    second.push_back({e, {a[j] + 2 * s.epsilon}});
  }
  GeneratedStream out;
  out.tasks.emplace_back(1, std::move(first));
  out.tasks.emplace_back(2, std::move(second));
  Vec point(a);
  for (auto& v : point) v += s.epsilon;
  out.planted = std::move(point);
  return out;
}

// Output-only tasks y_i = θ* + u_i with u_i ∈ [−w, w]^d and d·w² ≤ ε − margin,
// so the mean squared distance to θ* stays below ε for every task.
inline GeneratedStream ball_stream(const StreamSpec& s) {
  if (s.margin <= 0 || s.margin >= s.epsilon) throw InvalidSpec("ball stream needs 0 < margin < epsilon");
  if (s.n_per_task == 0) throw InvalidSpec("ball stream needs n_per_task >= 1");
  Rng rng(s.seed);
  GeneratedStream out;
  out.planted = planted_point(rng, s.d);
  const Rat budget = (s.epsilon - s.margin) / static_cast<long>(s.d);
  std::int64_t k = 0;  // largest k with (k/2^10)² ≤ budget
  while (dyadic(k + 1, 10) * dyadic(k + 1, 10) <= budget) ++k;
  const Rat w = dyadic(k, 10);
  for (std::size_t t = 1; t <= s.T; ++t) {
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < s.n_per_task; ++i) {
      Vec y = *out.planted;
      for (auto& v : y) v += rng.grid(-w, w);
      atoms.push_back({{}, std::move(y)});
    }
    out.tasks.emplace_back(t, std::move(atoms));
  }
  return out;
}

}  // namespace detail

inline GeneratedStream generate_stream(const StreamSpec& spec) {
  if (spec.d == 0) throw InvalidSpec("stream needs d >= 1");
  if (spec.T == 0) throw InvalidSpec("stream needs T >= 1");
  if (spec.epsilon < 0) throw InvalidSpec("epsilon must be non-negative");
  switch (spec.kind) {
    case StreamKind::PlantedFeasible: return detail::planted_stream(spec);
    case StreamKind::AdversarialShift: return detail::adversarial_stream(spec);
    case StreamKind::SingletonSat: return detail::singleton_stream(spec);
    case StreamKind::BallMeans: return detail::ball_stream(spec);
  }
  throw InvalidSpec("unknown stream kind");
}

inline std::vector<EmpiricalTask> generate(const StreamSpec& spec) { return generate_stream(spec).tasks; }

/// Criterion a stream family is built for.
inline CriterionKind natural_criterion(StreamKind k) {
  return k == StreamKind::BallMeans ? CriterionKind::MeanSqEuclid : CriterionKind::PerSampleAbs;
}

}  // namespace satcl
