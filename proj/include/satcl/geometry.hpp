#pragma once

// Exact rational geometry kernel: halfspace systems, balls, intersections,
// feasibility decisions with witnesses and Chebyshev centers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "satcl/error.hpp"
#include "satcl/lp.hpp"
#include "satcl/rational.hpp"

namespace satcl {

/// {θ : normal·θ ≤ offset}
struct Halfspace {
  Vec normal;
  Rat offset;

  friend bool operator==(const Halfspace&, const Halfspace&) = default;
};

/// {θ : ‖θ − center‖² ≤ radius_sq}
struct Ball {
  Vec center;
  Rat radius_sq;

  friend bool operator==(const Ball&, const Ball&) = default;
};

enum class RegionTag { NonTrivial, Empty, Whole };

/// A conjunction of halfspace and ball constraints in a fixed dimension.
/// Empty carries no constraints and contains nothing; Whole carries no
/// constraints and contains everything.
class ConvexRegion {
 public:
  ConvexRegion() = default;

  static ConvexRegion whole(std::size_t dim) { return ConvexRegion(dim, RegionTag::Whole); }
  static ConvexRegion empty(std::size_t dim) { return ConvexRegion(dim, RegionTag::Empty); }

  /// Validates every constraint; no constraints at all yields Whole.
  static ConvexRegion from(std::size_t dim, std::vector<Halfspace> hs, std::vector<Ball> balls = {}) {
    ConvexRegion r(dim, RegionTag::Whole);
    r.halfspaces_ = std::move(hs);
    r.balls_ = std::move(balls);
    r.validate();
    if (!r.halfspaces_.empty() || !r.balls_.empty()) r.tag_ = RegionTag::NonTrivial;
    return r;
  }

  std::size_t dim() const noexcept { return dim_; }
  RegionTag tag() const noexcept { return tag_; }
  bool is_empty_tag() const noexcept { return tag_ == RegionTag::Empty; }
  bool is_whole() const noexcept { return tag_ == RegionTag::Whole; }
  bool is_polytope() const noexcept { return balls_.empty(); }
  const std::vector<Halfspace>& halfspaces() const noexcept { return halfspaces_; }
  const std::vector<Ball>& balls() const noexcept { return balls_; }
  std::size_t constraint_count() const noexcept { return halfspaces_.size() + balls_.size(); }

  friend bool operator==(const ConvexRegion&, const ConvexRegion&) = default;

 private:
  ConvexRegion(std::size_t dim, RegionTag tag) : dim_(dim), tag_(tag) {
    if (dim == 0) throw InvalidRegion("region dimension must be at least 1");
  }

  void validate() const {
    for (const auto& h : halfspaces_) {
      if (h.normal.size() != dim_) throw InvalidRegion("halfspace dimension mismatch");
      if (is_zero(h.normal)) throw InvalidRegion("halfspace with zero normal");
    }
    for (const auto& b : balls_) {
      if (b.center.size() != dim_) throw InvalidRegion("ball dimension mismatch");
      if (b.radius_sq < 0) throw InvalidRegion("ball with negative squared radius");
    }
  }

  std::size_t dim_ = 1;
  RegionTag tag_ = RegionTag::Whole;
  std::vector<Halfspace> halfspaces_;
  std::vector<Ball> balls_;
};

/// Outcome of an emptiness decision.
struct Feasibility {
  enum class Status { Feasible, Empty, Unknown };
  Status status = Status::Unknown;
  Vec witness;  // set iff Feasible

  bool feasible() const noexcept { return status == Status::Feasible; }
  bool empty() const noexcept { return status == Status::Empty; }

  static Feasibility make_feasible(Vec w) { return {Status::Feasible, std::move(w)}; }
  static Feasibility make_empty() { return {Status::Empty, {}}; }
  static Feasibility make_unknown() { return {Status::Unknown, {}}; }
};

/// Default half-width of the clipping box used by chebyshev_center.
inline const Rat kDefaultBound = Rat(1024);

// ---------------------------------------------------------------------------
// Membership and algebra

inline bool satisfies(const Halfspace& h, const Vec& p) { return dot(h.normal, p) <= h.offset; }

inline bool satisfies(const Ball& b, const Vec& p) { return squared_distance(p, b.center) <= b.radius_sq; }

inline bool contains(const ConvexRegion& region, const Vec& point) {
  if (point.size() != region.dim()) throw InvalidRegion("contains: dimension mismatch");
  if (region.is_empty_tag()) return false;
  for (const auto& h : region.halfspaces())
    if (!satisfies(h, point)) return false;
  for (const auto& b : region.balls())
    if (!satisfies(b, point)) return false;
  return true;
}

/// Concatenates constraint lists; Empty absorbs, Whole is the identity.
inline ConvexRegion intersect(const ConvexRegion& a, const ConvexRegion& b) {
  if (a.dim() != b.dim()) throw InvalidRegion("intersect: dimension mismatch");
  if (a.is_empty_tag() || b.is_empty_tag()) return ConvexRegion::empty(a.dim());
  if (a.is_whole()) return b;
  if (b.is_whole()) return a;
  auto hs = a.halfspaces();
  hs.insert(hs.end(), b.halfspaces().begin(), b.halfspaces().end());
  auto balls = a.balls();
  balls.insert(balls.end(), b.balls().begin(), b.balls().end());
  return ConvexRegion::from(a.dim(), std::move(hs), std::move(balls));
}

/// Adds one halfspace to a region (Empty stays Empty).
inline ConvexRegion with_halfspace(const ConvexRegion& r, Halfspace h) {
  return intersect(r, ConvexRegion::from(r.dim(), {std::move(h)}));
}

/// Scales a halfspace so its first nonzero normal coordinate is ±1.
inline Halfspace normalized(Halfspace h) {
  const auto it = std::find_if(h.normal.begin(), h.normal.end(), [](const Rat& x) { return x != 0; });
  if (it == h.normal.end()) throw InvalidRegion("halfspace with zero normal");
  const Rat scale = abs(*it);
  for (auto& x : h.normal) x /= scale;
  h.offset /= scale;
  return h;
}

/// Same point set with halfspaces normalized, sorted and deduplicated, so
/// regions built from reordered or repeated constraints compare equal.
inline ConvexRegion canonical(const ConvexRegion& r) {
  if (r.is_empty_tag() || r.is_whole()) return r;
  std::vector<Halfspace> hs;
  hs.reserve(r.halfspaces().size());
  for (const auto& h : r.halfspaces()) hs.push_back(normalized(h));
  auto key_less = [](const Halfspace& a, const Halfspace& b) {
    return std::tie(a.normal, a.offset) < std::tie(b.normal, b.offset);
  };
  std::sort(hs.begin(), hs.end(), key_less);
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  auto balls = r.balls();
  std::sort(balls.begin(), balls.end(),
            [](const Ball& a, const Ball& b) { return std::tie(a.center, a.radius_sq) < std::tie(b.center, b.radius_sq); });
  balls.erase(std::unique(balls.begin(), balls.end()), balls.end());
  return ConvexRegion::from(r.dim(), std::move(hs), std::move(balls));
}

/// The degenerate ball {p}.
inline ConvexRegion point_region(const Vec& p) {
  return ConvexRegion::from(p.size(), {}, {Ball{p, Rat(0)}});
}

// ---------------------------------------------------------------------------
// Exact polytope decisions

/// Exact emptiness decision for a halfspace-only region; Feasible carries an
/// exact rational witness satisfying every halfspace.
inline Feasibility lp_feasible(const ConvexRegion& region) {
  if (!region.is_polytope()) throw InvalidRegion("lp_feasible: region contains balls");
  if (region.is_empty_tag()) return Feasibility::make_empty();
  if (region.is_whole()) return Feasibility::make_feasible(Vec(region.dim(), Rat(0)));
  lp::Problem p;
  for (const auto& h : region.halfspaces()) {
    p.A.push_back(h.normal);
    p.b.push_back(h.offset);
  }
  p.free.assign(region.dim(), true);
  auto res = lp::solve(p);
  if (res.status == lp::Status::Infeasible) return Feasibility::make_empty();
  return Feasibility::make_feasible(std::move(res.x));
}

struct ChebyshevBall {
  Vec center;
  Rat radius;  // guaranteed inscribed radius (≤ the true Chebyshev radius)
};

/// Largest inscribed ball of region ∩ [−bound, bound]^d.
///
/// Solves  max r  s.t.  a_j·θ + r·N_j ≤ b_j,  ±θ_i + r ≤ bound,  r ≥ 0,
/// with N_j = sqrt_upper(‖a_j‖²) ≥ ‖a_j‖₂ (a 2⁻³² dyadic over-approximation,
/// exact when ‖a_j‖₂ is dyadic). Over-approximating the norm only shrinks
/// the ball, so the center always satisfies every constraint. θ is shifted to
/// φ = θ + bound ≥ 0 so the LP has no free columns.
inline ChebyshevBall chebyshev_ball(const ConvexRegion& region, const Rat& bound = kDefaultBound) {
  if (!region.is_polytope()) throw InvalidRegion("chebyshev_center: region contains balls");
  if (bound <= 0) throw InvalidInput("chebyshev_center: bound must be positive");
  if (region.is_empty_tag()) throw InfeasibleRegion("chebyshev_center: empty region");
  const std::size_t d = region.dim();
  lp::Problem p;
  auto add_row = [&](Vec row, Rat rhs) {
    p.A.push_back(std::move(row));
    p.b.push_back(std::move(rhs));
  };
  for (const auto& h : region.halfspaces()) {
    Vec row(h.normal);
    Rat shift = 0;
    for (const auto& a : h.normal) shift += a;
    row.push_back(sqrt_upper(squared_norm(h.normal)));
    add_row(std::move(row), h.offset + bound * shift);
  }
  for (std::size_t i = 0; i < d; ++i) {
    Vec up(d + 1, Rat(0)), down(d + 1, Rat(0));
    up[i] = 1;
    up[d] = 1;
    down[i] = -1;
    down[d] = 1;
    add_row(std::move(up), 2 * bound);
    add_row(std::move(down), Rat(0));
  }
  p.c.assign(d + 1, Rat(0));
  p.c[d] = 1;
  p.free.assign(d + 1, false);
  auto res = lp::solve(p);
  if (res.status != lp::Status::Optimal) throw InfeasibleRegion("chebyshev_center: region is empty inside the clipping box");
  ChebyshevBall out;
  out.center.reserve(d);
  for (std::size_t i = 0; i < d; ++i) out.center.push_back(res.x[i] - bound);
  out.radius = res.x[d];
  return out;
}

inline Vec chebyshev_center(const ConvexRegion& region, const Rat& bound = kDefaultBound) {
  return chebyshev_ball(region, bound).center;
}

// ---------------------------------------------------------------------------
// Mixed ball/halfspace decisions

/// Exact lower bound on min_θ max(‖θ−c₁‖²−r₁², ‖θ−c₂‖²−r₂²). The minimax
/// point lies on the segment c₁ + s(c₂−c₁) where both terms agree,
/// s = (1 + (r₁²−r₂²)/D²)/2, or at a center when s falls outside [0, 1].
inline Rat pairwise_ball_bound(const Ball& a, const Ball& b) {
  const Rat D2 = squared_distance(a.center, b.center);
  if (D2 == 0) return -std::min(a.radius_sq, b.radius_sq);
  const Rat s = (1 + (a.radius_sq - b.radius_sq) / D2) / 2;
  if (s <= 0) return -a.radius_sq;
  if (s >= 1) return -b.radius_sq;
  return s * s * D2 - a.radius_sq;
}

/// True when the ball lies strictly on the violated side of the halfspace.
inline bool ball_outside(const Ball& ball, const Halfspace& h) {
  const Rat gap = dot(h.normal, ball.center) - h.offset;
  return gap > 0 && gap * gap > ball.radius_sq * squared_norm(h.normal);
}

/// Exact max over constraints of signed violation (a·θ−b, ‖θ−c‖²−r²).
inline Rat max_violation(const ConvexRegion& region, const Vec& p) {
  Rat worst;
  bool any = false;
  auto take = [&](Rat v) {
    if (!any || v > worst) worst = std::move(v);
    any = true;
  };
  for (const auto& h : region.halfspaces()) take(dot(h.normal, p) - h.offset);
  for (const auto& b : region.balls()) take(squared_distance(p, b.center) - b.radius_sq);
  return any ? worst : Rat(0);
}

struct BallSearchOptions {
  Rat tol = dyadic(1, 20);
  std::size_t max_iter = 20000;
  double step = 1.0;           // η in η/√k
  Rat box = kDefaultBound;     // iterates are projected onto [−box, box]^d
  unsigned witness_bits = 30;  // candidates are rounded to the 2^-bits grid
};

/// Decision for regions that mix balls and halfspaces.
///
/// Empty needs a certificate: the halfspace part is LP-empty, a ball lies
/// strictly outside a halfspace, or some pair of balls has an exact minimax
/// lower bound f*_ij > 0 with f*_ij ≥ tol. Otherwise the max-violation
/// function is minimized by projected subgradient with normalized steps
/// η/√k from the mean of the ball centers; the first iterate whose rounded
/// rational value has exact max violation ≤ 0 is returned as Feasible.
/// Exhausting max_iter yields Unknown.
inline Feasibility ball_feasible(const ConvexRegion& region, const BallSearchOptions& opt = {}) {
  if (region.is_empty_tag()) return Feasibility::make_empty();
  if (region.is_polytope()) return lp_feasible(region);
  const std::size_t d = region.dim();
  const auto& balls = region.balls();
  const auto& hs = region.halfspaces();

  if (!hs.empty() && lp_feasible(ConvexRegion::from(d, hs)).empty()) return Feasibility::make_empty();
  for (const auto& b : balls)
    for (const auto& h : hs)
      if (ball_outside(b, h)) return Feasibility::make_empty();
  for (std::size_t i = 0; i < balls.size(); ++i)
    for (std::size_t j = i + 1; j < balls.size(); ++j) {
      const Rat lb = pairwise_ball_bound(balls[i], balls[j]);
      if (lb > 0 && lb >= opt.tol) return Feasibility::make_empty();
    }

  auto round_to_grid = [&](const std::vector<double>& x) {
    Vec out;
    out.reserve(d);
    const double scale = std::ldexp(1.0, static_cast<int>(opt.witness_bits));
    for (double v : x) out.push_back(dyadic(static_cast<std::int64_t>(std::llround(v * scale)), opt.witness_bits));
    return out;
  };

  std::vector<double> theta(d, 0.0);
  for (const auto& b : balls)
    for (std::size_t i = 0; i < d; ++i) theta[i] += b.center[i].get_d() / static_cast<double>(balls.size());

  std::vector<std::vector<double>> hn, bc;
  std::vector<double> ho, br;
  for (const auto& h : hs) {
    hn.push_back(to_double(h.normal));
    ho.push_back(h.offset.get_d());
  }
  for (const auto& b : balls) {
    bc.push_back(to_double(b.center));
    br.push_back(b.radius_sq.get_d());
  }
  const double box = opt.box.get_d();

  for (std::size_t k = 1; k <= opt.max_iter; ++k) {
    // Most violated constraint and its subgradient.
    double worst = -std::numeric_limits<double>::infinity();
    std::vector<double> g(d, 0.0);
    for (std::size_t j = 0; j < hn.size(); ++j) {
      double v = -ho[j];
      for (std::size_t i = 0; i < d; ++i) v += hn[j][i] * theta[i];
      if (v > worst) {
        worst = v;
        g = hn[j];
      }
    }
    for (std::size_t j = 0; j < bc.size(); ++j) {
      double v = -br[j];
      for (std::size_t i = 0; i < d; ++i) v += (theta[i] - bc[j][i]) * (theta[i] - bc[j][i]);
      if (v > worst) {
        worst = v;
        for (std::size_t i = 0; i < d; ++i) g[i] = 2.0 * (theta[i] - bc[j][i]);
      }
    }
    if (worst <= 0.0) {
      Vec cand = round_to_grid(theta);
      if (max_violation(region, cand) <= 0) return Feasibility::make_feasible(std::move(cand));
    }
    double gn = 0.0;
    for (double x : g) gn += x * x;
    gn = std::sqrt(gn);
    if (gn == 0.0) break;
    const double eta = opt.step / std::sqrt(static_cast<double>(k));
    for (std::size_t i = 0; i < d; ++i) theta[i] = std::clamp(theta[i] - eta * g[i] / gn, -box, box);
  }
  Vec last = round_to_grid(theta);
  if (max_violation(region, last) <= 0) return Feasibility::make_feasible(std::move(last));
  return Feasibility::make_unknown();
}

/// Emptiness decision for any region: exact for polytopes, ball_feasible
/// otherwise.
inline Feasibility decide(const ConvexRegion& region) {
  return region.is_polytope() ? lp_feasible(region) : ball_feasible(region);
}

}  // namespace satcl
