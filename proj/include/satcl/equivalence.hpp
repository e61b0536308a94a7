#pragma once

// Equivalence sets of a finite family of Sat regions, minimal
// representations, and the perfect-memory checker.
//
// An equivalence set is realized as a cell: the points sharing one
// membership sign vector over the family. Cells with different signs are
// disjoint and each cell lies inside or outside every region.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "satcl/algorithms.hpp"
#include "satcl/cl_engine.hpp"
#include "satcl/criteria.hpp"
#include "satcl/error.hpp"
#include "satcl/geometry.hpp"
#include "satcl/rational.hpp"
#include "satcl/rng.hpp"

namespace satcl {

inline constexpr std::size_t kMaxRegions = 12;
inline constexpr std::size_t kMaxConstraints = 24;

/// Strict exterior of an Out region: a·θ ≥ b + 2⁻²⁰ on one of its halfspaces.
inline const Rat kStrictSlack = dyadic(1, 20);

/// A finite Sat_Q.
class Arrangement {
 public:
  explicit Arrangement(std::vector<ConvexRegion> regions) : regions_(std::move(regions)) {
    if (regions_.empty()) throw InvalidInput("arrangement needs at least one region");
    for (const auto& r : regions_)
      if (r.dim() != regions_.front().dim()) throw InvalidRegion("arrangement mixes dimensions");
  }

  std::size_t dim() const noexcept { return regions_.front().dim(); }
  std::size_t size() const noexcept { return regions_.size(); }
  const std::vector<ConvexRegion>& regions() const noexcept { return regions_; }
  const ConvexRegion& operator[](std::size_t i) const { return regions_.at(i); }

  bool polytopes_only() const {
    return std::all_of(regions_.begin(), regions_.end(), [](const ConvexRegion& r) { return r.is_polytope(); });
  }

  std::size_t constraint_count() const {
    std::size_t m = 0;
    for (const auto& r : regions_) m += r.constraint_count();
    return m;
  }

 private:
  std::vector<ConvexRegion> regions_;
};

/// Membership pattern S(θ) over an arrangement; true = In.
struct SignVector {
  std::vector<bool> bits;

  std::size_t size() const noexcept { return bits.size(); }
  bool in(std::size_t i) const { return bits.at(i); }
  bool any_in() const { return std::find(bits.begin(), bits.end(), true) != bits.end(); }
  std::string str() const { return bitstring(bits); }

  friend bool operator==(const SignVector&, const SignVector&) = default;
  friend bool operator<(const SignVector& a, const SignVector& b) { return a.str() < b.str(); }
};

struct Cell {
  SignVector sign;
  Vec witness;              // exact sign_of(witness) == sign
  ConvexRegion certificate;  // In constraints plus one strict exterior per Out region
};

struct MinimalRepresentation {
  std::vector<Vec> witnesses;
  std::vector<SignVector> signs;  // cell of each witness
};

struct EnumerationStats {
  std::size_t candidates = 0;  // sign vectors examined
  std::size_t lp_calls = 0;
  std::uint64_t lp_budget = 0;  // worst-case LP calls of the search below
};

struct Enumeration {
  std::vector<Cell> cells;
  EnumerationStats stats;
};

inline SignVector sign_of(const Vec& theta, const Arrangement& arr) {
  if (theta.size() != arr.dim()) throw InvalidInput("sign_of: dimension mismatch");
  SignVector s;
  s.bits.reserve(arr.size());
  for (const auto& r : arr.regions()) s.bits.push_back(contains(r, theta));
  return s;
}

namespace detail {

inline Halfspace strict_exterior(const Halfspace& h) {
  Vec normal(h.normal);
  for (auto& x : normal) x = -x;
  return {std::move(normal), -h.offset - kStrictSlack};
}

struct CellSearch {
  const Arrangement& arr;
  std::vector<std::size_t> outs;
  EnumerationStats& stats;

  // Depth-first over Out regions: pick one violated halfspace each. A choice
  // the parent witness already satisfies needs no LP call.
  std::optional<std::pair<ConvexRegion, Vec>> extend(const ConvexRegion& region, const Vec& witness, std::size_t depth) {
    if (depth == outs.size()) return std::make_pair(region, witness);
    const auto& out = arr[outs[depth]];
    std::vector<Halfspace> free_choices, lp_choices;
    for (const auto& h : out.halfspaces()) {
      Halfspace ext = strict_exterior(h);
      (satisfies(ext, witness) ? free_choices : lp_choices).push_back(std::move(ext));
    }
    for (auto& ext : free_choices)
      if (auto found = extend(with_halfspace(region, ext), witness, depth + 1)) return found;
    for (auto& ext : lp_choices) {
      ConvexRegion next = with_halfspace(region, ext);
      ++stats.lp_calls;
      Feasibility f = lp_feasible(next);
      if (!f.feasible()) continue;
      if (auto found = extend(next, f.witness, depth + 1)) return found;
    }
    return std::nullopt;
  }
};

// 1 + Σ_k Π_{j≤k} m_j: every node of the search tree may cost one LP.
inline std::uint64_t search_budget(const Arrangement& arr, const std::vector<std::size_t>& outs) {
  std::uint64_t total = 1, prod = 1;
  for (std::size_t idx : outs) {
    prod *= std::max<std::uint64_t>(arr[idx].halfspaces().size(), 1);
    total += prod;
  }
  return total;
}

}  // namespace detail

/// Enumerates every nonempty cell by deciding each candidate sign vector
/// with at least one In bit: an LP on the In constraints, then a search over
/// one strict exterior per Out region. Cells thinner than the strict slack
/// are not found; exact sign_of remains the ground truth on boundaries.
/// Cells are returned sorted by sign bitstring.
inline Enumeration enumerate_cells_with_stats(const Arrangement& arr) {
  if (!arr.polytopes_only()) throw InvalidRegion("enumerate_cells: ball regions are not supported");
  if (arr.size() > kMaxRegions || arr.constraint_count() > kMaxConstraints)
    throw InstanceTooLarge("enumerate_cells: " + std::to_string(arr.size()) + " regions / " +
                           std::to_string(arr.constraint_count()) + " constraints exceed the caps (" +
                           std::to_string(kMaxRegions) + " / " + std::to_string(kMaxConstraints) + ")");
  Enumeration result;
  const std::size_t q = arr.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << q); ++mask) {
    ++result.stats.candidates;
    ConvexRegion inside = ConvexRegion::whole(arr.dim());
    std::vector<std::size_t> outs;
    SignVector sign;
    for (std::size_t i = 0; i < q; ++i) {
      const bool in = (mask >> i) & 1U;
      sign.bits.push_back(in);
      if (in)
        inside = intersect(inside, arr[i]);
      else if (!arr[i].is_empty_tag())
        outs.push_back(i);
    }
    result.stats.lp_budget += detail::search_budget(arr, outs);
    ++result.stats.lp_calls;
    Feasibility base = lp_feasible(inside);
    if (!base.feasible()) continue;
    detail::CellSearch search{arr, outs, result.stats};
    if (auto found = search.extend(inside, base.witness, 0))
      result.cells.push_back(Cell{std::move(sign), std::move(found->second), std::move(found->first)});
  }
  std::sort(result.cells.begin(), result.cells.end(), [](const Cell& a, const Cell& b) { return a.sign < b.sign; });
  return result;
}

inline std::vector<Cell> enumerate_cells(const Arrangement& arr) { return enumerate_cells_with_stats(arr).cells; }

/// One witness per cell, taken from the enumeration.
inline MinimalRepresentation minimal_representation(const std::vector<Cell>& cells) {
  MinimalRepresentation rep;
  for (const auto& c : cells) {
    if (!c.sign.any_in()) throw InvalidInput("minimal_representation: cell outside every region");
    rep.witnesses.push_back(c.witness);
    rep.signs.push_back(c.sign);
  }
  return rep;
}

/// The set ∩_{A ∋ θ} A as literally defined (whole space when θ is in no
/// region). It can be strictly larger than θ's cell.
inline ConvexRegion literal_equivalence_region(const Vec& theta, const Arrangement& arr) {
  ConvexRegion out = ConvexRegion::whole(arr.dim());
  for (const auto& r : arr.regions())
    if (contains(r, theta)) out = intersect(out, r);
  return out;
}

/// True iff the literal intersection for the cell's witness meets no Out
/// region, i.e. it coincides with the cell as a point set.
inline bool literal_agrees_with_cell(const Cell& cell, const Arrangement& arr) {
  const ConvexRegion literal = literal_equivalence_region(cell.witness, arr);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (cell.sign.in(i)) continue;
    if (lp_feasible(intersect(literal, arr[i])).feasible()) return false;
  }
  return true;
}

/// CSV: sign,witness.
inline void write_cells_csv(std::ostream& os, const std::vector<Cell>& cells) {
  os << "sign,witness\n";
  for (const auto& c : cells) os << c.sign.str() << ',' << join(c.witness) << '\n';
}

// ---------------------------------------------------------------------------
// Decision-problem oracle sets

/// Emptiness of a region that may hold balls: exact for polytopes and for
/// point balls, ball_feasible otherwise (Unknown is reported as nonempty).
inline bool region_is_empty(const ConvexRegion& r) {
  if (r.is_empty_tag()) return true;
  if (r.is_polytope()) return lp_feasible(r).empty();
  for (const auto& b : r.balls())
    if (b.radius_sq == 0) return !contains(r, b.center);
  return ball_feasible(r).empty();
}

struct OracleReport {
  std::size_t total = 0;
  std::size_t agreements = 0;
  std::optional<std::size_t> first_counterexample;  // index into the probes
  bool counterexample_c_empty = false;
  bool counterexample_sat_empty = false;

  bool all_agree() const noexcept { return agreements == total; }
};

/// For every probe A compares emptiness of C_t ∩ A, with C_t rebuilt from the
/// state, against emptiness of Sat_{1:t} ∩ A.
inline OracleReport oracle_set_check(const CLState& state, const std::vector<ConvexRegion>& probes,
                                     const ConvexRegion& truth_region) {
  const ConvexRegion oracle = reconstruct_oracle_set(state);
  OracleReport rep;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (!probes[i].is_polytope()) throw InvalidRegion("oracle_set_check: probes must be polytopes");
    const bool c_empty = region_is_empty(intersect(oracle, probes[i]));
    const bool sat_empty = lp_feasible(intersect(truth_region, probes[i])).empty();
    ++rep.total;
    if (c_empty == sat_empty) {
      ++rep.agreements;
    } else if (!rep.first_counterexample) {
      rep.first_counterexample = i;
      rep.counterexample_c_empty = c_empty;
      rep.counterexample_sat_empty = sat_empty;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Perfect memory

struct MemoryVerdict {
  enum class Kind { PerfectMemory, Violation, Infeasible };
  Kind kind = Kind::PerfectMemory;
  std::size_t t = 0;
  char condition = 0;  // 'a': C_t ⊆ Sat_{1:t}, 'b': C_t ⊆ C_{t−1}, 'c': surviving cell witness ∈ C_t
  Vec witness;
  std::size_t cells = 0;

  bool perfect() const noexcept { return kind == Kind::PerfectMemory; }

  std::string str() const {
    switch (kind) {
      case Kind::PerfectMemory: return "PerfectMemory";
      case Kind::Infeasible: return "Infeasible(t=" + std::to_string(t) + ")";
      case Kind::Violation:
        return "Violation(t=" + std::to_string(t) + ",condition=" + std::string(1, condition) + ",witness=" + join(witness) + ")";
    }
    return "?";
  }
};

/// Cells whose sign is In for the first t regions: the equivalence sets not
/// yet ruled out by tasks 1..t.
inline std::vector<const Cell*> surviving_cells(const std::vector<Cell>& cells, std::size_t t) {
  std::vector<const Cell*> out;
  for (const auto& c : cells) {
    bool alive = true;
    for (std::size_t i = 0; i < t && alive; ++i) alive = c.sign.in(i);
    if (alive) out.push_back(&c);
  }
  return out;
}

namespace detail {

// Point of `inner` strictly violating some halfspace of `outer`, if any.
inline std::optional<Vec> escape_point(const ConvexRegion& inner, const ConvexRegion& outer) {
  if (!inner.is_polytope() || outer.is_empty_tag()) return std::nullopt;
  for (const auto& h : outer.halfspaces()) {
    Feasibility f = lp_feasible(with_halfspace(inner, strict_exterior(h)));
    if (f.feasible()) return f.witness;
  }
  return std::nullopt;
}

inline std::vector<Vec> representative_points(const ConvexRegion& r, const Vec& theta) {
  std::vector<Vec> pts{theta};
  for (const auto& b : r.balls()) pts.push_back(b.center);
  if (r.is_polytope() && !r.is_empty_tag() && !r.is_whole() && lp_feasible(r).feasible()) {
    try {
      pts.push_back(chebyshev_center(r));
    } catch (const InfeasibleRegion&) {
    }
  }
  return pts;
}

}  // namespace detail

/// Runs the algorithm over the stream and at every t checks, with C_t the
/// reconstructed oracle set (C_0 is the whole space):
///   (a) C_t ⊆ Sat_{1:t}, (b) C_t ⊆ C_{t−1}, checked by probe membership over
///       `probe_budget` random grid points, representative points of C_t and
///       all cell witnesses, plus LP-targeted escape points when C_t is a
///       polytope;
///   (c) C_t contains the minimal-representation witness of every cell of
///       the task-region arrangement that survives tasks 1..t.
inline MemoryVerdict perfect_memory_check(const CLAlgorithm& alg, const std::vector<EmpiricalTask>& stream,
                                          const Criterion& c, std::size_t probe_budget, std::uint64_t seed = 0) {
  std::vector<ConvexRegion> regions;
  for (const auto& task : stream) regions.push_back(sat_region(c, task));
  const Arrangement arr(regions);
  const std::vector<Cell> cells = enumerate_cells(arr);
  const MinimalRepresentation rep = minimal_representation(cells);
  const std::size_t d = arr.dim();

  Rat scale = 4;
  for (const auto& w : rep.witnesses)
    for (const auto& x : w) scale = std::max(scale, Rat(abs(x) + 1));
  Rng rng(seed);
  std::vector<Vec> random_probes;
  for (std::size_t i = 0; i < probe_budget; ++i) random_probes.push_back(rng.grid_vec(d, -scale, scale));

  MemoryVerdict verdict;
  verdict.cells = cells.size();
  auto violation = [&](std::size_t t, char cond, Vec w) {
    verdict.kind = MemoryVerdict::Kind::Violation;
    verdict.t = t;
    verdict.condition = cond;
    verdict.witness = std::move(w);
    return verdict;
  };

  CLState state = alg.init(d);
  ConvexRegion truth = ConvexRegion::whole(d);
  ConvexRegion previous = ConvexRegion::whole(d);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const std::size_t t = i + 1;
    try {
      state = alg.step(state, stream[i], c);
    } catch (const Infeasible&) {
      verdict.kind = MemoryVerdict::Kind::Infeasible;
      verdict.t = t;
      return verdict;
    }
    truth = intersect(truth, regions[i]);
    const ConvexRegion current = reconstruct_oracle_set(state);

    std::vector<Vec> probes = random_probes;
    for (auto& p : detail::representative_points(current, state.theta)) probes.push_back(std::move(p));
    probes.insert(probes.end(), rep.witnesses.begin(), rep.witnesses.end());

    for (const auto& p : probes)
      if (contains(current, p) && !contains(truth, p)) return violation(t, 'a', p);
    if (auto p = detail::escape_point(current, truth)) return violation(t, 'a', *p);

    for (const auto& p : probes)
      if (contains(current, p) && !contains(previous, p)) return violation(t, 'b', p);
    if (auto p = detail::escape_point(current, previous)) return violation(t, 'b', *p);

    for (const Cell* cell : surviving_cells(cells, t))
      if (!contains(current, cell->witness)) return violation(t, 'c', cell->witness);

    previous = current;
  }
  return verdict;
}

}  // namespace satcl
