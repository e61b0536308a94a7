#pragma once

// Exact two-phase tableau simplex over rationals.
//
//   maximize  c·x   subject to  A x ≤ b,   x_j ≥ 0 unless free[j]
//
// Free columns are split as x = x⁺ − x⁻. Phase 1 uses a single artificial
// variable x₀ (constraints A x − x₀ ≤ b) that is pivoted in on the row with
// the most negative right-hand side; phase 2 optimizes c. Both phases use
// Bland's rule (smallest-index entering column, min-ratio leaving row with
// ties broken by smallest basic index), so the method terminates and every
// result is a deterministic function of the constraint order.

#include <cstddef>
#include <utility>
#include <vector>

#include "satcl/error.hpp"
#include "satcl/rational.hpp"

namespace satcl::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  Vec x;      // primal point, meaningful when status != Infeasible
  Rat value;  // c·x at the optimum
};

struct Problem {
  std::vector<Vec> A;
  Vec b;
  Vec c;                   // empty: pure feasibility
  std::vector<bool> free;  // empty: every column free
};

namespace detail {

class Tableau {
 public:
  // Columns 0..n-1 are (split) structural variables, n..n+m-1 slacks, and
  // id -1 the artificial. Row m holds -c, row m+1 the phase-1 objective.
  Tableau(const std::vector<Vec>& A, const Vec& b, const Vec& c)
      : m_(b.size()), n_(c.size()), basis_(m_), nonbasis_(n_ + 1), D_(m_ + 2, Vec(n_ + 2)) {
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) D_[i][j] = A[i][j];
      D_[i][n_] = -1;
      D_[i][n_ + 1] = b[i];
      basis_[i] = static_cast<long>(n_ + i);
    }
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasis_[j] = static_cast<long>(j);
      D_[m_][j] = -c[j];
    }
    nonbasis_[n_] = -1;
    D_[m_ + 1][n_] = 1;
  }

  Result solve() {
    Result res;
    if (m_ > 0) {
      std::size_t r = 0;
      for (std::size_t i = 1; i < m_; ++i)
        if (D_[i][n_ + 1] < D_[r][n_ + 1]) r = i;
      if (D_[r][n_ + 1] < 0) {
        pivot(r, n_);
        run(/*aux=*/true);  // bounded below by 0, never unbounded
        if (D_[m_ + 1][n_ + 1] < 0) {
          res.status = Status::Infeasible;
          return res;
        }
        // Drive a degenerate artificial out of the basis when possible.
        for (std::size_t i = 0; i < m_; ++i) {
          if (basis_[i] != -1) continue;
          long best = -1;
          for (std::size_t j = 0; j <= n_; ++j)
            if (D_[i][j] != 0 && (best < 0 || nonbasis_[j] < nonbasis_[static_cast<std::size_t>(best)]))
              best = static_cast<long>(j);
          if (best >= 0) pivot(i, static_cast<std::size_t>(best));
        }
      }
    }
    const bool bounded = run(/*aux=*/false);
    res.x.assign(n_, Rat(0));
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= 0 && static_cast<std::size_t>(basis_[i]) < n_) res.x[static_cast<std::size_t>(basis_[i])] = D_[i][n_ + 1];
    res.value = D_[m_][n_ + 1];
    res.status = bounded ? Status::Optimal : Status::Unbounded;
    return res;
  }

 private:
  void pivot(std::size_t r, std::size_t s) {
    const Rat inv = 1 / D_[r][s];
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r || D_[i][s] == 0) continue;
      const Rat factor = D_[i][s] * inv;
      for (std::size_t j = 0; j < n_ + 2; ++j)
        if (j != s && D_[r][j] != 0) D_[i][j] -= D_[r][j] * factor;
      D_[i][s] = -factor;
    }
    for (std::size_t j = 0; j < n_ + 2; ++j)
      if (j != s) D_[r][j] *= inv;
    D_[r][s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  // Returns false when the objective is unbounded.
  bool run(bool aux) {
    const std::size_t obj = aux ? m_ + 1 : m_;
    for (;;) {
      long s = -1;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (!aux && nonbasis_[j] == -1) continue;
        if (D_[obj][j] < 0 && (s < 0 || nonbasis_[j] < nonbasis_[static_cast<std::size_t>(s)])) s = static_cast<long>(j);
      }
      if (s < 0) return true;
      const auto sc = static_cast<std::size_t>(s);
      long r = -1;
      Rat best_ratio;
      for (std::size_t i = 0; i < m_; ++i) {
        if (D_[i][sc] <= 0) continue;
        Rat ratio = D_[i][n_ + 1] / D_[i][sc];
        if (r < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[static_cast<std::size_t>(r)])) {
          r = static_cast<long>(i);
          best_ratio = std::move(ratio);
        }
      }
      if (r < 0) return false;
      pivot(static_cast<std::size_t>(r), sc);
    }
  }

  std::size_t m_, n_;
  std::vector<long> basis_, nonbasis_;
  std::vector<Vec> D_;
};

}  // namespace detail

/// Solves the problem exactly. With an empty objective the first feasible
/// basis found by phase 1 is returned as an Optimal (value 0) result.
inline Result solve(const Problem& p) {
  const std::size_t m = p.b.size();
  if (p.A.size() != m) throw InvalidInput("lp: row count mismatch");
  std::size_t n = p.c.size();
  if (n == 0 && !p.A.empty()) n = p.A.front().size();
  if (n == 0 && !p.free.empty()) n = p.free.size();
  for (const auto& row : p.A)
    if (row.size() != n) throw InvalidInput("lp: column count mismatch");
  if (!p.c.empty() && p.c.size() != n) throw InvalidInput("lp: objective length mismatch");
  std::vector<bool> is_free = p.free.empty() ? std::vector<bool>(n, true) : p.free;
  if (is_free.size() != n) throw InvalidInput("lp: free mask length mismatch");

  // Column map: original j -> (positive column, negative column or -1).
  std::vector<std::pair<std::size_t, long>> cols(n);
  std::size_t width = 0;
  for (std::size_t j = 0; j < n; ++j) {
    cols[j].first = width++;
    cols[j].second = is_free[j] ? static_cast<long>(width++) : -1;
  }
  std::vector<Vec> A(m, Vec(width, Rat(0)));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      A[i][cols[j].first] = p.A[i][j];
      if (cols[j].second >= 0) A[i][static_cast<std::size_t>(cols[j].second)] = -p.A[i][j];
    }
  Vec c(width, Rat(0));
  if (!p.c.empty())
    for (std::size_t j = 0; j < n; ++j) {
      c[cols[j].first] = p.c[j];
      if (cols[j].second >= 0) c[static_cast<std::size_t>(cols[j].second)] = -p.c[j];
    }

  Result split = detail::Tableau(A, p.b, c).solve();
  Result out;
  out.status = split.status;
  out.value = split.value;
  if (split.status == Status::Infeasible) return out;
  out.x.assign(n, Rat(0));
  for (std::size_t j = 0; j < n; ++j) {
    out.x[j] = split.x[cols[j].first];
    if (cols[j].second >= 0) out.x[j] -= split.x[static_cast<std::size_t>(cols[j].second)];
  }
  return out;
}

}  // namespace satcl::lp
