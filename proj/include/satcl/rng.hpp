#pragma once

// Reproducible random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; bounded integers are drawn by
// rejection sampling here rather than through std::uniform_int_distribution,
// whose algorithm is implementation-defined.

#include <cstdint>
#include <random>

#include "satcl/error.hpp"
#include "satcl/rational.hpp"

namespace satcl {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw InvalidInput("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do v = next();
    while (v >= limit);
    return lo + static_cast<std::int64_t>(v % span);
  }

  /// Uniform value of the grid {k / 2^bits} inside [lo, hi].
  Rat grid(const Rat& lo, const Rat& hi, unsigned bits = 10) {
    const Rat scale(mpz_class(1) << bits);
    mpz_class klo, khi;
    const Rat slo = lo * scale, shi = hi * scale;
    mpz_cdiv_q(klo.get_mpz_t(), slo.get_num_mpz_t(), slo.get_den_mpz_t());
    mpz_fdiv_q(khi.get_mpz_t(), shi.get_num_mpz_t(), shi.get_den_mpz_t());
    if (khi < klo) throw InvalidInput("grid: no grid point in range");
    return dyadic(uniform_int(klo.get_si(), khi.get_si()), bits);
  }

  Vec grid_vec(std::size_t d, const Rat& lo, const Rat& hi, unsigned bits = 10) {
    Vec v;
    v.reserve(d);
    for (std::size_t i = 0; i < d; ++i) v.push_back(grid(lo, hi, bits));
    return v;
  }

  bool coin() { return (next() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace satcl
