#pragma once

// Exact rational scalars and coordinate vectors.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "satcl/error.hpp"

namespace satcl {

/// Arbitrary-precision rational; GMP keeps every arithmetic result in lowest
/// terms with a positive denominator.
using Rat = mpq_class;

/// Point in parameter or data space.
using Vec = std::vector<Rat>;

/// Parses "p", "-p" or "p/q". Rejects zero denominators, whitespace and
/// anything GMP would not accept as a base-10 fraction.
inline Rat parse_rat(std::string_view text) {
  if (text.empty()) throw InvalidInput("empty rational literal");
  for (char ch : text) {
    if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '/'))
      throw InvalidInput("malformed rational literal '" + std::string(text) + "'");
  }
  const auto slash = text.find('/');
  if (slash != std::string_view::npos && text.substr(slash + 1).find_first_not_of("0123456789") != std::string_view::npos)
    throw InvalidInput("malformed rational literal '" + std::string(text) + "'");
  Rat r;
  if (r.set_str(std::string(text), 10) != 0) throw InvalidInput("malformed rational literal '" + std::string(text) + "'");
  if (r.get_den() == 0) throw InvalidInput("zero denominator in '" + std::string(text) + "'");
  r.canonicalize();
  return r;
}

/// Canonical "p/q" form ("p" when q = 1); parse_rat(to_string(r)) == r.
inline std::string to_string(const Rat& r) { return r.get_str(10); }

/// Coordinates joined by ';' (the CSV encoding of a point).
inline std::string join(const Vec& v, char sep = ';') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += to_string(v[i]);
  }
  return out;
}

inline Rat dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InvalidInput("dot: dimension mismatch");
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rat squared_norm(const Vec& a) { return dot(a, a); }

inline Rat squared_distance(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InvalidInput("distance: dimension mismatch");
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Rat diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

inline bool is_zero(const Vec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

inline Rat abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

/// Dyadic rational k / 2^bits.
inline Rat dyadic(std::int64_t k, unsigned bits) {
  mpz_class den = 1;
  den <<= bits;
  Rat r(mpz_class(static_cast<long>(k)), den);
  r.canonicalize();
  return r;
}

/// Smallest value ⌈2^bits · √x⌉ / 2^bits ≥ √x, computed with an exact integer
/// square root; equals √x whenever √x is itself dyadic at that precision.
inline Rat sqrt_upper(const Rat& x, unsigned bits = 32) {
  if (x < 0) throw InvalidInput("sqrt_upper of a negative value");
  if (x == 0) return Rat(0);
  // √(p/q) = √(p·q)/q; scale by 4^bits then round the integer root up.
  mpz_class scaled = x.get_num() * x.get_den();
  scaled <<= 2 * bits;
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
  if (root * root != scaled) root += 1;
  mpz_class den = x.get_den();
  den <<= bits;
  Rat r(root, den);
  r.canonicalize();
  return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }

inline std::vector<double> to_double(const Vec& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.get_d());
  return out;
}

/// Exact rational value of a finite double.
inline Rat from_double(double x) {
  if (!std::isfinite(x)) throw InvalidInput("non-finite value cannot become a rational");
  return Rat(x);
}

}  // namespace satcl
