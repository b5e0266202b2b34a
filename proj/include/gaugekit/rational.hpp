#pragma once

// Exact rational arithmetic used throughout the geometry kernel.
// All measures (volume, perimeter, symmetric difference) and all set
// predicates are computed in Rat; squared distances stay rational, so
// comparisons against squared thresholds are exact.  Floating point only
// appears at reporting boundaries and inside quadrature.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaugekit {

using Rat = mpq_class;
using RatPoint = std::vector<Rat>;

// ============================ error taxonomy ============================

// Violated documented precondition (bad geometry, non-covering balls, ...).
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed external input (JSON shape, unknown catalog name, bad rational).
struct SchemaError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An enumeration or refinement would exceed its configured budget.
struct BudgetError : std::runtime_error {
  std::uint64_t requested = 0;
  std::uint64_t limit = 0;
  BudgetError(const std::string& what, std::uint64_t req, std::uint64_t lim)
      : std::runtime_error(what + " (requested " + std::to_string(req) +
                           ", budget " + std::to_string(lim) + ")"),
        requested(req),
        limit(lim) {}
};

// ============================ construction =============================

inline Rat rat_int(long v) { return Rat(v); }

// 2^e for any sign of e.
inline Rat rat_pow2(int e) {
  Rat r;
  if (e >= 0) {
    mpq_mul_2exp(r.get_mpq_t(), Rat(1).get_mpq_t(), static_cast<unsigned>(e));
  } else {
    mpq_div_2exp(r.get_mpq_t(), Rat(1).get_mpq_t(), static_cast<unsigned>(-e));
  }
  return r;
}

inline Rat rat_pow(const Rat& base, unsigned e) {
  Rat acc(1), b = base;
  unsigned k = e;
  while (k) {
    if (k & 1) acc *= b;
    b *= b;
    k >>= 1;
  }
  return acc;
}

inline Rat rat_abs(const Rat& a) { return a < 0 ? Rat(-a) : a; }

inline double to_double(const Rat& a) { return a.get_d(); }

// Parses "p", "p/q" (decimal digits, optional sign).  Throws SchemaError.
inline Rat rat_parse(const std::string& s) {
  Rat r;
  if (s.empty() || r.set_str(s, 10) != 0)
    throw SchemaError("bad rational literal: '" + s + "'");
  if (r.get_den() == 0) throw SchemaError("zero denominator: '" + s + "'");
  r.canonicalize();
  return r;
}

// Canonical "p/q" form (denominator always printed, so round-trips are
// byte-stable).
inline std::string rat_str(const Rat& a) {
  Rat c = a;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

inline bool rat_is_integer(const Rat& a) {
  Rat c = a;
  c.canonicalize();
  return c.get_den() == 1;
}

// floor(a) as a plain integer; requires the value to fit in long.
inline long rat_floor(const Rat& a) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
  if (!q.fits_slong_p()) throw PreconditionError("rational floor out of range");
  return q.get_si();
}

inline long rat_ceil(const Rat& a) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
  if (!q.fits_slong_p()) throw PreconditionError("rational ceil out of range");
  return q.get_si();
}

// ============================ points ===================================

inline Rat dist_sq(const RatPoint& a, const RatPoint& b) {
  if (a.size() != b.size()) throw PreconditionError("dimension mismatch");
  Rat s(0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    Rat d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline std::vector<double> to_double(const RatPoint& p) {
  std::vector<double> v(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) v[i] = p[i].get_d();
  return v;
}

}  // namespace gaugekit
