#ifndef HKPOLY_RATIONAL_HPP
#define HKPOLY_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace hkpoly {

/// Exact coefficient field. GMP's mpq keeps exactly the invariant we need:
/// denominator > 0, gcd(|num|, den) = 1, zero stored as 0/1.
using Rational = mpq_class;
using Integer = mpz_class;

/// Parse "p/q" (or plain "p") into a canonical rational.
/// Throws StructuralError on malformed text or q = 0.
Rational parse_rational(const std::string& text);

/// Canonical text form "p/q", always with an explicit denominator ("3/1").
std::string format_rational(const Rational& q);

/// q^e for e >= 0 (q^0 = 1, including 0^0).
Rational rational_pow(const Rational& q, unsigned long e);

Integer integer_pow(const Integer& z, unsigned long e);

/// True iff the stored representation is canonical (den > 0, lowest terms).
bool is_canonical(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace hkpoly

#endif
