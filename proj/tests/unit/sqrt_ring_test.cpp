#include <doctest.h>

#include "hkpoly/errors.hpp"
#include "hkpoly/sqrt_ring.hpp"

using namespace hkpoly;

TEST_CASE("roots square to their radicands") {
  SqrtRing ring({Rational(2), Rational(3)});
  const auto r2 = ring.root(0);
  const auto r3 = ring.root(1);
  CHECK(r2 * r2 == ring.from_rational(Rational(2)));
  CHECK(r3 * r3 == ring.from_rational(Rational(3)));
  const auto r6 = r2 * r3;
  CHECK(r6 * r6 == ring.from_rational(Rational(6)));
}

TEST_CASE("inverse roots") {
  SqrtRing ring({parse_rational("9/4")});
  // 1/sqrt(9/4) = 2/3; in the ring, y/(9/4) with y^2 = 9/4.
  const auto inv = ring.inverse_root(0);
  CHECK(inv * ring.root(0) == ring.from_rational(Rational(1)));
}

TEST_CASE("sums with cancelling radicals") {
  SqrtRing ring({Rational(5), Rational(5)});
  // y0 and y1 are distinct generators with equal radicands; y0^2 - y1^2 = 0
  // even though y0 - y1 is not the zero element.
  const auto diff = ring.root(0) - ring.root(1);
  CHECK_FALSE(diff.is_zero());
  CHECK((ring.root(0) * ring.root(0) - ring.root(1) * ring.root(1)).is_zero());
  // (y0 - y1)(y0 + y1) = y0^2 - y1^2 = 0: zero divisors are fine, the ring
  // never pretends to be a field.
  CHECK((diff * (ring.root(0) + ring.root(1))).is_zero());
}

TEST_CASE("rational arithmetic embeds") {
  SqrtRing ring({Rational(7)});
  const auto a = ring.from_rational(parse_rational("3/2"));
  const auto b = ring.from_rational(parse_rational("-1/6"));
  CHECK(a + b == ring.from_rational(parse_rational("4/3")));
  CHECK(a * b == ring.from_rational(parse_rational("-1/4")));
}

TEST_CASE("a known quadratic identity evaluates to zero") {
  // x = sqrt(2) + sqrt(3) satisfies x^4 - 10 x^2 + 1 = 0.
  SqrtRing ring({Rational(2), Rational(3)});
  const auto x = ring.root(0) + ring.root(1);
  const auto x2 = x * x;
  const auto val = x2 * x2 - x2 * Rational(10) + ring.from_rational(Rational(1));
  CHECK(val.is_zero());
}

TEST_CASE("guards") {
  CHECK_THROWS_AS(SqrtRing({Rational(0)}), DomainError);
  CHECK_THROWS_AS(SqrtRing({Rational(-1)}), DomainError);
  CHECK_THROWS_AS(SqrtRing(std::vector<Rational>(17, Rational(2))), CapacityError);
}
