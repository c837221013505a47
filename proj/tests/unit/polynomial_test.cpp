#include <doctest.h>

#include <random>

#include "hkpoly/errors.hpp"
#include "hkpoly/polynomial.hpp"

using namespace hkpoly;

namespace {

const std::vector<std::string> S2 = {"s1", "s2"};

SparsePolynomial from_text(const std::vector<std::string>& vars,
                           std::vector<std::pair<std::vector<Exponent>, std::string>> terms) {
  std::vector<std::pair<Monomial, Rational>> ts;
  for (auto& [e, c] : terms) ts.emplace_back(Monomial(e), parse_rational(c));
  return SparsePolynomial::from_terms(vars, ts);
}

/// s1^2 + s2^2 - 2 s1 s2, the quadratic member of the n=2 family.
SparsePolynomial h22() {
  return from_text(S2, {{{2, 0}, "1"}, {{0, 2}, "1"}, {{1, 1}, "-2"}});
}

SparsePolynomial random_poly(std::mt19937_64& rng, const std::vector<std::string>& vars,
                             int max_deg, int max_terms) {
  std::uniform_int_distribution<int> nterms(0, max_terms);
  std::uniform_int_distribution<int> deg(0, max_deg);
  std::uniform_int_distribution<int> coeff(-9, 9);
  std::uniform_int_distribution<int> den(1, 4);
  std::vector<std::pair<Monomial, Rational>> terms;
  const int k = nterms(rng);
  for (int t = 0; t < k; ++t) {
    Monomial m = Monomial::unit(vars.size());
    for (auto& e : m.e) e = Exponent(deg(rng));
    Rational c(coeff(rng), den(rng));
    c.canonicalize();
    terms.emplace_back(std::move(m), c);
  }
  return SparsePolynomial::from_terms(vars, terms);
}

std::vector<Rational> random_point(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> num(-12, 12);
  std::uniform_int_distribution<int> den(1, 8);
  std::vector<Rational> p;
  for (std::size_t i = 0; i < n; ++i) {
    Rational q(num(rng), den(rng));
    q.canonicalize();
    p.push_back(q);
  }
  return p;
}

}  // namespace

TEST_CASE("addition: cancellation, identity, and the n=2 quadratic member") {
  const auto s1 = SparsePolynomial::variable(S2, 0);
  const auto s2 = SparsePolynomial::variable(S2, 1);
  CHECK(poly_add(poly_add(s1, s2), poly_neg(s2)) == s1);

  const auto p = from_text(S2, {{{1, 1}, "3"}, {{0, 0}, "-1/2"}});
  CHECK(poly_add(p, SparsePolynomial::zero(S2)) == p);

  const auto partial = from_text(S2, {{{2, 0}, "1"}, {{1, 1}, "-2"}});
  const auto s2sq = from_text(S2, {{{0, 2}, "1"}});
  CHECK(poly_add(partial, s2sq) == h22());
}

TEST_CASE("multiplication: difference of squares, identity, binomial square") {
  const auto s1 = SparsePolynomial::variable(S2, 0);
  const auto s2 = SparsePolynomial::variable(S2, 1);
  const auto diff = poly_sub(s1, s2);
  const auto sum = poly_add(s1, s2);
  CHECK(poly_mul(diff, sum) == from_text(S2, {{{2, 0}, "1"}, {{0, 2}, "-1"}}));

  const auto p = from_text(S2, {{{2, 1}, "5/3"}, {{0, 0}, "7"}});
  const auto one = SparsePolynomial::constant(S2, Rational(1));
  CHECK(poly_mul(p, one) == p);

  CHECK(poly_mul(diff, diff) == h22());
  CHECK(poly_square(diff) == h22());
}

TEST_CASE("mismatched universes are structural errors") {
  const auto a = SparsePolynomial::variable(S2, 0);
  const auto b = SparsePolynomial::variable({"s1", "s3"}, 0);
  CHECK_THROWS_AS(poly_add(a, b), StructuralError);
  CHECK_THROWS_AS(poly_mul(a, b), StructuralError);
}

TEST_CASE("exact evaluation") {
  const auto p = from_text(S2, {{{2, 0}, "1"}, {{0, 2}, "-1"}});
  const std::vector<Rational> pt{Rational(3), Rational(2)};
  CHECK(poly_eval_exact(p, pt) == 5);

  const auto q = from_text(S2, {{{3, 1}, "4"}, {{0, 0}, "-2/7"}});
  const std::vector<Rational> zero{Rational(0), Rational(0)};
  CHECK(poly_eval_exact(q, zero) == parse_rational("-2/7"));

  const std::vector<Rational> frac{parse_rational("1/4"), parse_rational("1/9")};
  CHECK(poly_eval_exact(h22(), frac) == parse_rational("25/1296"));

  const std::vector<Rational> bad{Rational(1)};
  CHECK_THROWS_AS(poly_eval_exact(p, bad), StructuralError);
}

TEST_CASE("substitution") {
  const std::vector<std::string> dt = {"delta", "t"};
  const auto delta_sq = from_text(dt, {{{2, 0}, "1"}});
  const auto replacement = poly_sub(SparsePolynomial::variable(dt, 0),
                                    SparsePolynomial::variable(dt, 1));
  const auto shifted = poly_substitute(delta_sq, {{"delta", replacement}});
  CHECK(shifted == from_text(dt, {{{2, 0}, "1"}, {{1, 1}, "-2"}, {{0, 2}, "1"}}));

  CHECK(poly_substitute(delta_sq, {}) == delta_sq);

  CHECK_THROWS_AS(poly_substitute(delta_sq, {{"zzz", replacement}}), StructuralError);
}

TEST_CASE("homogeneity witnessed by a fresh scaling variable") {
  const std::vector<std::string> sl = {"s1", "s2", "lambda"};
  const auto h = with_variables(h22(), sl);
  const auto lam = SparsePolynomial::variable(sl, 2);
  std::map<std::string, SparsePolynomial> bind{
      {"s1", poly_mul(lam, SparsePolynomial::variable(sl, 0))},
      {"s2", poly_mul(lam, SparsePolynomial::variable(sl, 1))},
  };
  CHECK(poly_substitute(h, bind) == poly_mul(poly_square(lam), h));
}

TEST_CASE("ring axioms on random polynomials") {
  std::mt19937_64 rng(20240817);
  const std::vector<std::string> vars = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_poly(rng, vars, 6, 6);
    const auto q = random_poly(rng, vars, 6, 6);
    const auto r = random_poly(rng, vars, 6, 6);
    CHECK(poly_add(p, q) == poly_add(q, p));
    CHECK(poly_mul(p, q) == poly_mul(q, p));
    CHECK(poly_mul(poly_mul(p, q), r) == poly_mul(p, poly_mul(q, r)));
    CHECK(poly_mul(p, poly_add(q, r)) == poly_add(poly_mul(p, q), poly_mul(p, r)));
    poly_mul(p, q).validate();
    poly_add(p, q).validate();
  }
}

TEST_CASE("evaluation is a ring homomorphism") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> vars = {"a", "b", "c"};
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_poly(rng, vars, 5, 5);
    const auto q = random_poly(rng, vars, 5, 5);
    const auto x = random_point(rng, 3);
    CHECK(poly_eval_exact(poly_mul(p, q), x) ==
          poly_eval_exact(p, x) * poly_eval_exact(q, x));
    CHECK(poly_eval_exact(poly_add(p, q), x) ==
          poly_eval_exact(p, x) + poly_eval_exact(q, x));
  }
}

TEST_CASE("serialize -> parse -> serialize is the identity") {
  std::mt19937_64 rng(99);
  const std::vector<std::string> vars = {"u1", "u2"};
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_poly(rng, vars, 8, 10);
    const std::string text = p.to_json();
    const auto q = SparsePolynomial::from_json(text);
    CHECK(q == p);
    CHECK(q.to_json() == text);
  }
  CHECK(SparsePolynomial::zero(vars).to_json() ==
        R"({"vars":["u1","u2"],"terms":[]})");
}

TEST_CASE("integer evaluation agrees with the rational path") {
  std::mt19937_64 rng(431);
  const std::vector<std::string> vars = {"a", "b", "c"};
  std::uniform_int_distribution<int> smallint(-6, 6);
  for (int trial = 0; trial < 40; ++trial) {
    auto p = random_poly(rng, vars, 6, 8);
    p = poly_scale(p, Rational(p.is_zero() ? 1 : p.coefficient(0).get_den()));
    if (!p.has_integer_coefficients()) continue;
    std::vector<Integer> zi(3);
    std::vector<Rational> zq(3);
    for (int k = 0; k < 3; ++k) {
      zi[k] = smallint(rng);
      zq[k] = Rational(zi[k]);
    }
    CHECK(Rational(poly_eval_int(p, zi)) == poly_eval_exact(p, zq));
  }
}

TEST_CASE("the packed kernel and the general kernel agree") {
  std::mt19937_64 rng(5150);
  const std::vector<std::string> vars = {"x", "y", "z"};
  const Rational third = parse_rational("1/3");
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_poly(rng, vars, 5, 12);
    const auto q = random_poly(rng, vars, 5, 12);
    // Scaling by 1/3 forces rational coefficients, hence the general path;
    // the product must match the packed result rescaled.
    const auto fast = poly_mul(p, q);
    const auto slow = poly_mul(poly_scale(p, third), q);
    CHECK(poly_scale(fast, third) == slow);
  }
}

TEST_CASE("orbit-compressed products of symmetric operands match the flat kernel") {
  std::mt19937_64 rng(0xfeed);
  const std::vector<std::string> vars = {"d", "x", "y", "z", "w"};
  auto symmetrize = [&](const SparsePolynomial& p) {
    // sum over the six permutations of (x, y, z)
    static const int perms[6][3] = {{1, 2, 3}, {1, 3, 2}, {2, 1, 3},
                                    {2, 3, 1}, {3, 1, 2}, {3, 2, 1}};
    PolynomialBuilder b(vars);
    std::vector<Exponent> e(vars.size());
    for (std::size_t t = 0; t < p.term_count(); ++t) {
      auto pe = p.exponents(t);
      for (const auto& perm : perms) {
        e[0] = pe[0];
        e[4] = pe[4];
        for (int k = 0; k < 3; ++k) e[perm[k]] = pe[k + 1];
        b.add_term(std::span<const Exponent>(e), p.coefficient(t));
      }
    }
    return b.build();
  };
  auto random_int_poly = [&](int max_deg, int max_terms) {
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<int> coeff(-9, 9);
    std::vector<std::pair<Monomial, Rational>> terms;
    for (int t = nterms(rng); t > 0; --t) {
      Monomial m = Monomial::unit(vars.size());
      for (auto& e : m.e) e = Exponent(deg(rng));
      terms.emplace_back(std::move(m), Rational(coeff(rng)));
    }
    return SparsePolynomial::from_terms(vars, terms);
  };
  int engaged = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const auto p = symmetrize(random_int_poly(5, 8));
    const auto q = symmetrize(random_int_poly(5, 8));
    const auto orbit = detail::symmetric_mul_for_tests(p, q);
    if (!orbit) continue;  // zero or too-small symmetric block
    ++engaged;
    CHECK(*orbit == poly_mul(p, q));
    orbit->validate();
  }
  CHECK(engaged >= 15);
}

TEST_CASE("exponent overflow is a capacity error") {
  const std::vector<std::string> v1 = {"x"};
  const auto big = from_text(v1, {{{3000000000u}, "1"}});
  CHECK_THROWS_AS(poly_mul(big, big), CapacityError);
  CHECK_THROWS_WITH_AS(poly_mul(big, big), doctest::Contains("6000000000"), CapacityError);
}

TEST_CASE("leading data and degrees") {
  const auto h = h22();
  CHECK(h.total_degree() == 2);
  CHECK(h.leading_coefficient() == 1);  // graded-lex leading term is s1^2
  CHECK(h.max_exponent(0) == 2);
  CHECK(SparsePolynomial::zero(S2).total_degree() == 0);
}
