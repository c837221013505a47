#ifndef HKPOLY_POLYNOMIAL_HPP
#define HKPOLY_POLYNOMIAL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hkpoly/rational.hpp"

namespace hkpoly {

using Exponent = std::uint32_t;

/// Exponent vector of a single term. Length always equals the ambient
/// variable count of the owning polynomial.
struct Monomial {
  std::vector<Exponent> e;

  Monomial() = default;
  explicit Monomial(std::vector<Exponent> exps) : e(std::move(exps)) {}
  static Monomial unit(std::size_t nvars) { return Monomial(std::vector<Exponent>(nvars, 0)); }

  std::size_t size() const { return e.size(); }
  std::uint64_t total_degree() const;
  bool operator==(const Monomial& o) const = default;
};

/// Graded-lexicographic order: total degree first, then lexicographic with
/// the first variable most significant.
bool grlex_less(std::span<const Exponent> a, std::span<const Exponent> b);

/// Multivariate polynomial over exact rationals in a fixed, named variable
/// universe. Terms are stored ascending in graded-lex order with no zero
/// coefficients, so equality, iteration and serialization are canonical.
/// Values are immutable after construction and safe to share across threads.
class SparsePolynomial {
public:
  SparsePolynomial() = default;

  static SparsePolynomial zero(std::vector<std::string> vars);
  static SparsePolynomial constant(std::vector<std::string> vars, const Rational& c);
  /// The monomial x_index^1.
  static SparsePolynomial variable(std::vector<std::string> vars, std::size_t index);
  /// Canonicalizes: combines duplicate monomials, prunes zeros, sorts.
  static SparsePolynomial from_terms(std::vector<std::string> vars,
                                     const std::vector<std::pair<Monomial, Rational>>& terms);
  /// O(terms) adoption of storage that is already canonical (strictly
  /// ascending graded-lex, no zero coefficients); order is re-verified.
  static SparsePolynomial from_sorted_terms(std::vector<std::string> vars,
                                            std::vector<Exponent> flat_exps,
                                            std::vector<Rational> coeffs);

  const std::vector<std::string>& vars() const { return vars_; }
  std::size_t var_count() const { return vars_.size(); }
  std::size_t term_count() const { return coeffs_.size(); }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_one() const;

  std::span<const Exponent> exponents(std::size_t term) const {
    return {exps_.data() + term * vars_.size(), vars_.size()};
  }
  const Rational& coefficient(std::size_t term) const { return coeffs_[term]; }

  std::uint64_t term_degree(std::size_t term) const;
  /// Degree of the grlex-leading term; 0 for the zero polynomial.
  std::uint64_t total_degree() const;
  /// Coefficient of the grlex-largest term; 0 for the zero polynomial.
  Rational leading_coefficient() const;
  std::uint64_t max_exponent(std::size_t var) const;

  bool has_integer_coefficients() const;

  bool operator==(const SparsePolynomial& o) const {
    return vars_ == o.vars_ && exps_ == o.exps_ && coeffs_ == o.coeffs_;
  }

  /// Canonical single-line JSON: {"vars":[...],"terms":[{"c":"p/q","e":[...]},...]}
  /// with terms ascending in graded-lex order and coefficients in lowest
  /// terms with an explicit denominator.
  std::string to_json() const;
  static SparsePolynomial from_json(const std::string& text);

  /// Throws InternalError if any storage invariant is broken. Cheap enough
  /// to call after every public operation in tests.
  void validate() const;

private:
  friend class PolynomialBuilder;
  friend SparsePolynomial poly_add(const SparsePolynomial&, const SparsePolynomial&);
  friend SparsePolynomial poly_sub(const SparsePolynomial&, const SparsePolynomial&);
  friend SparsePolynomial poly_scale(const SparsePolynomial&, const Rational&);
  friend SparsePolynomial poly_mul(const SparsePolynomial&, const SparsePolynomial&);
  friend SparsePolynomial poly_square(const SparsePolynomial&);

  std::vector<std::string> vars_;
  std::vector<Exponent> exps_;    // term_count * var_count, flat
  std::vector<Rational> coeffs_;  // parallel to terms
};

/// Accumulating builder; the only way to assemble polynomials term by term.
class PolynomialBuilder {
public:
  explicit PolynomialBuilder(std::vector<std::string> vars);

  void add_term(std::span<const Exponent> exps, const Rational& c);
  void add_term(const Monomial& m, const Rational& c) { add_term(std::span(m.e), c); }
  /// Adds c * shift * p, where shift is a monomial in the builder's universe.
  void add_scaled(const SparsePolynomial& p, std::span<const Exponent> shift, const Rational& c);

  SparsePolynomial build();

private:
  std::vector<std::string> vars_;
  std::map<std::vector<Exponent>, Rational> acc_;
};

SparsePolynomial poly_add(const SparsePolynomial& a, const SparsePolynomial& b);
SparsePolynomial poly_sub(const SparsePolynomial& a, const SparsePolynomial& b);
SparsePolynomial poly_neg(const SparsePolynomial& a);
SparsePolynomial poly_scale(const SparsePolynomial& a, const Rational& c);

/// Exact distributive product. Operands must share the variable universe.
/// Exponent additions are overflow-checked and raise CapacityError.
SparsePolynomial poly_mul(const SparsePolynomial& a, const SparsePolynomial& b);

/// Same result as poly_mul(a, a); exploits symmetry of the product.
SparsePolynomial poly_square(const SparsePolynomial& a);

/// Exact evaluation; point length must equal the variable count.
Rational poly_eval_exact(const SparsePolynomial& p, std::span<const Rational> point);

/// Exact evaluation at integer points for integer-coefficient polynomials.
/// Used on hot paths where the rational machinery would dominate.
Integer poly_eval_int(const SparsePolynomial& p, std::span<const Integer> point);

/// Exact composition: every key of bindings must name a variable of p, and
/// all bound polynomials must share one target universe, which must contain
/// every unbound variable of p. Empty bindings return p unchanged.
SparsePolynomial poly_substitute(const SparsePolynomial& p,
                                 const std::map<std::string, SparsePolynomial>& bindings);

/// Rebuilds p over a larger universe; every variable of p must appear in
/// new_vars.
SparsePolynomial with_variables(const SparsePolynomial& p, std::vector<std::string> new_vars);

namespace detail {
/// Forces the orbit-compressed product route regardless of operand size;
/// nullopt when the operands lack a common symmetric block of >= 3
/// variables or cannot be packed. Exists so tests can pin the symmetric
/// kernel against the general one.
std::optional<SparsePolynomial> symmetric_mul_for_tests(const SparsePolynomial& a,
                                                        const SparsePolynomial& b);
}  // namespace detail

}  // namespace hkpoly

#endif
