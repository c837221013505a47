#ifndef HKPOLY_SQRT_RING_HPP
#define HKPOLY_SQRT_RING_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "hkpoly/rational.hpp"

namespace hkpoly {

/// Exact arithmetic in Q[y_1..y_k]/(y_i^2 - d_i) for positive rational
/// radicands d_i: every value is a rational combination of the square-free
/// products of adjoined roots, indexed by bitmask. Sums of the form
/// sum_j a_j / sqrt(d_j) live here exactly, which is what the certificate
/// consistency checks evaluate. Correct as a commutative ring even when the
/// d_i are multiplicatively dependent.
class SqrtRing {
public:
  /// Throws DomainError unless every radicand is > 0; CapacityError above
  /// 16 generators (the basis is 2^k-dimensional).
  explicit SqrtRing(std::vector<Rational> radicands);

  std::size_t generators() const { return radicands_.size(); }
  std::size_t dimension() const { return std::size_t(1) << radicands_.size(); }
  const Rational& radicand(std::size_t i) const { return radicands_[i]; }

  class Element {
  public:
    Element() = default;

    bool is_zero() const;
    /// Coefficient of the basis element prod_{i in mask} y_i.
    const Rational& component(std::uint32_t mask) const { return comps_[mask]; }

    Element operator+(const Element& o) const;
    Element operator-(const Element& o) const;
    Element operator*(const Element& o) const;
    Element operator*(const Rational& s) const;
    bool operator==(const Element& o) const;

  private:
    friend class SqrtRing;
    const SqrtRing* ring_ = nullptr;
    std::vector<Rational> comps_;  // dense over 2^k basis masks
  };

  Element zero() const;
  Element from_rational(const Rational& q) const;
  /// y_i, the adjoined square root of d_i.
  Element root(std::size_t i) const;
  /// 1 / y_i = y_i / d_i.
  Element inverse_root(std::size_t i) const;

private:
  std::vector<Rational> radicands_;
};

}  // namespace hkpoly

#endif
