#include "hkpoly/sqrt_ring.hpp"

#include "hkpoly/errors.hpp"

namespace hkpoly {

SqrtRing::SqrtRing(std::vector<Rational> radicands) : radicands_(std::move(radicands)) {
  if (radicands_.size() > 16)
    throw CapacityError("sqrt ring limited to 16 generators (basis is 2^k-dimensional), got " +
                        std::to_string(radicands_.size()));
  for (const auto& d : radicands_)
    if (d <= 0) throw DomainError("sqrt ring radicands must be positive");
}

bool SqrtRing::Element::is_zero() const {
  for (const auto& c : comps_)
    if (c != 0) return false;
  return true;
}

SqrtRing::Element SqrtRing::Element::operator+(const Element& o) const {
  Element r = *this;
  for (std::size_t i = 0; i < comps_.size(); ++i) r.comps_[i] += o.comps_[i];
  return r;
}

SqrtRing::Element SqrtRing::Element::operator-(const Element& o) const {
  Element r = *this;
  for (std::size_t i = 0; i < comps_.size(); ++i) r.comps_[i] -= o.comps_[i];
  return r;
}

SqrtRing::Element SqrtRing::Element::operator*(const Element& o) const {
  Element r = ring_->zero();
  const std::uint32_t dim = static_cast<std::uint32_t>(comps_.size());
  for (std::uint32_t a = 0; a < dim; ++a) {
    if (comps_[a] == 0) continue;
    for (std::uint32_t b = 0; b < dim; ++b) {
      if (o.comps_[b] == 0) continue;
      // y_A * y_B = (prod over the shared generators of d_i) * y_{A xor B}
      Rational c = comps_[a] * o.comps_[b];
      std::uint32_t shared = a & b;
      while (shared) {
        const unsigned i = std::countr_zero(shared);
        c *= ring_->radicand(i);
        shared &= shared - 1;
      }
      r.comps_[a ^ b] += c;
    }
  }
  return r;
}

SqrtRing::Element SqrtRing::Element::operator*(const Rational& s) const {
  Element r = *this;
  for (auto& c : r.comps_) c *= s;
  return r;
}

bool SqrtRing::Element::operator==(const Element& o) const { return comps_ == o.comps_; }

SqrtRing::Element SqrtRing::zero() const {
  Element e;
  e.ring_ = this;
  e.comps_.assign(dimension(), Rational(0));
  return e;
}

SqrtRing::Element SqrtRing::from_rational(const Rational& q) const {
  Element e = zero();
  e.comps_[0] = q;
  return e;
}

SqrtRing::Element SqrtRing::root(std::size_t i) const {
  Element e = zero();
  e.comps_[std::size_t(1) << i] = 1;
  return e;
}

SqrtRing::Element SqrtRing::inverse_root(std::size_t i) const {
  Element e = zero();
  e.comps_[std::size_t(1) << i] = 1 / radicands_[i];
  return e;
}

}  // namespace hkpoly
