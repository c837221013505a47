#include "hkpoly/rational.hpp"

#include <cctype>

#include "hkpoly/errors.hpp"

namespace hkpoly {

namespace {

bool valid_integer_text(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  std::string num = text.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  if (!valid_integer_text(num) || !valid_integer_text(den))
    throw StructuralError("malformed rational '" + text + "' (expected \"p/q\")");
  if (num[0] == '+') num.erase(0, 1);  // GMP's reader takes '-' but not '+'
  if (den[0] == '+') den.erase(0, 1);
  Rational q;
  if (mpq_set_str(q.get_mpq_t(), (num + "/" + den).c_str(), 10) != 0)
    throw StructuralError("malformed rational '" + text + "'");
  if (mpz_sgn(mpq_denref(q.get_mpq_t())) == 0)
    throw StructuralError("zero denominator in rational '" + text + "'");
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational rational_pow(const Rational& q, unsigned long e) {
  Rational r;
  mpz_pow_ui(mpq_numref(r.get_mpq_t()), mpq_numref(q.get_mpq_t()), e);
  mpz_pow_ui(mpq_denref(r.get_mpq_t()), mpq_denref(q.get_mpq_t()), e);
  return r;  // powers of a canonical rational are canonical
}

Integer integer_pow(const Integer& z, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), z.get_mpz_t(), e);
  return r;
}

bool is_canonical(const Rational& q) {
  if (mpz_sgn(mpq_denref(q.get_mpq_t())) <= 0) return false;
  Integer g;
  mpz_gcd(g.get_mpz_t(), mpq_numref(q.get_mpq_t()), mpq_denref(q.get_mpq_t()));
  return g == 1;
}

}  // namespace hkpoly
