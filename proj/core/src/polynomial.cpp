#include "hkpoly/polynomial.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "hkpoly/errors.hpp"
#include "hkpoly/json_io.hpp"

namespace hkpoly {

namespace {

void require_same_universe(const SparsePolynomial& a, const SparsePolynomial& b,
                           const char* op) {
  if (a.vars() != b.vars())
    throw StructuralError(std::string(op) + ": variable universes differ");
}

void check_var_names(const std::vector<std::string>& vars) {
  std::set<std::string> seen;
  for (const auto& v : vars) {
    if (v.empty()) throw StructuralError("empty variable name");
    if (!seen.insert(v).second) throw StructuralError("duplicate variable name '" + v + "'");
  }
}

}  // namespace

std::uint64_t Monomial::total_degree() const {
  std::uint64_t d = 0;
  for (auto x : e) d += x;
  return d;
}

bool grlex_less(std::span<const Exponent> a, std::span<const Exponent> b) {
  std::uint64_t da = 0, db = 0;
  for (auto x : a) da += x;
  for (auto x : b) db += x;
  if (da != db) return da < db;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

SparsePolynomial SparsePolynomial::zero(std::vector<std::string> vars) {
  check_var_names(vars);
  SparsePolynomial p;
  p.vars_ = std::move(vars);
  return p;
}

SparsePolynomial SparsePolynomial::constant(std::vector<std::string> vars, const Rational& c) {
  SparsePolynomial p = zero(std::move(vars));
  if (c != 0) {
    p.exps_.assign(p.vars_.size(), 0);
    p.coeffs_.push_back(c);
  }
  return p;
}

SparsePolynomial SparsePolynomial::variable(std::vector<std::string> vars, std::size_t index) {
  SparsePolynomial p = zero(std::move(vars));
  if (index >= p.vars_.size()) throw StructuralError("variable index out of range");
  p.exps_.assign(p.vars_.size(), 0);
  p.exps_[index] = 1;
  p.coeffs_.emplace_back(1);
  return p;
}

SparsePolynomial SparsePolynomial::from_terms(
    std::vector<std::string> vars, const std::vector<std::pair<Monomial, Rational>>& terms) {
  PolynomialBuilder b(std::move(vars));
  for (const auto& [m, c] : terms) b.add_term(m, c);
  return b.build();
}

SparsePolynomial SparsePolynomial::from_sorted_terms(std::vector<std::string> vars,
                                                     std::vector<Exponent> flat_exps,
                                                     std::vector<Rational> coeffs) {
  check_var_names(vars);
  const std::size_t nv = vars.size();
  if (flat_exps.size() != coeffs.size() * nv)
    throw StructuralError("from_sorted_terms: storage size mismatch");
  SparsePolynomial p;
  p.vars_ = std::move(vars);
  p.exps_ = std::move(flat_exps);
  p.coeffs_ = std::move(coeffs);
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    if (p.coeffs_[t] == 0) throw StructuralError("from_sorted_terms: zero coefficient");
    if (t > 0 && !grlex_less(p.exponents(t - 1), p.exponents(t)))
      throw StructuralError("from_sorted_terms: terms not strictly ascending");
  }
  return p;
}

bool SparsePolynomial::is_one() const {
  return term_count() == 1 && coeffs_[0] == 1 && term_degree(0) == 0;
}

std::uint64_t SparsePolynomial::term_degree(std::size_t term) const {
  std::uint64_t d = 0;
  for (auto x : exponents(term)) d += x;
  return d;
}

std::uint64_t SparsePolynomial::total_degree() const {
  if (is_zero()) return 0;
  return term_degree(term_count() - 1);  // terms ascend in grlex
}

Rational SparsePolynomial::leading_coefficient() const {
  if (is_zero()) return Rational(0);
  return coeffs_.back();
}

std::uint64_t SparsePolynomial::max_exponent(std::size_t var) const {
  std::uint64_t m = 0;
  for (std::size_t t = 0; t < term_count(); ++t)
    m = std::max<std::uint64_t>(m, exponents(t)[var]);
  return m;
}

bool SparsePolynomial::has_integer_coefficients() const {
  for (const auto& c : coeffs_)
    if (c.get_den() != 1) return false;
  return true;
}

void SparsePolynomial::validate() const {
  check_var_names(vars_);
  const std::size_t nv = vars_.size();
  if (exps_.size() != coeffs_.size() * nv)
    throw InternalError("polynomial storage size mismatch");
  for (std::size_t t = 0; t < term_count(); ++t) {
    if (coeffs_[t] == 0) throw InternalError("stored zero coefficient");
    if (!is_canonical(coeffs_[t])) throw InternalError("non-canonical coefficient");
    if (t > 0 && !grlex_less(exponents(t - 1), exponents(t)))
      throw InternalError("terms not strictly ascending in graded-lex order");
  }
}

PolynomialBuilder::PolynomialBuilder(std::vector<std::string> vars) : vars_(std::move(vars)) {
  check_var_names(vars_);
}

void PolynomialBuilder::add_term(std::span<const Exponent> exps, const Rational& c) {
  if (exps.size() != vars_.size())
    throw StructuralError("monomial length does not match variable count");
  if (c == 0) return;
  std::vector<Exponent> key(exps.begin(), exps.end());
  auto it = acc_.find(key);
  if (it == acc_.end()) {
    acc_.emplace(std::move(key), c);
  } else {
    it->second += c;
    if (it->second == 0) acc_.erase(it);
  }
}

void PolynomialBuilder::add_scaled(const SparsePolynomial& p, std::span<const Exponent> shift,
                                   const Rational& c) {
  if (p.vars() != vars_) throw StructuralError("add_scaled: variable universes differ");
  if (c == 0) return;
  std::vector<Exponent> key(vars_.size());
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    auto e = p.exponents(t);
    for (std::size_t v = 0; v < key.size(); ++v) {
      const std::uint64_t sum = std::uint64_t(e[v]) + shift[v];
      if (sum > std::numeric_limits<Exponent>::max())
        throw CapacityError("exponent overflow at degree " + std::to_string(sum));
      key[v] = static_cast<Exponent>(sum);
    }
    add_term(key, p.coefficient(t) * c);
  }
}

SparsePolynomial PolynomialBuilder::build() {
  SparsePolynomial p;
  p.vars_ = vars_;
  const std::size_t nv = vars_.size();
  // std::map on exponent vectors is ordered lexicographically, not grlex;
  // collect and sort once.
  std::vector<std::pair<const std::vector<Exponent>*, const Rational*>> items;
  items.reserve(acc_.size());
  for (const auto& [m, c] : acc_) items.emplace_back(&m, &c);
  std::sort(items.begin(), items.end(), [](const auto& x, const auto& y) {
    return grlex_less(std::span(*x.first), std::span(*y.first));
  });
  p.exps_.reserve(items.size() * nv);
  p.coeffs_.reserve(items.size());
  for (const auto& [m, c] : items) {
    p.exps_.insert(p.exps_.end(), m->begin(), m->end());
    p.coeffs_.push_back(*c);
  }
  return p;
}

namespace {

/// Linear merge of two canonically sorted term lists (a + bsign*b) straight
/// into flat storage; inputs canonical implies output canonical.
void merge_sorted(const SparsePolynomial& a, const SparsePolynomial& b, int bsign,
                  std::vector<Exponent>& exps, std::vector<Rational>& coeffs) {
  const std::size_t na = a.term_count(), nb = b.term_count(), nv = a.var_count();
  exps.reserve((na + nb) * nv);
  coeffs.reserve(na + nb);
  auto push = [&](std::span<const Exponent> e, Rational c) {
    if (c == 0) return;
    exps.insert(exps.end(), e.begin(), e.end());
    coeffs.push_back(std::move(c));
  };
  std::size_t i = 0, j = 0;
  while (i < na || j < nb) {
    if (j == nb || (i < na && grlex_less(a.exponents(i), b.exponents(j)))) {
      push(a.exponents(i), a.coefficient(i));
      ++i;
    } else if (i == na || grlex_less(b.exponents(j), a.exponents(i))) {
      push(b.exponents(j), bsign > 0 ? b.coefficient(j) : Rational(-b.coefficient(j)));
      ++j;
    } else {
      push(a.exponents(i), bsign > 0 ? Rational(a.coefficient(i) + b.coefficient(j))
                                     : Rational(a.coefficient(i) - b.coefficient(j)));
      ++i;
      ++j;
    }
  }
}

}  // namespace

SparsePolynomial poly_add(const SparsePolynomial& a, const SparsePolynomial& b) {
  require_same_universe(a, b, "poly_add");
  SparsePolynomial r;
  r.vars_ = a.vars();
  merge_sorted(a, b, +1, r.exps_, r.coeffs_);
  return r;
}

SparsePolynomial poly_sub(const SparsePolynomial& a, const SparsePolynomial& b) {
  require_same_universe(a, b, "poly_sub");
  SparsePolynomial r;
  r.vars_ = a.vars();
  merge_sorted(a, b, -1, r.exps_, r.coeffs_);
  return r;
}

SparsePolynomial poly_neg(const SparsePolynomial& a) {
  return poly_scale(a, Rational(-1));
}

SparsePolynomial poly_scale(const SparsePolynomial& a, const Rational& c) {
  if (c == 0) return SparsePolynomial::zero(a.vars());
  SparsePolynomial r;
  r.vars_ = a.vars();
  r.exps_ = a.exps_;
  r.coeffs_.reserve(a.term_count());
  for (const auto& x : a.coeffs_) r.coeffs_.emplace_back(x * c);
  return r;
}

Rational poly_eval_exact(const SparsePolynomial& p, std::span<const Rational> point) {
  if (point.size() != p.var_count())
    throw StructuralError("poly_eval_exact: point arity does not match variable count");
  const std::size_t nv = p.var_count();
  // Per-variable power tables up to the maximum exponent present.
  std::vector<std::vector<Rational>> pow(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const std::uint64_t m = p.max_exponent(v);
    pow[v].reserve(m + 1);
    pow[v].emplace_back(1);
    for (std::uint64_t k = 1; k <= m; ++k) pow[v].push_back(pow[v].back() * point[v]);
  }
  Rational sum(0);
  Rational term;
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    term = p.coefficient(t);
    auto e = p.exponents(t);
    for (std::size_t v = 0; v < nv; ++v)
      if (e[v] != 0) term *= pow[v][e[v]];
    sum += term;
  }
  return sum;
}

Integer poly_eval_int(const SparsePolynomial& p, std::span<const Integer> point) {
  if (point.size() != p.var_count())
    throw StructuralError("poly_eval_int: point arity does not match variable count");
  if (!p.has_integer_coefficients())
    throw InternalError("poly_eval_int on non-integer coefficients");
  const std::size_t nv = p.var_count();
  std::vector<std::vector<Integer>> pow(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const std::uint64_t m = p.max_exponent(v);
    pow[v].reserve(m + 1);
    pow[v].emplace_back(1);
    for (std::uint64_t k = 1; k <= m; ++k) pow[v].push_back(pow[v].back() * point[v]);
  }
  // Adjacent terms share exponent prefixes in graded-lex order; keep partial
  // products per variable position and recompute only from the first
  // position that changed. Zero exponents alias the previous partial through
  // a pointer instead of copying limbs.
  std::vector<Integer> owned(nv + 1);
  owned[0] = 1;
  std::vector<const Integer*> cur(nv + 1);
  cur[0] = &owned[0];
  std::vector<Exponent> prev(nv, std::numeric_limits<Exponent>::max());
  Integer sum = 0;
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    auto e = p.exponents(t);
    std::size_t d = 0;
    while (d < nv && e[d] == prev[d]) ++d;
    for (std::size_t v = d; v < nv; ++v) {
      if (e[v] == 0) {
        cur[v + 1] = cur[v];
      } else {
        mpz_mul(owned[v + 1].get_mpz_t(), cur[v]->get_mpz_t(), pow[v][e[v]].get_mpz_t());
        cur[v + 1] = &owned[v + 1];
      }
      prev[v] = e[v];
    }
    mpz_addmul(sum.get_mpz_t(), cur[nv]->get_mpz_t(),
               p.coefficient(t).get_num().get_mpz_t());
  }
  return sum;
}

SparsePolynomial poly_substitute(const SparsePolynomial& p,
                                 const std::map<std::string, SparsePolynomial>& bindings) {
  if (bindings.empty()) return p;

  for (const auto& [name, _] : bindings)
    if (std::find(p.vars().begin(), p.vars().end(), name) == p.vars().end())
      throw StructuralError("poly_substitute: unknown variable '" + name + "'");

  const std::vector<std::string>& target = bindings.begin()->second.vars();
  for (const auto& [name, poly] : bindings)
    if (poly.vars() != target)
      throw StructuralError("poly_substitute: bound polynomials disagree on the target universe");
  for (const auto& v : p.vars())
    if (!bindings.count(v) &&
        std::find(target.begin(), target.end(), v) == target.end())
      throw StructuralError("poly_substitute: unbound variable '" + v +
                            "' missing from the target universe");

  const std::size_t nv = p.var_count();
  const std::size_t nt = target.size();

  // Per-variable role: either a binding (with memoized powers) or a direct
  // index into the target universe.
  std::vector<const SparsePolynomial*> bound(nv, nullptr);
  std::vector<std::size_t> direct(nv, 0);
  std::vector<std::vector<SparsePolynomial>> powers(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    auto it = bindings.find(p.vars()[v]);
    if (it != bindings.end()) {
      bound[v] = &it->second;
      powers[v].push_back(SparsePolynomial::constant(target, Rational(1)));
    } else {
      direct[v] = std::find(target.begin(), target.end(), p.vars()[v]) - target.begin();
    }
  }
  auto power_of = [&](std::size_t v, Exponent e) -> const SparsePolynomial& {
    auto& memo = powers[v];
    while (memo.size() <= e) memo.push_back(poly_mul(memo.back(), *bound[v]));
    return memo[e];
  };

  PolynomialBuilder out(target);
  std::vector<Exponent> shift(nt);
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    auto e = p.exponents(t);
    std::fill(shift.begin(), shift.end(), 0);
    SparsePolynomial factor = SparsePolynomial::constant(target, Rational(1));
    bool have_factor = false;
    for (std::size_t v = 0; v < nv; ++v) {
      if (e[v] == 0) continue;
      if (bound[v]) {
        const SparsePolynomial& pw = power_of(v, e[v]);
        factor = have_factor ? poly_mul(factor, pw) : pw;
        have_factor = true;
      } else {
        shift[direct[v]] += e[v];
      }
    }
    out.add_scaled(factor, shift, p.coefficient(t));
  }
  return out.build();
}

SparsePolynomial with_variables(const SparsePolynomial& p, std::vector<std::string> new_vars) {
  check_var_names(new_vars);
  std::vector<std::size_t> where(p.var_count());
  for (std::size_t v = 0; v < p.var_count(); ++v) {
    auto it = std::find(new_vars.begin(), new_vars.end(), p.vars()[v]);
    if (it == new_vars.end())
      throw StructuralError("with_variables: variable '" + p.vars()[v] + "' missing");
    where[v] = it - new_vars.begin();
  }
  std::vector<std::pair<Monomial, Rational>> terms;
  terms.reserve(p.term_count());
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    Monomial m = Monomial::unit(new_vars.size());
    auto e = p.exponents(t);
    for (std::size_t v = 0; v < p.var_count(); ++v) m.e[where[v]] = e[v];
    terms.emplace_back(std::move(m), p.coefficient(t));
  }
  return SparsePolynomial::from_terms(std::move(new_vars), terms);
}

nlohmann::ordered_json to_json_value(const SparsePolynomial& p) {
  nlohmann::ordered_json doc;
  doc["vars"] = p.vars();
  auto& terms = doc["terms"] = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    nlohmann::ordered_json jt;
    jt["c"] = format_rational(p.coefficient(t));
    auto e = p.exponents(t);
    jt["e"] = std::vector<std::uint64_t>(e.begin(), e.end());
    terms.push_back(std::move(jt));
  }
  return doc;
}

SparsePolynomial polynomial_from_json_value(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("vars") || !doc.contains("terms"))
    throw StructuralError("polynomial JSON must be an object with \"vars\" and \"terms\"");
  std::vector<std::string> vars;
  for (const auto& v : doc["vars"]) {
    if (!v.is_string()) throw StructuralError("polynomial JSON: \"vars\" entries must be strings");
    vars.push_back(v.get<std::string>());
  }
  PolynomialBuilder b(vars);
  std::size_t idx = 0;
  for (const auto& jt : doc["terms"]) {
    if (!jt.is_object() || !jt.contains("c") || !jt.contains("e"))
      throw StructuralError("polynomial JSON: terms[" + std::to_string(idx) +
                            "] must carry \"c\" and \"e\"");
    if (!jt["c"].is_string())
      throw StructuralError("polynomial JSON: terms[" + std::to_string(idx) +
                            "] coefficient must be a \"p/q\" string");
    const Rational c = parse_rational(jt["c"].get<std::string>());
    std::vector<Exponent> e;
    for (const auto& x : jt["e"]) {
      if (!x.is_number_unsigned() || x.get<std::uint64_t>() > std::numeric_limits<Exponent>::max())
        throw StructuralError("polynomial JSON: terms[" + std::to_string(idx) +
                              "] has a bad exponent");
      e.push_back(static_cast<Exponent>(x.get<std::uint64_t>()));
    }
    if (e.size() != vars.size())
      throw StructuralError("polynomial JSON: terms[" + std::to_string(idx) +
                            "] exponent length mismatch");
    b.add_term(std::span<const Exponent>(e), c);
    ++idx;
  }
  return b.build();
}

std::string SparsePolynomial::to_json() const { return to_json_value(*this).dump(); }

SparsePolynomial SparsePolynomial::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw StructuralError(std::string("polynomial JSON parse error: ") + e.what());
  }
  return polynomial_from_json_value(doc);
}

}  // namespace hkpoly
