#include "hkpoly/radical.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "hkpoly/errors.hpp"
#include "hkpoly/json_io.hpp"

namespace hkpoly {

namespace {

void check_n(int n, int n_max) {
  if (n < 2) throw DomainError("radical family needs n >= 2, got " + std::to_string(n));
  if (n > n_max)
    throw CapacityError("n = " + std::to_string(n) + " exceeds n_max = " + std::to_string(n_max) +
                        "; the family degree 2^(n-1) and the 2^n-factor product grow "
                        "exponentially");
}

std::vector<std::string> raw_vars(int n) {
  std::vector<std::string> v{"delta"};
  for (int j = 1; j <= n; ++j) v.push_back("t" + std::to_string(j));
  return v;
}

std::vector<std::string> family_vars(int n) {
  std::vector<std::string> v;
  for (int j = 1; j <= n; ++j) v.push_back("s" + std::to_string(j));
  return v;
}

/// The printed base identity for n = 2:
/// delta^4 - 2 delta^2 (t1^2 + t2^2) + t1^4 + t2^4 - 2 t1^2 t2^2.
SparsePolynomial base_identity() {
  const auto vars = raw_vars(2);
  std::vector<std::pair<Monomial, Rational>> terms = {
      {Monomial({4, 0, 0}), Rational(1)},  {Monomial({2, 2, 0}), Rational(-2)},
      {Monomial({2, 0, 2}), Rational(-2)}, {Monomial({0, 4, 0}), Rational(1)},
      {Monomial({0, 0, 4}), Rational(1)},  {Monomial({0, 2, 2}), Rational(-2)},
  };
  return SparsePolynomial::from_terms(vars, terms);
}

/// Splits p by the parity of the delta exponent (variable 0). Terms of the
/// substituted identity have matching delta/t_{n+1} parity; that is asserted
/// here because the squaring step silently depends on it.
void parity_split(const SparsePolynomial& p, SparsePolynomial& even, SparsePolynomial& odd) {
  const std::size_t nv = p.var_count();
  std::vector<Exponent> ee, oe;
  std::vector<Rational> ec, oc;
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    auto e = p.exponents(t);
    if (e[0] % 2 != e[nv - 1] % 2)
      throw InternalError("substituted identity has mixed delta/t parity");
    if (e[0] % 2 == 0) {
      ee.insert(ee.end(), e.begin(), e.end());
      ec.push_back(p.coefficient(t));
    } else {
      oe.insert(oe.end(), e.begin(), e.end());
      oc.push_back(p.coefficient(t));
    }
  }
  even = SparsePolynomial::from_sorted_terms(p.vars(), std::move(ee), std::move(ec));
  odd = SparsePolynomial::from_sorted_terms(p.vars(), std::move(oe), std::move(oc));
}

/// Collects a raw identity polynomial in (delta, t1..tn), homogeneous of
/// degree 2^n with all exponents even, into the family {H_j} indexed by
/// delta^(2*(2^(n-1)-j)), rewriting t_k^2 -> s_k.
RadicalFamily collect_family(const SparsePolynomial& raw, int n) {
  const std::size_t half = std::size_t(1) << (n - 1);
  const std::uint64_t full_degree = 2 * half;
  std::vector<std::vector<Exponent>> exps(half + 1);
  std::vector<std::vector<Rational>> coeffs(half + 1);
  for (std::size_t t = 0; t < raw.term_count(); ++t) {
    auto e = raw.exponents(t);
    if (raw.term_degree(t) != full_degree)
      throw InternalError("identity polynomial is not homogeneous of degree 2^n");
    for (auto x : e)
      if (x % 2 != 0) throw InternalError("odd exponent survived the identity expansion");
    const std::size_t j = half - e[0] / 2;
    for (std::size_t v = 1; v < raw.var_count(); ++v) exps[j].push_back(e[v] / 2);
    coeffs[j].push_back(raw.coefficient(t));
  }
  RadicalFamily f;
  f.n = n;
  f.members.reserve(half + 1);
  const auto svars = family_vars(n);
  for (std::size_t j = 0; j <= half; ++j)
    f.members.push_back(
        SparsePolynomial::from_sorted_terms(svars, std::move(exps[j]), std::move(coeffs[j])));
  return f;
}

}  // namespace

RadicalFamily eliminate_radicals(int n, int n_max) {
  check_n(n, n_max);
  SparsePolynomial r = base_identity();
  for (int k = 2; k < n; ++k) {
    const auto vars = raw_vars(k + 1);
    const std::string fresh = "t" + std::to_string(k + 1);
    r = with_variables(r, vars);
    const SparsePolynomial replacement =
        poly_sub(SparsePolynomial::variable(vars, 0),
                 SparsePolynomial::variable(vars, vars.size() - 1));
    const SparsePolynomial shifted = poly_substitute(r, {{"delta", replacement}});
    SparsePolynomial even, odd;
    parity_split(shifted, even, odd);
    r = poly_sub(poly_square(even), poly_square(odd));
  }
  return collect_family(r, n);
}

RadicalFamily sign_product_family(int n, int n_max) {
  check_n(n, n_max);
  const auto vars = raw_vars(n);
  std::vector<SparsePolynomial> factors;
  factors.reserve(std::size_t(1) << n);
  for (std::uint64_t code = 0; code < (std::uint64_t(1) << n); ++code) {
    std::vector<std::pair<Monomial, Rational>> terms;
    Monomial d = Monomial::unit(vars.size());
    d.e[0] = 1;
    terms.emplace_back(d, Rational(1));
    for (int j = 1; j <= n; ++j) {
      Monomial m = Monomial::unit(vars.size());
      m.e[j] = 1;
      const int eps = (code >> (j - 1)) & 1 ? -1 : 1;
      terms.emplace_back(m, Rational(-eps));
    }
    factors.push_back(SparsePolynomial::from_terms(vars, terms));
  }
  // Balanced expansion of the 2^n linear factors. The recursive split keeps
  // each half a full sub-product over the trailing sign bit, which is what
  // keeps intermediate term counts down.
  auto product = [&](auto&& self, std::size_t lo, std::size_t hi) -> SparsePolynomial {
    if (hi - lo == 1) return factors[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return poly_mul(self(self, lo, mid), self(self, mid, hi));
  };
  const SparsePolynomial raw = product(product, 0, factors.size());
  return collect_family(raw, n);  // hard-asserts the all-even claim
}

const RadicalFamily& cached_radical_family(int n, int n_max) {
  check_n(n, n_max);
  static std::mutex mu;
  static std::map<int, std::unique_ptr<RadicalFamily>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RadicalFamily>(eliminate_radicals(n, n_max));
  return *slot;
}

IdentityProbe::IdentityProbe(const RadicalFamily& f, std::span<const Rational> t) {
  if (f.members.empty()) throw StructuralError("empty radical family");
  if (t.size() != std::size_t(f.n))
    throw StructuralError("verify_identity: tuple arity " + std::to_string(t.size()) +
                          " does not match n = " + std::to_string(f.n));
  delta_default_ = Rational(0);
  for (const auto& x : t) delta_default_ += x;

  // Members of a well-formed family are homogeneous with integer
  // coefficients, in which case H_j(t^2) reduces to an integer evaluation:
  // with t_k = p_k / q over a common denominator, H_j(t^2) = H_j(p^2) / q^(2j).
  bool fast = true;
  for (const auto& m : f.members) {
    if (!m.has_integer_coefficients()) fast = false;
    for (std::size_t k = 0; fast && k < m.term_count(); ++k)
      if (m.term_degree(k) != m.term_degree(0)) fast = false;
    if (!fast) break;
  }

  member_values_.reserve(f.members.size());
  if (fast) {
    Integer q(1);
    for (const auto& x : t) mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), x.get_den().get_mpz_t());
    std::vector<Integer> p2(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
      Integer pk = t[k].get_num() * (q / t[k].get_den());
      p2[k] = pk * pk;
    }
    const Integer q2 = q * q;
    for (const auto& m : f.members) {
      const Integer h = poly_eval_int(m, p2);
      const std::uint64_t j = m.is_zero() ? 0 : m.term_degree(0);
      Rational v(h, integer_pow(q2, j));
      v.canonicalize();
      member_values_.push_back(std::move(v));
    }
  } else {
    std::vector<Rational> s(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) s[k] = t[k] * t[k];
    for (const auto& m : f.members) member_values_.push_back(poly_eval_exact(m, s));
  }
}

Rational IdentityProbe::residual_with_delta(const Rational& delta) const {
  const Rational d2 = delta * delta;
  Rational r(0);
  for (const auto& h : member_values_) r = r * d2 + h;  // Horner from H_0 down
  return r;
}

Rational verify_identity(const RadicalFamily& f, std::span<const Rational> t) {
  return IdentityProbe(f, t).residual();
}

namespace {

std::uint64_t splitmix_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::vector<Rational> sweep_tuple(int n, std::uint64_t seed, long trial) {
  std::uint64_t state =
      (seed ^ 0xa0761d6478bd642full) + std::uint64_t(trial + 1) * 0x9e3779b97f4a7c15ull;
  const long q = 2 * long(splitmix_next(state) % 8) + 1;
  std::vector<Rational> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i) {
    const long p = long(splitmix_next(state) % 63) - 31;
    Rational x(p, q);
    x.canonicalize();
    t.push_back(x);
  }
  return t;
}

}  // namespace

VerifySweepReport verify_identity_sweep(const RadicalFamily& f, long trials,
                                        std::uint64_t seed) {
  if (trials < 1) throw DomainError("verification sweep needs trials >= 1");
  VerifySweepReport rep;
  rep.n = f.n;
  rep.trials = trials;
  rep.seed = seed;

  unsigned nthreads = std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<unsigned>(nthreads, 8);
  if (trials < 32) nthreads = 1;
  std::vector<long> zeros(nthreads, 0), nonzeros(nthreads, 0);
  {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nthreads; ++w) {
      pool.emplace_back([&, w] {
        for (long k = w; k < trials; k += nthreads) {
          const auto t = sweep_tuple(f.n, seed, k);
          IdentityProbe probe(f, t);
          if (probe.residual() == 0) ++zeros[w];
          Rational shifted(0);
          for (const auto& x : t) shifted += x;
          shifted += 1;
          if (probe.residual_with_delta(shifted) != 0) ++nonzeros[w];
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (unsigned w = 0; w < nthreads; ++w) {
    rep.zero_residuals += zeros[w];
    rep.perturbed_nonzero += nonzeros[w];
  }
  return rep;
}

StructureReport check_structure(const RadicalFamily& f) {
  StructureReport rep;
  if (f.members.empty()) {
    rep.violations.push_back("family has no members");
    return rep;
  }
  rep.unit_leading_member = f.members[0].is_one();
  if (!rep.unit_leading_member) rep.violations.push_back("members[0] is not the constant 1");

  rep.members_homogeneous = true;
  for (std::size_t j = 1; j < f.members.size(); ++j) {
    const auto& m = f.members[j];
    if (m.is_zero()) {
      rep.members_homogeneous = false;
      rep.violations.push_back("members[" + std::to_string(j) + "] is zero");
      continue;
    }
    for (std::size_t t = 0; t < m.term_count(); ++t) {
      if (m.term_degree(t) != j) {
        rep.members_homogeneous = false;
        rep.violations.push_back("members[" + std::to_string(j) + "] has a term of degree " +
                                 std::to_string(m.term_degree(t)));
        break;
      }
    }
  }

  const auto& last = f.members.back();
  const std::uint64_t want = f.members.size() - 1;
  rep.final_member_monic =
      !last.is_zero() && last.total_degree() == want && last.leading_coefficient() == 1;
  if (!rep.final_member_monic)
    rep.violations.push_back("last member is not monic of degree " + std::to_string(want) +
                             " (graded-lex leading coefficient)");
  return rep;
}

nlohmann::ordered_json to_json_value(const RadicalFamily& f) {
  nlohmann::ordered_json doc;
  doc["n"] = f.n;
  auto& members = doc["members"] = nlohmann::ordered_json::array();
  for (const auto& m : f.members) members.push_back(to_json_value(m));
  return doc;
}

RadicalFamily family_from_json_value(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("members"))
    throw StructuralError("family JSON must be an object with \"n\" and \"members\"");
  RadicalFamily f;
  f.n = doc["n"].get<int>();
  for (const auto& m : doc["members"]) f.members.push_back(polynomial_from_json_value(m));
  return f;
}

std::string RadicalFamily::to_json() const { return to_json_value(*this).dump(); }

RadicalFamily RadicalFamily::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw StructuralError(std::string("family JSON parse error: ") + e.what());
  }
  return family_from_json_value(doc);
}

nlohmann::ordered_json to_json_value(const StructureReport& r) {
  nlohmann::ordered_json doc;
  doc["unit_leading_member"] = r.unit_leading_member;
  doc["members_homogeneous"] = r.members_homogeneous;
  doc["final_member_monic"] = r.final_member_monic;
  doc["violations"] = r.violations;
  return doc;
}

std::string StructureReport::to_json() const { return to_json_value(*this).dump(); }

}  // namespace hkpoly
