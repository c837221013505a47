#ifndef HKPOLY_RADICAL_HPP
#define HKPOLY_RADICAL_HPP

#include <span>
#include <string>
#include <vector>

#include "hkpoly/polynomial.hpp"

namespace hkpoly {

/// Degree growth is 2^(n-1), so the admissible n is capped; the cap is a
/// parameter everywhere it matters.
inline constexpr int kDefaultMaxN = 8;

/// The indexed family {H_{n,j} : j = 0..2^(n-1)} in variables s1..sn
/// satisfying, for delta = t_1 + ... + t_n,
///
///   sum_j H_{n,j}(t_1^2,...,t_n^2) * delta^(2*(2^(n-1)-j)) = 0.
///
/// members[0] = 1, members[j] is homogeneous of degree j, and the last
/// member has degree 2^(n-1) with graded-lex leading coefficient 1.
struct RadicalFamily {
  int n = 0;
  std::vector<SparsePolynomial> members;

  /// 2^(n-1), the index of the last member.
  std::size_t half_degree() const { return members.size() - 1; }

  bool operator==(const RadicalFamily& o) const = default;

  std::string to_json() const;
  static RadicalFamily from_json(const std::string& text);
};

/// Inductive construction: starts from the n=2 identity, then repeatedly
/// substitutes delta -> delta - t_{k+1}, splits the expansion into the parts
/// of even and odd delta-exponent, and subtracts their squares. Exact.
/// Throws DomainError for n < 2 and CapacityError for n > n_max.
RadicalFamily eliminate_radicals(int n, int n_max = kDefaultMaxN);

/// Independent route to the same family: expands the full product over all
/// sign vectors eps in {+-1}^n of (delta - sum_j eps_j t_j), asserts that
/// only all-even exponents survive, and collects by powers of delta^2.
RadicalFamily sign_product_family(int n, int n_max = kDefaultMaxN);

/// Memoized eliminate_radicals(n); construction at larger n is expensive and
/// the certificate builders reuse the same families many times. Thread-safe.
const RadicalFamily& cached_radical_family(int n, int n_max = kDefaultMaxN);

/// One exact evaluation of the family at a rational tuple; residuals for any
/// delta are then cheap, which is what the perturbation sweeps need.
class IdentityProbe {
public:
  IdentityProbe(const RadicalFamily& f, std::span<const Rational> t);

  /// Residual with delta = sum t_j; exactly zero for a valid family.
  Rational residual() const { return residual_with_delta(delta_default_); }
  /// Diagnostic entry point with delta overridden.
  Rational residual_with_delta(const Rational& delta) const;

private:
  std::vector<Rational> member_values_;  // H_j(t_1^2,...,t_n^2)
  Rational delta_default_;
};

/// Exact residual of the defining identity at tuple t (delta = sum t_j).
Rational verify_identity(const RadicalFamily& f, std::span<const Rational> t);

struct VerifySweepReport {
  int n = 0;
  long trials = 0;
  std::uint64_t seed = 0;
  long zero_residuals = 0;     // residual exactly 0 with delta = sum t_j
  long perturbed_nonzero = 0;  // nonzero residual with delta shifted by +1

  bool pass() const {
    return zero_residuals == trials && perturbed_nonzero * 100 >= trials * 99;
  }
};

/// Seeded Schwartz-Zippel style sweep: `trials` exact evaluations of the
/// identity at pseudo-random rational tuples (numerators in [-31,31] over a
/// common odd denominator, so the +1-perturbed residual cannot hit a
/// half-integer subset sum). Trials run in parallel; per-trial tuples are
/// derived from (seed, index) so the report is scheduling-independent.
VerifySweepReport verify_identity_sweep(const RadicalFamily& f, long trials, std::uint64_t seed);

struct StructureReport {
  bool unit_leading_member = false;  // H_{n,0} == 1
  bool members_homogeneous = false;  // member j homogeneous of degree j
  bool final_member_monic = false;   // degree 2^(n-1), graded-lex leading coeff 1
  std::vector<std::string> violations;

  bool all_pass() const {
    return unit_leading_member && members_homogeneous && final_member_monic;
  }
  std::string to_json() const;
};

/// Checks the structural claims about a family; violations are report
/// content, never exceptions.
StructureReport check_structure(const RadicalFamily& f);

}  // namespace hkpoly

#endif
