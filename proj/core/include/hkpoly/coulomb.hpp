#ifndef HKPOLY_COULOMB_HPP
#define HKPOLY_COULOMB_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hkpoly/polynomial.hpp"
#include "hkpoly/radical.hpp"

namespace hkpoly {

/// One point charge: position in atomic units, and its coefficient (the
/// nuclear charge Z in a potential; after differencing, the alpha of one
/// 1/|x - r| term).
struct NuclearSite {
  std::array<Rational, 3> position;
  Rational charge;

  bool operator==(const NuclearSite& o) const = default;
};

/// Finite point-charge potential in canonical form: zero-charge sites are
/// dropped and the rest are sorted lexicographically by position, so
/// equality of canonical forms is equality of the potentials as functions.
class CoulombPotential {
public:
  CoulombPotential() = default;
  /// Canonicalizes; throws StructuralError on duplicate positions.
  static CoulombPotential from_sites(std::vector<NuclearSite> sites);

  const std::vector<NuclearSite>& sites() const { return sites_; }
  std::size_t site_count() const { return sites_.size(); }

  bool operator==(const CoulombPotential& o) const = default;

  std::string to_json() const;

private:
  std::vector<NuclearSite> sites_;
};

/// Parses {"sites":[{"Z":"p/q","r":["p/q","p/q","p/q"]},...]} with exact
/// rationals. Empty site lists, malformed rationals and duplicate positions
/// are parse errors naming the offending site.
CoulombPotential parse_potential(const std::string& json_text);

/// The merged site list of the formal difference b - a: coefficient
/// Z_b - Z_a at shared positions, +Z_b at b-only sites, -Z_a at a-only
/// sites; zero coefficients dropped, canonical order. Empty iff a == b.
/// (Swapping the arguments flips every alpha; everything downstream depends
/// on the alphas only through their squares.)
struct PotentialDifference {
  std::vector<NuclearSite> sites;

  bool empty() const { return sites.empty(); }
  std::size_t m() const { return sites.size(); }
};

PotentialDifference potential_difference(const CoulombPotential& a, const CoulombPotential& b);

/// True iff the difference is constant as a function on its domain. Each
/// 1/|x - r_j| term decays at infinity and blows up at its own site, and a
/// canonical difference has no cancelling terms, so this is exactly
/// emptiness (the constant being 0).
bool constant_shift_check(const PotentialDifference& d);

/// Variable names of the certificate polynomial for N electrons against the
/// m difference sites, in pair order (i=1..N major, j=1..m minor):
/// "u1_1", "u1_2", ..., plus "c" last when the constant is symbolic.
std::vector<std::string> certificate_vars(std::size_t m, int n_particles, bool symbolic_c);

/// Builds the nonzero polynomial P in the squared electron-site distances
/// u_ij = |x_i - r_j|^2 whose zero set contains every configuration with
/// sum_i sum_j alpha_j / |x_i - r_j| = c. The identity behind it needs
/// n = m*N slots; slot 1 carries c, the slot of the pair (1, first site)
/// carries the distinguished delta, and denominators are cleared by the
/// minimal per-variable power. For n = 1 the relation is direct:
/// P = c^2 u - alpha^2.
///
/// Hard post-condition: P is not the zero polynomial (InternalError).
SparsePolynomial build_vanishing_polynomial(const PotentialDifference& d, int n_particles,
                                            const Rational& c, int n_max = kDefaultMaxN);
/// Same with c left as a variable (entering through even powers only).
SparsePolynomial build_vanishing_polynomial_symbolic(const PotentialDifference& d,
                                                     int n_particles, int n_max = kDefaultMaxN);

/// Rational sampling box: coordinates p/q with q = 2^denominator_bits fixed
/// and p uniform in [-halfwidth*q, halfwidth*q].
struct SamplingBox {
  long halfwidth = 64;
  unsigned denominator_bits = 16;
};

struct SamplingReport {
  long trials = 0;
  long zero_hits = 0;
  std::uint64_t seed = 0;
  double abs_min = 0.0;
  double abs_median = 0.0;
  double abs_max = 0.0;

  std::string to_json() const;
};

/// Evaluates P exactly at `trials` pseudo-random rational configurations
/// (x_1..x_N), rejecting exact site hits; per-trial generators are derived
/// from (seed, trial index) so parallel or repeated runs agree bit-for-bit.
SamplingReport measure_zero_sample(const SparsePolynomial& P, const PotentialDifference& d,
                                   int n_particles, long trials, std::uint64_t seed,
                                   const SamplingBox& box = {});

struct ConsistencyReport {
  long trials = 0;
  long exact_zeros = 0;
  std::uint64_t seed = 0;

  bool all_zero() const { return exact_zeros == trials; }
};

/// The engineered-constant check: per sampled configuration x set
/// c := sum_i (b - a)(x_i), which lands in the quadratic extension
/// Q(sqrt(u_11), ..., sqrt(u_Nm)); the symbolic certificate evaluated there
/// must vanish exactly, every trial. Exercises the identity at points where
/// its defining constraint holds by construction.
ConsistencyReport engineered_constant_check(const PotentialDifference& d, int n_particles,
                                            long trials, std::uint64_t seed,
                                            const SamplingBox& box = {});

struct DistinguishVerdict {
  bool equal = false;
  std::optional<SparsePolynomial> certificate;  // symbolic c
  std::optional<SamplingReport> sampling;       // at c = 0

  std::string to_json() const;
};

/// Decides v == v' exactly; for distinct potentials attaches the symbolic
/// certificate plus a measure-zero sampling report at c = 0.
DistinguishVerdict distinguish(const CoulombPotential& a, const CoulombPotential& b,
                               int n_particles, long trials, std::uint64_t seed,
                               int n_max = kDefaultMaxN);

}  // namespace hkpoly

#endif
