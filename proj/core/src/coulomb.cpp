#include "hkpoly/coulomb.hpp"

#include <algorithm>
#include <map>

#include "hkpoly/errors.hpp"
#include "hkpoly/json_io.hpp"
#include "hkpoly/sqrt_ring.hpp"

namespace hkpoly {

namespace {

bool position_less(const std::array<Rational, 3>& a, const std::array<Rational, 3>& b) {
  for (int k = 0; k < 3; ++k) {
    const int c = cmp(a[k], b[k]);
    if (c != 0) return c < 0;
  }
  return false;
}

std::uint64_t splitmix_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Uniform draw in [0, span); span far below 2^32 keeps the modulo bias
/// irrelevant next to determinism, which the reports depend on.
std::uint64_t bounded(std::uint64_t& state, std::uint64_t span) {
  return splitmix_next(state) % span;
}

struct Configuration {
  std::vector<std::array<Rational, 3>> electrons;
  std::vector<Rational> u;  // pair order: (i=0..N-1) x (j=0..m-1)
};

/// Draws one configuration; exact site hits are redrawn against a shared
/// attempt budget. Per-trial stream is derived from (seed, trial) only.
Configuration draw_configuration(const PotentialDifference& d, int n_particles,
                                 const SamplingBox& box, std::uint64_t seed, long trial,
                                 long& attempts_left) {
  std::uint64_t state = (seed ^ 0xd1b54a32d192ed03ull) + std::uint64_t(trial + 1) * 0x9e3779b97f4a7c15ull;
  const Integer q = Integer(1) << box.denominator_bits;
  const std::uint64_t span = 2 * std::uint64_t(box.halfwidth) * q.get_ui() + 1;
  const long offset = box.halfwidth * long(q.get_ui());

  Configuration cfg;
  cfg.electrons.resize(n_particles);
  for (int i = 0; i < n_particles; ++i) {
    while (true) {
      if (--attempts_left < 0)
        throw InternalError("sampler exceeded its rejection budget (100x trials)");
      std::array<Rational, 3> x;
      for (int k = 0; k < 3; ++k) {
        const long p = long(bounded(state, span)) - offset;
        x[k] = Rational(Integer(p), q);
        x[k].canonicalize();
      }
      const bool hit = std::any_of(d.sites.begin(), d.sites.end(),
                                   [&](const NuclearSite& s) { return s.position == x; });
      if (!hit) {
        cfg.electrons[i] = x;
        break;
      }
    }
  }
  cfg.u.reserve(std::size_t(n_particles) * d.m());
  for (int i = 0; i < n_particles; ++i) {
    for (const auto& s : d.sites) {
      Rational uu(0);
      for (int k = 0; k < 3; ++k) {
        const Rational diff = cfg.electrons[i][k] - s.position[k];
        uu += diff * diff;
      }
      cfg.u.push_back(uu);
    }
  }
  return cfg;
}

void check_trials(long trials) {
  if (trials < 1) throw DomainError("sampling needs trials >= 1");
}

}  // namespace

CoulombPotential CoulombPotential::from_sites(std::vector<NuclearSite> sites) {
  std::vector<NuclearSite> kept;
  kept.reserve(sites.size());
  for (auto& s : sites)
    if (s.charge != 0) kept.push_back(std::move(s));
  std::sort(kept.begin(), kept.end(),
            [](const NuclearSite& a, const NuclearSite& b) {
              return position_less(a.position, b.position);
            });
  for (std::size_t i = 1; i < kept.size(); ++i)
    if (kept[i - 1].position == kept[i].position)
      throw StructuralError("duplicate nuclear positions in potential");
  CoulombPotential p;
  p.sites_ = std::move(kept);
  return p;
}

CoulombPotential parse_potential(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw StructuralError(std::string("potential JSON parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("sites") || !doc["sites"].is_array())
    throw StructuralError("potential JSON must be an object with a \"sites\" array");
  if (doc["sites"].empty()) throw StructuralError("potential JSON: empty site list");
  std::vector<NuclearSite> sites;
  std::size_t idx = 0;
  for (const auto& js : doc["sites"]) {
    if (!js.is_object() || !js.contains("Z") || !js.contains("r"))
      throw StructuralError("potential JSON: sites[" + std::to_string(idx) +
                            "] must carry \"Z\" and \"r\"");
    if (!js["Z"].is_string() || !js["r"].is_array() || js["r"].size() != 3)
      throw StructuralError("potential JSON: sites[" + std::to_string(idx) +
                            "] needs Z as a string and r as three strings");
    NuclearSite s;
    try {
      s.charge = parse_rational(js["Z"].get<std::string>());
      for (int k = 0; k < 3; ++k) {
        if (!js["r"][k].is_string())
          throw StructuralError("coordinate is not a string");
        s.position[k] = parse_rational(js["r"][k].get<std::string>());
      }
    } catch (const StructuralError& e) {
      throw StructuralError("potential JSON: sites[" + std::to_string(idx) + "]: " + e.what());
    }
    sites.push_back(std::move(s));
    ++idx;
  }
  try {
    return CoulombPotential::from_sites(std::move(sites));
  } catch (const StructuralError& e) {
    throw StructuralError(std::string("potential JSON: ") + e.what());
  }
}

std::string CoulombPotential::to_json() const {
  nlohmann::ordered_json doc;
  auto& arr = doc["sites"] = nlohmann::ordered_json::array();
  for (const auto& s : sites_) {
    nlohmann::ordered_json js;
    js["Z"] = format_rational(s.charge);
    js["r"] = {format_rational(s.position[0]), format_rational(s.position[1]),
               format_rational(s.position[2])};
    arr.push_back(std::move(js));
  }
  return doc.dump();
}

PotentialDifference potential_difference(const CoulombPotential& a, const CoulombPotential& b) {
  std::map<std::array<Rational, 3>, Rational,
           bool (*)(const std::array<Rational, 3>&, const std::array<Rational, 3>&)>
      merged(&position_less);
  for (const auto& s : b.sites()) merged[s.position] += s.charge;
  for (const auto& s : a.sites()) merged[s.position] -= s.charge;
  PotentialDifference d;
  for (auto& [pos, alpha] : merged)
    if (alpha != 0) d.sites.push_back(NuclearSite{pos, alpha});
  return d;
}

bool constant_shift_check(const PotentialDifference& d) { return d.empty(); }

std::vector<std::string> certificate_vars(std::size_t m, int n_particles, bool symbolic_c) {
  std::vector<std::string> vars;
  for (int i = 1; i <= n_particles; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      vars.push_back("u" + std::to_string(i) + "_" + std::to_string(j));
  if (symbolic_c) vars.push_back("c");
  return vars;
}

namespace {

SparsePolynomial build_impl(const PotentialDifference& d, int n_particles, bool symbolic,
                            const Rational& c_value, int n_max) {
  if (d.empty())
    throw DomainError("potential difference is empty (identical potentials); nothing to certify");
  if (n_particles < 1) throw DomainError("need n_particles >= 1");
  const std::size_t m = d.m();
  const long n = long(m) * n_particles;
  if (n > n_max)
    throw CapacityError("certificate needs n = m*N = " + std::to_string(n) +
                        " slots, above n_max = " + std::to_string(n_max) +
                        " (identity degree 2^(n-1) grows exponentially)");
  const auto vars = certificate_vars(m, n_particles, symbolic);
  const std::size_t nu = std::size_t(n_particles) * m;

  if (n == 1) {
    // alpha / |x - r| = c directly: c^2 u - alpha^2.
    const Rational alpha2 = d.sites[0].charge * d.sites[0].charge;
    PolynomialBuilder b(vars);
    std::vector<Exponent> e(vars.size(), 0);
    if (symbolic) {
      e[0] = 1;
      e[1] = 2;
      b.add_term(std::span<const Exponent>(e), Rational(1));
    } else {
      e[0] = 1;
      b.add_term(std::span<const Exponent>(e), c_value * c_value);
    }
    std::fill(e.begin(), e.end(), 0);
    b.add_term(std::span<const Exponent>(e), -alpha2);
    SparsePolynomial p = b.build();
    if (p.is_zero()) throw InternalError("vanishing polynomial collapsed to zero");
    return p;
  }

  const RadicalFamily& fam = cached_radical_family(int(n), n_max);
  const std::size_t half = fam.half_degree();

  // Slot l=1 carries c; slots l=2..n walk the (electron, site) pairs in
  // canonical order skipping (1, j0) with j0 = 0 (all alphas are nonzero
  // after canonicalization, so the first site is the distinguished one).
  std::vector<std::size_t> slot_pair(n + 1, 0);
  std::vector<Rational> slot_alpha2(n + 1, Rational(0));
  {
    std::size_t l = 2;
    for (int i = 0; i < n_particles; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i == 0 && j == 0) continue;
        slot_pair[l] = std::size_t(i) * m + j;
        slot_alpha2[l] = d.sites[j].charge * d.sites[j].charge;
        ++l;
      }
    }
  }
  const Rational alpha0_sq = d.sites[0].charge * d.sites[0].charge;

  // Accumulate the identity as a Laurent object: denominator powers per u
  // plus the c exponent. Clearing multiplies by the minimal per-variable
  // power that survives cancellation.
  using Key = std::pair<std::vector<Exponent>, Exponent>;
  std::map<Key, Rational> acc;
  for (std::size_t j = 0; j <= half; ++j) {
    const auto& member = fam.members[j];
    const unsigned long dpow = static_cast<unsigned long>(half - j);
    const Rational delta_factor = rational_pow(alpha0_sq, dpow);
    for (std::size_t t = 0; t < member.term_count(); ++t) {
      auto e = member.exponents(t);
      Key key{std::vector<Exponent>(nu, 0), 0};
      Rational val = member.coefficient(t) * delta_factor;
      key.first[0] += Exponent(dpow);  // delta^2 = alpha0^2 / u_{1,1}
      for (long l = 1; l <= n; ++l) {
        const Exponent el = e[l - 1];
        if (el == 0) continue;
        if (l == 1) {
          if (symbolic)
            key.second = 2 * el;
          else
            val *= rational_pow(c_value * c_value, el);
        } else {
          key.first[slot_pair[l]] += el;
          val *= rational_pow(slot_alpha2[l], el);
        }
      }
      auto [it, fresh] = acc.try_emplace(std::move(key), Rational(0));
      it->second += val;
    }
  }

  std::vector<Exponent> clear(nu, 0);
  bool any = false;
  for (const auto& [key, val] : acc) {
    if (val == 0) continue;
    any = true;
    for (std::size_t v = 0; v < nu; ++v) clear[v] = std::max(clear[v], key.first[v]);
  }
  if (!any) throw InternalError("vanishing polynomial collapsed to zero");

  PolynomialBuilder b(vars);
  std::vector<Exponent> e(vars.size(), 0);
  for (const auto& [key, val] : acc) {
    if (val == 0) continue;
    for (std::size_t v = 0; v < nu; ++v) e[v] = clear[v] - key.first[v];
    if (symbolic) e[nu] = key.second;
    b.add_term(std::span<const Exponent>(e), val);
  }
  SparsePolynomial p = b.build();
  if (p.is_zero()) throw InternalError("vanishing polynomial collapsed to zero");
  return p;
}

}  // namespace

SparsePolynomial build_vanishing_polynomial(const PotentialDifference& d, int n_particles,
                                            const Rational& c, int n_max) {
  return build_impl(d, n_particles, /*symbolic=*/false, c, n_max);
}

SparsePolynomial build_vanishing_polynomial_symbolic(const PotentialDifference& d,
                                                     int n_particles, int n_max) {
  return build_impl(d, n_particles, /*symbolic=*/true, Rational(0), n_max);
}

SamplingReport measure_zero_sample(const SparsePolynomial& P, const PotentialDifference& d,
                                   int n_particles, long trials, std::uint64_t seed,
                                   const SamplingBox& box) {
  check_trials(trials);
  if (P.is_zero())
    throw InternalError("measure_zero_sample: zero polynomial cannot come from the builder");
  if (P.vars() != certificate_vars(d.m(), n_particles, /*symbolic_c=*/false))
    throw StructuralError("polynomial variables do not match the difference and N");

  SamplingReport rep;
  rep.trials = trials;
  rep.seed = seed;
  std::vector<double> mags;
  mags.reserve(trials);
  long attempts = 100 * trials;
  for (long k = 0; k < trials; ++k) {
    const Configuration cfg = draw_configuration(d, n_particles, box, seed, k, attempts);
    const Rational val = poly_eval_exact(P, cfg.u);
    if (val == 0) ++rep.zero_hits;
    mags.push_back(std::abs(to_double(val)));
  }
  std::sort(mags.begin(), mags.end());
  rep.abs_min = mags.front();
  rep.abs_max = mags.back();
  rep.abs_median = mags.size() % 2 == 1
                       ? mags[mags.size() / 2]
                       : 0.5 * (mags[mags.size() / 2 - 1] + mags[mags.size() / 2]);
  return rep;
}

ConsistencyReport engineered_constant_check(const PotentialDifference& d, int n_particles,
                                            long trials, std::uint64_t seed,
                                            const SamplingBox& box) {
  check_trials(trials);
  const SparsePolynomial P = build_vanishing_polynomial_symbolic(d, n_particles);
  const std::size_t nu = std::size_t(n_particles) * d.m();
  const std::size_t cvar = nu;  // "c" is last

  ConsistencyReport rep;
  rep.trials = trials;
  rep.seed = seed;
  long attempts = 100 * trials;
  for (long k = 0; k < trials; ++k) {
    const Configuration cfg = draw_configuration(d, n_particles, box, seed, k, attempts);

    // Collapse the u variables numerically: P becomes a polynomial in c^2
    // with rational coefficients.
    const std::size_t max_a = std::size_t(P.max_exponent(cvar)) / 2;
    std::vector<Rational> coeff_by_a(max_a + 1, Rational(0));
    for (std::size_t t = 0; t < P.term_count(); ++t) {
      auto e = P.exponents(t);
      if (e[cvar] % 2 != 0) throw InternalError("certificate has an odd power of c");
      Rational v = P.coefficient(t);
      for (std::size_t uv = 0; uv < nu; ++uv)
        if (e[uv] != 0) v *= rational_pow(cfg.u[uv], e[uv]);
      coeff_by_a[e[cvar] / 2] += v;
    }

    // c(x) = sum_ij alpha_j / sqrt(u_ij), exact in the extension ring.
    SqrtRing ring(cfg.u);
    SqrtRing::Element c = ring.zero();
    std::size_t pair = 0;
    for (int i = 0; i < n_particles; ++i)
      for (std::size_t j = 0; j < d.m(); ++j, ++pair)
        c = c + ring.inverse_root(pair) * d.sites[j].charge;
    const SqrtRing::Element c2 = c * c;

    SqrtRing::Element total = ring.zero();
    SqrtRing::Element c2pow = ring.from_rational(Rational(1));
    for (std::size_t a = 0; a <= max_a; ++a) {
      if (coeff_by_a[a] != 0) total = total + c2pow * coeff_by_a[a];
      if (a != max_a) c2pow = c2pow * c2;
    }
    if (total.is_zero()) ++rep.exact_zeros;
  }
  return rep;
}

DistinguishVerdict distinguish(const CoulombPotential& a, const CoulombPotential& b,
                               int n_particles, long trials, std::uint64_t seed, int n_max) {
  check_trials(trials);
  DistinguishVerdict v;
  const PotentialDifference d = potential_difference(a, b);
  if (d.empty()) {
    v.equal = true;
    return v;
  }
  v.equal = false;
  v.certificate = build_vanishing_polynomial_symbolic(d, n_particles, n_max);
  if (v.certificate->is_zero()) throw InternalError("vanishing polynomial collapsed to zero");
  const SparsePolynomial at_zero = build_vanishing_polynomial(d, n_particles, Rational(0), n_max);
  v.sampling = measure_zero_sample(at_zero, d, n_particles, trials, seed);
  return v;
}

std::string SamplingReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["trials"] = trials;
  doc["zero_hits"] = zero_hits;
  doc["seed"] = seed;
  doc["abs_min"] = abs_min;
  doc["abs_median"] = abs_median;
  return doc.dump();
}

std::string DistinguishVerdict::to_json() const {
  nlohmann::ordered_json doc;
  doc["equal"] = equal;
  doc["certificate"] = certificate ? to_json_value(*certificate) : nlohmann::ordered_json(nullptr);
  if (sampling) {
    nlohmann::ordered_json s;
    s["trials"] = sampling->trials;
    s["zero_hits"] = sampling->zero_hits;
    s["seed"] = sampling->seed;
    s["abs_min"] = sampling->abs_min;
    s["abs_median"] = sampling->abs_median;
    doc["sampling"] = std::move(s);
  } else {
    doc["sampling"] = nullptr;
  }
  return doc.dump();
}

}  // namespace hkpoly
