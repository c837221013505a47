// Acceptance suite: one criterion per function, one PASS/FAIL line each,
// nonzero exit if anything fails. Tolerances are pinned here, in code.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hkpoly/coulomb.hpp"
#include "hkpoly/errors.hpp"
#include "hkpoly/radical.hpp"
#include "hkpoly/toy_dft.hpp"

using namespace hkpoly;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& id, bool pass, double seconds, const std::string& detail) {
  std::printf("%s %-3s (%.2fs)%s%s\n", pass ? "PASS" : "FAIL", id.c_str(), seconds,
              detail.empty() ? "" : " ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void criterion(const std::string& id, const std::function<bool(std::string&)>& body) {
  std::string detail;
  const auto t0 = clock_type::now();
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  report(id, pass, secs, detail);
}

SparsePolynomial poly_of(const std::vector<std::string>& vars,
                         std::vector<std::pair<std::vector<Exponent>, const char*>> terms) {
  std::vector<std::pair<Monomial, Rational>> ts;
  for (auto& [e, c] : terms) ts.emplace_back(Monomial(e), parse_rational(c));
  return SparsePolynomial::from_terms(vars, ts);
}

CoulombPotential single_site(const char* z, const char* x, const char* y, const char* w) {
  return CoulombPotential::from_sites({NuclearSite{
      {parse_rational(x), parse_rational(y), parse_rational(w)}, parse_rational(z)}});
}

// ---------------------------------------------------------------------------
// Random potential pairs for the witness/injectivity sweep: charges and
// positions are small exact rationals, per-potential site counts stay <= 3
// and N <= 2. Draws keep the slot count n = m*N <= 5, which covers the n=1
// direct route and the full identity machinery while the sweep stays at
// desk-scale wall time (n=6 is exercised exhaustively by c2-c4).
// ---------------------------------------------------------------------------
struct SweepPair {
  CoulombPotential a, b;
  int n_particles = 1;
};

std::vector<SweepPair> sweep_pairs(std::mt19937_64& rng, int count) {
  std::uniform_int_distribution<int> numz(-4, 4);
  std::uniform_int_distribution<int> numr(-6, 6);
  std::uniform_int_distribution<int> den(1, 3);
  std::uniform_int_distribution<int> sites(1, 3);
  std::uniform_int_distribution<int> particles(1, 2);
  std::uniform_int_distribution<int> mode(0, 2);
  auto rnd_q = [&](std::uniform_int_distribution<int>& d) {
    Rational q(d(rng), den(rng));
    q.canonicalize();
    return q;
  };
  std::vector<SweepPair> out;
  while (int(out.size()) < count) {
    SweepPair pair;
    pair.n_particles = particles(rng);
    std::vector<NuclearSite> a, b;
    const int na = sites(rng), nb = sites(rng);
    std::vector<std::array<Rational, 3>> pool;
    for (int j = 0; j < na + nb; ++j)
      pool.push_back({rnd_q(numr), rnd_q(numr), rnd_q(numr)});
    for (int j = 0; j < na; ++j) a.push_back({pool[j], rnd_q(numz)});
    for (int j = 0; j < nb; ++j) {
      // modes: fresh position / shared position, new charge / same site
      const int m = mode(rng);
      const auto& pos = (m == 0 || j >= na) ? pool[na + j] : pool[j];
      b.push_back({pos, rnd_q(numz)});
    }
    try {
      pair.a = CoulombPotential::from_sites(a);
      pair.b = CoulombPotential::from_sites(b);
    } catch (const StructuralError&) {
      continue;  // colliding random positions: redraw
    }
    const auto d = potential_difference(pair.a, pair.b);
    if (d.empty()) continue;
    if (long(d.m()) * pair.n_particles > 5) continue;
    out.push_back(std::move(pair));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CLI process helpers for the determinism criterion.
// ---------------------------------------------------------------------------
struct CliRun {
  int exit_code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(HKPOLY_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data_path(const std::string& name) {
  return std::string(HKPOLY_TEST_DATA_DIR) + "/" + name;
}

std::string temp_file(const std::string& name, const std::string& body) {
  const std::string path = "/tmp/hkpoly_acceptance_" + name;
  std::ofstream out(path);
  out << body;
  return path;
}

// Frozen on the first run of c9 on this grid (L=12, points=256, z=1, eta=1,
// wells at L/3 and 2L/3, solver tol 1e-10); later runs must reproduce it.
constexpr double kWellDistanceRegression = 0.73006227863732875;

}  // namespace

int main() {
  // c1: the printed n=2 family, coefficient for coefficient, in under 1 s.
  criterion("c1", [](std::string& detail) {
    const auto t0 = clock_type::now();
    const RadicalFamily f = eliminate_radicals(2);
    const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
    const std::vector<std::string> S = {"s1", "s2"};
    const bool match =
        f.members.size() == 3 && f.members[0] == poly_of(S, {{{0, 0}, "1"}}) &&
        f.members[1] == poly_of(S, {{{1, 0}, "-2"}, {{0, 1}, "-2"}}) &&
        f.members[2] == poly_of(S, {{{2, 0}, "1"}, {{0, 2}, "1"}, {{1, 1}, "-2"}});
    if (!match) detail = "family differs from the printed base case";
    if (secs >= 1.0) detail += " runtime bound exceeded";
    return match && secs < 1.0;
  });

  // c2: inductive construction equals the sign-product expansion, n = 2..6,
  // member by member, within 2 minutes total.
  criterion("c2", [](std::string& detail) {
    const auto t0 = clock_type::now();
    bool equal = true;
    for (int n = 2; n <= 6 && equal; ++n) {
      const RadicalFamily& built = cached_radical_family(n);
      const RadicalFamily oracle = sign_product_family(n);
      if (built.members.size() != oracle.members.size()) {
        equal = false;
        detail = "member count differs at n=" + std::to_string(n);
        break;
      }
      for (std::size_t j = 0; j < built.members.size(); ++j) {
        if (!(built.members[j] == oracle.members[j])) {
          equal = false;
          detail = "member " + std::to_string(j) + " differs at n=" + std::to_string(n);
          break;
        }
      }
    }
    const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
    if (secs >= 120.0) {
      detail += " runtime bound exceeded";
      return false;
    }
    return equal;
  });

  // c3: 1000 seeded tuples per n: residual exactly zero every time; with
  // delta shifted by +1, nonzero in at least 99% of trials.
  criterion("c3", [](std::string& detail) {
    for (int n = 2; n <= 6; ++n) {
      const VerifySweepReport rep =
          verify_identity_sweep(cached_radical_family(n), 1000, 0x1dee7 * std::uint64_t(n));
      if (rep.zero_residuals != 1000) {
        detail = "nonzero residual at n=" + std::to_string(n);
        return false;
      }
      if (rep.perturbed_nonzero < 990) {
        detail = "perturbed residual vanished too often at n=" + std::to_string(n);
        return false;
      }
    }
    return true;
  });

  // c4: structure report: unit leading member, homogeneity of degree j,
  // final member of degree 2^(n-1) with graded-lex leading coefficient 1.
  criterion("c4", [](std::string& detail) {
    for (int n = 2; n <= 6; ++n) {
      const StructureReport rep = check_structure(cached_radical_family(n));
      if (!rep.all_pass()) {
        detail = "n=" + std::to_string(n) + ": " +
                 (rep.violations.empty() ? "violations" : rep.violations.front());
        return false;
      }
    }
    return true;
  });

  // c5: worked certificate for equal unit charges at distance one; exact
  // polynomial, 10^4 zero-free samples, 10^3 exact engineered-c zeros; 30 s.
  criterion("c5", [](std::string& detail) {
    const auto t0 = clock_type::now();
    const auto a = single_site("1", "0", "0", "0");
    const auto b = single_site("1", "1", "0", "0");
    const auto d = potential_difference(a, b);
    const auto P = build_vanishing_polynomial(d, 1, Rational(0));
    if (!(P == poly_of({"u1_1", "u1_2"}, {{{2, 0}, "1"}, {{1, 1}, "-2"}, {{0, 2}, "1"}}))) {
      detail = "certificate is not (u1 - u2)^2";
      return false;
    }
    const SamplingReport samples = measure_zero_sample(P, d, 1, 10000, 0xace5);
    if (samples.zero_hits != 0) {
      detail = "sampling hit the zero set " + std::to_string(samples.zero_hits) + " times";
      return false;
    }
    const ConsistencyReport consistency = engineered_constant_check(d, 1, 1000, 0xace6);
    if (!consistency.all_zero()) {
      detail = "engineered constant missed exact zero " +
               std::to_string(consistency.trials - consistency.exact_zeros) + " times";
      return false;
    }
    const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
    if (secs >= 30.0) {
      detail = "runtime bound exceeded";
      return false;
    }
    return true;
  });

  // c6: the nonzero-witness assertion never fires across 100 random
  // distinct pairs; every certificate has at least one term.
  std::mt19937_64 sweep_rng(0x5eed2024);
  const std::vector<SweepPair> pairs = sweep_pairs(sweep_rng, 100);
  criterion("c6", [&](std::string& detail) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto d = potential_difference(pairs[i].a, pairs[i].b);
      try {
        const auto P = build_vanishing_polynomial_symbolic(d, pairs[i].n_particles);
        if (P.term_count() < 1) {
          detail = "empty certificate at pair " + std::to_string(i);
          return false;
        }
      } catch (const InternalError& e) {
        detail = "zero-polynomial assertion fired at pair " + std::to_string(i);
        return false;
      }
    }
    return true;
  });

  // c7: distinguish(v, v').equal iff canonical forms match, over the same
  // 100 distinct pairs plus 20 equal pairs.
  criterion("c7", [&](std::string& detail) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const long n = long(potential_difference(pairs[i].a, pairs[i].b).m()) *
                     pairs[i].n_particles;
      const long trials = n >= 5 ? 4 : (n == 4 ? 10 : 25);
      const DistinguishVerdict v =
          distinguish(pairs[i].a, pairs[i].b, pairs[i].n_particles, trials, 7000 + i);
      const bool canon_equal = pairs[i].a == pairs[i].b;
      if (v.equal != canon_equal) {
        detail = "verdict mismatch at distinct pair " + std::to_string(i);
        return false;
      }
      if (!v.equal && (!v.certificate || v.certificate->is_zero())) {
        detail = "missing certificate at pair " + std::to_string(i);
        return false;
      }
    }
    for (std::size_t i = 0; i < 20; ++i) {
      const auto& p = pairs[i % pairs.size()];
      if (!distinguish(p.a, p.a, p.n_particles, 5, i).equal) {
        detail = "equal pair " + std::to_string(i) + " reported distinct";
        return false;
      }
    }
    return true;
  });

  // c8: analytic anchors of the grid solver.
  criterion("c8", [](std::string& detail) {
    GridSystem box;
    box.box_length = 1.0;
    box.points = 256;
    box.n_particles = 1;
    box.external_potential.assign(256, 0.0);
    const double e_box = solve_system(box, 1e-10).energy;
    const double exact_box = std::numbers::pi * std::numbers::pi / 2.0;
    if (std::abs(e_box - exact_box) / exact_box >= 1e-3) {
      detail = "box energy " + std::to_string(e_box);
      return false;
    }
    GridSystem osc;
    osc.box_length = 20.0;
    osc.points = 256;
    osc.n_particles = 1;
    osc.external_potential.assign(256, 0.0);
    for (int k = 0; k < osc.points; ++k) {
      const double x = osc.node(k) - 10.0;
      osc.external_potential[k] = 0.5 * x * x;
    }
    const double e_osc = solve_system(osc, 1e-10).energy;
    if (std::abs(e_osc - 0.5) >= 1e-3 * 0.5) {
      detail = "oscillator energy " + std::to_string(e_osc);
      return false;
    }
    return true;
  });

  // c9: a constant shift leaves the density and shifts the energy exactly;
  // separated wells produce distant densities (regression-pinned).
  criterion("c9", [](std::string& detail) {
    const int P = 256;
    const double L = 12.0;
    GridSystem flat;
    flat.box_length = L;
    flat.points = P;
    flat.n_particles = 1;
    flat.external_potential.assign(P, 0.0);
    GridSystem shifted = flat;
    for (double& v : shifted.external_potential) v += 3.0;
    ScanOptions opts;
    opts.tol_density = 1e-10;
    const ScanReport shift_scan = hk_scan({flat, shifted}, opts);
    if (shift_scan.class_of[0] != shift_scan.class_of[1] || !shift_scan.within_class_ok) {
      detail = "shifted potentials not grouped";
      return false;
    }
    if (shift_scan.density_distance[0][1] >= 1e-10) {
      detail = "shifted density distance " + std::to_string(shift_scan.density_distance[0][1]);
      return false;
    }
    if (std::abs(shift_scan.energies[1] - shift_scan.energies[0] - 3.0) >= 1e-8) {
      detail = "energy gap " + std::to_string(shift_scan.energies[1] - shift_scan.energies[0]);
      return false;
    }

    std::vector<GridSystem> wells;
    for (double center : {L / 3.0, 2.0 * L / 3.0}) {
      GridSystem sys = flat;
      for (int k = 0; k < P; ++k) {
        const double x = sys.node(k) - center;
        sys.external_potential[k] = -1.0 / std::sqrt(x * x + 1.0);
      }
      wells.push_back(std::move(sys));
    }
    const ScanReport well_scan = hk_scan(wells, opts);
    const double dist = well_scan.density_distance[0][1];
    if (well_scan.class_of[0] == well_scan.class_of[1]) {
      detail = "separated wells grouped together";
      return false;
    }
    if (dist <= 1e-3) {
      detail = "well density distance " + std::to_string(dist);
      return false;
    }
    if (std::abs(dist - kWellDistanceRegression) >= 1e-9) {
      detail = "regression drift: distance " + std::to_string(dist);
      return false;
    }
    return true;
  });

  // c10: byte-identical JSON across repeated runs of every CLI command the
  // suite relies on.
  criterion("c10", [](std::string& detail) {
    const std::string bundle = "/tmp/hkpoly_acceptance_bundle.json";
    const std::string toy_cfg = temp_file("toy.json", R"({
      "L": 1.0, "points": 64, "N": 1, "statistics": "distinguishable", "eta": 1.0,
      "potentials": [{"kind": "box0"}, {"kind": "box0", "shift": 3.0}],
      "tol": 1e-10})");
    const std::vector<std::string> commands = {
        "eliminate --n 2",
        "eliminate --n 4 --check",
        "oracle --n 4",
        "verify --n 3 --trials 200 --seed 5",
        "distinguish --a " + data_path("hydrogen.json") + " --b " +
            data_path("hydrogen.json") + " --N 1 --trials 10 --seed 1",
        "distinguish --a " + data_path("hydrogen.json") + " --b " +
            data_path("hydrogen_shifted.json") + " --N 1 --trials 50 --seed 1 --bundle " +
            bundle,
        "sample --poly " + bundle + " --trials 100 --seed 2",
        "toy solve --config " + toy_cfg,
        "toy scan --config " + toy_cfg,
    };
    for (const auto& cmd : commands) {
      const CliRun first = run_cli(cmd);
      const CliRun second = run_cli(cmd);
      if (first.exit_code != 0 || second.exit_code != 0) {
        detail = "command failed: " + cmd;
        return false;
      }
      if (first.out != second.out) {
        detail = "output differs across runs: " + cmd;
        return false;
      }
      if (first.out.empty() || first.out.back() != '\n') {
        detail = "output not newline-terminated: " + cmd;
        return false;
      }
    }
    return true;
  });

  if (failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion/criteria failed\n", failures);
  return 1;
}
