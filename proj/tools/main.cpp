// Command-line front door: family construction, identity verification,
// potential distinguishing, measure-zero sampling, and the 1D grid scans.
// JSON goes to stdout (or --out), human-readable summaries to stderr.
//
// Exit codes: 0 success, 2 domain/parse error, 3 capacity error,
// 4 numerical non-convergence, 5 internal invariant violation.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "hkpoly/coulomb.hpp"
#include "hkpoly/errors.hpp"
#include "hkpoly/json_io.hpp"
#include "hkpoly/radical.hpp"
#include "hkpoly/toy_dft.hpp"

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw hkpoly::StructuralError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& json_line, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << json_line << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out.good()) throw hkpoly::StructuralError("cannot write file '" + out_path + "'");
    out << json_line << "\n";
  }
}

struct FamilyArgs {
  int n = 0;
  int n_max = hkpoly::kDefaultMaxN;
  bool check = false;
  std::string out;
};

void run_family(const FamilyArgs& a, bool oracle) {
  const hkpoly::RadicalFamily f = oracle ? hkpoly::sign_product_family(a.n, a.n_max)
                                         : hkpoly::eliminate_radicals(a.n, a.n_max);
  ordered_json doc = hkpoly::to_json_value(f);
  if (a.check) doc["structure"] = hkpoly::to_json_value(hkpoly::check_structure(f));
  emit(doc.dump(), a.out);
  std::size_t terms = 0;
  for (const auto& m : f.members) terms += m.term_count();
  std::cerr << (oracle ? "oracle" : "eliminate") << ": n=" << f.n << ", "
            << f.members.size() << " members, " << terms << " terms\n";
}

/// Self-contained sampling certificate consumed by `sample`:
/// {"N":int,"c":"p/q","sites":[{"alpha":"p/q","r":["p/q",...]},...],
///  "polynomial":{...}}.
struct Bundle {
  hkpoly::PotentialDifference diff;
  int n_particles = 1;
  hkpoly::Rational c;
  hkpoly::SparsePolynomial polynomial;
};

ordered_json bundle_to_json(const Bundle& b) {
  ordered_json doc;
  doc["N"] = b.n_particles;
  doc["c"] = hkpoly::format_rational(b.c);
  auto& sites = doc["sites"] = ordered_json::array();
  for (const auto& s : b.diff.sites) {
    ordered_json js;
    js["alpha"] = hkpoly::format_rational(s.charge);
    js["r"] = {hkpoly::format_rational(s.position[0]), hkpoly::format_rational(s.position[1]),
               hkpoly::format_rational(s.position[2])};
    sites.push_back(std::move(js));
  }
  doc["polynomial"] = hkpoly::to_json_value(b.polynomial);
  return doc;
}

Bundle bundle_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw hkpoly::StructuralError(std::string("bundle JSON parse error: ") + e.what());
  }
  for (const char* key : {"N", "c", "sites", "polynomial"})
    if (!doc.contains(key))
      throw hkpoly::StructuralError(std::string("bundle JSON missing \"") + key + "\"");
  Bundle b;
  try {
    b.n_particles = doc["N"].get<int>();
    b.c = hkpoly::parse_rational(doc["c"].get<std::string>());
    for (const auto& js : doc["sites"]) {
      hkpoly::NuclearSite s;
      s.charge = hkpoly::parse_rational(js.at("alpha").get<std::string>());
      for (int k = 0; k < 3; ++k)
        s.position[k] = hkpoly::parse_rational(js.at("r").at(k).get<std::string>());
      b.diff.sites.push_back(std::move(s));
    }
    b.polynomial = hkpoly::polynomial_from_json_value(doc["polynomial"]);
  } catch (const nlohmann::json::exception& e) {
    throw hkpoly::StructuralError(std::string("bundle JSON: ") + e.what());
  }
  // A zero certificate cannot come out of the builder; a bundle carrying one
  // records an upstream invariant breach, not a user mistake.
  if (b.polynomial.is_zero())
    throw hkpoly::InternalError("bundle carries a zero certificate polynomial");
  return b;
}

ordered_json sampling_to_json(const hkpoly::SamplingReport& rep) {
  ordered_json s;
  s["trials"] = rep.trials;
  s["zero_hits"] = rep.zero_hits;
  s["seed"] = rep.seed;
  s["abs_min"] = rep.abs_min;
  s["abs_median"] = rep.abs_median;
  return s;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"hkpoly: exact certificates that distinct Coulomb potentials stay "
               "distinguishable, plus a 1D grid illustration of the density map"};
  app.require_subcommand(1);

  FamilyArgs fam;
  auto add_family_flags = [&](CLI::App* cmd) {
    cmd->add_option("--n", fam.n, "number of summands")->required();
    cmd->add_option("--n-max", fam.n_max, "capacity bound on n");
    cmd->add_flag("--check", fam.check, "attach the structure report");
    cmd->add_option("--out", fam.out, "write JSON here instead of stdout");
  };
  CLI::App* eliminate = app.add_subcommand(
      "eliminate", "build the radical-elimination family by the inductive route");
  add_family_flags(eliminate);
  CLI::App* oracle = app.add_subcommand(
      "oracle", "build the same family by expanding the full sign product");
  add_family_flags(oracle);

  struct {
    int n = 0;
    int n_max = hkpoly::kDefaultMaxN;
    long trials = 0;
    std::uint64_t seed = 0;
    std::string out;
  } ver;
  CLI::App* verify = app.add_subcommand("verify", "exact identity sweep at random tuples");
  verify->add_option("--n", ver.n, "number of summands")->required();
  verify->add_option("--trials", ver.trials, "tuples to test")->required();
  verify->add_option("--seed", ver.seed, "sweep seed (required: reports are reproducible)")
      ->required();
  verify->add_option("--n-max", ver.n_max, "capacity bound on n");
  verify->add_option("--out", ver.out, "write JSON here instead of stdout");

  struct {
    std::string a, b, out, bundle;
    int n_particles = 0;
    long trials = 0;
    std::uint64_t seed = 0;
  } dis;
  CLI::App* distinguish = app.add_subcommand(
      "distinguish", "decide v == v' exactly; certificate plus sampling if distinct");
  distinguish->add_option("--a", dis.a, "potential JSON file")->required();
  distinguish->add_option("--b", dis.b, "potential JSON file")->required();
  distinguish->add_option("--N", dis.n_particles, "electron count")->required();
  distinguish->add_option("--trials", dis.trials, "sampling trials at c=0")->required();
  distinguish->add_option("--seed", dis.seed, "sampling seed")->required();
  distinguish->add_option("--bundle", dis.bundle,
                          "also write a self-contained sampling bundle here");
  distinguish->add_option("--out", dis.out, "write JSON here instead of stdout");

  struct {
    std::string poly, out;
    long trials = 0;
    std::uint64_t seed = 0;
  } smp;
  CLI::App* sample = app.add_subcommand(
      "sample", "evaluate a certificate bundle at random exact configurations");
  sample->add_option("--poly", smp.poly, "certificate bundle JSON file")->required();
  sample->add_option("--trials", smp.trials, "configurations to draw")->required();
  sample->add_option("--seed", smp.seed, "sampling seed")->required();
  sample->add_option("--out", smp.out, "write JSON here instead of stdout");

  CLI::App* toy = app.add_subcommand("toy", "1D grid systems");
  toy->require_subcommand(1);
  struct {
    std::string config, out;
  } solve_args, scan_args;
  CLI::App* solve = toy->add_subcommand("solve", "ground states of every configured system");
  solve->add_option("--config", solve_args.config, "config JSON file")->required();
  solve->add_option("--out", solve_args.out, "write JSON here instead of stdout");
  CLI::App* scan = toy->add_subcommand("scan", "pairwise density comparison scan");
  scan->add_option("--config", scan_args.config, "config JSON file")->required();
  scan->add_option("--out", scan_args.out, "write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  }

  if (*eliminate) run_family(fam, false);
  if (*oracle) run_family(fam, true);

  if (*verify) {
    const hkpoly::RadicalFamily& f = hkpoly::cached_radical_family(ver.n, ver.n_max);
    const hkpoly::VerifySweepReport rep = hkpoly::verify_identity_sweep(f, ver.trials, ver.seed);
    ordered_json doc;
    doc["n"] = rep.n;
    doc["trials"] = rep.trials;
    doc["seed"] = rep.seed;
    doc["zero_residuals"] = rep.zero_residuals;
    doc["perturbed_nonzero"] = rep.perturbed_nonzero;
    doc["pass"] = rep.pass();
    emit(doc.dump(), ver.out);
    std::cerr << "verify: n=" << rep.n << ", " << rep.zero_residuals << "/" << rep.trials
              << " exact zeros, " << rep.perturbed_nonzero << " perturbed nonzero\n";
  }

  if (*distinguish) {
    const auto pa = hkpoly::parse_potential(read_file(dis.a));
    const auto pb = hkpoly::parse_potential(read_file(dis.b));
    const auto verdict = hkpoly::distinguish(pa, pb, dis.n_particles, dis.trials, dis.seed);
    emit(verdict.to_json(), dis.out);
    if (!dis.bundle.empty()) {
      if (verdict.equal) throw hkpoly::DomainError("equal potentials have no sampling bundle");
      Bundle b;
      b.diff = hkpoly::potential_difference(pa, pb);
      b.n_particles = dis.n_particles;
      b.c = hkpoly::Rational(0);
      b.polynomial = hkpoly::build_vanishing_polynomial(b.diff, dis.n_particles, b.c);
      emit(bundle_to_json(b).dump(), dis.bundle);
    }
    std::cerr << "distinguish: " << (verdict.equal ? "equal" : "distinct") << "\n";
  }

  if (*sample) {
    const Bundle b = bundle_from_json(read_file(smp.poly));
    const auto rep =
        hkpoly::measure_zero_sample(b.polynomial, b.diff, b.n_particles, smp.trials, smp.seed);
    emit(sampling_to_json(rep).dump(), smp.out);
    std::cerr << "sample: " << rep.zero_hits << "/" << rep.trials << " exact zeros\n";
  }

  if (*solve) {
    const hkpoly::ToyConfig cfg = hkpoly::parse_toy_config(read_file(solve_args.config));
    std::vector<hkpoly::GroundStateResult> results;
    results.reserve(cfg.systems.size());
    for (const auto& sys : cfg.systems)
      results.push_back(
          hkpoly::solve_system(sys, cfg.options.solver_tol, cfg.options.max_iterations));
    emit(hkpoly::solve_report_json(results), solve_args.out);
    std::cerr << "solve: " << results.size() << " system(s)\n";
  }

  if (*scan) {
    const hkpoly::ToyConfig cfg = hkpoly::parse_toy_config(read_file(scan_args.config));
    const hkpoly::ScanReport rep = hkpoly::hk_scan(cfg.systems, cfg.options);
    emit(rep.to_json(), scan_args.out);
    std::cerr << "scan: " << cfg.systems.size() << " system(s), "
              << (rep.within_class_ok ? "within-class densities agree" : "VIOLATIONS") << "\n";
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const hkpoly::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const hkpoly::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    if (!e.residual_history.empty()) {
      std::cerr << "residual history:";
      for (double r : e.residual_history) std::cerr << " " << r;
      std::cerr << "\n";
    }
    return 4;
  } catch (const hkpoly::InternalError& e) {
    std::cerr << "internal invariant violation: " << e.what() << "\n";
    return 5;
  } catch (const hkpoly::StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hkpoly::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
