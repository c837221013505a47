#include "hkpoly/toy_dft.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <random>

#include "hkpoly/errors.hpp"

namespace hkpoly {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

std::size_t pair_index(int k, int l, int points) {
  // index of the ordered pair (k < l) in the antisymmetric basis
  return std::size_t(k) * points - std::size_t(k) * (k + 1) / 2 + (l - k - 1);
}

double soft_interaction(double distance, double eta) {
  return 1.0 / std::sqrt(distance * distance + eta * eta);
}

}  // namespace

void GridSystem::validate() const {
  if (points < 8) throw StructuralError("grid needs points >= 8");
  if (box_length <= 0) throw StructuralError("box length must be positive");
  if (n_particles != 1 && n_particles != 2)
    throw StructuralError("only 1 or 2 particles are supported");
  if (external_potential.size() != std::size_t(points))
    throw StructuralError("external potential length " +
                          std::to_string(external_potential.size()) +
                          " does not match points = " + std::to_string(points));
  if (n_particles == 2 && interaction_softening <= 0)
    throw StructuralError("two-particle systems need interaction softening eta > 0");
}

bool GridSystem::same_grid(const GridSystem& o) const {
  return box_length == o.box_length && points == o.points && n_particles == o.n_particles &&
         statistics == o.statistics && interaction_softening == o.interaction_softening;
}

Eigen::SparseMatrix<double> build_hamiltonian(const GridSystem& sys) {
  sys.validate();
  const int P = sys.points;
  const double inv2dx2 = 0.5 / (sys.dx() * sys.dx());

  if (sys.n_particles == 1) {
    std::vector<Triplet> trip;
    trip.reserve(std::size_t(P) * 3);
    for (int k = 0; k < P; ++k) {
      trip.emplace_back(k, k, 2.0 * inv2dx2 + sys.external_potential[k]);
      if (k + 1 < P) {
        trip.emplace_back(k, k + 1, -inv2dx2);
        trip.emplace_back(k + 1, k, -inv2dx2);
      }
    }
    SpMat H(P, P);
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
  }

  const auto diag2 = [&](int k, int l) {
    return 4.0 * inv2dx2 + sys.external_potential[k] + sys.external_potential[l] +
           soft_interaction(sys.node(k) - sys.node(l), sys.interaction_softening);
  };

  if (sys.statistics == Statistics::distinguishable) {
    const std::size_t dim = std::size_t(P) * P;
    std::vector<Triplet> trip;
    trip.reserve(dim * 5);
    for (int k = 0; k < P; ++k) {
      for (int l = 0; l < P; ++l) {
        const std::size_t row = std::size_t(k) * P + l;
        trip.emplace_back(row, row, diag2(k, l));
        if (k + 1 < P) trip.emplace_back(row, row + P, -inv2dx2);
        if (k > 0) trip.emplace_back(row, row - P, -inv2dx2);
        if (l + 1 < P) trip.emplace_back(row, row + 1, -inv2dx2);
        if (l > 0) trip.emplace_back(row, row - 1, -inv2dx2);
      }
    }
    SpMat H(dim, dim);
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
  }

  // Antisymmetric subspace: basis vectors (e_k (x) e_l - e_l (x) e_k)/sqrt(2)
  // over ordered pairs k < l. A hop that lands both particles on one node
  // projects to zero (exclusion); a hop that reverses the order flips sign.
  const std::size_t dim = std::size_t(P) * (P - 1) / 2;
  std::vector<Triplet> trip;
  trip.reserve(dim * 5);
  const auto add_hop = [&](std::size_t row, int a, int b, double coeff) {
    if (a == b) return;
    if (a < b)
      trip.emplace_back(row, pair_index(a, b, P), coeff);
    else
      trip.emplace_back(row, pair_index(b, a, P), -coeff);
  };
  for (int k = 0; k < P; ++k) {
    for (int l = k + 1; l < P; ++l) {
      const std::size_t row = pair_index(k, l, P);
      trip.emplace_back(row, row, diag2(k, l));
      if (k + 1 < P) add_hop(row, k + 1, l, -inv2dx2);
      if (k > 0) add_hop(row, k - 1, l, -inv2dx2);
      if (l + 1 < P) add_hop(row, k, l + 1, -inv2dx2);
      if (l > 0) add_hop(row, k, l - 1, -inv2dx2);
    }
  }
  SpMat H(dim, dim);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

namespace {

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
};

/// Inverse iteration with a fixed shift below the spectrum (Gershgorin);
/// optional deflation against an already-converged vector.
EigenPair lowest_eigenpair(const SpMat& H, double tol, int max_iterations,
                           const Eigen::VectorXd* deflate) {
  const Eigen::Index dim = H.rows();
  double bound = std::numeric_limits<double>::infinity();
  for (int col = 0; col < H.outerSize(); ++col) {
    double diag = 0.0, off = 0.0;
    for (SpMat::InnerIterator it(H, col); it; ++it) {
      if (it.row() == it.col())
        diag = it.value();
      else
        off += std::abs(it.value());
    }
    bound = std::min(bound, diag - off);
  }
  const double shift = bound - 1.0;

  SpMat shifted = H;
  for (Eigen::Index i = 0; i < dim; ++i) shifted.coeffRef(i, i) -= shift;
  shifted.makeCompressed();
  Eigen::SimplicialLDLT<SpMat> solver(shifted);
  if (solver.info() != Eigen::Success)
    throw NumericalError("factorization of the shifted operator failed", {});

  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = unit(rng);
  if (deflate) v -= (*deflate) * deflate->dot(v);
  v.normalize();

  std::vector<double> history;
  for (int iter = 0; iter < max_iterations; ++iter) {
    Eigen::VectorXd w = solver.solve(v);
    if (deflate) w -= (*deflate) * deflate->dot(w);
    w.normalize();
    v = w;
    const Eigen::VectorXd Hv = H * v;
    const double theta = v.dot(Hv);
    const double res = (Hv - theta * v).norm();
    history.push_back(res);
    if (res <= tol) {
      EigenPair out;
      out.value = theta;
      out.vector = v;
      out.residual = res;
      return out;
    }
  }
  throw NumericalError("inverse iteration did not reach tol = " + std::to_string(tol) + " in " +
                           std::to_string(max_iterations) + " iterations",
                       history);
}

}  // namespace

GroundStateResult ground_state(const Eigen::SparseMatrix<double>& H, const GridSystem& sys,
                               double tol, int max_iterations) {
  sys.validate();
  if (tol <= 0) throw StructuralError("ground_state needs tol > 0");
  if (H.rows() != H.cols()) throw StructuralError("hamiltonian is not square");

  const EigenPair lowest = lowest_eigenpair(H, tol, max_iterations, nullptr);
  // The next eigenvalue decides degeneracy; a looser tolerance is enough for
  // a gap test at 10*tol resolution.
  const EigenPair second =
      lowest_eigenpair(H, std::max(tol, 1e-8), max_iterations, &lowest.vector);

  GroundStateResult result;
  result.energy = lowest.value;
  result.second_energy = second.value;
  result.residual = lowest.residual;
  result.degeneracy_flag = (second.value - lowest.value) < 10.0 * tol;

  // Grid wavefunction, L2-normalized: sum psi^2 dx^N = 1. The sign is fixed
  // so the first nonzero component is positive, keeping reports stable.
  const double dx = sys.dx();
  const int P = sys.points;
  if (sys.n_particles == 1) {
    result.wavefunction.assign(P, 0.0);
    const double scale = 1.0 / std::sqrt(dx);
    for (int k = 0; k < P; ++k) result.wavefunction[k] = lowest.vector[k] * scale;
  } else if (sys.statistics == Statistics::distinguishable) {
    result.wavefunction.assign(std::size_t(P) * P, 0.0);
    const double scale = 1.0 / dx;
    for (int k = 0; k < P; ++k)
      for (int l = 0; l < P; ++l)
        result.wavefunction[std::size_t(k) * P + l] =
            lowest.vector[std::size_t(k) * P + l] * scale;
  } else {
    result.wavefunction.assign(std::size_t(P) * P, 0.0);
    const double scale = 1.0 / (dx * std::sqrt(2.0));
    for (int k = 0; k < P; ++k) {
      for (int l = k + 1; l < P; ++l) {
        const double a = lowest.vector[pair_index(k, l, P)] * scale;
        result.wavefunction[std::size_t(k) * P + l] = a;
        result.wavefunction[std::size_t(l) * P + k] = -a;
      }
    }
  }
  for (double x : result.wavefunction) {
    if (x != 0.0) {
      if (x < 0.0)
        for (double& y : result.wavefunction) y = -y;
      break;
    }
  }
  result.density = density(result, sys);
  return result;
}

std::vector<double> density(const GroundStateResult& result, const GridSystem& sys) {
  const int P = sys.points;
  const double dx = sys.dx();
  std::vector<double> rho(P, 0.0);
  if (sys.n_particles == 1) {
    for (int k = 0; k < P; ++k) rho[k] = result.wavefunction[k] * result.wavefunction[k];
  } else {
    for (int k = 0; k < P; ++k) {
      double s = 0.0;
      for (int l = 0; l < P; ++l) {
        const double a = result.wavefunction[std::size_t(k) * P + l];
        s += a * a;
      }
      rho[k] = 2.0 * s * dx;
    }
  }
  return rho;
}

GroundStateResult solve_system(const GridSystem& sys, double tol, int max_iterations) {
  return ground_state(build_hamiltonian(sys), sys, tol, max_iterations);
}

ScanReport hk_scan(const std::vector<GridSystem>& systems, const ScanOptions& opts) {
  if (systems.empty()) throw StructuralError("scan needs at least one system");
  for (const auto& sys : systems) {
    sys.validate();
    if (!sys.same_grid(systems.front()))
      throw StructuralError("scan systems must share grid, particle count and statistics");
  }
  const std::size_t n = systems.size();
  const double dx = systems.front().dx();

  std::vector<GroundStateResult> results;
  results.reserve(n);
  for (const auto& sys : systems)
    results.push_back(solve_system(sys, opts.solver_tol, opts.max_iterations));

  ScanReport rep;
  rep.energies.resize(n);
  rep.degenerate.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.energies[i] = results[i].energy;
    rep.degenerate[i] = results[i].degeneracy_flag;
  }

  // Constant-shift classes, detected exactly on the sampled vectors.
  const auto same_class = [&](std::size_t i, std::size_t j) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 0; k < systems[i].points; ++k) {
      const double diff = systems[i].external_potential[k] - systems[j].external_potential[k];
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    return hi - lo < opts.shift_tol;
  };
  rep.class_of.assign(n, -1);
  int next_class = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rep.class_of[i] >= 0) continue;
    rep.class_of[i] = next_class;
    for (std::size_t j = i + 1; j < n; ++j)
      if (rep.class_of[j] < 0 && same_class(i, j)) rep.class_of[j] = next_class;
    ++next_class;
  }

  rep.density_distance.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < systems[i].points; ++k) {
        const double diff = results[i].density[k] - results[j].density[k];
        s += diff * diff;
      }
      const double dist = std::sqrt(s * dx);
      rep.density_distance[i][j] = rep.density_distance[j][i] = dist;
      if (rep.degenerate[i] || rep.degenerate[j]) {
        rep.skipped_pairs.emplace_back(int(i), int(j));
        continue;
      }
      if (rep.class_of[i] == rep.class_of[j] && dist >= opts.tol_density) {
        rep.within_class_ok = false;
        rep.violations.push_back("systems " + std::to_string(i) + " and " + std::to_string(j) +
                                 " share a constant-shift class but densities differ by " +
                                 std::to_string(dist));
      }
    }
  }
  return rep;
}

ToyConfig parse_toy_config(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw StructuralError(std::string("config JSON parse error: ") + e.what());
  }
  for (const char* key : {"L", "points", "N", "potentials"})
    if (!doc.contains(key))
      throw StructuralError(std::string("config JSON missing \"") + key + "\"");

  GridSystem base;
  base.box_length = doc["L"].get<double>();
  base.points = doc["points"].get<int>();
  base.n_particles = doc["N"].get<int>();
  const std::string stats = doc.value("statistics", std::string("distinguishable"));
  if (stats == "distinguishable")
    base.statistics = Statistics::distinguishable;
  else if (stats == "antisymmetric")
    base.statistics = Statistics::antisymmetric;
  else
    throw StructuralError("config JSON: unknown statistics '" + stats + "'");
  base.interaction_softening = doc.value("eta", 1.0);

  ToyConfig cfg;
  cfg.options.tol_density = doc.value("tol", 1e-6);
  cfg.options.solver_tol = doc.value("solver_tol", 1e-10);
  cfg.options.shift_tol = doc.value("shift_tol", 1e-9);
  cfg.options.max_iterations = doc.value("max_iter", 2000);

  for (const auto& jp : doc["potentials"]) {
    if (!jp.is_object() || !jp.contains("kind"))
      throw StructuralError("config JSON: every potential needs a \"kind\"");
    GridSystem sys = base;
    sys.external_potential.assign(sys.points, 0.0);
    const std::string kind = jp["kind"].get<std::string>();
    const double shift = jp.value("shift", 0.0);
    if (kind == "box0") {
      // flat well
    } else if (kind == "harmonic") {
      const double omega = jp.value("omega", 1.0);
      const double center = jp.value("center", sys.box_length / 2.0);
      for (int k = 0; k < sys.points; ++k) {
        const double x = sys.node(k) - center;
        sys.external_potential[k] = 0.5 * omega * omega * x * x;
      }
    } else if (kind == "soft_coulomb") {
      const double z = jp.value("z", 1.0);
      const double center = jp.value("center", sys.box_length / 2.0);
      const double eta = jp.value("eta", 1.0);
      if (eta <= 0) throw StructuralError("config JSON: soft_coulomb needs eta > 0");
      for (int k = 0; k < sys.points; ++k)
        sys.external_potential[k] = -z * soft_interaction(sys.node(k) - center, eta);
    } else if (kind == "samples") {
      if (!jp.contains("values") || !jp["values"].is_array() ||
          jp["values"].size() != std::size_t(sys.points))
        throw StructuralError("config JSON: samples potential needs \"values\" of length points");
      sys.external_potential = jp["values"].get<std::vector<double>>();
    } else {
      throw StructuralError("config JSON: unknown potential kind '" + kind + "'");
    }
    for (double& v : sys.external_potential) v += shift;
    sys.validate();
    cfg.systems.push_back(std::move(sys));
  }
  if (cfg.systems.empty()) throw StructuralError("config JSON: no potentials given");
  return cfg;
}

std::string solve_report_json(const std::vector<GroundStateResult>& results) {
  nlohmann::ordered_json doc;
  auto& arr = doc["results"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json jr;
    jr["E0"] = r.energy;
    jr["degenerate"] = r.degeneracy_flag;
    jr["residual"] = r.residual;
    jr["density"] = r.density;
    arr.push_back(std::move(jr));
  }
  return doc.dump();
}

std::string ScanReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["classes"] = class_of;
  doc["E0"] = energies;
  doc["degenerate"] = degenerate;
  doc["distances"] = density_distance;
  auto& sk = doc["skipped_pairs"] = nlohmann::ordered_json::array();
  for (const auto& [i, j] : skipped_pairs) sk.push_back({i, j});
  doc["within_class_ok"] = within_class_ok;
  doc["violations"] = violations;
  return doc.dump();
}

}  // namespace hkpoly
