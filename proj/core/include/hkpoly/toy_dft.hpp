#ifndef HKPOLY_TOY_DFT_HPP
#define HKPOLY_TOY_DFT_HPP

#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace hkpoly {

enum class Statistics { distinguishable, antisymmetric };

/// 1D grid system in atomic units (hbar = m_e = e = 1), Dirichlet walls at
/// 0 and L, interior nodes x_k = (k+1) * dx with dx = L / (points + 1).
struct GridSystem {
  double box_length = 1.0;
  int points = 0;
  int n_particles = 1;  // 1 or 2
  Statistics statistics = Statistics::distinguishable;
  std::vector<double> external_potential;  // sampled on the interior nodes
  double interaction_softening = 1.0;      // eta of 1/sqrt((x-y)^2 + eta^2), N=2 only

  double dx() const { return box_length / (points + 1); }
  double node(int k) const { return dx() * (k + 1); }
  /// Throws StructuralError on any invariant violation (points >= 8,
  /// potential length, eta > 0 for two particles).
  void validate() const;
  bool same_grid(const GridSystem& o) const;
};

struct GroundStateResult {
  double energy = 0.0;
  double second_energy = 0.0;  // next eigenvalue, for the degeneracy gap
  std::vector<double> wavefunction;  // length points (N=1) or points^2 (N=2, full grid)
  std::vector<double> density;       // length points
  bool degeneracy_flag = false;
  double residual = 0.0;
};

/// -1/2 second-difference stencil with Dirichlet walls plus the diagonal
/// external potential; for two particles the Kronecker sum plus the diagonal
/// soft interaction, restricted to the antisymmetric pair basis when asked.
Eigen::SparseMatrix<double> build_hamiltonian(const GridSystem& sys);

/// Lowest eigenpair by shifted inverse iteration from a Gershgorin bound;
/// the residual ||H psi - E0 psi|| <= tol on return, NumericalError with the
/// residual history otherwise. Also resolves the next eigenvalue (deflated
/// iteration) to set degeneracy_flag when the gap is below 10*tol.
GroundStateResult ground_state(const Eigen::SparseMatrix<double>& H, const GridSystem& sys,
                               double tol, int max_iterations = 2000);

/// Single-particle density of a result: |psi|^2 for one particle,
/// 2 * sum_y |Psi(x,y)|^2 dx for two. Integrates to N on the grid.
std::vector<double> density(const GroundStateResult& result, const GridSystem& sys);

/// Convenience: build, solve, fill density.
GroundStateResult solve_system(const GridSystem& sys, double tol, int max_iterations = 2000);

struct ScanOptions {
  double tol_density = 1e-6;  // within-class density distance bound
  double solver_tol = 1e-10;
  double shift_tol = 1e-9;  // max-min threshold for "equal up to a constant"
  int max_iterations = 2000;
};

struct ScanReport {
  std::vector<int> class_of;         // constant-shift class per system
  std::vector<double> energies;      // E0 per system
  std::vector<bool> degenerate;      // degeneracy flag per system
  std::vector<std::vector<double>> density_distance;  // full symmetric L2 matrix
  std::vector<std::pair<int, int>> skipped_pairs;     // degenerate results, not compared
  std::vector<std::string> violations;  // within-class pairs with distance >= tol
  bool within_class_ok = true;

  std::string to_json() const;
};

/// Solves every system, groups the potentials into constant-shift classes
/// (detected exactly on the sampled vectors: max - min of the difference
/// below shift_tol), asserts that within-class densities agree below
/// tol_density and reports all pairwise L2 distances.
ScanReport hk_scan(const std::vector<GridSystem>& systems, const ScanOptions& opts);

/// Scan/solve configuration document:
/// {"L":float,"points":int,"N":int,"statistics":"distinguishable"|"antisymmetric",
///  "eta":float,"potentials":[{"kind":"box0"|"harmonic"|"soft_coulomb"|"samples",
///  ...params,"shift":float},...],"tol":float,
///  optional "solver_tol","shift_tol","max_iter"}.
struct ToyConfig {
  std::vector<GridSystem> systems;
  ScanOptions options;
};

ToyConfig parse_toy_config(const std::string& json_text);

std::string solve_report_json(const std::vector<GroundStateResult>& results);

}  // namespace hkpoly

#endif
