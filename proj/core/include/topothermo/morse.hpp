#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <vector>

#include "topothermo/potential.hpp"

namespace topothermo {

struct CriticalPoint {
  std::vector<double> coords;
  double value = 0.0;
  int morse_index = 0;
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;     // column l pairs with eigenvalues[l]; empty when loaded without a model
  double jacobian = 0.0;            // 2^{N/2} |det Hess|^{-1/2}; +inf for an exactly singular Hessian
  bool degenerate = false;
  double gradient_norm = 0.0;
};

struct SearchConfig {
  std::size_t starts = 0;  // 0 selects default_start_count(N)
  std::uint64_t seed = 0;
  int max_iterations = 100;
  double tol_grad = 1e-10;
  double dedup_tol = 1e-6;
  double degeneracy_threshold = 1e-8;
  std::size_t workers = 0;  // 0 selects default_worker_count()
};

struct SearchStats {
  std::size_t starts = 0;
  std::size_t converged = 0;
  std::size_t no_convergence = 0;
  std::size_t outside_box = 0;
  std::size_t above_cutoff = 0;
  std::size_t distinct = 0;
};

/// Critical points with V ≤ v_max, sorted by value then coordinates, grouped
/// into distinct critical levels.
struct CriticalCatalog {
  std::size_t N = 0;
  double v_max = 0.0;
  bool periodic = false;
  std::vector<CriticalPoint> points;
  std::vector<double> critical_values;       // strictly increasing
  std::vector<std::size_t> per_level_counts;  // same length as critical_values
  std::vector<std::size_t> level_of_point;    // index into critical_values per point
  SearchConfig config;
  SearchStats stats;
  nlohmann::json model;  // description of the model searched
};

/// 200·N·3^min(N,5), capped at 10⁶.
std::size_t default_start_count(std::size_t N);

/// Multistart Newton on ∇V = 0 with starts uniform in the domain box.
/// Failed starts are counted in stats, never fatal; the result is a pure
/// function of (model, v_max, config) regardless of the worker count.
CriticalCatalog find_critical_points(const PotentialModel& model, double v_max, const SearchConfig& config = {});

/// Eigen-decomposes the Hessian at a critical point and fills index, J and
/// the degeneracy flag. Throws Errc::not_critical when ‖∇V‖ > tol_grad.
CriticalPoint classify_critical_point(const PotentialModel& model, std::span<const double> coords,
                                      double tol_grad = 1e-10, double degeneracy_threshold = 1e-8);

/// Groups points into levels and sorts them; used by the finder and by loaders.
CriticalCatalog build_catalog(std::size_t N, double v_max, bool periodic, std::vector<CriticalPoint> points);

/// μ_i(M_v) for i = 0..N. Throws Errc::cutoff_exceeded above the catalog's v_max.
std::vector<std::size_t> multiplicities_below(const CriticalCatalog& catalog, double v);

/// χ(M_v) = Σ (−1)^i μ_i(M_v).
long euler_characteristic(const CriticalCatalog& catalog, double v);

/// safety × min gap between consecutive critical values. Throws
/// Errc::single_level with fewer than two levels.
double compute_epsilon0(const CriticalCatalog& catalog, double safety = 0.9);

/// 1-based index of the greatest critical value ≤ v; 0 when there is none.
std::size_t level_index_nu(const CriticalCatalog& catalog, double v);

/// V'(q) = V(q) + Σ a_i q_i. On periodic models the torus-compatible term
/// Σ a_i sin q_i is used instead (same gradient shift at q = 0).
PotentialModel perturb_degenerate(const PotentialModel& model, std::span<const double> a);

/// Smallest distance between two catalog points (wrap-aware on periodic
/// models); +inf with fewer than two points.
double min_pairwise_distance(const CriticalCatalog& catalog);

/// Displacement b − a, wrapped into [−π, π) per coordinate when periodic.
void displacement(std::span<const double> a, std::span<const double> b, bool periodic, std::span<double> out);

}  // namespace topothermo
