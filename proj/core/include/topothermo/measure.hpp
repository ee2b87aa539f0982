#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topothermo/morse.hpp"
#include "topothermo/potential.hpp"

namespace topothermo {

enum class EstimatorKind { hit_or_miss, thin_shell, analytic };

std::string to_string(EstimatorKind kind);

/// A configuration-space volume (or Ω) with its standard error.
struct VolumeEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  EstimatorKind kind = EstimatorKind::hit_or_miss;
  std::size_t hits = 0;
  std::optional<double> h;           // thin shell half-width
  std::optional<double> richardson;  // thin shell: (4Ω(h/2) − Ω(h))/3
};

struct SamplerConfig {
  std::size_t n_samples = 1'000'000;
  std::uint64_t seed = 0;
  std::size_t workers = 0;        // 0 selects default_worker_count()
  double h = 0.0;                 // thin shell half-width; 0 selects 1e−2·(v − v_min)
  double grad_floor = 1e-8;       // Federer integrand exclusion floor
  std::size_t batches = 20;       // batch means for derived estimators
  std::size_t boundary_probes = 4096;
};

/// Hit-or-miss vol{V ≤ v} over the model box. Throws Errc::box_too_small
/// when probes on the box faces find points of the sub-level set
/// (skipped for periodic models, whose box is the whole torus).
VolumeEstimate estimate_sublevel_volume(const PotentialModel& model, double v, const SamplerConfig& config = {});

/// Same samples at every level, so the returned means are non-decreasing in v.
std::vector<VolumeEstimate> estimate_sublevel_volumes(const PotentialModel& model, std::span<const double> levels,
                                                      const SamplerConfig& config = {});

/// Ω(v) ≈ [M(v+h) − M(v−h)]/(2h) from one set of samples.
/// Throws Errc::h_too_small when fewer than 10 samples fall in the shell.
VolumeEstimate estimate_structure_integral(const PotentialModel& model, double v, const SamplerConfig& config = {});

/// ∇·(∇V/‖∇V‖²) = ΔV/‖∇V‖² − 2∇VᵀH∇V/‖∇V‖⁴.
/// Throws Errc::near_critical when ‖∇V‖ < grad_floor.
double federer_integrand(const PotentialModel& model, std::span<const double> q, double grad_floor = 1e-8);

struct BetaEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // batch means
  std::size_t accepted = 0;
  std::size_t rejected_near_critical = 0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  [[nodiscard]] double rejected_fraction() const {
    const auto total = accepted + rejected_near_critical;
    return total ? static_cast<double>(rejected_near_critical) / static_cast<double>(total) : 0.0;
  }
};

/// Microcanonical average of the Federer integrand over M_v.
BetaEstimate estimate_beta(const PotentialModel& model, double v, const SamplerConfig& config = {});

/// d log M/dv by a central difference at half-width h with common random
/// numbers; standard error from batch means.
struct DerivativeEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double h = 0.0;
};
DerivativeEstimate estimate_log_volume_derivative(const PotentialModel& model, double v, double h,
                                                  const SamplerConfig& config = {});

/// Closed-form estimate where the model has one (harmonic); std_error 0.
std::optional<VolumeEstimate> analytic_volume_estimate(const PotentialModel& model, double v);

// ---------------------------------------------------------------------------
// Pseudo-cylinders in Morse coordinates x_l = √(|λ_l|/2)·e_lᵀ(q − q_c).
// Γ(q_c, ε₀) = {|X||Y| ≤ r, |V(q) − v_c| ≤ ε₀} inside a locality box of
// half-width 1.5·√E per Morse coordinate, E = (ε₀ + √(ε₀² + 4r²))/2 for
// saddles and E = ε₀ for extrema (the extent of the quadric region). The
// energy walls use the true potential, so for non-quadratic V the volume
// differs from the second-order prediction by the truncation error.

/// Membership test for one pseudo-cylinder; reusable across samples.
class PseudoCylinder {
public:
  PseudoCylinder(const CriticalPoint& point, bool periodic, double eps0, double r);

  /// Morse coordinates of q (wrap-aware); false when outside the locality box.
  bool morse_coordinates(std::span<const double> q, std::span<double> x) const;
  /// Geometric part of the membership test, V(q) supplied by the caller.
  bool contains(std::span<const double> q, double value) const;

  [[nodiscard]] double half_width() const { return half_width_; }
  [[nodiscard]] double box_volume_q() const;  // J·(2·half_width)^N
  [[nodiscard]] const CriticalPoint& point() const { return *point_; }
  /// Maps Morse coordinates back to configuration space.
  void to_configuration(std::span<const double> x, std::span<double> q) const;

private:
  const CriticalPoint* point_;
  bool periodic_;
  double eps0_;
  double r_;
  double half_width_;
  Eigen::VectorXd scale_;  // √(|λ_l|/2)
};

/// MC estimate of vol(M_v ∩ Γ(q_c, ε₀)) by uniform sampling of the Morse box.
VolumeEstimate estimate_pseudocylinder_volume(const PotentialModel& model, const CriticalPoint& point, double v,
                                              double eps0, double r, const SamplerConfig& config = {});

struct ExcisionResult {
  VolumeEstimate direct;    // vol(M_v)
  VolumeEstimate excised;   // vol(M_v minus the union of included cylinders)
  VolumeEstimate cylinders; // vol(M_v ∩ union of cylinders) from the same samples
  std::size_t overlap_hits = 0;    // samples inside two or more cylinders
  std::size_t cylinders_included = 0;
};

/// Shared-sample estimate of the direct and excised volumes. A cylinder is
/// included when its critical value satisfies v_c − ε₀ < v.
ExcisionResult estimate_excised_volume(const PotentialModel& model, const CriticalCatalog& catalog, double v,
                                       double eps0, double r, const SamplerConfig& config = {});

}  // namespace topothermo
