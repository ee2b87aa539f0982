#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "topothermo/measure.hpp"
#include "topothermo/morse.hpp"

namespace topothermo {

struct DecompositionConfig {
  SamplerConfig sampler;               // box sampling for direct and excised volumes
  std::size_t cylinder_samples = 0;    // per-cylinder Morse-box samples; 0 uses sampler.n_samples
  bool strict_overlap = false;         // throw OverlapDetected instead of warning
  int max_r_halvings = 2;              // retries with r/2, r/4 when cylinders overlap
  bool cylinder_oracle = true;         // also estimate each cylinder in its own Morse box
};

enum class Regime { plateau, band };
std::string to_string(Regime r);

struct DecompositionReport {
  double v = 0.0;
  double eps0 = 0.0;
  double r = 0.0;            // wall parameter actually used
  double r_requested = 0.0;
  std::size_t N = 0;
  std::size_t nu = 0;
  Regime regime = Regime::plateau;
  VolumeEstimate direct_volume;
  VolumeEstimate excised_volume;
  double topo_term = 0.0;
  VolumeEstimate cylinder_mc_total;  // Σ per-cylinder Morse-box estimates
  VolumeEstimate cylinder_shared;    // vol(M_v ∩ ∪Γ) from the box samples
  double residual_rel = 0.0;         // |direct − (excised + topo)| / direct
  double residual_stderr = 0.0;      // MC error of residual_rel
  double residual_vs_mc_rel = 0.0;   // |cylinder_mc_total − topo| / direct
  double residual_vs_mc_sigma = 0.0; // |cylinder_mc_total − topo| / σ(cylinder_mc_total)
  double S_direct = 0.0;
  double S_decomposed = 0.0;
  std::size_t cylinders_included = 0;
  std::size_t overlap_hits = 0;
  std::vector<std::string> warnings;  // error names, e.g. "OverlapDetected", "IncompleteCatalog"
};

/// vol(M_v) split as excised volume + Σ A g_i μ_i + Σ B, each part estimated
/// independently, plus the Monte Carlo oracle for the cylinder volumes.
/// r is first capped at 0.4× the minimum pairwise critical distance.
DecompositionReport assemble_entropy_decomposition(const PotentialModel& model, const CriticalCatalog& catalog,
                                                   double v, double eps0, double r,
                                                   const DecompositionConfig& config = {});

/// |direct − (excised + topo)| / direct.
double decomposition_residual(const DecompositionReport& report);

/// Caps r at the admissible value, then halves it (up to max_r_halvings
/// times) while the cylinders at (v, ε₀) overlap.
double select_wall_parameter(const PotentialModel& model, const CriticalCatalog& catalog, double v, double eps0,
                             double r, const DecompositionConfig& config = {});

/// One report per ε₀ at a common r, selected at the smallest ε₀ so that the
/// sweep varies the neighborhood size only.
std::vector<DecompositionReport> decomposition_sweep(const PotentialModel& model, const CriticalCatalog& catalog,
                                                     double v, const std::vector<double>& eps0_list, double r,
                                                     const DecompositionConfig& config = {});

/// One report per level at a common r, selected at the top level.
std::vector<DecompositionReport> decomposition_scan(const PotentialModel& model, const CriticalCatalog& catalog,
                                                    const std::vector<double>& levels, double eps0, double r,
                                                    const DecompositionConfig& config = {});

}  // namespace topothermo
