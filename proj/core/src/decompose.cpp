#include "topothermo/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "topothermo/errors.hpp"
#include "topothermo/neckgeom.hpp"

namespace topothermo {

std::string to_string(Regime r) { return r == Regime::plateau ? "plateau" : "band"; }

double decomposition_residual(const DecompositionReport& report) {
  const double direct = report.direct_volume.mean;
  if (!(direct > 0.0)) throw Error(Errc::zero_volume, "direct volume is zero");
  return std::abs(direct - (report.excised_volume.mean + report.topo_term)) / direct;
}

DecompositionReport assemble_entropy_decomposition(const PotentialModel& model, const CriticalCatalog& catalog,
                                                   double v, double eps0, double r,
                                                   const DecompositionConfig& config) {
  if (catalog.N != model.dimension()) throw Error(Errc::domain_error, "catalog and model disagree on N");
  if (!(eps0 > 0.0)) throw Error(Errc::domain_error, "eps0 must be positive");
  DecompositionReport rep;
  rep.v = v;
  rep.eps0 = eps0;
  rep.r_requested = r;
  rep.N = catalog.N;
  rep.nu = level_index_nu(catalog, v);
  if (v + eps0 > catalog.v_max) rep.warnings.emplace_back(errc_name(Errc::incomplete_catalog));
  for (const auto& p : catalog.points)
    if (std::abs(v - p.value) < eps0) rep.regime = Regime::band;

  double r_used = admissible_r(catalog, r);
  ExcisionResult ex;
  for (int attempt = 0;; ++attempt) {
    ex = estimate_excised_volume(model, catalog, v, eps0, r_used, config.sampler);
    if (ex.overlap_hits == 0 || attempt >= config.max_r_halvings) break;
    r_used *= 0.5;
  }
  if (ex.overlap_hits > 0) {
    if (config.strict_overlap)
      throw Error(Errc::overlap_detected, std::to_string(ex.overlap_hits) + " samples lie in two pseudo-cylinders");
    rep.warnings.emplace_back(errc_name(Errc::overlap_detected));
  }
  rep.r = r_used;
  rep.direct_volume = ex.direct;
  rep.excised_volume = ex.excised;
  rep.cylinder_shared = ex.cylinders;
  rep.overlap_hits = ex.overlap_hits;
  rep.cylinders_included = ex.cylinders_included;

  const auto coeffs = neighborhood_coefficients(static_cast<int>(catalog.N), eps0, r_used);
  rep.topo_term = topological_term(catalog, coeffs, v);

  SamplerConfig cyl_cfg = config.sampler;
  if (config.cylinder_samples) cyl_cfg.n_samples = config.cylinder_samples;
  double var = 0.0;
  rep.cylinder_mc_total.seed = cyl_cfg.seed;
  rep.cylinder_mc_total.n_samples = 0;
  for (const auto& p : catalog.points) {
    if (!config.cylinder_oracle || !(p.value - eps0 < v)) continue;
    const auto e = estimate_pseudocylinder_volume(model, p, v, eps0, r_used, cyl_cfg);
    rep.cylinder_mc_total.mean += e.mean;
    rep.cylinder_mc_total.hits += e.hits;
    rep.cylinder_mc_total.n_samples += e.n_samples;
    var += e.std_error * e.std_error;
  }
  rep.cylinder_mc_total.std_error = std::sqrt(var);

  const double direct = rep.direct_volume.mean;
  const double n_d = static_cast<double>(catalog.N);
  if (!(direct > 0.0)) throw Error(Errc::zero_volume, "sub-level set at v=" + std::to_string(v) + " has no hits");
  rep.residual_rel = decomposition_residual(rep);
  rep.residual_stderr = rep.cylinder_shared.std_error / direct;
  const double mc_gap = std::abs(rep.cylinder_mc_total.mean - rep.topo_term);
  rep.residual_vs_mc_rel = mc_gap / direct;
  rep.residual_vs_mc_sigma =
      rep.cylinder_mc_total.std_error > 0.0 ? mc_gap / rep.cylinder_mc_total.std_error : (mc_gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  rep.S_direct = std::log(direct) / n_d;
  const double decomposed = rep.excised_volume.mean + rep.topo_term;
  rep.S_decomposed = decomposed > 0.0 ? std::log(decomposed) / n_d : -std::numeric_limits<double>::infinity();
  return rep;
}

double select_wall_parameter(const PotentialModel& model, const CriticalCatalog& catalog, double v, double eps0,
                             double r, const DecompositionConfig& config) {
  double r_used = admissible_r(catalog, r);
  for (int attempt = 0; attempt < config.max_r_halvings; ++attempt) {
    if (estimate_excised_volume(model, catalog, v, eps0, r_used, config.sampler).overlap_hits == 0) break;
    r_used *= 0.5;
  }
  return r_used;
}

std::vector<DecompositionReport> decomposition_sweep(const PotentialModel& model, const CriticalCatalog& catalog,
                                                     double v, const std::vector<double>& eps0_list, double r,
                                                     const DecompositionConfig& config) {
  if (eps0_list.empty()) return {};
  const double smallest = *std::min_element(eps0_list.begin(), eps0_list.end());
  const double r_fixed = select_wall_parameter(model, catalog, v, smallest, r, config);
  DecompositionConfig fixed = config;
  fixed.max_r_halvings = 0;
  std::vector<DecompositionReport> out;
  out.reserve(eps0_list.size());
  for (double eps0 : eps0_list) {
    out.push_back(assemble_entropy_decomposition(model, catalog, v, eps0, r_fixed, fixed));
    out.back().r_requested = r;
  }
  return out;
}

std::vector<DecompositionReport> decomposition_scan(const PotentialModel& model, const CriticalCatalog& catalog,
                                                    const std::vector<double>& levels, double eps0, double r,
                                                    const DecompositionConfig& config) {
  if (levels.empty()) return {};
  const double top = *std::max_element(levels.begin(), levels.end());
  const double r_fixed = select_wall_parameter(model, catalog, top, eps0, r, config);
  DecompositionConfig fixed = config;
  fixed.max_r_halvings = 0;
  std::vector<DecompositionReport> out;
  out.reserve(levels.size());
  for (double v : levels) {
    out.push_back(assemble_entropy_decomposition(model, catalog, v, eps0, r_fixed, fixed));
    out.back().r_requested = r;
  }
  return out;
}

}  // namespace topothermo
