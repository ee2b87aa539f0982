#include "topothermo/serialize.hpp"

#include <cmath>

#include "topothermo/errors.hpp"

namespace topothermo {

using nlohmann::json;

namespace {

json reals(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(real_or_null(x));
  return a;
}

json search_config_json(const SearchConfig& c) {
  return {{"starts", c.starts},
          {"seed", c.seed},
          {"max_iterations", c.max_iterations},
          {"tol_grad", c.tol_grad},
          {"dedup_tol", c.dedup_tol},
          {"degeneracy_threshold", c.degeneracy_threshold}};
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

json real_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json to_json(const CriticalPoint& p) {
  json j{{"coords", p.coords},
         {"value", p.value},
         {"index", p.morse_index},
         {"eigenvalues", p.eigenvalues},
         {"J", real_or_null(p.jacobian)},
         {"degenerate", p.degenerate},
         {"gradient_norm", p.gradient_norm}};
  if (p.eigenvectors.size() > 0) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < p.eigenvectors.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(p.eigenvectors.cols()));
      for (Eigen::Index l = 0; l < p.eigenvectors.cols(); ++l) row[static_cast<std::size_t>(l)] = p.eigenvectors(i, l);
      rows.push_back(row);
    }
    j["eigenvectors"] = rows;
  }
  return j;
}

json to_json(const CriticalCatalog& c) {
  json points = json::array();
  for (const auto& p : c.points) points.push_back(to_json(p));
  json levels = json::array();
  for (std::size_t j = 0; j < c.critical_values.size(); ++j)
    levels.push_back({{"value", c.critical_values[j]}, {"count", c.per_level_counts[j]}});
  return {{"N", c.N},
          {"v_max", c.v_max},
          {"periodic", c.periodic},
          {"model", c.model},
          {"tolerances", search_config_json(c.config)},
          {"seed", c.config.seed},
          {"search",
           {{"starts", c.stats.starts},
            {"converged", c.stats.converged},
            {"no_convergence", c.stats.no_convergence},
            {"outside_box", c.stats.outside_box},
            {"above_cutoff", c.stats.above_cutoff},
            {"distinct", c.stats.distinct}}},
          {"levels", levels},
          {"points", points}};
}

CriticalCatalog catalog_from_json(const json& j) {
  try {
    const auto N = j.at("N").get<std::size_t>();
    std::vector<CriticalPoint> points;
    for (const auto& pj : j.at("points")) {
      CriticalPoint p;
      p.coords = pj.at("coords").get<std::vector<double>>();
      if (p.coords.size() != N) throw Error(Errc::config_error, "catalog point has wrong dimension");
      p.value = pj.at("value").get<double>();
      p.morse_index = pj.at("index").get<int>();
      if (p.morse_index < 0 || p.morse_index > static_cast<int>(N))
        throw Error(Errc::config_error, "catalog point has an invalid Morse index");
      p.eigenvalues = get_or(pj, "eigenvalues", std::vector<double>{});
      p.jacobian = pj.contains("J") && !pj.at("J").is_null() ? pj.at("J").get<double>()
                                                              : std::numeric_limits<double>::infinity();
      p.degenerate = get_or(pj, "degenerate", false);
      p.gradient_norm = get_or(pj, "gradient_norm", 0.0);
      if (pj.contains("eigenvectors")) {
        const auto rows = pj.at("eigenvectors").get<std::vector<std::vector<double>>>();
        p.eigenvectors.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
        if (rows.size() != N) throw Error(Errc::config_error, "eigenvector matrix has wrong shape");
        for (std::size_t r = 0; r < N; ++r) {
          if (rows[r].size() != N) throw Error(Errc::config_error, "eigenvector matrix has wrong shape");
          for (std::size_t c = 0; c < N; ++c)
            p.eigenvectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
      }
      points.push_back(std::move(p));
    }
    CriticalCatalog cat = build_catalog(N, j.at("v_max").get<double>(), get_or(j, "periodic", false), std::move(points));
    if (j.contains("model")) cat.model = j.at("model");
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      cat.config.starts = get_or<std::size_t>(t, "starts", 0);
      cat.config.seed = get_or<std::uint64_t>(t, "seed", 0);
      cat.config.max_iterations = get_or(t, "max_iterations", 100);
      cat.config.tol_grad = get_or(t, "tol_grad", 1e-10);
      cat.config.dedup_tol = get_or(t, "dedup_tol", 1e-6);
      cat.config.degeneracy_threshold = get_or(t, "degeneracy_threshold", 1e-8);
    }
    if (j.contains("search")) {
      const auto& s = j.at("search");
      cat.stats.starts = get_or<std::size_t>(s, "starts", 0);
      cat.stats.converged = get_or<std::size_t>(s, "converged", 0);
      cat.stats.no_convergence = get_or<std::size_t>(s, "no_convergence", 0);
      cat.stats.outside_box = get_or<std::size_t>(s, "outside_box", 0);
      cat.stats.above_cutoff = get_or<std::size_t>(s, "above_cutoff", 0);
    }
    cat.stats.distinct = cat.points.size();
    return cat;
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, std::string("malformed catalog: ") + e.what());
  }
}

json to_json(const VolumeEstimate& e) {
  json j{{"mean", real_or_null(e.mean)},
         {"stderr", real_or_null(e.std_error)},
         {"n", e.n_samples},
         {"seed", e.seed},
         {"estimator", to_string(e.kind)},
         {"hits", e.hits}};
  if (e.h) j["h"] = *e.h;
  if (e.richardson) j["richardson"] = real_or_null(*e.richardson);
  return j;
}

json to_json(const BetaEstimate& e) {
  return {{"mean", real_or_null(e.mean)},
          {"stderr", real_or_null(e.std_error)},
          {"accepted", e.accepted},
          {"rejected_near_critical", e.rejected_near_critical},
          {"rejected_fraction", e.rejected_fraction()},
          {"n", e.n_samples},
          {"seed", e.seed}};
}

json to_json(const DerivativeEstimate& e) {
  return {{"mean", real_or_null(e.mean)}, {"stderr", real_or_null(e.std_error)}, {"h", e.h}};
}

json to_json(const EntropyCurve& c) {
  json d = json::array();
  for (const auto& s : c.dS)
    d.push_back({{"order", s.order}, {"value", reals(s.value)}, {"noise", reals(s.noise)}, {"truncation", reals(s.truncation)}});
  return {{"N", c.N},
          {"estimator", to_string(c.kind)},
          {"n", c.n_samples},
          {"seed", c.seed},
          {"vbar", reals(c.vbar)},
          {"S", reals(c.S)},
          {"stderr_S", reals(c.stderr_S)},
          {"in_band", c.in_band},
          {"derivatives", d}};
}

json to_json(const ScalingReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json sup = json::array(), noise = json::array();
    for (std::size_t k = 0; k < 4; ++k) {
      sup.push_back(real_or_null(row.sup[k]));
      noise.push_back(real_or_null(row.sup_noise[k]));
    }
    rows.push_back({{"N", row.N}, {"sup_abs_dS", sup}, {"noise", noise}});
  }
  return {{"window", {r.window[0], r.window[1]}},
          {"rows", rows},
          {"growth_flags", {r.growth_flags[0], r.growth_flags[1], r.growth_flags[2], r.growth_flags[3]}}};
}

json to_json(const TransitionVerdict& v) {
  return {{"order", v.order}, {"verdict", to_string(v.verdict)}, {"N", v.N}, {"series", reals(v.series)},
          {"noise", reals(v.noise)}};
}

json to_json(const DecompositionReport& r) {
  return {{"v", r.v},
          {"eps0", r.eps0},
          {"r", r.r},
          {"r_requested", r.r_requested},
          {"N", r.N},
          {"nu", r.nu},
          {"regime", to_string(r.regime)},
          {"direct_volume", to_json(r.direct_volume)},
          {"excised_volume", to_json(r.excised_volume)},
          {"topo_term", real_or_null(r.topo_term)},
          {"cylinder_mc_total", to_json(r.cylinder_mc_total)},
          {"cylinder_shared", to_json(r.cylinder_shared)},
          {"residual_rel", real_or_null(r.residual_rel)},
          {"residual_stderr", real_or_null(r.residual_stderr)},
          {"residual_vs_mc_rel", real_or_null(r.residual_vs_mc_rel)},
          {"residual_vs_mc_sigma", real_or_null(r.residual_vs_mc_sigma)},
          {"S_direct", real_or_null(r.S_direct)},
          {"S_decomposed", real_or_null(r.S_decomposed)},
          {"cylinders_included", r.cylinders_included},
          {"overlap_hits", r.overlap_hits},
          {"warnings", r.warnings}};
}

json to_json(const NeighborhoodCoefficients& c) {
  json rows = json::array();
  for (std::size_t i = 0; i < c.A.size(); ++i) rows.push_back({{"index", i}, {"A", real_or_null(c.A[i])}});
  return {{"N", c.N}, {"eps0", c.eps0}, {"r", c.r}, {"A", rows}};
}

}  // namespace topothermo
