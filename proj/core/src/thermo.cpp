#include "topothermo/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "topothermo/errors.hpp"

namespace topothermo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Stencil {
  int half;                 // points on each side
  std::array<double, 5> c;  // coefficients for offsets −2..2
};

Stencil stencil_for(int order) {
  switch (order) {
    case 1: return {1, {0.0, -0.5, 0.0, 0.5, 0.0}};
    case 2: return {1, {0.0, 1.0, -2.0, 1.0, 0.0}};
    case 3: return {2, {-0.5, 1.0, 0.0, -1.0, 0.5}};
    case 4: return {2, {1.0, -4.0, 6.0, -4.0, 1.0}};
    default: throw Error(Errc::domain_error, "derivative order must be 1..4");
  }
}

// Σ c_j S_{i+j·stride} / (stride·δ)^k; NaN when out of range.
double apply(const std::vector<double>& S, const Stencil& st, std::size_t i, std::size_t stride, double step,
             int order) {
  const long span = static_cast<long>(st.half) * static_cast<long>(stride);
  const long ii = static_cast<long>(i);
  if (ii - span < 0 || ii + span >= static_cast<long>(S.size())) return kNaN;
  double sum = 0.0;
  for (int j = -2; j <= 2; ++j) {
    const double c = st.c[static_cast<std::size_t>(j + 2)];
    if (c != 0.0) sum += c * S[static_cast<std::size_t>(ii + j * static_cast<long>(stride))];
  }
  return sum / std::pow(step * static_cast<double>(stride), order);
}

double stencil_noise(const EntropyCurve& curve, const Stencil& st, std::size_t i, double step, int order) {
  const long ii = static_cast<long>(i);
  if (ii - st.half < 0 || ii + st.half >= static_cast<long>(curve.S.size())) return kNaN;
  if (curve.kind == EstimatorKind::analytic) return 0.0;
  double var = 0.0;
  if (!curve.hit_fraction.empty() && curve.n_samples > 0) {
    // Nested hit-or-miss sets: Cov(log p̂_a, log p̂_b) ≈ (1/p_max(a,b) − 1)/n.
    // For stencil weights summing to zero this reduces to Σ_j (1/p_j)(C_j² − C_{j−1}²)
    // with C_j the cumulative weights.
    double cum = 0.0, prev_sq = 0.0, total = 0.0;
    for (int j = -2; j <= 2; ++j) {
      cum += st.c[static_cast<std::size_t>(j + 2)];
      const double sq = cum * cum;
      if (sq != prev_sq) total += (1.0 / curve.hit_fraction[static_cast<std::size_t>(ii + j)] - 1.0) * (sq - prev_sq);
      prev_sq = sq;
    }
    var = std::max(total, 0.0) / static_cast<double>(curve.n_samples) /
          (static_cast<double>(curve.N) * static_cast<double>(curve.N));
  } else {
    for (int j = -2; j <= 2; ++j) {
      const double c = st.c[static_cast<std::size_t>(j + 2)];
      if (c == 0.0) continue;
      const double s = curve.stderr_S[static_cast<std::size_t>(ii + j)];
      var += c * c * s * s;
    }
  }
  return std::sqrt(var) / std::pow(step, order);
}

DerivativeSeries derivatives_unchecked(const EntropyCurve& curve, int order) {
  const Stencil st = stencil_for(order);
  const std::size_t n = curve.S.size();
  const double step = n > 1 ? curve.vbar[1] - curve.vbar[0] : 0.0;
  DerivativeSeries d;
  d.order = order;
  d.value.assign(n, kNaN);
  d.noise.assign(n, kNaN);
  d.truncation.assign(n, kNaN);
  for (std::size_t i = 0; i < n; ++i) {
    d.value[i] = apply(curve.S, st, i, 1, step, order);
    if (std::isnan(d.value[i])) continue;
    d.noise[i] = stencil_noise(curve, st, i, step, order);
    const double coarse = apply(curve.S, st, i, 2, step, order);
    if (!std::isnan(coarse)) d.truncation[i] = std::abs(d.value[i] - coarse) / 3.0;
  }
  return d;
}

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw Error(Errc::config_error, "empty v̄ grid");
  for (double x : grid)
    if (!std::isfinite(x)) throw Error(Errc::config_error, "v̄ grid must be finite");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error(Errc::config_error, "v̄ grid must be strictly increasing");
  if (grid.size() > 2) {
    const double step = grid[1] - grid[0];
    for (std::size_t i = 2; i < grid.size(); ++i)
      if (std::abs((grid[i] - grid[i - 1]) - step) > 1e-9 * std::max(1.0, std::abs(step)) + 1e-12 * std::abs(grid[i]))
        throw Error(Errc::config_error, "v̄ grid must be uniform");
  }
}

std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::string to_string(EntropyEstimator e) {
  switch (e) {
    case EntropyEstimator::automatic: return "auto";
    case EntropyEstimator::analytic: return "analytic";
    case EntropyEstimator::hit_or_miss: return "hit_or_miss";
  }
  return "unknown";
}

EntropyEstimator entropy_estimator_from_string(const std::string& name) {
  if (name == "auto") return EntropyEstimator::automatic;
  if (name == "analytic") return EntropyEstimator::analytic;
  if (name == "hit_or_miss") return EntropyEstimator::hit_or_miss;
  throw Error(Errc::config_error, "unknown estimator '" + name + "'");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::no_growth: return "no_growth";
    case Verdict::growth_detected: return "growth_detected";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

EntropyCurve entropy_curve(const PotentialModel& model, const std::vector<double>& vbar_grid,
                           const EntropyConfig& config) {
  check_grid(vbar_grid);
  const std::size_t N = model.dimension();
  const double n_d = static_cast<double>(N);
  EntropyCurve curve;
  curve.N = N;
  curve.vbar = vbar_grid;
  curve.in_band.assign(vbar_grid.size(), false);

  bool analytic = config.estimator == EntropyEstimator::analytic;
  if (config.estimator == EntropyEstimator::automatic)
    analytic = analytic_log_sublevel_volume(model, 1.0).has_value();

  if (analytic) {
    curve.kind = EstimatorKind::analytic;
    for (double vb : vbar_grid) {
      const auto lm = analytic_log_sublevel_volume(model, n_d * vb);
      if (!lm) throw Error(Errc::config_error, "model has no closed-form volume; use hit_or_miss");
      if (!std::isfinite(*lm)) throw Error(Errc::zero_volume, "zero volume at v̄=" + std::to_string(vb));
      curve.S.push_back(*lm / n_d);
      curve.stderr_S.push_back(0.0);
    }
  } else {
    curve.kind = EstimatorKind::hit_or_miss;
    curve.n_samples = config.sampler.n_samples;
    curve.seed = config.sampler.seed;
    std::vector<double> levels;
    for (double vb : vbar_grid) levels.push_back(n_d * vb);
    const auto est = estimate_sublevel_volumes(model, levels, config.sampler);
    for (std::size_t i = 0; i < est.size(); ++i) {
      if (est[i].hits == 0) throw Error(Errc::zero_volume, "no hits at v̄=" + std::to_string(vbar_grid[i]));
      const double rel = est[i].std_error / est[i].mean;
      if (rel > config.max_rel_error)
        throw Error(Errc::noisy_estimate, "relative error " + std::to_string(rel) + " at v̄=" +
                                              std::to_string(vbar_grid[i]) + "; increase n_samples");
      curve.S.push_back(std::log(est[i].mean) / n_d);
      curve.stderr_S.push_back(rel / n_d);
      curve.hit_fraction.push_back(static_cast<double>(est[i].hits) / static_cast<double>(est[i].n_samples));
    }
  }
  for (int k = 1; k <= 4; ++k) curve.dS[static_cast<std::size_t>(k - 1)] = derivatives_unchecked(curve, k);
  return curve;
}

DerivativeSeries fd_derivatives(const EntropyCurve& curve, int order) {
  const Stencil st = stencil_for(order);
  if (curve.S.size() < static_cast<std::size_t>(2 * st.half + 1))
    throw Error(Errc::grid_too_coarse, "grid has " + std::to_string(curve.S.size()) + " points; order " +
                                           std::to_string(order) + " needs " + std::to_string(2 * st.half + 1));
  DerivativeSeries d = derivatives_unchecked(curve, order);
  std::vector<double> mag, noise;
  for (std::size_t i = 0; i < d.value.size(); ++i)
    if (!std::isnan(d.value[i])) {
      mag.push_back(std::abs(d.value[i]));
      noise.push_back(d.noise[i]);
    }
  if (median_of(noise) > median_of(mag))
    throw Error(Errc::grid_too_coarse, "noise dominates the order-" + std::to_string(order) +
                                           " derivative; widen the grid step or add samples");
  return d;
}

void annotate_bands(EntropyCurve& curve, const CriticalCatalog& catalog, double eps0) {
  curve.in_band.assign(curve.vbar.size(), false);
  for (std::size_t i = 0; i < curve.vbar.size(); ++i) {
    const double v = static_cast<double>(curve.N) * curve.vbar[i];
    for (double vc : catalog.critical_values)
      if (std::abs(v - vc) < eps0) curve.in_band[i] = true;
  }
}

ScalingReport scaling_scan(const ModelFamily& family, const std::vector<std::size_t>& N_list,
                           std::array<double, 2> window, std::size_t points, const EntropyConfig& config) {
  if (N_list.empty()) throw Error(Errc::config_error, "N_list is empty");
  if (!(window[1] > window[0])) throw Error(Errc::config_error, "window must have lo < hi");
  if (points < 9) throw Error(Errc::grid_too_coarse, "scaling scan needs at least 9 grid points");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = window[0] + (window[1] - window[0]) * static_cast<double>(i) / static_cast<double>(points - 1);

  ScalingReport report;
  report.window = window;
  for (std::size_t N : N_list) {
    const PotentialModel model = family(N);
    EntropyCurve curve = entropy_curve(model, grid, config);
    ScalingRow row;
    row.N = N;
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& d = curve.dS[k];
      double best = -1.0, noise = 0.0;
      for (std::size_t i = 0; i < d.value.size(); ++i)
        if (!std::isnan(d.value[i]) && std::abs(d.value[i]) > best) {
          best = std::abs(d.value[i]);
          noise = d.noise[i];
        }
      row.sup[k] = best;
      row.sup_noise[k] = noise;
    }
    report.rows.push_back(row);
    report.curves.push_back(std::move(curve));
  }
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<double> series, noise;
    for (const auto& row : report.rows) {
      series.push_back(row.sup[k]);
      noise.push_back(row.sup_noise[k]);
    }
    report.growth_flags[k] = classify_trend(series, noise) == Verdict::growth_detected;
  }
  return report;
}

Verdict classify_trend(const std::vector<double>& series, const std::vector<double>& noise) {
  if (series.size() < 2) return Verdict::inconclusive;
  bool every_step_grows = true;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double sigma = std::hypot(noise[i], noise[i - 1]);
    if (!(series[i] - series[i - 1] > 3.0 * sigma)) every_step_grows = false;
  }
  const double first = series.front(), last = series.back();
  if (every_step_grows && last > 1.1 * first) return Verdict::growth_detected;

  double mean = 0.0, max_noise = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    mean += series[i];
    max_noise = std::max(max_noise, noise[i]);
  }
  mean /= static_cast<double>(series.size());
  const double sigma_ends = std::hypot(noise.front(), noise.back());
  if (last <= 1.1 * first + 3.0 * sigma_ends && 3.0 * max_noise <= 0.1 * mean) return Verdict::no_growth;
  return Verdict::inconclusive;
}

std::vector<TransitionVerdict> detect_transition(const ScalingReport& report) {
  std::vector<TransitionVerdict> out;
  for (int order : {3, 4}) {
    TransitionVerdict v;
    v.order = order;
    for (const auto& row : report.rows) {
      v.N.push_back(row.N);
      v.series.push_back(row.sup[static_cast<std::size_t>(order - 1)]);
      v.noise.push_back(row.sup_noise[static_cast<std::size_t>(order - 1)]);
    }
    v.verdict = classify_trend(v.series, v.noise);
    out.push_back(std::move(v));
  }
  return out;
}

void write_entropy_csv(std::ostream& os, const EntropyCurve& curve, const std::vector<std::string>& comments) {
  for (const auto& c : comments) os << "# " << c << '\n';
  os << "vbar,S,stderr_S,dS1,dS2,dS3,dS4,in_band\n";
  for (std::size_t i = 0; i < curve.vbar.size(); ++i) {
    os << fmt(curve.vbar[i]) << ',' << fmt(curve.S[i]) << ',' << fmt(curve.stderr_S[i]);
    for (const auto& d : curve.dS) os << ',' << fmt(d.value.empty() ? kNaN : d.value[i]);
    os << ',' << (curve.in_band.empty() ? 0 : static_cast<int>(curve.in_band[i])) << '\n';
  }
}

}  // namespace topothermo
