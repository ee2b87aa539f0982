#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "topothermo/measure.hpp"
#include "topothermo/morse.hpp"

namespace topothermo {

enum class EntropyEstimator { automatic, analytic, hit_or_miss };

std::string to_string(EntropyEstimator e);
EntropyEstimator entropy_estimator_from_string(const std::string& name);

struct EntropyConfig {
  SamplerConfig sampler;
  EntropyEstimator estimator = EntropyEstimator::automatic;  // analytic when the model has a closed form
  double max_rel_error = 0.1;                                 // NoisyEstimate above this stderr/mean
};

/// A finite-difference derivative on the curve's grid; NaN where the
/// stencil does not fit.
struct DerivativeSeries {
  int order = 0;
  std::vector<double> value;
  std::vector<double> noise;       // propagated 1σ Monte Carlo error
  std::vector<double> truncation;  // |D_h − D_2h|/3, NaN where the doubled stencil does not fit
};

struct EntropyCurve {
  std::size_t N = 0;
  std::vector<double> vbar;  // uniform, strictly increasing
  std::vector<double> S;     // (1/N) log M(N·v̄)
  std::vector<double> stderr_S;
  std::vector<double> hit_fraction;  // hit-or-miss only: shared-sample fractions, for covariances
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  EstimatorKind kind = EstimatorKind::hit_or_miss;
  std::array<DerivativeSeries, 4> dS;  // orders 1..4
  std::vector<bool> in_band;
};

/// S(v̄) = (1/N) log vol{V ≤ N v̄}. Hit-or-miss curves reuse one sample set
/// for all grid points. Throws Errc::zero_volume / Errc::noisy_estimate.
EntropyCurve entropy_curve(const PotentialModel& model, const std::vector<double>& vbar_grid,
                           const EntropyConfig& config = {});

/// Central stencils on the uniform grid: 3-point for k = 1, 2 and 5-point
/// for k = 3, 4. Noise is propagated with the covariance of nested
/// hit-or-miss counts when the curve shares samples. Throws
/// Errc::grid_too_coarse when the grid is shorter than the stencil or noise
/// exceeds the signal (median σ > median |D|).
DerivativeSeries fd_derivatives(const EntropyCurve& curve, int order);

/// Marks grid points whose level N·v̄ lies within ε₀ of a critical value.
void annotate_bands(EntropyCurve& curve, const CriticalCatalog& catalog, double eps0);

struct ScalingRow {
  std::size_t N = 0;
  std::array<double, 4> sup{};        // sup over the window of |dS[k]|
  std::array<double, 4> sup_noise{};  // σ of the maximizing point
};

struct ScalingReport {
  std::vector<ScalingRow> rows;  // one per N, in N_list order
  std::array<double, 2> window{};
  std::array<bool, 4> growth_flags{};
  std::vector<EntropyCurve> curves;
};

using ModelFamily = std::function<PotentialModel(std::size_t N)>;

/// Entropy curves for each N on a common grid over `window` (`points` grid
/// points) and the sup-norms of their derivatives.
ScalingReport scaling_scan(const ModelFamily& family, const std::vector<std::size_t>& N_list,
                           std::array<double, 2> window, std::size_t points, const EntropyConfig& config = {});

enum class Verdict { no_growth, growth_detected, inconclusive };
std::string to_string(Verdict v);

struct TransitionVerdict {
  int order = 0;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::size_t> N;
  std::vector<double> series;
  std::vector<double> noise;
};

/// Finite-N trend test on sup|dS[k]|, k = 3, 4:
///   growth_detected  every consecutive increment exceeds 3 combined σ and
///                    the total rise exceeds 10%;
///   no_growth        last ≤ 1.1·first + 3σ and 3σ_max ≤ 0.1·mean;
///   inconclusive     otherwise.
std::vector<TransitionVerdict> detect_transition(const ScalingReport& report);

/// Per-order growth flag (the growth_detected rule above) for one series.
Verdict classify_trend(const std::vector<double>& series, const std::vector<double>& noise);

/// CSV: vbar,S,stderr_S,dS1,dS2,dS3,dS4,in_band with '#' comment lines first.
void write_entropy_csv(std::ostream& os, const EntropyCurve& curve, const std::vector<std::string>& comments);

}  // namespace topothermo
