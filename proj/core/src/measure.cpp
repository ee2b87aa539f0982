#include "topothermo/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "topothermo/errors.hpp"
#include "topothermo/parallel.hpp"
#include "topothermo/rng.hpp"

namespace topothermo {

namespace {

std::size_t workers_of(const SamplerConfig& c) { return c.workers ? c.workers : default_worker_count(); }

void check_config(const SamplerConfig& c) {
  if (c.n_samples == 0) throw Error(Errc::config_error, "n_samples must be at least 1");
  if (c.batches < 2) throw Error(Errc::config_error, "batches must be at least 2");
}

void check_level(double v) {
  if (!std::isfinite(v)) throw Error(Errc::domain_error, "level must be finite");
}

// Runs visit(acc, index, q) for every sample index in [0, n), q uniform in the
// box, and returns one accumulator per chunk in chunk order.
template <class Acc, class Init, class Visit>
std::vector<Acc> sample_box(const PotentialModel& model, std::size_t n, std::uint64_t seed, Stream stream,
                            std::size_t workers, Init init, Visit visit) {
  const std::size_t dim = model.dimension();
  const auto& box = model.domain_box();
  const CounterRng rng(seed, stream);
  std::vector<Acc> out(chunk_count(n));
  parallel_chunks(out.size(), workers, [&](std::size_t c) {
    Acc acc = init();
    std::vector<double> q(dim);
    const std::size_t end = std::min(n, (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i) {
      rng.uniforms(i, q);
      for (std::size_t d = 0; d < dim; ++d) q[d] = box[d].lo + box[d].width() * q[d];
      visit(acc, i, std::span<const double>(q));
    }
    out[c] = std::move(acc);
  });
  return out;
}

void probe_box_faces(const PotentialModel& model, double v, const SamplerConfig& config) {
  if (model.periodic() || config.boundary_probes == 0) return;
  const std::size_t dim = model.dimension();
  const auto& box = model.domain_box();
  const CounterRng rng(config.seed, Stream::boundary_probe);
  std::vector<double> q(dim);
  for (std::size_t j = 0; j < config.boundary_probes; ++j) {
    rng.uniforms(j, q);
    for (std::size_t d = 0; d < dim; ++d) q[d] = box[d].lo + box[d].width() * q[d];
    const std::size_t face = j % dim;
    q[face] = (j / dim) % 2 == 0 ? box[face].lo : box[face].hi;
    if (model.value(q) <= v)
      throw Error(Errc::box_too_small, "sub-level set at v=" + std::to_string(v) + " reaches the domain box face " +
                                           std::to_string(face));
  }
}

VolumeEstimate hit_or_miss(const PotentialModel& model, std::size_t hits, const SamplerConfig& config) {
  const double n = static_cast<double>(config.n_samples);
  const double p = static_cast<double>(hits) / n;
  VolumeEstimate e;
  e.mean = model.box_volume() * p;
  e.std_error = model.box_volume() * std::sqrt(p * (1.0 - p) / n);
  e.n_samples = config.n_samples;
  e.seed = config.seed;
  e.hits = hits;
  e.kind = EstimatorKind::hit_or_miss;
  return e;
}

// Hit counts for ascending thresholds, total and per batch.
struct ThresholdCounts {
  std::vector<std::size_t> total;                 // per threshold
  std::vector<std::vector<std::size_t>> batches;  // [batch][threshold]
  double v_min = std::numeric_limits<double>::infinity();
};

ThresholdCounts count_thresholds(const PotentialModel& model, std::span<const double> levels,
                                 const SamplerConfig& config) {
  const std::size_t m = levels.size();
  const std::size_t n = config.n_samples;
  const std::size_t nb = config.batches;
  struct Acc {
    std::vector<std::vector<std::size_t>> per_batch;
    double v_min;
  };
  const auto chunks = sample_box<Acc>(
      model, n, config.seed, Stream::volume, workers_of(config),
      [&] { return Acc{std::vector<std::vector<std::size_t>>(nb, std::vector<std::size_t>(m, 0)),
                       std::numeric_limits<double>::infinity()}; },
      [&](Acc& acc, std::size_t i, std::span<const double> q) {
        const double val = model.value(q);
        acc.v_min = std::min(acc.v_min, val);
        auto& row = acc.per_batch[i * nb / n];
        // levels are ascending: the hits form a suffix
        const auto first = std::lower_bound(levels.begin(), levels.end(), val) - levels.begin();
        for (auto t = static_cast<std::size_t>(first); t < m; ++t) ++row[t];
      });
  ThresholdCounts out;
  out.total.assign(m, 0);
  out.batches.assign(nb, std::vector<std::size_t>(m, 0));
  for (const auto& acc : chunks) {
    out.v_min = std::min(out.v_min, acc.v_min);
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t t = 0; t < m; ++t) {
        out.batches[b][t] += acc.per_batch[b][t];
        out.total[t] += acc.per_batch[b][t];
      }
  }
  return out;
}

double pilot_minimum(const PotentialModel& model, const SamplerConfig& config) {
  const std::size_t n = std::min<std::size_t>(config.n_samples, std::size_t{1} << 16);
  const auto chunks = sample_box<double>(
      model, n, config.seed, Stream::volume, workers_of(config),
      [] { return std::numeric_limits<double>::infinity(); },
      [&](double& acc, std::size_t, std::span<const double> q) { acc = std::min(acc, model.value(q)); });
  return *std::min_element(chunks.begin(), chunks.end());
}

double mean_of(const std::vector<double>& xs) { return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size(); }

double batch_stderr(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / (xs.size() - 1) / xs.size());
}

}  // namespace

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::hit_or_miss: return "hit_or_miss";
    case EstimatorKind::thin_shell: return "thin_shell";
    case EstimatorKind::analytic: return "analytic";
  }
  return "unknown";
}

std::vector<VolumeEstimate> estimate_sublevel_volumes(const PotentialModel& model, std::span<const double> levels,
                                                      const SamplerConfig& config) {
  check_config(config);
  for (double v : levels) check_level(v);
  if (!std::is_sorted(levels.begin(), levels.end()))
    throw Error(Errc::domain_error, "levels must be ascending");
  if (!levels.empty()) probe_box_faces(model, levels.back(), config);
  const auto counts = count_thresholds(model, levels, config);
  std::vector<VolumeEstimate> out;
  out.reserve(levels.size());
  for (std::size_t t = 0; t < levels.size(); ++t) out.push_back(hit_or_miss(model, counts.total[t], config));
  return out;
}

VolumeEstimate estimate_sublevel_volume(const PotentialModel& model, double v, const SamplerConfig& config) {
  const double level[] = {v};
  return estimate_sublevel_volumes(model, level, config).front();
}

VolumeEstimate estimate_structure_integral(const PotentialModel& model, double v, const SamplerConfig& config) {
  check_config(config);
  check_level(v);
  double h = config.h;
  if (h < 0.0 || !std::isfinite(h)) throw Error(Errc::config_error, "shell half-width h must be positive");
  if (h == 0.0) {
    const double gap = v - pilot_minimum(model, config);
    h = gap > 0.0 ? 1e-2 * gap : 1e-2 * std::max(1.0, std::abs(v));
  }
  probe_box_faces(model, v + h, config);
  const double levels[] = {v - h, v - 0.5 * h, v + 0.5 * h, v + h};
  const auto counts = count_thresholds(model, levels, config);
  const double n = static_cast<double>(config.n_samples);
  const double box = model.box_volume();
  const std::size_t shell = counts.total[3] - counts.total[0];
  const std::size_t inner_shell = counts.total[2] - counts.total[1];
  if (shell < 10 && counts.total[3] > 0)
    throw Error(Errc::h_too_small, "only " + std::to_string(shell) + " samples in the shell of half-width " +
                                       std::to_string(h) + "; increase h or n_samples");
  const double q = static_cast<double>(shell) / n;
  const double omega_h = box * q / (2.0 * h);
  const double omega_h2 = box * static_cast<double>(inner_shell) / n / h;
  VolumeEstimate e;
  e.mean = omega_h;
  e.std_error = box * std::sqrt(q * (1.0 - q) / n) / (2.0 * h);
  e.n_samples = config.n_samples;
  e.seed = config.seed;
  e.kind = EstimatorKind::thin_shell;
  e.hits = shell;
  e.h = h;
  e.richardson = (4.0 * omega_h2 - omega_h) / 3.0;
  return e;
}

double federer_integrand(const PotentialModel& model, std::span<const double> q, double grad_floor) {
  const auto n = static_cast<Eigen::Index>(model.dimension());
  Eigen::VectorXd g(n);
  model.gradient(q, std::span<double>(g.data(), model.dimension()));
  const double g2 = g.squaredNorm();
  if (!(std::sqrt(g2) >= grad_floor))
    throw Error(Errc::near_critical, "gradient norm below floor " + std::to_string(grad_floor));
  Eigen::MatrixXd h(n, n);
  model.hessian(q, h);
  const double value = h.trace() / g2 - 2.0 * g.dot(h * g) / (g2 * g2);
  if (!std::isfinite(value)) throw Error(Errc::non_finite, "Federer integrand is not finite");
  return value;
}

BetaEstimate estimate_beta(const PotentialModel& model, double v, const SamplerConfig& config) {
  check_config(config);
  check_level(v);
  probe_box_faces(model, v, config);
  const std::size_t n = config.n_samples;
  const std::size_t nb = config.batches;
  const auto dim = static_cast<Eigen::Index>(model.dimension());
  struct Acc {
    std::vector<double> sum;
    std::vector<std::size_t> count;
    std::size_t rejected = 0;
    Eigen::VectorXd g;
    Eigen::MatrixXd h;
  };
  const double floor2 = config.grad_floor * config.grad_floor;
  const auto chunks = sample_box<Acc>(
      model, n, config.seed, Stream::volume, workers_of(config),
      [&] { return Acc{std::vector<double>(nb, 0.0), std::vector<std::size_t>(nb, 0), 0, Eigen::VectorXd(dim),
                       Eigen::MatrixXd(dim, dim)}; },
      [&](Acc& acc, std::size_t i, std::span<const double> q) {
        if (model.value(q) > v) return;
        model.gradient(q, std::span<double>(acc.g.data(), model.dimension()));
        const double g2 = acc.g.squaredNorm();
        if (!(g2 >= floor2)) {
          ++acc.rejected;
          return;
        }
        model.hessian(q, acc.h);
        const std::size_t b = i * nb / n;
        acc.sum[b] += acc.h.trace() / g2 - 2.0 * acc.g.dot(acc.h * acc.g) / (g2 * g2);
        ++acc.count[b];
      });
  std::vector<double> sum(nb, 0.0);
  std::vector<std::size_t> count(nb, 0);
  BetaEstimate out;
  for (const auto& acc : chunks) {
    out.rejected_near_critical += acc.rejected;
    for (std::size_t b = 0; b < nb; ++b) {
      sum[b] += acc.sum[b];
      count[b] += acc.count[b];
    }
  }
  out.n_samples = n;
  out.seed = config.seed;
  out.accepted = std::accumulate(count.begin(), count.end(), std::size_t{0});
  if (out.accepted == 0) throw Error(Errc::zero_volume, "no accepted samples in the sub-level set");
  out.mean = std::accumulate(sum.begin(), sum.end(), 0.0) / static_cast<double>(out.accepted);
  std::vector<double> means;
  for (std::size_t b = 0; b < nb; ++b)
    if (count[b] > 0) means.push_back(sum[b] / static_cast<double>(count[b]));
  if (means.size() < 2) throw Error(Errc::noisy_estimate, "too few populated batches for an error estimate");
  out.std_error = batch_stderr(means);
  return out;
}

DerivativeEstimate estimate_log_volume_derivative(const PotentialModel& model, double v, double h,
                                                  const SamplerConfig& config) {
  check_config(config);
  check_level(v);
  if (!(h > 0.0)) throw Error(Errc::config_error, "h must be positive");
  probe_box_faces(model, v + h, config);
  const double levels[] = {v - h, v + h};
  const auto counts = count_thresholds(model, levels, config);
  if (counts.total[0] == 0) throw Error(Errc::zero_volume, "no samples below v - h");
  auto deriv = [&](std::size_t lo, std::size_t hi) {
    return (std::log(static_cast<double>(hi)) - std::log(static_cast<double>(lo))) / (2.0 * h);
  };
  std::vector<double> per_batch;
  for (const auto& row : counts.batches) {
    if (row[0] == 0) throw Error(Errc::noisy_estimate, "empty batch below v - h; increase n_samples");
    per_batch.push_back(deriv(row[0], row[1]));
  }
  return {deriv(counts.total[0], counts.total[1]), batch_stderr(per_batch), h};
}

std::optional<VolumeEstimate> analytic_volume_estimate(const PotentialModel& model, double v) {
  const auto m = analytic_sublevel_volume(model, v);
  if (!m) return std::nullopt;
  VolumeEstimate e;
  e.mean = *m;
  e.kind = EstimatorKind::analytic;
  return e;
}

// --------------------------------------------------------------------------

PseudoCylinder::PseudoCylinder(const CriticalPoint& point, bool periodic, double eps0, double r)
    : point_(&point), periodic_(periodic), eps0_(eps0), r_(r) {
  if (!(eps0 > 0.0) || !(r > 0.0)) throw Error(Errc::domain_error, "eps0 and r must be positive");
  if (point.eigenvectors.size() == 0) throw Error(Errc::domain_error, "critical point carries no eigenvectors");
  const auto n = static_cast<Eigen::Index>(point.coords.size());
  const bool edge = point.morse_index == 0 || point.morse_index == static_cast<int>(n);
  const double extent = edge ? eps0 : 0.5 * (eps0 + std::sqrt(eps0 * eps0 + 4.0 * r * r));
  half_width_ = 1.5 * std::sqrt(extent);
  scale_.resize(n);
  for (Eigen::Index l = 0; l < n; ++l) scale_(l) = std::sqrt(0.5 * std::abs(point.eigenvalues[static_cast<std::size_t>(l)]));
}

bool PseudoCylinder::morse_coordinates(std::span<const double> q, std::span<double> x) const {
  const auto n = q.size();
  thread_local std::vector<double> d;
  d.resize(n);
  displacement(point_->coords, q, periodic_, d);
  const Eigen::Map<const Eigen::VectorXd> dv(d.data(), static_cast<Eigen::Index>(n));
  for (std::size_t l = 0; l < n; ++l) {
    const auto li = static_cast<Eigen::Index>(l);
    x[l] = scale_(li) * point_->eigenvectors.col(li).dot(dv);
    if (std::abs(x[l]) > half_width_) return false;
  }
  return true;
}

bool PseudoCylinder::contains(std::span<const double> q, double value) const {
  if (std::abs(value - point_->value) > eps0_) return false;
  thread_local std::vector<double> x;
  x.resize(q.size());
  if (!morse_coordinates(q, x)) return false;
  const auto k = static_cast<std::size_t>(point_->morse_index);
  if (k == 0 || k == q.size()) return true;
  double xx = 0.0, yy = 0.0;
  for (std::size_t l = 0; l < k; ++l) xx += x[l] * x[l];
  for (std::size_t l = k; l < q.size(); ++l) yy += x[l] * x[l];
  return xx * yy <= r_ * r_;
}

double PseudoCylinder::box_volume_q() const {
  return point_->jacobian * std::pow(2.0 * half_width_, static_cast<double>(point_->coords.size()));
}

void PseudoCylinder::to_configuration(std::span<const double> x, std::span<double> q) const {
  const auto n = static_cast<Eigen::Index>(q.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = point_->coords[static_cast<std::size_t>(i)];
    for (Eigen::Index l = 0; l < n; ++l) s += point_->eigenvectors(i, l) * x[static_cast<std::size_t>(l)] / scale_(l);
    q[static_cast<std::size_t>(i)] = s;
  }
  if (periodic_)
    for (auto& qi : q) qi -= 2.0 * std::numbers::pi * std::floor((qi + std::numbers::pi) / (2.0 * std::numbers::pi));
}

VolumeEstimate estimate_pseudocylinder_volume(const PotentialModel& model, const CriticalPoint& point, double v,
                                              double eps0, double r, const SamplerConfig& config) {
  check_config(config);
  check_level(v);
  if (point.coords.size() != model.dimension()) throw Error(Errc::domain_error, "critical point has wrong dimension");
  if (point.degenerate) throw Error(Errc::degenerate_hessian, "pseudo-cylinder of a degenerate critical point");
  const PseudoCylinder cyl(point, model.periodic(), eps0, r);
  const std::size_t dim = model.dimension();
  const std::size_t n = config.n_samples;
  const double w = cyl.half_width();
  const CounterRng rng(config.seed, Stream::cylinder);
  std::vector<std::size_t> hits(chunk_count(n), 0);
  parallel_chunks(hits.size(), workers_of(config), [&](std::size_t c) {
    std::vector<double> x(dim), q(dim);
    std::size_t local = 0;
    const std::size_t end = std::min(n, (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i) {
      rng.uniforms(i, x);
      for (auto& xi : x) xi = w * (2.0 * xi - 1.0);
      cyl.to_configuration(x, q);
      if (!model.periodic() && !model.contains(q)) continue;
      const double val = model.value(q);
      if (val <= v && cyl.contains(q, val)) ++local;
    }
    hits[c] = local;
  });
  const std::size_t total = std::accumulate(hits.begin(), hits.end(), std::size_t{0});
  const double p = static_cast<double>(total) / static_cast<double>(n);
  VolumeEstimate e;
  e.mean = cyl.box_volume_q() * p;
  e.std_error = cyl.box_volume_q() * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  e.n_samples = n;
  e.seed = config.seed;
  e.hits = total;
  return e;
}

ExcisionResult estimate_excised_volume(const PotentialModel& model, const CriticalCatalog& catalog, double v,
                                       double eps0, double r, const SamplerConfig& config) {
  check_config(config);
  check_level(v);
  probe_box_faces(model, v, config);
  std::vector<PseudoCylinder> cylinders;
  for (const auto& p : catalog.points) {
    if (!(p.value - eps0 < v)) continue;
    if (p.degenerate) throw Error(Errc::degenerate_hessian, "pseudo-cylinder of a degenerate critical point");
    cylinders.emplace_back(p, model.periodic(), eps0, r);
  }
  struct Acc {
    std::size_t direct = 0, in_cyl = 0, overlap = 0;
  };
  const auto chunks = sample_box<Acc>(
      model, config.n_samples, config.seed, Stream::volume, workers_of(config), [] { return Acc{}; },
      [&](Acc& acc, std::size_t, std::span<const double> q) {
        const double val = model.value(q);
        if (val > v) return;
        ++acc.direct;
        int inside = 0;
        for (const auto& c : cylinders)
          if (c.contains(q, val)) ++inside;
        if (inside > 0) ++acc.in_cyl;
        if (inside > 1) ++acc.overlap;
      });
  Acc total;
  for (const auto& a : chunks) {
    total.direct += a.direct;
    total.in_cyl += a.in_cyl;
    total.overlap += a.overlap;
  }
  ExcisionResult out;
  out.direct = hit_or_miss(model, total.direct, config);
  out.excised = hit_or_miss(model, total.direct - total.in_cyl, config);
  out.cylinders = hit_or_miss(model, total.in_cyl, config);
  out.overlap_hits = total.overlap;
  out.cylinders_included = cylinders.size();
  return out;
}

}  // namespace topothermo
