#include "topothermo/morse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "topothermo/errors.hpp"
#include "topothermo/parallel.hpp"
#include "topothermo/rng.hpp"

namespace topothermo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double x) { return x - kTwoPi * std::floor((x + std::numbers::pi) / kTwoPi); }

struct StartOutcome {
  enum class Status { converged, no_convergence, outside_box, above_cutoff } status;
  std::vector<double> coords;
  double value = 0.0;
};

StartOutcome newton_from(const PotentialModel& model, std::vector<double> x, double v_max, const SearchConfig& cfg) {
  const std::size_t n = model.dimension();
  const auto ni = static_cast<Eigen::Index>(n);
  const auto& box = model.domain_box();
  double diameter = 0.0;
  for (const auto& iv : box) diameter += iv.width() * iv.width();
  diameter = std::sqrt(diameter);

  Eigen::VectorXd g(ni);
  Eigen::MatrixXd h(ni, ni);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ni);
  for (int it = 0; it <= cfg.max_iterations; ++it) {
    model.gradient(x, std::span<double>(g.data(), n));
    if (!g.allFinite()) return {StartOutcome::Status::no_convergence, {}, 0.0};
    if (g.norm() <= cfg.tol_grad) {
      if (!model.periodic() && !model.contains(x)) return {StartOutcome::Status::outside_box, {}, 0.0};
      const double v = model.value(x);
      if (v > v_max) return {StartOutcome::Status::above_cutoff, {}, v};
      return {StartOutcome::Status::converged, std::move(x), v};
    }
    if (it == cfg.max_iterations) break;
    model.hessian(x, h);
    eig.compute(h);
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const double scale = lam.cwiseAbs().maxCoeff();
    Eigen::VectorXd coef = eig.eigenvectors().transpose() * g;
    for (Eigen::Index l = 0; l < ni; ++l) coef(l) = std::abs(lam(l)) > 1e-12 * scale ? -coef(l) / lam(l) : 0.0;
    Eigen::VectorXd step = eig.eigenvectors() * coef;
    const double len = step.norm();
    if (!std::isfinite(len)) return {StartOutcome::Status::no_convergence, {}, 0.0};
    if (len > 0.5 * diameter) step *= 0.5 * diameter / len;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step(static_cast<Eigen::Index>(i));
      if (model.periodic()) x[i] = wrap_angle(x[i]);
    }
    if (!model.periodic()) {
      // Iterates that wander far outside the box are abandoned.
      for (std::size_t i = 0; i < n; ++i)
        if (x[i] < box[i].lo - box[i].width() || x[i] > box[i].hi + box[i].width())
          return {StartOutcome::Status::outside_box, {}, 0.0};
    }
  }
  return {StartOutcome::Status::no_convergence, {}, 0.0};
}

double distance(std::span<const double> a, std::span<const double> b, bool periodic) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = b[i] - a[i];
    if (periodic) d = wrap_angle(d);
    s += d * d;
  }
  return std::sqrt(s);
}

bool coords_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Linear (or, on the torus, sinusoidal) tilt added to a base model.
class TiltedEvaluator final : public Evaluator {
public:
  TiltedEvaluator(std::shared_ptr<const Evaluator> base, std::vector<double> a, bool periodic)
      : base_(std::move(base)), a_(std::move(a)), periodic_(periodic) {}

  double value(std::span<const double> q) const override {
    double v = base_->value(q);
    for (std::size_t i = 0; i < q.size(); ++i) v += a_[i] * (periodic_ ? std::sin(q[i]) : q[i]);
    return v;
  }
  void gradient(std::span<const double> q, std::span<double> g) const override {
    base_->gradient(q, g);
    for (std::size_t i = 0; i < q.size(); ++i) g[i] += periodic_ ? a_[i] * std::cos(q[i]) : a_[i];
  }
  void hessian(std::span<const double> q, Eigen::Ref<Eigen::MatrixXd> h) const override {
    base_->hessian(q, h);
    if (periodic_)
      for (std::size_t i = 0; i < q.size(); ++i)
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) -= a_[i] * std::sin(q[i]);
  }

private:
  std::shared_ptr<const Evaluator> base_;
  std::vector<double> a_;
  bool periodic_;
};

}  // namespace

void displacement(std::span<const double> a, std::span<const double> b, bool periodic, std::span<double> out) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = b[i] - a[i];
    out[i] = periodic ? wrap_angle(d) : d;
  }
}

std::size_t default_start_count(std::size_t N) {
  double wells = 1.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(N, 5); ++i) wells *= 3.0;
  const double starts = 200.0 * static_cast<double>(N) * wells;
  return static_cast<std::size_t>(std::min(starts, 1e6));
}

CriticalPoint classify_critical_point(const PotentialModel& model, std::span<const double> coords, double tol_grad,
                                      double degeneracy_threshold) {
  const std::size_t n = model.dimension();
  if (coords.size() != n) throw Error(Errc::domain_error, "critical point has wrong dimension");
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::VectorXd g(ni);
  model.gradient(coords, std::span<double>(g.data(), n));
  const double gnorm = g.norm();
  if (!(gnorm <= tol_grad))
    throw Error(Errc::not_critical, "gradient norm " + std::to_string(gnorm) + " exceeds tolerance");
  Eigen::MatrixXd h(ni, ni);
  model.hessian(coords, h);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);

  CriticalPoint p;
  p.coords.assign(coords.begin(), coords.end());
  p.value = model.value(coords);
  p.gradient_norm = gnorm;
  p.eigenvalues.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + n);
  p.eigenvectors = eig.eigenvectors();
  double log_det = 0.0, max_abs = 0.0, min_abs = std::numeric_limits<double>::infinity();
  for (double lam : p.eigenvalues) {
    if (lam < 0.0) ++p.morse_index;
    max_abs = std::max(max_abs, std::abs(lam));
    min_abs = std::min(min_abs, std::abs(lam));
    log_det += std::log(std::abs(lam));
  }
  p.degenerate = min_abs < degeneracy_threshold * max_abs || max_abs == 0.0;
  p.jacobian = std::exp(0.5 * static_cast<double>(n) * std::numbers::ln2 - 0.5 * log_det);
  return p;
}

CriticalCatalog build_catalog(std::size_t N, double v_max, bool periodic, std::vector<CriticalPoint> points) {
  std::sort(points.begin(), points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.value != b.value) return a.value < b.value;
    return coords_less(a.coords, b.coords);
  });
  CriticalCatalog cat;
  cat.N = N;
  cat.v_max = v_max;
  cat.periodic = periodic;
  cat.level_of_point.reserve(points.size());
  for (const auto& p : points) {
    const bool new_level = cat.critical_values.empty() ||
                           p.value - cat.critical_values.back() > 1e-9 * std::max(1.0, std::abs(p.value));
    if (new_level) {
      cat.critical_values.push_back(p.value);
      cat.per_level_counts.push_back(0);
    }
    ++cat.per_level_counts.back();
    cat.level_of_point.push_back(cat.critical_values.size() - 1);
  }
  cat.points = std::move(points);
  cat.stats.distinct = cat.points.size();
  return cat;
}

CriticalCatalog find_critical_points(const PotentialModel& model, double v_max, const SearchConfig& config) {
  const std::size_t n = model.dimension();
  const std::size_t starts = config.starts ? config.starts : default_start_count(n);
  const std::size_t workers = config.workers ? config.workers : default_worker_count();
  const CounterRng rng(config.seed, Stream::newton_starts);
  const auto& box = model.domain_box();

  std::vector<StartOutcome> outcomes(starts);
  parallel_chunks(chunk_count(starts), workers, [&](std::size_t chunk) {
    std::vector<double> u(n);
    const std::size_t end = std::min(starts, (chunk + 1) * kChunkSize);
    for (std::size_t s = chunk * kChunkSize; s < end; ++s) {
      rng.uniforms(s, u);
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = box[i].lo + box[i].width() * u[i];
      outcomes[s] = newton_from(model, std::move(x), v_max, config);
    }
  });

  // Sequential merge in start order keeps the catalog independent of scheduling.
  SearchStats stats;
  stats.starts = starts;
  std::vector<CriticalPoint> accepted;
  for (auto& o : outcomes) {
    switch (o.status) {
      case StartOutcome::Status::no_convergence: ++stats.no_convergence; continue;
      case StartOutcome::Status::outside_box: ++stats.outside_box; continue;
      case StartOutcome::Status::above_cutoff: ++stats.above_cutoff; continue;
      case StartOutcome::Status::converged: ++stats.converged; break;
    }
    const bool seen = std::any_of(accepted.begin(), accepted.end(), [&](const CriticalPoint& p) {
      return distance(p.coords, o.coords, model.periodic()) < config.dedup_tol;
    });
    if (!seen)
      accepted.push_back(classify_critical_point(model, o.coords, config.tol_grad, config.degeneracy_threshold));
  }

  CriticalCatalog cat = build_catalog(n, v_max, model.periodic(), std::move(accepted));
  cat.config = config;
  cat.config.starts = starts;
  stats.distinct = cat.points.size();
  cat.stats = stats;
  cat.model = model.description();
  return cat;
}

std::vector<std::size_t> multiplicities_below(const CriticalCatalog& catalog, double v) {
  if (v > catalog.v_max)
    throw Error(Errc::cutoff_exceeded,
                "query level " + std::to_string(v) + " exceeds catalog cutoff " + std::to_string(catalog.v_max));
  std::vector<std::size_t> mu(catalog.N + 1, 0);
  for (std::size_t i = 0; i < catalog.points.size(); ++i)
    if (catalog.critical_values[catalog.level_of_point[i]] <= v)
      ++mu[static_cast<std::size_t>(catalog.points[i].morse_index)];
  return mu;
}

long euler_characteristic(const CriticalCatalog& catalog, double v) {
  const auto mu = multiplicities_below(catalog, v);
  long chi = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) chi += (i % 2 == 0 ? 1 : -1) * static_cast<long>(mu[i]);
  return chi;
}

double compute_epsilon0(const CriticalCatalog& catalog, double safety) {
  const auto& cv = catalog.critical_values;
  if (cv.size() < 2) throw Error(Errc::single_level, "fewer than two distinct critical values; supply eps0");
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < cv.size(); ++j) gap = std::min(gap, cv[j] - cv[j - 1]);
  return safety * gap;
}

std::size_t level_index_nu(const CriticalCatalog& catalog, double v) {
  const auto& cv = catalog.critical_values;
  return static_cast<std::size_t>(std::upper_bound(cv.begin(), cv.end(), v) - cv.begin());
}

PotentialModel perturb_degenerate(const PotentialModel& model, std::span<const double> a) {
  if (a.size() != model.dimension()) throw Error(Errc::domain_error, "perturbation has wrong dimension");
  if (std::all_of(a.begin(), a.end(), [](double x) { return x == 0.0; })) return model;
  for (double x : a)
    if (!std::isfinite(x)) throw Error(Errc::config_error, "perturbation must be finite");
  std::vector<double> tilt(a.begin(), a.end());
  nlohmann::json desc{{"kind", "perturbed"}, {"N", model.dimension()}, {"base", model.description()},
                      {"linear", tilt}};
  auto ev = std::make_shared<TiltedEvaluator>(model.evaluator_ptr(), tilt, model.periodic());
  return PotentialModel(std::move(ev), model.dimension(), model.domain_box(), model.periodic(), ModelKind::perturbed,
                        std::move(desc));
}

PotentialModel perturbed_from_json(const nlohmann::json& j) {
  if (!j.contains("base") || !j.contains("linear"))
    throw Error(Errc::config_error, "perturbed model requires 'base' and 'linear'");
  const PotentialModel base = model_from_json(j.at("base"));
  const auto a = j.at("linear").get<std::vector<double>>();
  return perturb_degenerate(base, a);
}

double min_pairwise_distance(const CriticalCatalog& catalog) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < catalog.points.size(); ++a)
    for (std::size_t b = a + 1; b < catalog.points.size(); ++b)
      best = std::min(best, distance(catalog.points[a].coords, catalog.points[b].coords, catalog.periodic));
  return best;
}

}  // namespace topothermo
