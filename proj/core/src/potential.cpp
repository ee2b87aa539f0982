#include "topothermo/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "topothermo/errors.hpp"

namespace topothermo {

namespace {

using Eigen::MatrixXd;

class Harmonic final : public Evaluator {
public:
  double value(std::span<const double> q) const override {
    double v = 0.0;
    for (double x : q) v += x * x;
    return v;
  }
  void gradient(std::span<const double> q, std::span<double> g) const override {
    for (std::size_t i = 0; i < q.size(); ++i) g[i] = 2.0 * q[i];
  }
  void hessian(std::span<const double> q, Eigen::Ref<MatrixXd> h) const override {
    h.setZero();
    h.diagonal().setConstant(2.0);
    (void)q;
  }
};

// Shared on-site quartic term q⁴/4 − q²/2.
struct Quartic {
  static double value(double x) { return 0.25 * x * x * x * x - 0.5 * x * x; }
  static double first(double x) { return x * x * x - x; }
  static double second(double x) { return 3.0 * x * x - 1.0; }
};

class DoubleWell final : public Evaluator {
public:
  double value(std::span<const double> q) const override {
    double v = 0.0;
    for (double x : q) v += Quartic::value(x);
    return v;
  }
  void gradient(std::span<const double> q, std::span<double> g) const override {
    for (std::size_t i = 0; i < q.size(); ++i) g[i] = Quartic::first(q[i]);
  }
  void hessian(std::span<const double> q, Eigen::Ref<MatrixXd> h) const override {
    h.setZero();
    for (std::size_t i = 0; i < q.size(); ++i) h(i, i) = Quartic::second(q[i]);
  }
};

// Periodic chain; bond b couples site b with site (b+1) mod N.
class Phi4Chain final : public Evaluator {
public:
  explicit Phi4Chain(double coupling) : j_(coupling) {}

  double value(std::span<const double> q) const override {
    const std::size_t n = q.size();
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = q[(i + 1) % n] - q[i];
      v += Quartic::value(q[i]) + 0.5 * j_ * d * d;
    }
    return v;
  }
  void gradient(std::span<const double> q, std::span<double> g) const override {
    const std::size_t n = q.size();
    for (std::size_t i = 0; i < n; ++i) g[i] = Quartic::first(q[i]);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = (i + 1) % n;
      const double d = j_ * (q[k] - q[i]);
      g[k] += d;
      g[i] -= d;
    }
  }
  void hessian(std::span<const double> q, Eigen::Ref<MatrixXd> h) const override {
    const std::size_t n = q.size();
    h.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>((i + 1) % n);
      h(a, a) += Quartic::second(q[i]) + j_;
      h(b, b) += j_;
      h(a, b) -= j_;
      h(b, a) -= j_;
    }
  }

private:
  double j_;
};

class XyChain final : public Evaluator {
public:
  explicit XyChain(double field) : h_(field) {}

  double value(std::span<const double> q) const override {
    const std::size_t n = q.size();
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += 1.0 - std::cos(q[(i + 1) % n] - q[i]) + h_ * (1.0 - std::cos(q[i]));
    return v;
  }
  void gradient(std::span<const double> q, std::span<double> g) const override {
    const std::size_t n = q.size();
    for (std::size_t i = 0; i < n; ++i) g[i] = h_ * std::sin(q[i]);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = (i + 1) % n;
      const double s = std::sin(q[k] - q[i]);
      g[k] += s;
      g[i] -= s;
    }
  }
  void hessian(std::span<const double> q, Eigen::Ref<MatrixXd> h) const override {
    const std::size_t n = q.size();
    h.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>((i + 1) % n);
      const double c = std::cos(q[(i + 1) % n] - q[i]);
      h(a, a) += c + h_ * std::cos(q[i]);
      h(b, b) += c;
      h(a, b) -= c;
      h(b, a) -= c;
    }
  }

private:
  double h_;
};

class DslEvaluator final : public Evaluator {
public:
  explicit DslEvaluator(dsl::Ast ast, dsl::ParameterSet params) : ast_(std::move(ast)), params_(std::move(params)) {}

  double value(std::span<const double> q) const override { return dsl::evaluate<double>(ast_, q, params_); }

  void gradient(std::span<const double> q, std::span<double> g) const override {
    using D = Dual<double>;
    std::vector<D> x(q.begin(), q.end());
    for (std::size_t i = 0; i < q.size(); ++i) {
      x[i].d = 1.0;
      g[i] = dsl::evaluate<D>(ast_, std::span<const D>(x), params_).d;
      x[i].d = 0.0;
    }
  }

  void hessian(std::span<const double> q, Eigen::Ref<MatrixXd> h) const override {
    using D = Dual<double>;
    using DD = Dual<D>;
    const std::size_t n = q.size();
    std::vector<DD> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = DD(D(q[k]), D(0.0));
    for (std::size_t i = 0; i < n; ++i) {
      x[i].d.v = 1.0;
      for (std::size_t j = i; j < n; ++j) {
        x[j].v.d = 1.0;
        const double hij = dsl::evaluate<DD>(ast_, std::span<const DD>(x), params_).d.d;
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = hij;
        h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = hij;
        x[j].v.d = 0.0;
      }
      x[i].d.v = 0.0;
    }
  }

private:
  dsl::Ast ast_;
  dsl::ParameterSet params_;
};

std::vector<Interval> uniform_box(std::size_t n, double lo, double hi) { return std::vector<Interval>(n, {lo, hi}); }

nlohmann::json box_to_json(const std::vector<Interval>& box) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& iv : box) arr.push_back({iv.lo, iv.hi});
  return arr;
}

std::vector<Interval> box_from_json(const nlohmann::json& j, std::size_t n) {
  std::vector<Interval> box;
  if (j.is_array() && j.size() == 2 && j[0].is_number()) {
    box = uniform_box(n, j[0].get<double>(), j[1].get<double>());
  } else if (j.is_array() && j.size() == n) {
    for (const auto& iv : j) {
      if (!iv.is_array() || iv.size() != 2) throw Error(Errc::config_error, "domain_box entries must be [lo, hi]");
      box.push_back({iv[0].get<double>(), iv[1].get<double>()});
    }
  } else {
    throw Error(Errc::config_error, "domain_box must be [lo, hi] or one [lo, hi] per coordinate");
  }
  return box;
}

void validate_box(const std::vector<Interval>& box, std::size_t n) {
  if (box.size() != n) throw Error(Errc::config_error, "domain_box has wrong dimension");
  for (const auto& iv : box)
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi))
      throw Error(Errc::config_error, "domain_box intervals must be finite with lo < hi");
}

double parameter_or(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void reject_unknown_parameters(const BuiltinModelSpec& spec, std::initializer_list<const char*> allowed) {
  for (const auto& [name, value] : spec.parameters) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || name == a;
    if (!ok) throw Error(Errc::config_error, "unknown parameter '" + name + "' for model " + to_string(spec.kind));
    if (!std::isfinite(value)) throw Error(Errc::config_error, "parameter '" + name + "' must be finite");
  }
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::harmonic: return "harmonic";
    case ModelKind::uncoupled_double_well: return "uncoupled_double_well";
    case ModelKind::lattice_phi4_1d: return "lattice_phi4_1d";
    case ModelKind::xy_chain_1d: return "xy_chain_1d";
    case ModelKind::dsl: return "dsl";
    case ModelKind::perturbed: return "perturbed";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "harmonic") return ModelKind::harmonic;
  if (name == "uncoupled_double_well" || name == "double_well") return ModelKind::uncoupled_double_well;
  if (name == "lattice_phi4_1d" || name == "phi4") return ModelKind::lattice_phi4_1d;
  if (name == "xy_chain_1d" || name == "xy") return ModelKind::xy_chain_1d;
  if (name == "dsl") return ModelKind::dsl;
  if (name == "perturbed") return ModelKind::perturbed;
  throw Error(Errc::config_error, "unknown model kind '" + name + "'");
}

PotentialModel::PotentialModel(std::shared_ptr<const Evaluator> evaluator, std::size_t dimension,
                               std::vector<Interval> box, bool periodic, ModelKind kind, nlohmann::json description)
    : evaluator_(std::move(evaluator)),
      dimension_(dimension),
      box_(std::move(box)),
      periodic_(periodic),
      kind_(kind),
      description_(std::move(description)) {
  if (dimension_ == 0) throw Error(Errc::config_error, "model dimension must be positive");
  validate_box(box_, dimension_);
  description_["domain_box"] = box_to_json(box_);
}

double PotentialModel::box_volume() const {
  double v = 1.0;
  for (const auto& iv : box_) v *= iv.width();
  return v;
}

bool PotentialModel::contains(std::span<const double> q) const {
  if (q.size() != dimension_) return false;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (!(q[i] >= box_[i].lo && q[i] <= box_[i].hi)) return false;
  return true;
}

PotentialModel make_builtin(const BuiltinModelSpec& spec, std::optional<std::vector<Interval>> box) {
  const std::size_t n = spec.N;
  if (n == 0) throw Error(Errc::config_error, "N must be positive");
  nlohmann::json desc{{"kind", to_string(spec.kind)}, {"N", n}, {"parameters", nlohmann::json::object()}};
  std::shared_ptr<const Evaluator> ev;
  bool periodic = false;
  std::vector<Interval> default_box;
  switch (spec.kind) {
    case ModelKind::harmonic:
      reject_unknown_parameters(spec, {});
      ev = std::make_shared<Harmonic>();
      default_box = uniform_box(n, -3.0, 3.0);
      desc["range"] = "on_site";
      break;
    case ModelKind::uncoupled_double_well:
      reject_unknown_parameters(spec, {});
      ev = std::make_shared<DoubleWell>();
      default_box = uniform_box(n, -2.5, 2.5);
      desc["range"] = "on_site";
      break;
    case ModelKind::lattice_phi4_1d: {
      reject_unknown_parameters(spec, {"J"});
      const double j = parameter_or(spec.parameters, "J", 1.0);
      ev = std::make_shared<Phi4Chain>(j);
      desc["parameters"]["J"] = j;
      default_box = uniform_box(n, -2.5, 2.5);
      desc["range"] = "nearest_neighbor";
      break;
    }
    case ModelKind::xy_chain_1d: {
      reject_unknown_parameters(spec, {"h"});
      const double h = parameter_or(spec.parameters, "h", 0.0);
      if (h < 0.0) throw Error(Errc::config_error, "xy_chain_1d field h must be >= 0");
      ev = std::make_shared<XyChain>(h);
      desc["parameters"]["h"] = h;
      default_box = uniform_box(n, -std::numbers::pi, std::numbers::pi);
      periodic = true;
      desc["range"] = "nearest_neighbor";
      break;
    }
    default: throw Error(Errc::config_error, "not a built-in model kind: " + to_string(spec.kind));
  }
  if (periodic && box) throw Error(Errc::config_error, "periodic models use the fixed box [-pi, pi]");
  return PotentialModel(std::move(ev), n, box.value_or(default_box), periodic, spec.kind, std::move(desc));
}

PotentialModel make_dsl_model(const std::string& source, std::size_t N, const dsl::ParameterSet& parameters,
                              std::optional<std::vector<Interval>> box) {
  for (const auto& [name, value] : parameters)
    if (!std::isfinite(value)) throw Error(Errc::config_error, "parameter '" + name + "' must be finite");
  dsl::Ast ast = dsl::parse(source, N, parameters);
  nlohmann::json desc{{"kind", "dsl"}, {"N", N}, {"source", source}, {"parameters", nlohmann::json::object()},
                      {"range", "unspecified"}};
  for (const auto& [name, value] : parameters) desc["parameters"][name] = value;
  auto ev = std::make_shared<DslEvaluator>(std::move(ast), parameters);
  return PotentialModel(std::move(ev), N, box.value_or(uniform_box(N, -3.0, 3.0)), false, ModelKind::dsl,
                        std::move(desc));
}

// Defined in morse.cpp (perturbation lives with the degeneracy machinery).
PotentialModel perturbed_from_json(const nlohmann::json& j);

PotentialModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::config_error, "model must be a JSON object");
  static const std::vector<std::string> allowed{"kind", "N", "parameters", "domain_box", "source", "range", "base",
                                                "linear"};
  for (const auto& [key, value] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw Error(Errc::config_error, "unknown key '" + key + "' in model");
  if (!j.contains("kind")) throw Error(Errc::config_error, "model requires 'kind'");
  const ModelKind kind = model_kind_from_string(j.at("kind").get<std::string>());
  if (kind == ModelKind::perturbed) return perturbed_from_json(j);
  if (!j.contains("N")) throw Error(Errc::config_error, "model requires 'N'");
  const auto n = j.at("N").get<std::size_t>();
  std::optional<std::vector<Interval>> box;
  if (j.contains("domain_box") && !(kind == ModelKind::xy_chain_1d)) box = box_from_json(j.at("domain_box"), n);
  std::map<std::string, double, std::less<>> params;
  if (j.contains("parameters"))
    for (const auto& [key, value] : j.at("parameters").items()) params[key] = value.get<double>();
  if (kind == ModelKind::dsl) {
    if (!j.contains("source")) throw Error(Errc::config_error, "dsl model requires 'source'");
    return make_dsl_model(j.at("source").get<std::string>(), n, params, box);
  }
  return make_builtin({kind, n, {params.begin(), params.end()}}, box);
}

nlohmann::json model_to_json(const PotentialModel& model) { return model.description(); }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t model_hash(const PotentialModel& model) { return fnv1a64(model.description().dump()); }

namespace {

void check_point(const PotentialModel& model, std::span<const double> q) {
  if (q.size() != model.dimension())
    throw Error(Errc::domain_error, "point has " + std::to_string(q.size()) + " coordinates, model expects " +
                                        std::to_string(model.dimension()));
  if (!model.contains(q)) throw Error(Errc::domain_error, "point lies outside domain_box");
}

}  // namespace

double eval_potential(const PotentialModel& model, std::span<const double> q) {
  check_point(model, q);
  const double v = model.value(q);
  if (!std::isfinite(v)) throw Error(Errc::non_finite, "potential is not finite at the given point");
  return v;
}

Eigen::VectorXd eval_gradient(const PotentialModel& model, std::span<const double> q) {
  check_point(model, q);
  Eigen::VectorXd g(static_cast<Eigen::Index>(q.size()));
  model.gradient(q, std::span<double>(g.data(), q.size()));
  if (!g.allFinite()) throw Error(Errc::non_finite, "gradient is not finite at the given point");
  return g;
}

Eigen::MatrixXd eval_hessian(const PotentialModel& model, std::span<const double> q) {
  check_point(model, q);
  const auto n = static_cast<Eigen::Index>(q.size());
  Eigen::MatrixXd h(n, n);
  model.hessian(q, h);
  if (!h.allFinite()) throw Error(Errc::non_finite, "Hessian is not finite at the given point");
  return h;
}

std::optional<double> analytic_log_sublevel_volume(const PotentialModel& model, double v) {
  if (model.kind() != ModelKind::harmonic) return std::nullopt;
  if (v <= 0.0) return -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(model.dimension());
  // Ball of radius sqrt(v): π^{N/2} v^{N/2} / Γ(N/2 + 1).
  return 0.5 * n * std::log(std::numbers::pi * v) - std::lgamma(0.5 * n + 1.0);
}

std::optional<double> analytic_sublevel_volume(const PotentialModel& model, double v) {
  const auto lv = analytic_log_sublevel_volume(model, v);
  if (!lv) return std::nullopt;
  return std::exp(*lv);
}

}  // namespace topothermo
