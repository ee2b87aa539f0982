#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topothermo/dsl.hpp"

namespace topothermo {

struct Interval {
  double lo;
  double hi;

  [[nodiscard]] double width() const { return hi - lo; }
};

/// Value, gradient and Hessian of V_N. Implementations are pure and safe for
/// concurrent use.
class Evaluator {
public:
  virtual ~Evaluator() = default;
  virtual double value(std::span<const double> q) const = 0;
  virtual void gradient(std::span<const double> q, std::span<double> g) const = 0;
  virtual void hessian(std::span<const double> q, Eigen::Ref<Eigen::MatrixXd> h) const = 0;
};

enum class ModelKind { harmonic, uncoupled_double_well, lattice_phi4_1d, xy_chain_1d, dsl, perturbed };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct BuiltinModelSpec {
  ModelKind kind;
  std::size_t N;
  std::map<std::string, double> parameters;
};

/// An evaluatable potential together with its sampling box and metadata.
///
/// The box stands in for the confining region: Monte Carlo estimators sample
/// it, the critical-point finder draws its starts from it, and the checked
/// evaluation functions reject points outside it.
class PotentialModel {
public:
  PotentialModel(std::shared_ptr<const Evaluator> evaluator, std::size_t dimension, std::vector<Interval> box,
                 bool periodic, ModelKind kind, nlohmann::json description);

  [[nodiscard]] std::size_t dimension() const { return dimension_; }
  [[nodiscard]] const std::vector<Interval>& domain_box() const { return box_; }
  [[nodiscard]] bool periodic() const { return periodic_; }
  [[nodiscard]] ModelKind kind() const { return kind_; }
  [[nodiscard]] double box_volume() const;
  [[nodiscard]] bool contains(std::span<const double> q) const;

  /// JSON form {kind, N, parameters, domain_box, ...}; round-trips through model_from_json.
  [[nodiscard]] const nlohmann::json& description() const { return description_; }

  // Unchecked evaluation for hot loops; callers guarantee q has N entries.
  [[nodiscard]] double value(std::span<const double> q) const { return evaluator_->value(q); }
  void gradient(std::span<const double> q, std::span<double> g) const { evaluator_->gradient(q, g); }
  void hessian(std::span<const double> q, Eigen::Ref<Eigen::MatrixXd> h) const { evaluator_->hessian(q, h); }

  [[nodiscard]] const std::shared_ptr<const Evaluator>& evaluator_ptr() const { return evaluator_; }

private:
  std::shared_ptr<const Evaluator> evaluator_;
  std::size_t dimension_;
  std::vector<Interval> box_;
  bool periodic_;
  ModelKind kind_;
  nlohmann::json description_;
};

/// Built-in catalog:
///   harmonic               V = Σ q_i²
///   uncoupled_double_well  V = Σ (q_i⁴/4 − q_i²/2)
///   lattice_phi4_1d        V = Σ (q_i⁴/4 − q_i²/2) + (J/2) Σ (q_{i+1} − q_i)²   (periodic)
///   xy_chain_1d            V = Σ [1 − cos(q_{i+1} − q_i)] + h Σ [1 − cos q_i]  (periodic, angles)
PotentialModel make_builtin(const BuiltinModelSpec& spec, std::optional<std::vector<Interval>> box = std::nullopt);

/// DSL-defined potential; derivatives by forward-mode dual numbers.
PotentialModel make_dsl_model(const std::string& source, std::size_t N, const dsl::ParameterSet& parameters = {},
                              std::optional<std::vector<Interval>> box = std::nullopt);

PotentialModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const PotentialModel& model);

/// Stable 64-bit FNV-1a hash of the model's JSON description.
std::uint64_t model_hash(const PotentialModel& model);
std::uint64_t fnv1a64(std::string_view bytes);

/// Checked evaluation: throws Errc::domain_error outside the box and
/// Errc::non_finite when the result overflows.
double eval_potential(const PotentialModel& model, std::span<const double> q);
Eigen::VectorXd eval_gradient(const PotentialModel& model, std::span<const double> q);
Eigen::MatrixXd eval_hessian(const PotentialModel& model, std::span<const double> q);

/// Closed-form sub-level volume vol{V ≤ v} when the model has one
/// (harmonic only); the box is ignored.
std::optional<double> analytic_sublevel_volume(const PotentialModel& model, double v);
/// Same, as log-volume; usable at large N where the volume underflows.
std::optional<double> analytic_log_sublevel_volume(const PotentialModel& model, double v);

}  // namespace topothermo
