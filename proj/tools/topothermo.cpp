// topothermo: command-line front end over the core library.
//
// Every subcommand reads an optional JSON config (--config); flags
// override config keys of the same name. Results go to --output or stdout,
// errors to stderr as one JSON object. Exit codes: 0 ok, 1 internal,
// 2 config/usage/IO, 3 model or input, 4 numerical failure.

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "job.hpp"
#include "topothermo/decompose.hpp"
#include "topothermo/measure.hpp"
#include "topothermo/morse.hpp"
#include "topothermo/neckgeom.hpp"
#include "topothermo/serialize.hpp"
#include "topothermo/thermo.hpp"

#ifndef TOPOTHERMO_VERSION
#define TOPOTHERMO_VERSION "0.0.0"
#endif

using nlohmann::json;
using namespace topothermo;
using namespace topothermo::cli;

namespace {

struct Run {
  std::string command;
  json job;
  std::string hash;
  std::uint64_t seed = 0;
};

json provenance(const Run& run) {
  return {{"tool", "topothermo"},
          {"version", TOPOTHERMO_VERSION},
          {"command", run.command},
          {"config_hash", run.hash},
          {"seed", run.seed},
          {"generated_at", utc_timestamp()}};
}

void emit(const Run& run, const std::string& text) {
  const std::string path = get_text(run.job, "output", "");
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(Errc::io_error, "write to '" + path + "' failed");
}

void emit_json(const Run& run, json body) {
  body["provenance"] = provenance(run);
  emit(run, body.dump(2) + "\n");
}

std::vector<std::string> csv_comments(const Run& run, const std::string& schema) {
  return {"topothermo " + run.command + " schema=" + schema, "config_hash=" + run.hash,
          "seed=" + std::to_string(run.seed), "generated_at=" + utc_timestamp()};
}

SamplerConfig sampler_from(const Run& run) {
  SamplerConfig s;
  s.n_samples = static_cast<std::size_t>(get_int(run.job, "samples", 1'000'000));
  s.seed = run.seed;
  s.workers = static_cast<std::size_t>(get_int(run.job, "workers", 0));
  s.h = get_real(run.job, "step", 0.0);
  s.grad_floor = get_real(run.job, "grad_floor", 1e-8);
  s.batches = static_cast<std::size_t>(get_int(run.job, "batches", 20));
  if (s.n_samples == 0) throw Error(Errc::config_error, "samples must be positive");
  return s;
}

SearchConfig search_from(const Run& run) {
  SearchConfig c;
  c.starts = static_cast<std::size_t>(get_int(run.job, "starts", 0));
  c.seed = run.seed;
  c.max_iterations = static_cast<int>(get_int(run.job, "max_iterations", 100));
  c.tol_grad = get_real(run.job, "tol_grad", 1e-10);
  c.dedup_tol = get_real(run.job, "dedup_tol", 1e-6);
  c.degeneracy_threshold = get_real(run.job, "degeneracy_threshold", 1e-8);
  c.workers = static_cast<std::size_t>(get_int(run.job, "workers", 0));
  return c;
}

std::vector<OptionSpec> search_options() {
  return {{"starts", ValueKind::integer, "Newton starts (default grows with N)"},
          {"max_iterations", ValueKind::integer, "Newton iteration cap"},
          {"tol_grad", ValueKind::real, "gradient-norm convergence tolerance"},
          {"dedup_tol", ValueKind::real, "distance below which two points coincide"},
          {"degeneracy_threshold", ValueKind::real, "|eigenvalue| below which a point is degenerate"}};
}

std::vector<OptionSpec> sampler_options() {
  return {{"samples", ValueKind::integer, "Monte Carlo samples"},
          {"step", ValueKind::real, "shell half-width and derivative step"},
          {"batches", ValueKind::integer, "batches for batch-means errors"}};
}

CriticalCatalog load_catalog(const std::string& path) { return catalog_from_json(load_json_file(path)); }

/// Catalog from --catalog, or a fresh search of the job's model up to cutoff.
CriticalCatalog catalog_for(const Run& run, const PotentialModel* model, double cutoff) {
  const std::string path = get_text(run.job, "catalog", "");
  if (!path.empty()) return load_catalog(path);
  if (!model) throw Error(Errc::config_error, "need --catalog or a model to search");
  return find_critical_points(*model, cutoff, search_from(run));
}

std::vector<double> uniform_grid(double lo, double hi, std::int64_t points) {
  if (points < 2) throw Error(Errc::config_error, "grid needs at least 2 points");
  if (!(hi > lo)) throw Error(Errc::config_error, "grid upper end must exceed the lower end");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = lo + step * static_cast<double>(i);
  g.back() = hi;
  return g;
}

// --- subcommands ------------------------------------------------------------

void cmd_critpoints(const Run& run) {
  const auto model = build_model(run.job);
  const double vmax = require_real(run.job, "vmax");
  const auto cat = find_critical_points(model, vmax, search_from(run));
  json body = to_json(cat);
  json mu = json::array();
  for (auto m : multiplicities_below(cat, vmax)) mu.push_back(m);
  body["multiplicities"] = mu;
  body["euler_characteristic"] = euler_characteristic(cat, vmax);
  emit_json(run, body);
}

void cmd_euler_curve(const Run& run) {
  const double vmin = require_real(run.job, "vmin");
  const double vmax = require_real(run.job, "vmax");
  const auto grid = uniform_grid(vmin, vmax, get_int(run.job, "steps", 64));
  std::optional<PotentialModel> model;
  if (!run.job.contains("catalog")) model = build_model(run.job);
  const auto cat = catalog_for(run, model ? &*model : nullptr, vmax);
  std::ostringstream os;
  os.precision(17);
  for (const auto& c : csv_comments(run, "euler-csv/1")) os << "# " << c << "\n";
  os << "# catalog_v_max=" << cat.v_max << " points=" << cat.points.size() << "\n";
  os << "v,vbar,chi";
  for (std::size_t i = 0; i <= cat.N; ++i) os << ",mu" << i;
  os << ",complete\n";
  const double n = static_cast<double>(cat.N);
  for (double v : grid) {
    std::vector<long> mu(cat.N + 1, 0);
    for (const auto& p : cat.points)
      if (p.value <= v) ++mu[static_cast<std::size_t>(p.morse_index)];
    long chi = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) chi += (i % 2 == 0 ? 1 : -1) * mu[i];
    os << v << "," << v / n << "," << chi;
    for (long m : mu) os << "," << m;
    // above the catalog cutoff the counts are lower bounds
    os << "," << (v <= cat.v_max ? 1 : 0) << "\n";
  }
  emit(run, os.str());
}

void cmd_volume(const Run& run) {
  const auto model = build_model(run.job);
  const double v = require_real(run.job, "v");
  const auto cfg = sampler_from(run);
  const std::string quantity = get_text(run.job, "quantity", "volume");
  json body{{"v", v}, {"N", model.dimension()}, {"model", model.description()}, {"quantity", quantity}};
  if (quantity == "volume") {
    const auto e = estimate_sublevel_volume(model, v, cfg);
    body["estimate"] = to_json(e);
    if (const auto exact = analytic_sublevel_volume(model, v)) {
      body["analytic"] = *exact;
      body["z_score"] = e.std_error > 0.0 ? real_or_null((e.mean - *exact) / e.std_error) : json(nullptr);
    }
  } else if (quantity == "structure_integral") {
    body["estimate"] = to_json(estimate_structure_integral(model, v, cfg));
  } else {
    throw Error(Errc::config_error, "quantity must be 'volume' or 'structure_integral'");
  }
  emit_json(run, body);
}

void cmd_beta(const Run& run) {
  const auto model = build_model(run.job);
  const double v = require_real(run.job, "v");
  auto cfg = sampler_from(run);
  const auto beta = estimate_beta(model, v, cfg);
  json body{{"v", v}, {"N", model.dimension()}, {"model", model.description()}, {"beta", to_json(beta)}};

  const auto omega = estimate_structure_integral(model, v, cfg);
  const auto vol = estimate_sublevel_volume(model, v, cfg);
  const double ratio = omega.mean / vol.mean;
  const double rel = std::hypot(omega.std_error / omega.mean, vol.std_error / vol.mean);
  body["omega_over_volume"] = {{"mean", real_or_null(ratio)}, {"stderr", real_or_null(std::abs(ratio) * rel)},
                               {"h", omega.h ? json(*omega.h) : json(nullptr)}};
  const double h = cfg.h > 0.0 ? cfg.h : 0.05 * std::abs(v);
  body["dlogM_dv"] = to_json(estimate_log_volume_derivative(model, v, h, cfg));
  if (analytic_log_sublevel_volume(model, v)) {
    const double d = 1e-5 * std::max(1.0, std::abs(v));
    const auto lp = analytic_log_sublevel_volume(model, v + d);
    const auto lm = analytic_log_sublevel_volume(model, v - d);
    if (lp && lm) body["analytic"] = (*lp - *lm) / (2.0 * d);
  }
  emit_json(run, body);
}

EntropyConfig entropy_config_from(const Run& run) {
  EntropyConfig c;
  c.sampler = sampler_from(run);
  c.estimator = entropy_estimator_from_string(get_text(run.job, "estimator", "auto"));
  c.max_rel_error = get_real(run.job, "max_rel_error", 0.1);
  return c;
}

void cmd_entropy_scan(const Run& run) {
  const auto model = build_model(run.job);
  const auto grid = uniform_grid(require_real(run.job, "vbar_min"), require_real(run.job, "vbar_max"),
                                 get_int(run.job, "points", 33));
  auto curve = entropy_curve(model, grid, entropy_config_from(run));
  auto comments = csv_comments(run, "entropy-csv/1");
  comments.push_back("N=" + std::to_string(curve.N) + " estimator=" + to_string(curve.kind) +
                     " samples=" + std::to_string(curve.n_samples));
  if (run.job.contains("catalog")) {
    const auto cat = load_catalog(get_text(run.job, "catalog", ""));
    const double eps0 = run.job.contains("eps0") ? get_real(run.job, "eps0", 0.0) : compute_epsilon0(cat);
    annotate_bands(curve, cat, eps0);
    std::ostringstream e;
    e.precision(17);
    e << "eps0=" << eps0;
    comments.push_back(e.str());
  }
  std::ostringstream os;
  write_entropy_csv(os, curve, comments);
  emit(run, os.str());
}

void cmd_scaling(const Run& run) {
  std::vector<std::size_t> n_list;
  for (double n : get_reals(run.job, "N_list", {4, 8, 16, 32})) {
    if (!(n >= 1.0) || n != std::floor(n)) throw Error(Errc::config_error, "N_list entries must be positive integers");
    n_list.push_back(static_cast<std::size_t>(n));
  }
  const auto w = get_reals(run.job, "window", {0.5, 1.5});
  if (w.size() != 2) throw Error(Errc::config_error, "window expects two numbers lo,hi");
  const json job = run.job;
  const ModelFamily family = [job](std::size_t N) { return build_model(job, N); };
  const auto report = scaling_scan(family, n_list, {w[0], w[1]}, static_cast<std::size_t>(get_int(run.job, "points", 21)),
                                   entropy_config_from(run));
  json body = to_json(report);
  json verdicts = json::array();
  for (const auto& v : detect_transition(report)) verdicts.push_back(to_json(v));
  body["verdicts"] = verdicts;
  body["model"] = run.job.at("model");
  emit_json(run, body);
}

void cmd_coeffs(const Run& run) {
  const auto N = static_cast<int>(get_int(run.job, "N", 0));
  if (N < 1) throw Error(Errc::config_error, "coeffs needs --N");
  const double eps0 = require_real(run.job, "eps0");
  const double r = get_real(run.job, "r", 1.0);
  const double J = get_real(run.job, "J", 1.0);
  const auto grid = uniform_grid(-eps0, eps0, get_int(run.job, "dv_points", 11));
  json body = to_json(neighborhood_coefficients(N, eps0, r));
  body["J"] = J;
  json b = json::array();
  for (int i = 0; i <= N; ++i) {
    json rows = json::array();
    for (double dv : grid) rows.push_back({{"dv", dv}, {"B", real_or_null(coefficient_B(N, i, dv, eps0, r, J))}});
    b.push_back({{"index", i}, {"rows", rows}});
  }
  body["B"] = b;
  emit_json(run, body);
}

void cmd_verify_decomposition(const Run& run) {
  const auto model = build_model(run.job);
  const double v = require_real(run.job, "v");
  const auto eps = get_reals(run.job, "eps0", {});
  if (eps.empty()) throw Error(Errc::config_error, "verify-decomposition needs --eps0 (one or more values)");
  const double cutoff = get_real(run.job, "vmax", v + *std::max_element(eps.begin(), eps.end()));
  const auto cat = catalog_for(run, &model, cutoff);
  DecompositionConfig cfg;
  cfg.sampler = sampler_from(run);
  cfg.cylinder_samples = static_cast<std::size_t>(get_int(run.job, "cylinder_samples", 0));
  cfg.strict_overlap = get_flag(run.job, "strict_overlap");
  cfg.max_r_halvings = static_cast<int>(get_int(run.job, "max_r_halvings", 2));
  cfg.cylinder_oracle = !get_flag(run.job, "no_cylinder_oracle");
  const double r = get_real(run.job, "r", 0.3);
  const auto reports = decomposition_sweep(model, cat, v, eps, r, cfg);
  json rows = json::array(), table = json::array();
  for (const auto& rep : reports) {
    rows.push_back(to_json(rep));
    table.push_back({{"eps0", rep.eps0}, {"residual_rel", real_or_null(rep.residual_rel)},
                     {"residual_stderr", real_or_null(rep.residual_stderr)},
                     {"residual_vs_mc_rel", real_or_null(rep.residual_vs_mc_rel)}});
  }
  json body{{"v", v}, {"r_requested", r}, {"catalog_points", cat.points.size()}, {"model", model.description()},
            {"table", table}, {"reports", rows}};
  emit_json(run, body);
}

// --- option plumbing -----------------------------------------------------------

struct Subcommand {
  std::string name;
  CLI::App* app = nullptr;
  std::vector<OptionSpec> specs;
  std::map<std::string, CLI::Option*> options;
  std::deque<std::vector<std::string>> storage;
  std::deque<bool> flags;
  std::map<std::string, bool*> flag_of;
  std::string config_path;
  void (*handler)(const Run&) = nullptr;
};

std::string flag_name(const std::string& key) {
  std::string s = key;
  std::replace(s.begin(), s.end(), '_', '-');
  return "--" + s;
}

void register_options(Subcommand& sc) {
  sc.app->add_option("--config", sc.config_path, "JSON job config; flags override its keys");
  for (const auto& spec : sc.specs) {
    const std::string name = flag_name(spec.key);
    if (spec.kind == ValueKind::flag) {
      sc.flags.push_back(false);
      bool* slot = &sc.flags.back();
      sc.options[spec.key] = sc.app->add_flag(name, *slot, spec.help);
      sc.flag_of[spec.key] = slot;
      continue;
    }
    auto& slot = sc.storage.emplace_back();
    CLI::Option* opt = sc.app->add_option(name, slot, spec.help);
    switch (spec.kind) {
      case ValueKind::reals:
      case ValueKind::integers: opt->delimiter(',')->expected(1, -1)->allow_extra_args(); break;
      case ValueKind::assignments: opt->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll); break;
      default: opt->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); break;
    }
    sc.options[spec.key] = opt;
  }
}

json job_for(Subcommand& sc) {
  json config = json::object();
  if (!sc.config_path.empty()) config = load_json_file(sc.config_path);
  std::map<std::string, std::vector<std::string>> given;
  for (const auto& spec : sc.specs) {
    CLI::Option* opt = sc.options.at(spec.key);
    if (opt->count() == 0) continue;
    given[spec.key] = spec.kind == ValueKind::flag ? std::vector<std::string>{"true"} : opt->as<std::vector<std::string>>();
  }
  return merge_job(config, sc.specs, given);
}

std::vector<OptionSpec> concat(std::initializer_list<std::vector<OptionSpec>> parts) {
  std::vector<OptionSpec> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

void print_error(const std::string& name, const std::string& message, const std::string& command,
                 const json& extra = json::object()) {
  json e{{"error", name}, {"message", message}, {"command", command}};
  e.update(extra);
  std::cerr << e.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"topothermo: configuration-space topology and microcanonical entropy"};
  app.set_version_flag("--version", std::string("topothermo ") + TOPOTHERMO_VERSION);
  app.require_subcommand(1);

  const auto model = model_options();
  const auto common = common_options();
  std::deque<Subcommand> subs;
  auto add = [&](const std::string& name, const std::string& help, std::vector<OptionSpec> specs,
                 void (*handler)(const Run&)) {
    auto& sc = subs.emplace_back();
    sc.name = name;
    sc.app = app.add_subcommand(name, help);
    sc.specs = std::move(specs);
    sc.handler = handler;
    register_options(sc);
  };

  add("critpoints", "locate and classify critical points below a cutoff (catalog JSON)",
      concat({model, common, search_options(), {{"vmax", ValueKind::real, "energy cutoff"}}}), cmd_critpoints);
  add("euler-curve", "Morse multiplicities and Euler characteristic on a level grid (CSV)",
      concat({model, common, search_options(),
              {{"catalog", ValueKind::text, "catalog JSON from critpoints"},
               {"vmin", ValueKind::real, "lowest level"},
               {"vmax", ValueKind::real, "highest level"},
               {"steps", ValueKind::integer, "grid points (default 64)"}}}),
      cmd_euler_curve);
  add("volume", "Monte Carlo sub-level volume or structure integral (JSON)",
      concat({model, common, sampler_options(),
              {{"v", ValueKind::real, "level"},
               {"quantity", ValueKind::text, "volume | structure_integral"}}}),
      cmd_volume);
  add("beta", "inverse configurational temperature three ways (JSON)",
      concat({model, common, sampler_options(),
              {{"v", ValueKind::real, "level"}, {"grad_floor", ValueKind::real, "near-critical exclusion floor"}}}),
      cmd_beta);
  add("entropy-scan", "entropy curve and finite-difference derivatives (CSV)",
      concat({model, common, sampler_options(),
              {{"vbar_min", ValueKind::real, "lowest energy per degree of freedom"},
               {"vbar_max", ValueKind::real, "highest energy per degree of freedom"},
               {"points", ValueKind::integer, "grid points (default 33)"},
               {"estimator", ValueKind::text, "auto | analytic | hit_or_miss"},
               {"max_rel_error", ValueKind::real, "largest accepted stderr/mean per point"},
               {"catalog", ValueKind::text, "catalog JSON for critical-band flags"},
               {"eps0", ValueKind::real, "band half-width (default from the catalog)"}}}),
      cmd_entropy_scan);
  add("scaling", "sup-norms of entropy derivatives across N and transition verdicts (JSON)",
      concat({model, common, sampler_options(),
              {{"N_list", ValueKind::integers, "system sizes"},
               {"window", ValueKind::reals, "v̄ window lo,hi"},
               {"points", ValueKind::integer, "grid points (default 21)"},
               {"estimator", ValueKind::text, "auto | analytic | hit_or_miss"},
               {"max_rel_error", ValueKind::real, "largest accepted stderr/mean per point"}}}),
      cmd_scaling);
  add("coeffs", "neighborhood coefficients A and B tables (JSON)",
      concat({common,
              {{"N", ValueKind::integer, "dimension"},
               {"eps0", ValueKind::real, "band half-width"},
               {"r", ValueKind::real, "wall parameter (default 1)"},
               {"J", ValueKind::real, "Jacobian factor for B (default 1)"},
               {"dv_points", ValueKind::integer, "Δv grid points over [−ε₀, ε₀] (default 11)"}}}),
      cmd_coeffs);
  add("verify-decomposition", "volume decomposition residuals over an ε₀ sweep (JSON)",
      concat({model, common, sampler_options(), search_options(),
              {{"catalog", ValueKind::text, "catalog JSON (default: search the model)"},
               {"vmax", ValueKind::real, "search cutoff (default v + max ε₀)"},
               {"v", ValueKind::real, "level"},
               {"eps0", ValueKind::reals, "band half-widths"},
               {"r", ValueKind::real, "wall parameter (default 0.3)"},
               {"cylinder_samples", ValueKind::integer, "samples per pseudo-cylinder oracle"},
               {"max_r_halvings", ValueKind::integer, "r halvings allowed while cylinders overlap"},
               {"strict_overlap", ValueKind::flag, "fail instead of warning on overlap"},
               {"no_cylinder_oracle", ValueKind::flag, "skip the per-cylinder Monte Carlo check"}}}),
      cmd_verify_decomposition);

  std::string command = "topothermo";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    for (auto* s : app.get_subcommands()) command = s->get_name();
    print_error("ConfigError", e.what(), command);
    return kExitUsage;
  }

  for (auto& sc : subs) {
    if (!sc.app->parsed()) continue;
    command = sc.name;
    try {
      Run run;
      run.command = sc.name;
      run.job = job_for(sc);
      run.hash = config_hash(run.job);
      run.seed = static_cast<std::uint64_t>(get_int(run.job, "seed", 0));
      sc.handler(run);
      return kExitOk;
    } catch (const ParseError& e) {
      print_error(std::string(errc_name(e.code())), e.message(), command, {{"line", e.line()}, {"column", e.column()}});
      return exit_code(e.code());
    } catch (const Error& e) {
      print_error(std::string(errc_name(e.code())), e.what(), command);
      return exit_code(e.code());
    } catch (const json::exception& e) {
      print_error("ConfigError", e.what(), command);
      return kExitUsage;
    } catch (const std::exception& e) {
      print_error("InternalError", e.what(), command);
      return kExitInternal;
    }
  }
  return kExitUsage;
}
