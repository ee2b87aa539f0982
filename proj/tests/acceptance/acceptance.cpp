// Acceptance suite: one line per criterion, "[PASS]" or "[FAIL]".
// Usage: acceptance [C1 C2 ...]   (default: all criteria)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "topothermo/decompose.hpp"
#include "topothermo/errors.hpp"
#include "topothermo/measure.hpp"
#include "topothermo/morse.hpp"
#include "topothermo/neckgeom.hpp"
#include "topothermo/thermo.hpp"

using namespace topothermo;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

PotentialModel harmonic(std::size_t n, double half) {
  return make_builtin({ModelKind::harmonic, n, {}}, std::vector<Interval>(n, Interval{-half, half}));
}

PotentialModel double_well(std::size_t n) { return make_builtin({ModelKind::uncoupled_double_well, n, {}}); }

SamplerConfig sampler(std::size_t n, std::uint64_t seed) {
  SamplerConfig s;
  s.n_samples = n;
  s.seed = seed;
  return s;
}

// C1 ---------------------------------------------------------------------------

Outcome ball_volume() {
  const auto t0 = Clock::now();
  const auto e = estimate_sublevel_volume(harmonic(4, 1.2), 1.0, sampler(1'000'000, 1));
  const double secs = seconds_since(t0);
  const double exact = std::numbers::pi * std::numbers::pi / 2.0;
  const double z = std::abs(e.mean - exact) / e.std_error;
  const double rel = e.std_error / e.mean;
  return {z <= 3.0 && rel < 0.01 && secs < 10.0,
          fmt("mean=%.5f exact=%.5f |z|=%.2f sigma/mean=%.4f time=%.2fs", e.mean, exact, z, rel, secs)};
}

// C2 ---------------------------------------------------------------------------

struct Measured {
  double mean;
  double err;
  const char* name;
};

Outcome beta_triangle() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream os;
  for (std::size_t N : {4u, 8u}) {
    const auto m = harmonic(N, 1.1);
    const double v = 1.0, target = static_cast<double>(N) / (2.0 * v);
    auto cfg = sampler(4'000'000, 20 + N);
    const auto b = estimate_beta(m, v, cfg);
    cfg.h = 0.02;
    const auto omega = estimate_structure_integral(m, v, cfg);
    const auto vol = estimate_sublevel_volume(m, v, cfg);
    const double ratio = omega.mean / vol.mean;
    // the two share samples; adding relative errors in quadrature ignores their positive correlation
    const double ratio_err = ratio * std::hypot(omega.std_error / omega.mean, vol.std_error / vol.mean);
    const auto d = estimate_log_volume_derivative(m, v, 0.02, cfg);
    const Measured x[3] = {{b.mean, b.std_error, "beta"}, {ratio, ratio_err, "omega/M"}, {d.mean, d.std_error, "dlogM"}};
    os << "N=" << N << ":";
    for (const auto& a : x) {
      os << fmt(" %s=%.4f±%.4f", a.name, a.mean, a.err);
      if (std::abs(a.mean - target) > 3.0 * a.err) ok = false;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (std::abs(x[i].mean - x[j].mean) > 3.0 * std::hypot(x[i].err, x[j].err)) {
          ok = false;
          os << " [" << x[i].name << " vs " << x[j].name << " disagree]";
        }
    os << fmt(" target=%.1f; ", target);
  }
  const double secs = seconds_since(t0);
  os << fmt("time=%.1fs", secs);
  return {ok && secs < 60.0, os.str()};
}

// C3 ---------------------------------------------------------------------------

Outcome recursion_equivalence() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string where;
  std::size_t cases = 0;
  for (int k = 1; k <= 9; k += 2)
    for (int N = std::max(3, k + 1); N <= 20; ++N)
      for (double xi : {0.5, 0.1, 0.01, -0.5, -0.1, -0.01}) {
        const double q = eval_F(xi, k, N, 1.0);
        const double r = eval_F_recursive(xi, k, N, 1.0);
        const double e = std::abs(r - q) / std::abs(q);
        ++cases;
        if (e > worst) {
          worst = e;
          where = fmt("k=%d N=%d xi=%g", k, N, xi);
        }
      }
  const double secs = seconds_since(t0);
  return {worst <= 1e-10 && secs < 5.0,
          fmt("%zu cases, max rel err=%.2e at %s, time=%.2fs", cases, worst, where.c_str(), secs)};
}

// C4 ---------------------------------------------------------------------------

Outcome xi_zero_closed_form() {
  double worst = 0.0;
  std::size_t cases = 0;
  for (double r : {1.0, 0.5})
    for (int N = 3; N <= 20; ++N)
      for (int k = 1; k < N; ++k) {
        const double expect = std::pow(r, 0.5 * (N - 2)) / (N - 2);
        const double closed = k % 2 ? eval_F_recursive(0.0, k, N, r) : eval_F_elementary(0.0, k, N, r);
        worst = std::max({worst, std::abs(eval_F(0.0, k, N, r) - expect), std::abs(closed - expect)});
        ++cases;
      }
  return {worst <= 1e-12, fmt("%zu (k,N,r) cases, max abs err=%.2e", cases, worst)};
}

// C5 ---------------------------------------------------------------------------

// ½ qᵀHq + c with H = Qᵀ diag(λ) Q for a fixed rotation Q, written out in the DSL.
PotentialModel quadric(const Eigen::MatrixXd& H, double c) {
  const auto n = H.rows();
  std::ostringstream src;
  src.precision(17);
  src << c;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      const double coef = i == j ? 0.5 * H(i, i) : H(i, j);
      src << " + (" << coef << ")*q[" << i << "]*q[" << j << "]";
    }
  return make_dsl_model(src.str(), static_cast<std::size_t>(n), {},
                        std::vector<Interval>(static_cast<std::size_t>(n), Interval{-4.0, 4.0}));
}

Eigen::MatrixXd rotation(int n, int seed) {
  // Householder Q of a fixed pseudo-random matrix
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = std::sin(1.7 * (i + 1) + 2.3 * (j + 1) * (seed + 1));
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

Outcome angular_arbitration() {
  const double eps0 = 0.2, r = 0.25;
  bool ok = true;
  double worst_z = 0.0;
  std::size_t cases = 0;
  std::ostringstream failures;
  for (int N : {2, 3, 4})
    for (int k = 0; k <= N; ++k) {
      Eigen::VectorXd lam(N);
      for (int l = 0; l < N; ++l) lam(l) = (l < k ? -1.0 : 1.0) * (0.8 + 0.35 * l);
      const Eigen::MatrixXd Q = rotation(N, 10 * N + k);
      const Eigen::MatrixXd H = Q.transpose() * lam.asDiagonal() * Q;
      const auto model = quadric(H, 0.3);
      const auto p = classify_critical_point(model, std::vector<double>(static_cast<std::size_t>(N), 0.0));
      if (p.morse_index != k) {
        ok = false;
        failures << fmt(" index mismatch N=%d k=%d;", N, k);
        continue;
      }
      for (double dv : {eps0, 0.0}) {
        const double v = p.value + dv;
        const auto mc = estimate_pseudocylinder_volume(model, p, v, eps0, r,
                                                       sampler(1'000'000, static_cast<std::uint64_t>(100 * N + k)));
        const double predicted = cylinder_volume(p, N, v, eps0, r);
        // a minimum at dv=0 has an empty cylinder: both sides are exactly zero
        const bool both_empty = mc.hits == 0 && predicted == 0.0;
        const double z = both_empty ? 0.0 : std::abs(mc.mean - predicted) / mc.std_error;
        worst_z = std::max(worst_z, z);
        ++cases;
        if (!(z <= 3.0)) {
          ok = false;
          failures << fmt(" N=%d k=%d dv=%g mc=%.5f pred=%.5f z=%.2f;", N, k, dv, mc.mean, predicted, z);
        }
      }
    }
  return {ok, fmt("%zu cylinders (N=2..4, k=0..N, full and half band), max |z|=%.2f", cases, worst_z) + failures.str()};
}

// C6 ---------------------------------------------------------------------------

Outcome completeness() {
  const auto t0 = Clock::now();
  SearchConfig sc;
  sc.seed = 1;
  const auto c3 = find_critical_points(double_well(3), 0.1, sc);
  const auto mu3 = multiplicities_below(c3, 0.1);
  const auto c4 = find_critical_points(double_well(4), 0.1, sc);
  const long chi3 = euler_characteristic(c3, 0.05), chi4 = euler_characteristic(c4, 0.05);
  const double secs = seconds_since(t0);
  const bool ok = c3.points.size() == 27 && mu3 == std::vector<std::size_t>{8, 12, 6, 1} && chi3 == 1 &&
                  c4.points.size() == 81 && chi4 == 1 && secs < 30.0;
  return {ok, fmt("N=3: %zu points mu=(%zu,%zu,%zu,%zu) chi=%ld; N=4: %zu points chi=%ld; time=%.1fs", c3.points.size(),
                  mu3[0], mu3[1], mu3[2], mu3[3], chi3, c4.points.size(), chi4, secs)};
}

// C7 ---------------------------------------------------------------------------

Outcome decomposition_convergence() {
  const auto m = double_well(2);
  SearchConfig sc;
  sc.seed = 1;
  const auto cat = find_critical_points(m, 0.45, sc);
  DecompositionConfig cfg;
  cfg.sampler = sampler(2'000'000, 7);
  cfg.cylinder_samples = 400'000;
  const auto reps = decomposition_sweep(m, cat, 0.2, {0.2, 0.1, 0.05}, 0.3, cfg);
  bool ok = true;
  std::ostringstream os;
  os << fmt("r=%.3g residual_rel:", reps[0].r);
  for (std::size_t i = 0; i < reps.size(); ++i) {
    os << fmt(" eps0=%.2f→%.4f±%.4f", reps[i].eps0, reps[i].residual_rel, reps[i].residual_stderr);
    if (i && !(reps[i].residual_rel < reps[i - 1].residual_rel)) ok = false;
  }
  for (std::size_t i = 1; i < reps.size(); ++i)
    os << fmt(" drop%zu=%.1fσ", i,
              (reps[i - 1].residual_rel - reps[i].residual_rel) /
                  std::hypot(reps[i - 1].residual_stderr, reps[i].residual_stderr));
  return {ok, os.str()};
}

// C8 ---------------------------------------------------------------------------

Outcome staircase_continuity() {
  const auto m = double_well(2);
  SearchConfig sc;
  sc.seed = 1;
  const auto cat = find_critical_points(m, 0.3, sc);
  const double eps0 = 0.1;
  std::vector<double> levels(128);
  for (std::size_t i = 0; i < levels.size(); ++i) levels[i] = -0.15 + 0.3 * static_cast<double>(i) / 127.0;
  DecompositionConfig cfg;
  cfg.sampler = sampler(400'000, 11);
  cfg.cylinder_oracle = false;
  const auto reps = decomposition_scan(m, cat, levels, eps0, 0.3, cfg);
  double jump_dec = 0.0, jump_direct = 0.0;
  std::size_t in_band = 0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (reps[i].regime == Regime::band) ++in_band;
    if (!i) continue;
    jump_dec = std::max(jump_dec, std::abs(reps[i].S_decomposed - reps[i - 1].S_decomposed));
    jump_direct = std::max(jump_direct, std::abs(reps[i].S_direct - reps[i - 1].S_direct));
  }
  const double bound = 1.5 * jump_direct;
  return {jump_dec <= bound && in_band > 0 && in_band < reps.size(),
          fmt("128 levels v∈[-0.15,0.15] across v_c=0 (eps0=%.2g, r=%.3g, %zu in band): max|ΔS_dec|=%.3e, "
              "bound 1.5·max|ΔS_direct|=%.3e",
              eps0, reps[0].r, in_band, jump_dec, bound)};
}

// C9 ---------------------------------------------------------------------------

Outcome boundedness_proxy() {
  EntropyConfig cfg;
  cfg.estimator = EntropyEstimator::analytic;
  const auto report = scaling_scan([](std::size_t n) { return make_builtin({ModelKind::harmonic, n, {}}); },
                                   {4, 8, 16, 32}, {0.5, 1.5}, 21, cfg);
  bool ok = true;
  std::ostringstream os;
  for (std::size_t k = 0; k < 4; ++k) {
    double lo = report.rows[0].sup[k], hi = lo, noise = 0.0;
    for (const auto& row : report.rows) {
      lo = std::min(lo, row.sup[k]);
      hi = std::max(hi, row.sup[k]);
      noise = std::max(noise, row.sup_noise[k]);
    }
    const double spread = (hi - lo) / lo;
    if (!(hi - lo <= 0.1 * lo + 3.0 * noise)) ok = false;
    if (report.growth_flags[k]) ok = false;
    os << fmt("sup|dS%zu|=%.4f (spread %.1e) ", k + 1, hi, spread);
  }
  for (const auto& v : detect_transition(report)) {
    os << fmt("k=%d:%s ", v.order, to_string(v.verdict).c_str());
    if (v.verdict != Verdict::no_growth) ok = false;
  }
  return {ok, os.str() + "(N=4,8,16,32, v̄∈[0.5,1.5])"};
}

// C10 --------------------------------------------------------------------------

Outcome entropy_analytic() {
  const auto m = harmonic(2, 1.8);
  EntropyConfig cfg;
  cfg.estimator = EntropyEstimator::hit_or_miss;
  cfg.sampler = sampler(40'000'000, 3);
  std::vector<double> grid(11);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 0.5 + 0.1 * static_cast<double>(i);
  const auto c = entropy_curve(m, grid, cfg);
  const double s_exact = 0.5 * std::log(std::numbers::pi);
  const double zs = std::abs(c.S[0] - s_exact) / c.stderr_S[0];
  bool ok = zs <= 3.0;
  std::ostringstream os;
  os << fmt("S(0.5)=%.5f±%.5f vs %.5f (|z|=%.2f);", c.S[0], c.stderr_S[0], s_exact, zs);
  const std::size_t at = 5;  // v̄ = 1
  const double exact[3] = {0.5, -0.5, 1.0};
  for (int k = 1; k <= 3; ++k) {
    const auto d = fd_derivatives(c, k);
    const double tol = (std::isnan(d.truncation[at]) ? 0.0 : d.truncation[at]) + 3.0 * d.noise[at];
    const double err = std::abs(d.value[at] - exact[k - 1]);
    if (!(err <= tol)) ok = false;
    os << fmt(" dS%d(1)=%.4f vs %.1f (err %.2e, tol %.2e)", k, d.value[at], exact[k - 1], err, tol);
  }
  return {ok, os.str()};
}

struct Criterion {
  const char* id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"C1", "ball volume", ball_volume},
      {"C2", "beta triangle", beta_triangle},
      {"C3", "F recursion equivalence", recursion_equivalence},
      {"C4", "xi=0 closed form", xi_zero_closed_form},
      {"C5", "angular-constant arbitration", angular_arbitration},
      {"C6", "critical-point completeness", completeness},
      {"C7", "decomposition convergence", decomposition_convergence},
      {"C8", "staircase continuity", staircase_continuity},
      {"C9", "boundedness proxy", boundedness_proxy},
      {"C10", "entropy analytic check", entropy_analytic},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failed = 0, ran = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const Error& e) {
      o = {false, std::string("error ") + std::string(errc_name(e.code())) + ": " + e.what()};
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %-4s %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 && ran > 0 ? 0 : 1;
}
