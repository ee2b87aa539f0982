#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "topothermo/errors.hpp"
#include "topothermo/morse.hpp"
#include "topothermo/neckgeom.hpp"

using namespace topothermo;

namespace {

constexpr double kXis[] = {0.5, 0.1, 0.01, -0.5, -0.1, -0.01};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_SUITE("neckgeom") {

// Reference values: tests/oracles/f_oracle.py (mpmath, 40 digits).
TEST_CASE("F against the high-precision oracle") {
  CHECK(rel(eval_F(-0.5, 1, 4, 1), 0.23816093159236233822) < 1e-12);
  CHECK(rel(eval_F(0.5, 2, 4, 1), 0.39038820320220756873) < 1e-12);
  CHECK(rel(eval_F(0.3, 3, 5, 1), 0.26639450458974464138) < 1e-12);
  CHECK(rel(eval_F(0.2, 1, 3, 1), 0.95130834229081005259) < 1e-12);
  CHECK(rel(eval_F_recursive(-0.1, 5, 12, 1), 0.093765442973438486155) < 1e-12);
  CHECK(rel(eval_F_recursive(0.01, 7, 15, 1), 0.077149302437758367546) < 1e-12);
  CHECK(rel(eval_F_elementary(0.5, 4, 9, 1), 0.15907682827382238114) < 1e-12);
  CHECK(rel(eval_F(-0.3, 2, 3, 0.5), 0.60993059067858492922) < 1e-12);
}

TEST_CASE("alpha beta") {
  const auto p = alpha_beta(0.5, 1.0);
  CHECK(p.alpha == doctest::Approx(0.780776406404415).epsilon(1e-14));
  CHECK(p.beta == doctest::Approx(1.13171392427787).epsilon(1e-14));
  const auto m = alpha_beta(-0.5, 1.0);
  CHECK(m.alpha == doctest::Approx(1.28077640640442).epsilon(1e-14));
  CHECK(m.beta == doctest::Approx(0.883615530875513).epsilon(1e-14));
  // α·β² = r² without cancellation, even for |ξ| ≫ r
  for (double xi : {1e6, -1e6, 1e-9, -1e-9, 3.0}) {
    const auto ab = alpha_beta(xi, 0.3);
    CHECK(ab.alpha * ab.beta * ab.beta == doctest::Approx(0.09).epsilon(1e-13));
    CHECK(ab.beta * ab.beta - ab.alpha == doctest::Approx(xi).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("recursion and elementary forms agree with quadrature") {
  for (int k = 1; k <= 9; k += 2)
    for (int N = std::max(3, k + 1); N <= 20; ++N)
      for (double xi : kXis) {
        CAPTURE(k);
        CAPTURE(N);
        CAPTURE(xi);
        CHECK(rel(eval_F_recursive(xi, k, N, 1.0), eval_F(xi, k, N, 1.0)) < 1e-10);
      }
  for (int k = 2; k <= 18; k += 2)
    for (int N = k + 1; N <= 20; ++N)
      for (double xi : kXis) CHECK(rel(eval_F_elementary(xi, k, N, 1.0), eval_F(xi, k, N, 1.0)) < 1e-10);
}

TEST_CASE("xi = 0 closed form r^{(N-2)/2}/(N-2)") {
  for (double r : {1.0, 0.3})
    for (int N = 3; N <= 20; ++N)
      for (int k = 1; k < N; ++k) {
        const double expect = std::pow(r, 0.5 * (N - 2)) / (N - 2);
        CHECK(std::abs(eval_F(0.0, k, N, r) - expect) <= 1e-12 * std::max(1.0, expect));
        const double alt = k % 2 ? eval_F_recursive(0.0, k, N, r) : eval_F_elementary(0.0, k, N, r);
        CHECK(std::abs(alt - expect) <= 1e-12 * std::max(1.0, expect));
      }
}

TEST_CASE("continuity through xi = 0") {
  // |F(±δ) − F(0)| = O(√δ) at worst (k = 1, N = 3); O(δ) elsewhere
  for (int N = 3; N <= 12; ++N)
    for (int k = 1; k < N; ++k)
      for (double d : {1e-8, 1e-12}) {
        const double f0 = eval_F(0.0, k, N, 1.0);
        CHECK(std::abs(eval_F(d, k, N, 1.0) - f0) < 10.0 * std::sqrt(d));
        CHECK(std::abs(eval_F(-d, k, N, 1.0) - f0) < 10.0 * std::sqrt(d));
      }
}

TEST_CASE("symmetry k <-> N-k under xi -> -xi") {
  // swapping the roles of X and Y mirrors the slice density
  for (int N : {3, 4, 6, 9})
    for (int k = 1; k < N; ++k)
      for (double xi : kXis)
        CHECK(slice_density(xi, k, N, 1.0) == doctest::Approx(slice_density(-xi, N - k, N, 1.0)).epsilon(1e-11));
}

TEST_CASE("coefficients A and B") {
  CHECK(rel(coefficient_A(4, 2, 0.1, 1.0), 1.9253950170957570169) < 1e-11);
  CHECK(rel(coefficient_A(4, 1, 0.1, 1.0), 1.2566370614359173651) < 1e-11);
  CHECK(rel(coefficient_A(4, 3, 0.1, 1.0), 1.2566370614359173651) < 1e-11);
  CHECK(rel(coefficient_A(3, 1, 0.2, 1.0), 2.1396625785988758376) < 1e-11);
  CHECK(rel(coefficient_A(2, 1, 0.1, 1.0), 0.93781753407517583005) < 1e-10);
  CHECK(rel(coefficient_B(3, 1, 0.05, 0.2, 1.0, 1.0), 1.2261032719782728589) < 1e-11);
  // edges: ball volume Surf(N)/N·ε₀^{N/2}
  CHECK(coefficient_A(3, 0, 0.1, 1.0) == doctest::Approx(4.0 * std::numbers::pi / 3.0 * std::pow(0.1, 1.5)));
  CHECK(coefficient_A(3, 3, 0.1, 1.0) == doctest::Approx(coefficient_A(3, 0, 0.1, 1.0)));
  // B runs from 0 at −ε₀ to J·A at +ε₀ and is non-decreasing
  for (int N : {2, 3, 4})
    for (int i = 0; i <= N; ++i) {
      CHECK(coefficient_B(N, i, -0.1, 0.1, 1.0, 2.0) == doctest::Approx(0.0));
      CHECK(coefficient_B(N, i, 0.1, 0.1, 1.0, 2.0) == doctest::Approx(2.0 * coefficient_A(N, i, 0.1, 1.0)));
      double prev = 0.0;
      for (double dv = -0.1; dv <= 0.1; dv += 0.01) {
        const double b = coefficient_B(N, i, dv, 0.1, 1.0, 1.0);
        CHECK(b >= prev - 1e-14);
        prev = b;
      }
    }
  CHECK_THROWS_AS(coefficient_B(3, 1, 0.2, 0.1, 1.0, 1.0), Error);
}

TEST_CASE("sphere surfaces") {
  CHECK(sphere_surface(1) == doctest::Approx(2.0));
  CHECK(sphere_surface(2) == doctest::Approx(2 * std::numbers::pi));
  CHECK(sphere_surface(3) == doctest::Approx(4 * std::numbers::pi));
  CHECK(sphere_surface(4) == doctest::Approx(2 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("topological term: plateau and band join continuously") {
  const auto dw = make_builtin({ModelKind::uncoupled_double_well, 2, {}});
  SearchConfig sc;
  sc.seed = 1;
  const auto cat = find_critical_points(dw, 0.5, sc);
  const double eps0 = 0.1;
  const auto coeffs = neighborhood_coefficients(2, eps0, 0.2);
  for (double vc : cat.critical_values) {
    const double edge = vc + eps0;
    CHECK(topological_term(cat, coeffs, edge - 1e-12) == doctest::Approx(topological_term(cat, coeffs, edge + 1e-12)).epsilon(1e-9));
  }
  // well above all levels: Σ A_i g_i μ_i
  const auto g = g_weights(cat, 0.5 - eps0);
  double plateau = 0.0;
  const auto mu = multiplicities_below(cat, 0.5 - eps0);
  for (int i = 0; i <= 2; ++i)
    if (g[static_cast<std::size_t>(i)]) plateau += coeffs.A[static_cast<std::size_t>(i)] * *g[static_cast<std::size_t>(i)] * static_cast<double>(mu[static_cast<std::size_t>(i)]);
  CHECK(topological_term(cat, coeffs, 0.5) == doctest::Approx(plateau).epsilon(1e-12));
  // per-point sum equals the aggregate
  double sum = 0.0;
  for (const auto& p : cat.points) sum += cylinder_volume(p, 2, 0.03, eps0, 0.2);
  CHECK(topological_term(cat, coeffs, 0.03) == doctest::Approx(sum).epsilon(1e-12));
  CHECK_THROWS_AS(topological_term(cat, coeffs, 0.7), Error);
  CHECK(admissible_r(cat, 1.0) == doctest::Approx(0.4));
  CHECK(admissible_r(cat, 0.1) == doctest::Approx(0.1));
}

}
