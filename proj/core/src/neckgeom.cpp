#include "topothermo/neckgeom.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "topothermo/errors.hpp"

namespace topothermo {

namespace {

void check_r(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(Errc::domain_error, "wall parameter r must be positive");
}

void check_eps0(double eps0) {
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) throw Error(Errc::domain_error, "eps0 must be positive");
}

void check_generic(double xi, int k, int N, double r) {
  check_r(r);
  if (!std::isfinite(xi)) throw Error(Errc::domain_error, "xi must be finite");
  if (k < 0 || k > N) throw Error(Errc::domain_error, "Morse index out of range");
  if (k == 0 || k == N) throw Error(Errc::edge_index, "index " + std::to_string(k) + " is an edge index; use eval_F_edge");
  if (N <= 2) throw Error(Errc::dimension_too_small, "generic slice integral needs N >= 3");
}

double xi_zero_value(int N, double r) {
  if (N == 2) return std::numeric_limits<double>::infinity();
  return std::pow(r, 0.5 * (N - 2)) / (N - 2);
}

// Odd k; also valid for N = 2, k = 1 at ξ ≠ 0.
double recursion_unchecked(double xi, int k, int N, double r) {
  if (xi == 0.0) return xi_zero_value(N, r);
  const auto [alpha, beta] = alpha_beta(xi, r);
  const int n = (k - 3) / 2;  // (k−2)/2 = n + ½
  const double s = n + 0.5;
  const int p = N - k - 1;
  const double sqrt_alpha = std::sqrt(alpha);

  double J = 0.0;
  int q = 0;
  if (p % 2 == 1) {
    const double lower = xi < 0.0 ? std::pow(-xi, s + 1.0) : 0.0;
    J = (std::pow(alpha, s + 1.0) - lower) / (2.0 * s + 2.0);
    q = 1;
  } else if (xi < 0.0) {
    double K = std::asinh(beta / std::sqrt(-xi));
    for (double t = 0.5; t <= s; t += 1.0) K = beta * std::pow(alpha, t) / (2.0 * t + 1.0) - 2.0 * t * xi / (2.0 * t + 1.0) * K;
    J = K;
  } else {
    const double log_term = std::log((beta + sqrt_alpha) / std::sqrt(xi));
    if (n == -1) {
      J = log_term;
    } else {
      const double b3 = beta * beta * beta;
      double H = (xi / (3.0 * b3) - 4.0 / (3.0 * beta)) * sqrt_alpha + log_term;  // H(1)
      double I = H + alpha * sqrt_alpha / (3.0 * b3);                              // I(0)
      for (int m = 1; m <= n; ++m) {
        I = std::pow(alpha, m + 1.5) / (2.0 * m * b3) - 3.0 * xi / (2.0 * m) * H;
        if (m < n) H = I - xi * H;
      }
      J = std::pow(alpha, n + 1.5) / (2.0 * (n + 1) * beta) - xi / (2.0 * (n + 1)) * I;
    }
  }
  const double a_top = std::pow(alpha, s + 1.0);
  for (q += 2; q <= p; q += 2) J = (std::pow(beta, q - 1) * a_top + (q - 1) * xi * J) / (2.0 * n + 2.0 + q);
  return J;
}

double elementary_unchecked(double xi, int k, int N, double r) {
  if (xi == 0.0) return xi_zero_value(N, r);
  const auto [alpha, beta] = alpha_beta(xi, r);
  (void)alpha;
  const int m = (k - 2) / 2;
  const int p = N - k - 1;
  const double lower = xi > 0.0 ? std::sqrt(xi) : 0.0;
  double sum = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= m; ++j) {
    const int e = p + 2 * j + 1;
    sum += binom * std::pow(-xi, m - j) * (std::pow(beta, e) - std::pow(lower, e)) / e;
    binom = binom * (m - j) / (j + 1);
  }
  return sum;
}

double analytic_F(double xi, int k, int N, double r) {
  return k % 2 == 1 ? recursion_unchecked(xi, k, N, r) : elementary_unchecked(xi, k, N, r);
}

double edge_density(double xi, int k, int N) {
  const double x = k == 0 ? xi : -xi;
  if (x <= 0.0) return 0.0;
  return 0.5 * sphere_surface(N) * std::pow(x, 0.5 * (N - 2));
}

// ∫_a^b of the edge density with a ≤ b.
double edge_integral(int N, int k, double a, double b) {
  if (k == N) {
    const double t = a;
    a = -b;
    b = -t;
  }
  a = std::max(a, 0.0);
  b = std::max(b, 0.0);
  return sphere_surface(N) / N * (std::pow(b, 0.5 * N) - std::pow(a, 0.5 * N));
}

double angular(int k, int N) { return 0.5 * sphere_surface(k) * sphere_surface(N - k); }

double generic_integral(int N, int k, double lo, double hi, double r) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [&](double xi) { return analytic_F(xi, k, N, r); };
  double total = 0.0;
  if (lo < 0.0) {
    const double top = std::min(hi, 0.0);
    if (top > lo) total += integrator.integrate(f, lo, top, 1e-13);
  }
  if (hi > 0.0) {
    const double bottom = std::max(lo, 0.0);
    if (hi > bottom) total += integrator.integrate(f, bottom, hi, 1e-13);
  }
  return angular(k, N) * total;
}

void check_slice_args(int N, int k, double r) {
  check_r(r);
  if (N < 1) throw Error(Errc::dimension_too_small, "dimension must be positive");
  if (k < 0 || k > N) throw Error(Errc::domain_error, "Morse index out of range");
}

}  // namespace

double sphere_surface(int n) {
  if (n <= 0) throw Error(Errc::domain_error, "sphere_surface needs n >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

AlphaBeta alpha_beta(double xi, double r) {
  check_r(r);
  if (!std::isfinite(xi)) throw Error(Errc::domain_error, "xi must be finite");
  const double s = std::hypot(xi, 2.0 * r);
  const double r2 = r * r;
  const double alpha = xi > 0.0 ? 2.0 * r2 / (s + xi) : 0.5 * (s - xi);
  const double beta2 = xi < 0.0 ? 2.0 * r2 / (s - xi) : 0.5 * (s + xi);
  return {alpha, std::sqrt(beta2)};
}

double eval_F(double xi, int k, int N, double r) {
  check_generic(xi, k, N, r);
  const auto [alpha, beta] = alpha_beta(xi, r);
  const int p = N - k - 1;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  if (xi == 0.0) {
    return GK::integrate([&](double y) { return std::pow(y, N - 3); }, 0.0, beta, 30, 1e-14);
  }
  // Hyperbolic substitution removes the endpoint singularity of (y² − ξ)^{(k−2)/2}:
  // ξ > 0: y = √ξ cosh u, ξ < 0: y = √−ξ sinh u; the integrand becomes y^p w^{k−1}
  // with w = √(y² − ξ).
  const double c = std::sqrt(std::abs(xi));
  const double upper = xi > 0.0 ? std::log((beta + std::sqrt(alpha)) / c) : std::asinh(beta / c);
  auto f = [&](double u) {
    const double y = xi > 0.0 ? c * std::cosh(u) : c * std::sinh(u);
    const double w = xi > 0.0 ? c * std::sinh(u) : c * std::cosh(u);
    return std::pow(y, p) * std::pow(w, k - 1);
  };
  return GK::integrate(f, 0.0, upper, 30, 1e-14);
}

double eval_F_recursive(double xi, int k, int N, double r) {
  check_generic(xi, k, N, r);
  if (k % 2 == 0) throw Error(Errc::domain_error, "recursion path needs odd k");
  return recursion_unchecked(xi, k, N, r);
}

double eval_F_elementary(double xi, int k, int N, double r) {
  check_generic(xi, k, N, r);
  if (k % 2 == 1) throw Error(Errc::domain_error, "elementary path needs even k");
  return elementary_unchecked(xi, k, N, r);
}

double eval_F_edge(double xi, int k, int N, double r) {
  check_slice_args(N, k, r);
  if (k != 0 && k != N) throw Error(Errc::domain_error, "eval_F_edge needs k = 0 or k = N");
  if (!std::isfinite(xi)) throw Error(Errc::domain_error, "xi must be finite");
  return edge_density(xi, k, N);
}

double slice_density(double xi, int k, int N, double r) {
  check_slice_args(N, k, r);
  if (k == 0 || k == N) return edge_density(xi, k, N);
  return angular(k, N) * analytic_F(xi, k, N, r);
}

double slice_integral(int N, int k, double lo, double hi, double r) {
  check_slice_args(N, k, r);
  if (!(lo <= hi)) throw Error(Errc::domain_error, "slice_integral needs lo <= hi");
  if (lo == hi) return 0.0;
  if (k == 0 || k == N) return edge_integral(N, k, lo, hi);
  return generic_integral(N, k, lo, hi, r);
}

double coefficient_A(int N, int i, double eps0, double r) {
  check_eps0(eps0);
  return slice_integral(N, i, -eps0, eps0, r);
}

double coefficient_B(int N, int i, double delta_v, double eps0, double r, double J) {
  check_eps0(eps0);
  if (!(J > 0.0) || !std::isfinite(J)) throw Error(Errc::domain_error, "Jacobian factor must be positive and finite");
  const double slack = 1e-12 * eps0;
  if (!(delta_v >= -eps0 - slack && delta_v <= eps0 + slack))
    throw Error(Errc::domain_error, "delta_v outside [-eps0, eps0]");
  delta_v = std::clamp(delta_v, -eps0, eps0);
  return J * slice_integral(N, i, -eps0, delta_v, r);
}

std::vector<std::optional<double>> g_weights(const CriticalCatalog& catalog, double v) {
  std::vector<double> sum(catalog.N + 1, 0.0);
  std::vector<std::size_t> count(catalog.N + 1, 0);
  for (const auto& p : catalog.points) {
    if (p.value > v) continue;
    sum[static_cast<std::size_t>(p.morse_index)] += p.jacobian;
    ++count[static_cast<std::size_t>(p.morse_index)];
  }
  std::vector<std::optional<double>> g(catalog.N + 1);
  for (std::size_t i = 0; i <= catalog.N; ++i)
    if (count[i] > 0) g[i] = sum[i] / static_cast<double>(count[i]);
  return g;
}

NeighborhoodCoefficients neighborhood_coefficients(int N, double eps0, double r) {
  NeighborhoodCoefficients c;
  c.N = N;
  c.eps0 = eps0;
  c.r = r;
  c.A.resize(static_cast<std::size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) c.A[static_cast<std::size_t>(i)] = coefficient_A(N, i, eps0, r);
  return c;
}

double topological_term(const CriticalCatalog& catalog, const NeighborhoodCoefficients& coeffs, double v) {
  if (static_cast<std::size_t>(coeffs.N) != catalog.N)
    throw Error(Errc::domain_error, "coefficients and catalog disagree on N");
  if (v > catalog.v_max)
    throw Error(Errc::cutoff_exceeded,
                "level " + std::to_string(v) + " exceeds catalog cutoff " + std::to_string(catalog.v_max));
  const double eps0 = coeffs.eps0;
  std::vector<double> j_sum(catalog.N + 1, 0.0);
  std::vector<std::size_t> mu(catalog.N + 1, 0);
  double band = 0.0;
  for (const auto& p : catalog.points) {
    const double dv = v - p.value;
    if (dv <= -eps0) continue;
    if (p.degenerate)
      throw Error(Errc::degenerate_hessian, "degenerate critical point at level " + std::to_string(p.value));
    const auto k = static_cast<std::size_t>(p.morse_index);
    if (dv >= eps0) {
      j_sum[k] += p.jacobian;
      ++mu[k];
    } else {
      band += coefficient_B(coeffs.N, p.morse_index, dv, eps0, coeffs.r, p.jacobian);
    }
  }
  double plateau = 0.0;
  for (std::size_t i = 0; i <= catalog.N; ++i) {
    if (mu[i] == 0) continue;
    const double g = j_sum[i] / static_cast<double>(mu[i]);
    plateau += coeffs.A[i] * g * static_cast<double>(mu[i]);
  }
  return plateau + band;
}

double cylinder_volume(const CriticalPoint& point, int N, double v, double eps0, double r) {
  check_eps0(eps0);
  const double dv = v - point.value;
  if (dv <= -eps0) return 0.0;
  return point.jacobian * slice_integral(N, point.morse_index, -eps0, std::min(dv, eps0), r);
}

double admissible_r(const CriticalCatalog& catalog, double r) {
  check_r(r);
  const double d = min_pairwise_distance(catalog);
  return std::isfinite(d) ? std::min(r, 0.4 * d) : r;
}

}  // namespace topothermo
