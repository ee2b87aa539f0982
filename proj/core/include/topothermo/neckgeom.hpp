#pragma once

#include <optional>
#include <vector>

#include "topothermo/morse.hpp"

namespace topothermo {

/// Surface area of the unit sphere in R^n: 2π^{n/2}/Γ(n/2).
double sphere_surface(int n);

struct AlphaBeta {
  double alpha;
  double beta;
};

/// α = (√(ξ²+4r²) − ξ)/2, β = √((√(ξ²+4r²) + ξ)/2), evaluated without
/// cancellation so that α·β² = r² holds to rounding.
AlphaBeta alpha_beta(double xi, double r);

// Slice integrals of the quadric ξ = −|X|² + |Y|² inside |X||Y| ≤ r, with
// X the k negative directions:
//   F(ξ,k,N,r) = ∫ y^{N−k−1} (y² − ξ)^{(k−2)/2} dy  over  y ∈ [√ξ₊, β].
// The generic path requires 1 ≤ k ≤ N−1 and N ≥ 3.

/// Adaptive quadrature, absolute accuracy ~1e−12.
double eval_F(double xi, int k, int N, double r);
/// Odd k: integration-by-parts recursion in the y exponent.
double eval_F_recursive(double xi, int k, int N, double r);
/// Even k: binomial expansion of the integer power.
double eval_F_elementary(double xi, int k, int N, double r);
/// k ∈ {0, N}: the full slice density including the angular factor,
/// ½Surf(N)ξ^{(N−2)/2} for ξ > 0 (k = 0), mirrored in ξ for k = N.
double eval_F_edge(double xi, int k, int N, double r);

/// d vol / dξ of the Morse-chart pseudo-cylinder: ½Surf(k)Surf(N−k)·F for
/// generic k, eval_F_edge for k ∈ {0, N}. Also accepts N = 2, k = 1, where
/// F has an integrable logarithmic singularity at ξ = 0.
double slice_density(double xi, int k, int N, double r);

/// ∫_{lo}^{hi} slice_density dξ (Morse-coordinate volume, no J factor).
double slice_integral(int N, int k, double lo, double hi, double r);

/// A(N,i,ε₀,r) = ∫_{−ε₀}^{ε₀} slice_density dξ.
double coefficient_A(int N, int i, double eps0, double r);

/// B = J·∫_{−ε₀}^{Δv} slice_density dξ for Δv ∈ [−ε₀, ε₀].
double coefficient_B(int N, int i, double delta_v, double eps0, double r, double J);

/// Mean Jacobian factor of the index-i points with v_c ≤ v; empty where μ_i = 0.
std::vector<std::optional<double>> g_weights(const CriticalCatalog& catalog, double v);

struct NeighborhoodCoefficients {
  int N = 0;
  double eps0 = 0.0;
  double r = 0.0;
  std::vector<double> A;  // indexed by Morse index 0..N
};

NeighborhoodCoefficients neighborhood_coefficients(int N, double eps0, double r);

/// Σ_i A_i g_i μ_i(M_{v−ε₀}) + Σ B(v − v_c) over points with |v − v_c| < ε₀.
/// g_i is taken over the same points as μ_i, so the plateau and band parts
/// join continuously at v = v_c + ε₀.
double topological_term(const CriticalCatalog& catalog, const NeighborhoodCoefficients& coeffs, double v);

/// Pseudo-cylinder volume of one point (J·∫ slice density up to v − v_c),
/// i.e. the contribution of that point to topological_term.
double cylinder_volume(const CriticalPoint& point, int N, double v, double eps0, double r);

/// Largest admissible wall parameter for a catalog: min(r, 0.4·min pairwise distance).
double admissible_r(const CriticalCatalog& catalog, double r);

}  // namespace topothermo
