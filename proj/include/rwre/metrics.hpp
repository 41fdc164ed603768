#pragma once

// Distances between empirical distributions on the line, plus confidence
// bands.  The Kolmogorov and Lévy distances are computed exactly (Lévy to a
// declared bisection accuracy); the Prokhorov distance is sandwiched
// between the Lévy distance and the Ky Fan value of the sorted coupling.

#include <rwre/empirical_dist.hpp>

#include <cstddef>

namespace rwre {

// Right-continuous empirical CDF value at x.
double ecdf_eval(const EmpiricalDist& dist, double x);

// Sup-norm distance between the two ECDFs, evaluated over merged sample
// points and their left limits (sufficient for step functions); exact.
double ks_distance(const EmpiricalDist& p, const EmpiricalDist& q);

// Absolute accuracy of levy_distance's bisection.
inline constexpr double kLevyAccuracy = 1e-9;

// Lévy distance inf{eps > 0: F_P(x-eps)-eps <= F_Q(x) <= F_P(x+eps)+eps for
// all x}; bisection on eps with an O(N) feasibility scan per step.
double levy_distance(const EmpiricalDist& p, const EmpiricalDist& q);

struct ProkhorovBounds {
  double lower = 0.0;  // Lévy distance
  double upper = 0.0;  // Ky Fan value of the sorted (comonotone) coupling
};

// Sandwich lower <= Prokhorov <= upper.  Unequal sample sizes are reduced
// to the smaller size by deterministic stride subsampling of the sorted
// larger sample (no randomness inside metrics).
ProkhorovBounds prokhorov_bounds(const EmpiricalDist& p, const EmpiricalDist& q);

// Dvoretzky-Kiefer-Wolfowitz band: with probability >= 1-delta the ECDF of
// an n-sample is uniformly within eps = sqrt(ln(2/delta)/(2n)) of the truth.
double dkw_band(std::size_t n, double delta);

}  // namespace rwre
