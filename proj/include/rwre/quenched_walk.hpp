#pragma once

// Quenched simulation: trajectories under one fixed environment, the
// rescaled broken-line path, exact quenched statistics, and the outer
// empirical distribution of the quenched functional mean.
//
// Terminology used throughout: the "quenched law" is the walk's law
// conditioned on one environment realization; the "outer sample" ranges
// over environments, the "inner sample" over walks within an environment.

#include <rwre/empirical_dist.hpp>
#include <rwre/env_models.hpp>
#include <rwre/functionals.hpp>
#include <rwre/grid_path.hpp>
#include <rwre/numeric.hpp>
#include <rwre/rng.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace rwre {

struct Trajectory {
  std::vector<double> values;  // S_0 .. S_n with S_0 = 0
  std::size_t length() const { return values.size() - 1; }
};

// One walk under the fixed environment: S_k = sum of draws from steps[0..k).
Trajectory sample_trajectory(const EnvRealization& env, const SeedSpec& seed);

// The rescaled interpolation: vertex k holds S_k / sqrt(n), mesh n.
GridPath broken_line(const Trajectory& traj);

// Exact per-environment statistics.  Index k holds the value for the
// length-k prefix (index 0 is 0): cumulative step means, cumulative step
// variances, and cumulative alpha-absolute-central-moments of the steps.
// Steps whose alpha-moment is infinite are listed in infinite_alpha_steps
// (1-based step index); from the first such step on, alpha_moments is
// +infinity.
struct QuenchedStats {
  double alpha = 0.0;
  std::vector<double> means;          // size n+1
  std::vector<double> variances;      // size n+1, nondecreasing
  std::vector<double> alpha_moments;  // size n+1, nondecreasing
  std::vector<std::size_t> infinite_alpha_steps;
};

QuenchedStats quenched_stats(const EnvRealization& env, double alpha);

// Inner Monte Carlo mean of f over `inner` quenched walks, with standard
// error.  Deterministic in seed; the estimate is clamped-free but bounded
// by f's uniform bound automatically.
Estimate quenched_expectation(const EnvRealization& env, const PathFunctional& f,
                              int inner, const SeedSpec& seed);

// Several functionals sharing the same walks: entry i is the estimate for
// fs[i] over the identical inner trajectories (bit-equal to evaluating
// each functional in its own pass).
std::vector<Estimate> quenched_expectation_multi(
    const EnvRealization& env, std::span<const PathFunctional> fs, int inner,
    const SeedSpec& seed);

// Outer empirical distribution of the quenched functional mean at walk
// length n: `outer` environments, each estimated with `inner` walks.
// Replica j derives its environment stream from seed/"env"/j and its walk
// streams from seed/"walk"/j, so the output is bit-identical for any
// thread count.  Meta records n, outer, inner, max_inner_stderr, seed.
EmpiricalDist sample_quenched_dist(const EnvironmentSpec& spec,
                                   const PathFunctional& f, std::size_t n,
                                   std::size_t outer, std::size_t inner,
                                   const SeedSpec& seed, int threads = 0);

// Same outer/inner walks evaluated under several functionals at once;
// element i is bit-identical to sample_quenched_dist with fs[i].
std::vector<EmpiricalDist> sample_quenched_dist_multi(
    const EnvironmentSpec& spec, std::span<const PathFunctional> fs,
    std::size_t n, std::size_t outer, std::size_t inner, const SeedSpec& seed,
    int threads = 0);

}  // namespace rwre
