#pragma once

// The limit side of the comparison: the conditional law of f(B + sigma*W)
// given W, for independent Brownian paths B and W simulated as Gaussian
// random walks on a fixed mesh.  Outer loop over the conditioning path W,
// inner loop over B.  sigma = 0 degenerates to plain E f(B).

#include <rwre/empirical_dist.hpp>
#include <rwre/functionals.hpp>
#include <rwre/grid_path.hpp>
#include <rwre/numeric.hpp>
#include <rwre/rng.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace rwre {

// Piecewise-linear Brownian path: vertex k is a partial sum of N(0, 1/m)
// increments, vertex 0 is 0.  Deterministic in seed.
GridPath sample_brownian_grid(std::size_t mesh, const SeedSpec& seed);

// Inner Monte Carlo mean of f(b_scale*B + w_path) over `inner` independent
// B paths on w_path's mesh; w_path is held fixed.  The caller pre-scales
// the conditioning path, which keeps this primitive usable both for the
// limit law (w_path = sigma*W, b_scale = 1) and for matched finite-n
// constructions with two scales.
Estimate conditional_mean_given_path(const PathFunctional& f, double b_scale,
                                     const GridPath& w_path, int inner,
                                     const SeedSpec& seed);

// Same inner Monte Carlo pass shared by several functionals; element i is
// bit-identical to the single-functional call with fs[i].
std::vector<Estimate> conditional_mean_given_path_multi(
    std::span<const PathFunctional> fs, double b_scale, const GridPath& w_path,
    int inner, const SeedSpec& seed);

// The limit-law inner estimate E(f(B + sigma*W) | W) for one conditioning
// path W; thin wrapper that scales W by sigma.
Estimate conditional_limit_sample(const PathFunctional& f, double sigma,
                                  const GridPath& w, int inner,
                                  const SeedSpec& seed);

// The limit random measure sampled as a distribution: outer draws of W,
// each mapped to an inner estimate of E(f(B + sigma*W) | W).
// Meta records outer, inner, mesh, sigma, max_inner_stderr, seed.
EmpiricalDist sample_limit_dist(const PathFunctional& f, double sigma,
                                std::size_t outer, std::size_t inner,
                                std::size_t mesh, const SeedSpec& seed,
                                int threads = 0);

// Several functionals evaluated on one shared sweep of W and B paths.
// Element i is bit-identical to sample_limit_dist(fs[i], ...) with the
// same arguments, because the path stream does not depend on the
// functional list and accumulation is per-functional in replica order.
std::vector<EmpiricalDist> sample_limit_dist_multi(
    std::span<const PathFunctional> fs, double sigma, std::size_t outer,
    std::size_t inner, std::size_t mesh, const SeedSpec& seed,
    int threads = 0);

}  // namespace rwre
