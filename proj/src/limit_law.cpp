#include <rwre/limit_law.hpp>

#include <rwre/parallel.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rwre {

GridPath sample_brownian_grid(std::size_t mesh, const SeedSpec& seed) {
  if (mesh < 1) {
    throw std::invalid_argument("sample_brownian_grid: mesh must be >= 1");
  }
  RandomEngine eng(seed);
  const double sd = 1.0 / std::sqrt(static_cast<double>(mesh));
  std::vector<double> verts(mesh + 1);
  verts[0] = 0.0;
  double s = 0.0;
  for (std::size_t k = 1; k <= mesh; ++k) {
    s += eng.next_gaussian();
    verts[k] = sd * s;
  }
  return GridPath(std::move(verts));
}

namespace {

// Shared inner loop: one pass over `inner` B paths, evaluating all
// functionals on each path.  The path stream depends only on the seed and
// mesh, and accumulation is per-functional in replica order, so single-
// and multi-functional calls agree bit-for-bit on common functionals.
void run_inner_b_paths(std::span<const PathFunctional> fs, double b_scale,
                       std::span<const double> w, int inner,
                       const SeedSpec& seed,
                       std::span<MeanAccumulator> accs) {
  const std::size_t mesh = w.size() - 1;
  const double scaled_sd = b_scale / std::sqrt(static_cast<double>(mesh));
  std::vector<double> verts(mesh + 1);
  verts[0] = w[0];
  for (int i = 0; i < inner; ++i) {
    RandomEngine eng(seed.child(static_cast<std::uint64_t>(i)));
    double s = 0.0;
    for (std::size_t k = 1; k <= mesh; ++k) {
      s += eng.next_gaussian();
      verts[k] = scaled_sd * s + w[k];
    }
    for (std::size_t j = 0; j < fs.size(); ++j) {
      accs[j].add(fs[j].evaluate_vertices(verts));
    }
  }
}

}  // namespace

std::vector<Estimate> conditional_mean_given_path_multi(
    std::span<const PathFunctional> fs, double b_scale, const GridPath& w_path,
    int inner, const SeedSpec& seed) {
  if (inner < 2) {
    throw std::invalid_argument("conditional_mean_given_path: inner must be >= 2");
  }
  if (fs.empty()) {
    throw std::invalid_argument("conditional_mean_given_path: no functionals");
  }
  std::vector<MeanAccumulator> accs(fs.size());
  run_inner_b_paths(fs, b_scale, w_path.vertices(), inner, seed, accs);
  std::vector<Estimate> out;
  out.reserve(fs.size());
  for (auto& acc : accs) out.push_back(acc.finish());
  return out;
}

Estimate conditional_mean_given_path(const PathFunctional& f, double b_scale,
                                     const GridPath& w_path, int inner,
                                     const SeedSpec& seed) {
  return conditional_mean_given_path_multi(
      std::span<const PathFunctional>(&f, 1), b_scale, w_path, inner, seed)[0];
}

Estimate conditional_limit_sample(const PathFunctional& f, double sigma,
                                  const GridPath& w, int inner,
                                  const SeedSpec& seed) {
  if (sigma < 0.0) {
    throw std::invalid_argument("conditional_limit_sample: sigma must be >= 0");
  }
  std::vector<double> scaled(w.vertices().begin(), w.vertices().end());
  for (auto& v : scaled) v *= sigma;
  return conditional_mean_given_path(f, 1.0, GridPath(std::move(scaled)), inner,
                                     seed);
}

std::vector<EmpiricalDist> sample_limit_dist_multi(
    std::span<const PathFunctional> fs, double sigma, std::size_t outer,
    std::size_t inner, std::size_t mesh, const SeedSpec& seed, int threads) {
  if (sigma < 0.0) {
    throw std::invalid_argument("sample_limit_dist: sigma must be >= 0");
  }
  if (outer < 1) {
    throw std::invalid_argument("sample_limit_dist: outer must be >= 1");
  }
  if (inner < 2) {
    throw std::invalid_argument("sample_limit_dist: inner must be >= 2");
  }
  if (mesh < 1) {
    throw std::invalid_argument("sample_limit_dist: mesh must be >= 1");
  }
  if (fs.empty()) {
    throw std::invalid_argument("sample_limit_dist: no functionals");
  }

  // Disjoint stream namespaces for the conditioning path and the inner
  // paths keep them independent under any scheduling.
  const SeedSpec w_seed = seed.child("limit-w");
  const SeedSpec b_seed = seed.child("limit-b");

  // values[j*F + f] layout; filled by independent replica tasks.
  const std::size_t F = fs.size();
  std::vector<double> values(outer * F);
  std::vector<double> errors(outer * F);
  parallel_for(outer, threads, [&](std::size_t j) {
    const GridPath w = sample_brownian_grid(mesh, w_seed.child(j));
    std::vector<double> scaled(w.vertices().begin(), w.vertices().end());
    for (auto& v : scaled) v *= sigma;
    std::vector<MeanAccumulator> accs(F);
    run_inner_b_paths(fs, 1.0, scaled, static_cast<int>(inner), b_seed.child(j),
                      accs);
    for (std::size_t f = 0; f < F; ++f) {
      const Estimate est = accs[f].finish();
      values[j * F + f] = est.value;
      errors[j * F + f] = est.std_error;
    }
  });

  std::vector<EmpiricalDist> out;
  out.reserve(F);
  for (std::size_t f = 0; f < F; ++f) {
    std::vector<double> sample(outer);
    double max_se = 0.0;
    for (std::size_t j = 0; j < outer; ++j) {
      sample[j] = values[j * F + f];
      max_se = std::max(max_se, errors[j * F + f]);
    }
    nlohmann::json meta;
    meta["outer"] = outer;
    meta["inner"] = inner;
    meta["mesh"] = mesh;
    meta["sigma"] = sigma;
    meta["max_inner_stderr"] = max_se;
    meta["seed"] = {{"master", seed.master}, {"stream", seed.stream}};
    out.push_back(EmpiricalDist::from_samples(std::move(sample), std::move(meta)));
  }
  return out;
}

EmpiricalDist sample_limit_dist(const PathFunctional& f, double sigma,
                                std::size_t outer, std::size_t inner,
                                std::size_t mesh, const SeedSpec& seed,
                                int threads) {
  auto v = sample_limit_dist_multi(std::span<const PathFunctional>(&f, 1),
                                   sigma, outer, inner, mesh, seed, threads);
  return std::move(v[0]);
}

}  // namespace rwre
