#include <rwre/quenched_walk.hpp>

#include <rwre/parallel.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rwre {

Trajectory sample_trajectory(const EnvRealization& env, const SeedSpec& seed) {
  if (env.steps.empty()) {
    throw std::invalid_argument("sample_trajectory: empty environment");
  }
  RandomEngine eng(seed);
  Trajectory traj;
  traj.values.resize(env.steps.size() + 1);
  traj.values[0] = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < env.steps.size(); ++i) {
    s += env.steps[i].sample(eng);
    traj.values[i + 1] = s;
  }
  return traj;
}

GridPath broken_line(const Trajectory& traj) {
  const std::size_t n = traj.length();
  if (n < 1) throw std::invalid_argument("broken_line: trajectory too short");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> verts(n + 1);
  for (std::size_t k = 0; k <= n; ++k) verts[k] = traj.values[k] * scale;
  return GridPath(std::move(verts));
}

QuenchedStats quenched_stats(const EnvRealization& env, double alpha) {
  if (alpha <= 2.0) {
    throw std::invalid_argument("quenched_stats: alpha must be > 2");
  }
  const std::size_t n = env.steps.size();
  QuenchedStats st;
  st.alpha = alpha;
  st.means.resize(n + 1);
  st.variances.resize(n + 1);
  st.alpha_moments.resize(n + 1);
  st.means[0] = st.variances[0] = st.alpha_moments[0] = 0.0;

  NeumaierSum mean_sum, var_sum, alpha_sum;
  bool alpha_infinite = false;
  for (std::size_t k = 1; k <= n; ++k) {
    const StepDistribution& step = env.steps[k - 1];
    mean_sum.add(step.mean());
    var_sum.add(step.variance());
    st.means[k] = mean_sum.value();
    st.variances[k] = var_sum.value();

    const double am = step.alpha_abs_central_moment(alpha);
    if (!std::isfinite(am)) {
      st.infinite_alpha_steps.push_back(k);
      alpha_infinite = true;
    }
    if (alpha_infinite) {
      st.alpha_moments[k] = std::numeric_limits<double>::infinity();
    } else {
      alpha_sum.add(am);
      st.alpha_moments[k] = alpha_sum.value();
    }
  }
  return st;
}

namespace {

// Shared inner loop: one pass over `inner` quenched walks, evaluating all
// functionals on each rescaled path.  Accumulation is per-functional in
// fixed replica order (compensated), so a single- and a multi-functional
// call agree bit-for-bit on the common functionals.
void run_inner_walks(const EnvRealization& env,
                     std::span<const PathFunctional> fs, int inner,
                     const SeedSpec& seed, std::span<MeanAccumulator> accs) {
  const std::size_t n = env.steps.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> verts(n + 1);
  verts[0] = 0.0;
  for (int i = 0; i < inner; ++i) {
    RandomEngine eng(seed.child(static_cast<std::uint64_t>(i)));
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      s += env.steps[k].sample(eng);
      verts[k + 1] = s * scale;
    }
    for (std::size_t j = 0; j < fs.size(); ++j) {
      accs[j].add(fs[j].evaluate_vertices(verts));
    }
  }
}

}  // namespace

std::vector<Estimate> quenched_expectation_multi(
    const EnvRealization& env, std::span<const PathFunctional> fs, int inner,
    const SeedSpec& seed) {
  if (env.steps.empty()) {
    throw std::invalid_argument("quenched_expectation: empty environment");
  }
  if (inner < 2) {
    throw std::invalid_argument("quenched_expectation: inner must be >= 2");
  }
  std::vector<MeanAccumulator> accs(fs.size());
  run_inner_walks(env, fs, inner, seed, accs);
  std::vector<Estimate> out;
  out.reserve(fs.size());
  for (auto& acc : accs) out.push_back(acc.finish());
  return out;
}

Estimate quenched_expectation(const EnvRealization& env, const PathFunctional& f,
                              int inner, const SeedSpec& seed) {
  return quenched_expectation_multi(env, std::span<const PathFunctional>(&f, 1),
                                    inner, seed)[0];
}

// Declared in functionals.hpp; lives here so the functionals module does
// not depend on the walk sampler.
Estimate barrier_probability(const EnvRealization& env, double c1, double c2,
                             int inner, const SeedSpec& seed) {
  return quenched_expectation(env, PathFunctional::barrier_indicator(c1, c2),
                              inner, seed);
}

std::vector<EmpiricalDist> sample_quenched_dist_multi(
    const EnvironmentSpec& spec, std::span<const PathFunctional> fs,
    std::size_t n, std::size_t outer, std::size_t inner, const SeedSpec& seed,
    int threads) {
  if (!spec.normalized) {
    throw std::logic_error("sample_quenched_dist: spec must be normalized");
  }
  if (n < 1) throw std::invalid_argument("sample_quenched_dist: n must be >= 1");
  if (outer < 1) {
    throw std::invalid_argument("sample_quenched_dist: outer must be >= 1");
  }
  if (inner < 2) {
    throw std::invalid_argument("sample_quenched_dist: inner must be >= 2");
  }
  if (fs.empty()) {
    throw std::invalid_argument("sample_quenched_dist: no functionals");
  }

  const SeedSpec env_seed = seed.child("env");
  const SeedSpec walk_seed = seed.child("walk");

  // values[j*F + f] layout; filled by independent replica tasks.
  const std::size_t F = fs.size();
  std::vector<double> values(outer * F);
  std::vector<double> errors(outer * F);

  parallel_for(outer, threads, [&](std::size_t j) {
    const EnvRealization env = sample_environment(spec, n, env_seed.child(j));
    std::vector<MeanAccumulator> accs(F);
    run_inner_walks(env, fs, static_cast<int>(inner), walk_seed.child(j), accs);
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
    meta["n"] = n;
    meta["outer"] = outer;
    meta["inner"] = inner;
    meta["max_inner_stderr"] = max_se;
    meta["seed"] = {{"master", seed.master}, {"stream", seed.stream}};
    out.push_back(EmpiricalDist::from_samples(std::move(sample), std::move(meta)));
  }
  return out;
}

EmpiricalDist sample_quenched_dist(const EnvironmentSpec& spec,
                                   const PathFunctional& f, std::size_t n,
                                   std::size_t outer, std::size_t inner,
                                   const SeedSpec& seed, int threads) {
  auto v = sample_quenched_dist_multi(
      spec, std::span<const PathFunctional>(&f, 1), n, outer, inner, seed,
      threads);
  return std::move(v[0]);
}

}  // namespace rwre
