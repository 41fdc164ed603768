#pragma once

// Parametric families of i.i.d. time-random environments.
//
// An EnvironmentSpec is the law of one random step distribution; an
// EnvRealization is a concrete sampled sequence of step distributions (the
// quenched environment).  Four families are provided:
//
//   bio_normal       steps N(m_i, sigma2^2) with m_i ~ N(0, sigma1^2)
//   bernoulli_bias   steps +-scale with P(+) = p_i ~ Beta(beta_a, beta_a)
//   rademacher_scale steps m_i +- c_i (fair sign) with m_i ~ N(0,
//                    mean_sigma^2), c_i ~ Uniform[c_min, c_max]
//   heavy_tail_pareto steps shift_i + scale*T, shift_i ~ Uniform[-mean_bound,
//                    mean_bound], T symmetric with Lomax-type tails of the
//                    given tail_exponent (density ~ |x|^(-tail_exponent-1))
//
// Key per-step quantities, writing m and v for the step's conditional mean
// and variance: the sequence of partial sums of m is the quenched mean
// process, partial sums of v the quenched variance process, and partial
// sums of the alpha-absolute-central-moment the alpha-moment process.  All
// four families expose the environment-level moments of these quantities in
// closed form where available, with a seeded Monte Carlo oracle for the
// rest and for cross-checks.

#include <rwre/rng.hpp>

#include <json.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rwre {

enum class EnvFamily {
  bio_normal,
  bernoulli_bias,
  rademacher_scale,
  heavy_tail_pareto,
};

std::string to_string(EnvFamily family);
EnvFamily env_family_from_string(const std::string& name);

// Affine change x -> scale * (x + shift) applied to the step variables by
// normalization; recorded so results can be mapped back.
struct AffineMap {
  double shift = 0.0;
  double scale = 1.0;
  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

struct EnvironmentSpec {
  EnvFamily family = EnvFamily::bio_normal;
  std::map<std::string, double> params;  // ordered: serialization is stable
  bool normalized = false;
  std::optional<AffineMap> affine_map;

  nlohmann::json to_json() const;
  static EnvironmentSpec from_json(const nlohmann::json& j);

  double param(const std::string& name) const;
  friend bool operator==(const EnvironmentSpec&, const EnvironmentSpec&) = default;
};

// Validates family/parameter combinations; fills documented defaults
// (bernoulli_bias scale=1, heavy_tail_pareto mean_bound=1 scale=1).
EnvironmentSpec make_environment_spec(EnvFamily family,
                                      std::map<std::string, double> params);
EnvironmentSpec make_environment_spec(const std::string& family,
                                      std::map<std::string, double> params);

// Applies the standing normalization: center the mean-of-means at 0 and
// scale so the mean quenched step variance is 1.  Exact (closed form) for
// all families; idempotent; records the affine map.  Throws if the mean
// step variance is 0 (the model degenerates to an i.i.d. walk of the step
// means and is rejected).
EnvironmentSpec normalize_spec(const EnvironmentSpec& spec);

// ---- Concrete step laws ---------------------------------------------------

struct StepDistribution {
  enum class Kind { point_mass, normal, two_point, lomax_sym };

  Kind kind = Kind::point_mass;
  // Meaning by kind:
  //   point_mass: a = value
  //   normal:     a = mean, b = sd
  //   two_point:  a = hi value, b = lo value, c = P(hi)
  //   lomax_sym:  a = shift, b = scale, c = tail exponent
  double a = 0.0, b = 0.0, c = 0.0;

  static StepDistribution point_mass(double value);
  static StepDistribution normal(double mean, double sd);
  static StepDistribution two_point(double hi, double lo, double p_hi);
  static StepDistribution lomax_sym(double shift, double scale, double exponent);

  double mean() const;
  double variance() const;
  // E |X - mean|^order; +infinity when the tail order is too high.
  double alpha_abs_central_moment(double order) const;
  double sample(RandomEngine& eng) const;

  friend bool operator==(const StepDistribution&, const StepDistribution&) = default;
};

struct EnvRealization {
  std::vector<StepDistribution> steps;
  SeedSpec seed_trace;  // the seed sample_environment was called with

  std::size_t size() const { return steps.size(); }
};

// Draws n i.i.d. step distributions.  Pure in (spec, n, seed); streams are
// indexed per step, so a longer draw from the same seed extends a shorter
// one (prefix stability — required by the nested-environment experiment).
EnvRealization sample_environment(const EnvironmentSpec& spec, std::size_t n,
                                  const SeedSpec& seed);

// ---- Environment-level moments -------------------------------------------

// Closed-form helpers valid for any spec (normalized or not).
double env_mean_step_mean(const EnvironmentSpec& spec);   // E(step mean)
double env_mean_step_variance(const EnvironmentSpec& spec);  // E(step variance)

enum class MomentMethod { closed_form, mc_oracle };

struct MomentValue {
  double value = 0.0;
  bool finite = true;
  MomentMethod method = MomentMethod::closed_form;
  double std_error = 0.0;  // 0 for closed forms

  nlohmann::json to_json() const;
};

struct MomentReport {
  double alpha = 0.0, beta1 = 0.0, beta2 = 0.0, beta3 = 0.0;
  MomentValue sigma_sq;       // E((step mean)^2): the limit mixing variance
  MomentValue mean_abs_pow;   // E(|step mean|^beta1)
  MomentValue variance_pow;   // E((step variance)^beta2)
  MomentValue alpha_sum_pow;  // E((step alpha-moment)^beta3)
  MomentValue alpha_sum_mean; // E(step alpha-moment): the schedule floor uses it

  bool all_finite() const;
  nlohmann::json to_json() const;
};

// Exact-where-possible moment report; requires a normalized spec.  Infinite
// moments (heavy tails at too-high order) are reported, never thrown.
MomentReport env_moments(const EnvironmentSpec& spec, double alpha,
                         double beta1, double beta2, double beta3);

// Which per-draw statistic the Monte Carlo oracle averages.
enum class EnvMomentKind {
  step_mean,       // mean of the step law          (order ignored)
  step_mean_sq,    // (mean)^2                      (order ignored)
  abs_mean_pow,    // |mean|^order
  variance_pow,    // (variance)^order
  alpha_moment_pow // (alpha-absolute-central-moment)^order, needs alpha
};

// Seeded Monte Carlo estimate over independent environment draws; the
// cross-check oracle for every closed form above and the value source for
// the one bernoulli_bias moment without a closed form.
MomentValue env_moment_oracle(const EnvironmentSpec& spec, EnvMomentKind kind,
                              double order, double alpha, std::size_t draws,
                              const SeedSpec& seed);

}  // namespace rwre
