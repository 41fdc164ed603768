#include <rwre/env_models.hpp>

#include <rwre/numeric.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rwre {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed-form |N(0,1)| moment: E|Z|^b = 2^(b/2) Gamma((b+1)/2) / sqrt(pi).
double gaussian_abs_moment(double order) {
  if (order == 0.0) return 1.0;
  return std::exp(0.5 * order * std::numbers::ln2_v<double> +
                  std::lgamma(0.5 * (order + 1.0)) -
                  0.5 * std::log(std::numbers::pi_v<double>));
}

double beta_fn(double x, double y) {
  return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

// E c^k for c ~ Uniform[lo, hi], 0 <= lo <= hi.
double uniform_pow_moment(double lo, double hi, double k) {
  if (hi == lo) return std::pow(lo, k);
  return (std::pow(hi, k + 1.0) - std::pow(lo, k + 1.0)) /
         ((k + 1.0) * (hi - lo));
}

// E |T|^r for the symmetric Lomax-type variable with density
// (e/2)(1+|x|)^(-e-1): r < e required for finiteness.
double lomax_abs_moment(double r, double exponent) {
  if (r == 0.0) return 1.0;
  if (r >= exponent) return kInf;
  return std::exp(std::log(exponent) + std::lgamma(r + 1.0) +
                  std::lgamma(exponent - r) - std::lgamma(exponent + 1.0));
}

[[noreturn]] void fail_spec(const std::string& msg) {
  throw std::invalid_argument(msg);
}

void check_params(EnvFamily family, const std::map<std::string, double>& params,
                  const std::vector<std::string>& known) {
  const std::string fam = to_string(family);
  for (const auto& [key, value] : params) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      fail_spec(fam + ": unknown parameter " + key);
    }
    if (!std::isfinite(value)) {
      fail_spec(fam + ": parameter " + key + " must be finite");
    }
  }
}

double require_param(const EnvironmentSpec& spec, const std::string& name) {
  const auto it = spec.params.find(name);
  if (it == spec.params.end()) {
    fail_spec(to_string(spec.family) + ": missing parameter " + name);
  }
  return it->second;
}

}  // namespace

std::string to_string(EnvFamily family) {
  switch (family) {
    case EnvFamily::bio_normal: return "bio_normal";
    case EnvFamily::bernoulli_bias: return "bernoulli_bias";
    case EnvFamily::rademacher_scale: return "rademacher_scale";
    case EnvFamily::heavy_tail_pareto: return "heavy_tail_pareto";
  }
  throw std::logic_error("unreachable family");
}

EnvFamily env_family_from_string(const std::string& name) {
  if (name == "bio_normal") return EnvFamily::bio_normal;
  if (name == "bernoulli_bias") return EnvFamily::bernoulli_bias;
  if (name == "rademacher_scale") return EnvFamily::rademacher_scale;
  if (name == "heavy_tail_pareto") return EnvFamily::heavy_tail_pareto;
  fail_spec("unknown family: " + name);
}

double EnvironmentSpec::param(const std::string& name) const {
  return require_param(*this, name);
}

EnvironmentSpec make_environment_spec(EnvFamily family,
                                      std::map<std::string, double> params) {
  EnvironmentSpec spec;
  spec.family = family;
  spec.params = std::move(params);
  spec.normalized = false;

  switch (family) {
    case EnvFamily::bio_normal: {
      check_params(family, spec.params, {"sigma1", "sigma2"});
      const double s1 = require_param(spec, "sigma1");
      const double s2 = require_param(spec, "sigma2");
      if (s1 < 0.0) fail_spec("bio_normal: sigma1 must be >= 0");
      if (s2 < 0.0) fail_spec("bio_normal: sigma2 must be >= 0");
      break;
    }
    case EnvFamily::bernoulli_bias: {
      check_params(family, spec.params, {"beta_a", "scale"});
      const double a = require_param(spec, "beta_a");
      if (a <= 0.0) fail_spec("bernoulli_bias: beta_a must be > 0");
      spec.params.try_emplace("scale", 1.0);
      if (spec.params["scale"] < 0.0) {
        fail_spec("bernoulli_bias: scale must be >= 0");
      }
      break;
    }
    case EnvFamily::rademacher_scale: {
      check_params(family, spec.params, {"mean_sigma", "c_min", "c_max"});
      const double sm = require_param(spec, "mean_sigma");
      const double lo = require_param(spec, "c_min");
      const double hi = require_param(spec, "c_max");
      if (sm < 0.0) fail_spec("rademacher_scale: mean_sigma must be >= 0");
      if (lo < 0.0) fail_spec("rademacher_scale: c_min must be >= 0");
      if (hi < lo) fail_spec("rademacher_scale: c_max must be >= c_min");
      break;
    }
    case EnvFamily::heavy_tail_pareto: {
      check_params(family, spec.params, {"tail_exponent", "mean_bound", "scale"});
      const double e = require_param(spec, "tail_exponent");
      if (e <= 2.0) {
        fail_spec("heavy_tail_pareto: tail_exponent must be > 2 "
                  "(step variance must be finite)");
      }
      spec.params.try_emplace("mean_bound", 1.0);
      spec.params.try_emplace("scale", 1.0);
      if (spec.params["mean_bound"] < 0.0) {
        fail_spec("heavy_tail_pareto: mean_bound must be >= 0");
      }
      if (spec.params["scale"] < 0.0) {
        fail_spec("heavy_tail_pareto: scale must be >= 0");
      }
      break;
    }
  }
  return spec;
}

EnvironmentSpec make_environment_spec(const std::string& family,
                                      std::map<std::string, double> params) {
  return make_environment_spec(env_family_from_string(family), std::move(params));
}

double env_mean_step_mean(const EnvironmentSpec&) {
  // Every family draws its step mean from a symmetric law centered at 0.
  return 0.0;
}

double env_mean_step_variance(const EnvironmentSpec& spec) {
  switch (spec.family) {
    case EnvFamily::bio_normal: {
      const double s2 = spec.param("sigma2");
      return s2 * s2;
    }
    case EnvFamily::bernoulli_bias: {
      const double a = spec.param("beta_a");
      const double s = spec.param("scale");
      // step variance = 4 s^2 p(1-p); E p(1-p) = a/(2(2a+1)) for Beta(a,a).
      return s * s * 2.0 * a / (2.0 * a + 1.0);
    }
    case EnvFamily::rademacher_scale:
      return uniform_pow_moment(spec.param("c_min"), spec.param("c_max"), 2.0);
    case EnvFamily::heavy_tail_pareto: {
      const double e = spec.param("tail_exponent");
      const double s = spec.param("scale");
      return s * s * 2.0 / ((e - 1.0) * (e - 2.0));
    }
  }
  throw std::logic_error("unreachable family");
}

EnvironmentSpec normalize_spec(const EnvironmentSpec& spec) {
  if (spec.normalized) return spec;

  const double mean_variance = env_mean_step_variance(spec);
  if (mean_variance == 0.0) {
    throw std::invalid_argument(
        "normalize_spec: mean quenched step variance is 0, so the model "
        "degenerates to an i.i.d. walk of the step means; rejected");
  }

  EnvironmentSpec out = spec;
  out.normalized = true;
  const double scale = 1.0 / std::sqrt(mean_variance);
  // shift = -E(step mean) = 0 for all shipped families.
  out.affine_map = AffineMap{0.0, scale};

  // Per-family parameter update, written so the scaled parameter that must
  // equal 1 is set to 1.0 exactly rather than via a rounded product.
  switch (spec.family) {
    case EnvFamily::bio_normal:
      out.params["sigma1"] = spec.param("sigma1") / spec.param("sigma2");
      out.params["sigma2"] = 1.0;
      break;
    case EnvFamily::bernoulli_bias: {
      const double a = spec.param("beta_a");
      out.params["scale"] = std::sqrt((2.0 * a + 1.0) / (2.0 * a));
      break;
    }
    case EnvFamily::rademacher_scale:
      out.params["mean_sigma"] = spec.param("mean_sigma") * scale;
      out.params["c_min"] = spec.param("c_min") * scale;
      out.params["c_max"] = spec.param("c_max") * scale;
      break;
    case EnvFamily::heavy_tail_pareto: {
      const double e = spec.param("tail_exponent");
      const double lam = 2.0 / ((e - 1.0) * (e - 2.0));
      out.params["mean_bound"] = spec.param("mean_bound") * scale;
      out.params["scale"] = 1.0 / std::sqrt(lam);
      break;
    }
  }
  return out;
}

// ---- StepDistribution -----------------------------------------------------

StepDistribution StepDistribution::point_mass(double value) {
  return {Kind::point_mass, value, 0.0, 0.0};
}
StepDistribution StepDistribution::normal(double mean, double sd) {
  if (sd < 0.0) throw std::invalid_argument("StepDistribution: sd < 0");
  return {Kind::normal, mean, sd, 0.0};
}
StepDistribution StepDistribution::two_point(double hi, double lo, double p_hi) {
  if (p_hi < 0.0 || p_hi > 1.0) {
    throw std::invalid_argument("StepDistribution: p_hi outside [0,1]");
  }
  return {Kind::two_point, hi, lo, p_hi};
}
StepDistribution StepDistribution::lomax_sym(double shift, double scale,
                                             double exponent) {
  if (scale < 0.0) throw std::invalid_argument("StepDistribution: scale < 0");
  if (exponent <= 2.0) {
    throw std::invalid_argument("StepDistribution: lomax exponent must be > 2");
  }
  return {Kind::lomax_sym, shift, scale, exponent};
}

double StepDistribution::mean() const {
  switch (kind) {
    case Kind::point_mass: return a;
    case Kind::normal: return a;
    case Kind::two_point: return c * a + (1.0 - c) * b;
    case Kind::lomax_sym: return a;  // symmetric body around the shift
  }
  throw std::logic_error("unreachable step kind");
}

double StepDistribution::variance() const {
  switch (kind) {
    case Kind::point_mass: return 0.0;
    case Kind::normal: return b * b;
    case Kind::two_point: {
      const double m = mean();
      return c * (a - m) * (a - m) + (1.0 - c) * (b - m) * (b - m);
    }
    case Kind::lomax_sym:
      return b * b * 2.0 / ((c - 1.0) * (c - 2.0));
  }
  throw std::logic_error("unreachable step kind");
}

double StepDistribution::alpha_abs_central_moment(double order) const {
  if (order < 0.0) {
    throw std::invalid_argument("alpha_abs_central_moment: order < 0");
  }
  if (order == 2.0) return variance();  // keep the invariant exact
  switch (kind) {
    case Kind::point_mass:
      return order == 0.0 ? 1.0 : 0.0;
    case Kind::normal:
      return std::pow(b, order) * gaussian_abs_moment(order);
    case Kind::two_point: {
      const double m = mean();
      return c * std::pow(std::abs(a - m), order) +
             (1.0 - c) * std::pow(std::abs(b - m), order);
    }
    case Kind::lomax_sym:
      return std::pow(b, order) * lomax_abs_moment(order, c);
  }
  throw std::logic_error("unreachable step kind");
}

double StepDistribution::sample(RandomEngine& eng) const {
  switch (kind) {
    case Kind::point_mass:
      return a;
    case Kind::normal:
      return a + b * eng.next_gaussian();
    case Kind::two_point:
      return eng.next_double() < c ? a : b;
    case Kind::lomax_sym: {
      // |T| = U^(-1/exponent) - 1 by inverse transform; fair sign.
      const bool positive = (eng.next_u32() & 1u) != 0;
      const double mag = std::pow(eng.next_open(), -1.0 / c) - 1.0;
      return a + (positive ? b * mag : -b * mag);
    }
  }
  throw std::logic_error("unreachable step kind");
}

// ---- Environment sampling -------------------------------------------------

namespace {

StepDistribution draw_step(const EnvironmentSpec& spec, RandomEngine& eng) {
  switch (spec.family) {
    case EnvFamily::bio_normal: {
      const double m = spec.param("sigma1") * eng.next_gaussian();
      return StepDistribution::normal(m, spec.param("sigma2"));
    }
    case EnvFamily::bernoulli_bias: {
      const double a = spec.param("beta_a");
      const double s = spec.param("scale");
      const double p = sample_beta(eng, a, a);
      return StepDistribution::two_point(s, -s, p);
    }
    case EnvFamily::rademacher_scale: {
      const double m = spec.param("mean_sigma") * eng.next_gaussian();
      const double lo = spec.param("c_min");
      const double hi = spec.param("c_max");
      const double c = lo + (hi - lo) * eng.next_double();
      return StepDistribution::two_point(m + c, m - c, 0.5);
    }
    case EnvFamily::heavy_tail_pareto: {
      const double b = spec.param("mean_bound");
      const double shift = -b + 2.0 * b * eng.next_double();
      return StepDistribution::lomax_sym(shift, spec.param("scale"),
                                         spec.param("tail_exponent"));
    }
  }
  throw std::logic_error("unreachable family");
}

}  // namespace

EnvRealization sample_environment(const EnvironmentSpec& spec, std::size_t n,
                                  const SeedSpec& seed) {
  if (!spec.normalized) {
    throw std::logic_error("sample_environment: spec must be normalized first");
  }
  if (n == 0) throw std::invalid_argument("sample_environment: n must be >= 1");

  EnvRealization env;
  env.seed_trace = seed;
  env.steps.reserve(n);
  // One derived stream per step index: a longer environment from the same
  // seed extends a shorter one (prefix stability).
  for (std::size_t i = 0; i < n; ++i) {
    RandomEngine eng(seed.child(i));
    env.steps.push_back(draw_step(spec, eng));
  }
  return env;
}

// ---- Moments --------------------------------------------------------------

namespace {

MomentValue closed(double value) {
  MomentValue v;
  v.value = value;
  v.finite = std::isfinite(value);
  v.method = MomentMethod::closed_form;
  return v;
}

// E(|step mean|^order) in closed form; available for every family.  The
// second moment short-circuits to the algebraically simplified form so it
// is exact, not merely correct to rounding of lgamma.
double closed_abs_mean_pow(const EnvironmentSpec& spec, double order) {
  if (order == 2.0) {
    switch (spec.family) {
      case EnvFamily::bio_normal: {
        const double s1 = spec.param("sigma1");
        return s1 * s1;
      }
      case EnvFamily::bernoulli_bias: {
        const double s = spec.param("scale");
        return s * s / (2.0 * spec.param("beta_a") + 1.0);
      }
      case EnvFamily::rademacher_scale: {
        const double sm = spec.param("mean_sigma");
        return sm * sm;
      }
      case EnvFamily::heavy_tail_pareto: {
        const double b = spec.param("mean_bound");
        return b * b / 3.0;
      }
    }
  }
  switch (spec.family) {
    case EnvFamily::bio_normal:
      return std::pow(spec.param("sigma1"), order) * gaussian_abs_moment(order);
    case EnvFamily::bernoulli_bias: {
      const double a = spec.param("beta_a");
      const double s = spec.param("scale");
      // step mean = s(2p-1), p ~ Beta(a,a): E|2p-1|^r = B((r+1)/2, a) /
      // (2^(2a-1) B(a,a)).
      return std::pow(s, order) * beta_fn(0.5 * (order + 1.0), a) /
             (std::pow(2.0, 2.0 * a - 1.0) * beta_fn(a, a));
    }
    case EnvFamily::rademacher_scale:
      return std::pow(spec.param("mean_sigma"), order) *
             gaussian_abs_moment(order);
    case EnvFamily::heavy_tail_pareto:
      // step mean ~ Uniform[-b, b]: E|M|^r = b^r/(r+1).
      return std::pow(spec.param("mean_bound"), order) / (order + 1.0);
  }
  throw std::logic_error("unreachable family");
}

// E((step variance)^order) in closed form; available for every family.
double closed_variance_pow(const EnvironmentSpec& spec, double order) {
  switch (spec.family) {
    case EnvFamily::bio_normal:
      return std::pow(spec.param("sigma2"), 2.0 * order);
    case EnvFamily::bernoulli_bias: {
      const double a = spec.param("beta_a");
      const double s = spec.param("scale");
      // variance = 4 s^2 p(1-p): E(p(1-p))^r = B(a+r, a+r)/B(a, a).
      return std::pow(4.0 * s * s, order) * beta_fn(a + order, a + order) /
             beta_fn(a, a);
    }
    case EnvFamily::rademacher_scale:
      return uniform_pow_moment(spec.param("c_min"), spec.param("c_max"),
                                2.0 * order);
    case EnvFamily::heavy_tail_pareto:
      return std::pow(env_mean_step_variance(spec), order);  // deterministic
  }
  throw std::logic_error("unreachable family");
}

// E(step alpha-moment): closed for every family.
double closed_alpha_sum_mean(const EnvironmentSpec& spec, double alpha) {
  switch (spec.family) {
    case EnvFamily::bio_normal:
      return std::pow(spec.param("sigma2"), alpha) * gaussian_abs_moment(alpha);
    case EnvFamily::bernoulli_bias: {
      const double a = spec.param("beta_a");
      const double s = spec.param("scale");
      // per-step alpha-moment = (2s)^alpha (p(1-p)^alpha + (1-p)p^alpha);
      // its mean over p ~ Beta(a,a) is 2 (2s)^alpha B(a+1, a+alpha)/B(a,a).
      return std::pow(2.0 * s, alpha) * 2.0 * beta_fn(a + 1.0, a + alpha) /
             beta_fn(a, a);
    }
    case EnvFamily::rademacher_scale:
      return uniform_pow_moment(spec.param("c_min"), spec.param("c_max"), alpha);
    case EnvFamily::heavy_tail_pareto:
      return std::pow(spec.param("scale"), alpha) *
             lomax_abs_moment(alpha, spec.param("tail_exponent"));
  }
  throw std::logic_error("unreachable family");
}

// E((step alpha-moment)^order): closed for all families except
// bernoulli_bias at order != 1.
bool has_closed_alpha_sum_pow(const EnvironmentSpec& spec, double order) {
  return spec.family != EnvFamily::bernoulli_bias || order == 1.0;
}

double closed_alpha_sum_pow(const EnvironmentSpec& spec, double alpha,
                            double order) {
  switch (spec.family) {
    case EnvFamily::bio_normal:
      return std::pow(closed_alpha_sum_mean(spec, alpha), order);  // constant
    case EnvFamily::bernoulli_bias:
      if (order == 1.0) return closed_alpha_sum_mean(spec, alpha);
      throw std::logic_error("bernoulli_bias alpha_sum_pow has no closed form");
    case EnvFamily::rademacher_scale:
      // alpha-moment = c^alpha, so the order-th power is c^(alpha*order).
      return uniform_pow_moment(spec.param("c_min"), spec.param("c_max"),
                                alpha * order);
    case EnvFamily::heavy_tail_pareto: {
      const double z = closed_alpha_sum_mean(spec, alpha);  // deterministic
      return std::isfinite(z) ? std::pow(z, order) : kInf;
    }
  }
  throw std::logic_error("unreachable family");
}

}  // namespace

bool MomentReport::all_finite() const {
  return sigma_sq.finite && mean_abs_pow.finite && variance_pow.finite &&
         alpha_sum_pow.finite && alpha_sum_mean.finite;
}

nlohmann::json MomentValue::to_json() const {
  nlohmann::json j;
  j["value"] = finite ? nlohmann::json(value) : nlohmann::json(nullptr);
  j["finite"] = finite;
  j["method"] = method == MomentMethod::closed_form ? "closed_form" : "mc_oracle";
  j["std_error"] = std_error;
  return j;
}

nlohmann::json MomentReport::to_json() const {
  nlohmann::json j;
  j["alpha"] = alpha;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["beta3"] = beta3;
  j["sigma_sq"] = sigma_sq.to_json();
  j["mean_abs_pow"] = mean_abs_pow.to_json();
  j["variance_pow"] = variance_pow.to_json();
  j["alpha_sum_pow"] = alpha_sum_pow.to_json();
  j["alpha_sum_mean"] = alpha_sum_mean.to_json();
  j["all_finite"] = all_finite();
  return j;
}

MomentReport env_moments(const EnvironmentSpec& spec, double alpha,
                         double beta1, double beta2, double beta3) {
  if (!spec.normalized) {
    throw std::logic_error("env_moments: spec must be normalized first");
  }
  if (alpha <= 2.0) {
    throw std::invalid_argument("env_moments: alpha must be > 2");
  }

  MomentReport report;
  report.alpha = alpha;
  report.beta1 = beta1;
  report.beta2 = beta2;
  report.beta3 = beta3;
  report.sigma_sq = closed(closed_abs_mean_pow(spec, 2.0));
  report.mean_abs_pow = closed(closed_abs_mean_pow(spec, beta1));
  report.variance_pow = closed(closed_variance_pow(spec, beta2));
  report.alpha_sum_mean = closed(closed_alpha_sum_mean(spec, alpha));
  if (has_closed_alpha_sum_pow(spec, beta3)) {
    report.alpha_sum_pow = closed(closed_alpha_sum_pow(spec, alpha, beta3));
  } else {
    // Fixed internal stream: the oracle value is deterministic and does not
    // perturb any experiment stream.
    report.alpha_sum_pow =
        env_moment_oracle(spec, EnvMomentKind::alpha_moment_pow, beta3, alpha,
                          1000000, SeedSpec{0, 0}.child("env-moment-oracle"));
  }
  return report;
}

MomentValue env_moment_oracle(const EnvironmentSpec& spec, EnvMomentKind kind,
                              double order, double alpha, std::size_t draws,
                              const SeedSpec& seed) {
  if (draws < 2) {
    throw std::invalid_argument("env_moment_oracle: draws must be >= 2");
  }
  MeanAccumulator acc;
  for (std::size_t i = 0; i < draws; ++i) {
    RandomEngine eng(seed.child(i));
    const StepDistribution step = draw_step(spec, eng);
    double x = 0.0;
    switch (kind) {
      case EnvMomentKind::step_mean: x = step.mean(); break;
      case EnvMomentKind::step_mean_sq: x = step.mean() * step.mean(); break;
      case EnvMomentKind::abs_mean_pow:
        x = std::pow(std::abs(step.mean()), order);
        break;
      case EnvMomentKind::variance_pow:
        x = std::pow(step.variance(), order);
        break;
      case EnvMomentKind::alpha_moment_pow:
        x = std::pow(step.alpha_abs_central_moment(alpha), order);
        break;
    }
    if (!std::isfinite(x)) {
      // A single infinite draw (deterministically infinite step moment)
      // makes the whole moment infinite.
      MomentValue v;
      v.value = kInf;
      v.finite = false;
      v.method = MomentMethod::mc_oracle;
      v.std_error = kInf;
      return v;
    }
    acc.add(x);
  }
  const Estimate est = acc.finish();
  MomentValue v;
  v.value = est.value;
  v.finite = true;
  v.method = MomentMethod::mc_oracle;
  v.std_error = est.std_error;
  return v;
}

// ---- Serialization --------------------------------------------------------

nlohmann::json EnvironmentSpec::to_json() const {
  nlohmann::json j;
  j["family"] = to_string(family);
  j["params"] = nlohmann::json::object();
  for (const auto& [key, value] : params) j["params"][key] = value;
  j["normalized"] = normalized;
  if (affine_map) {
    j["affine_map"] = {{"shift", affine_map->shift}, {"scale", affine_map->scale}};
  } else {
    j["affine_map"] = nullptr;
  }
  return j;
}

EnvironmentSpec EnvironmentSpec::from_json(const nlohmann::json& j) {
  std::map<std::string, double> params;
  for (const auto& [key, value] : j.at("params").items()) {
    params[key] = value.get<double>();
  }
  EnvironmentSpec spec =
      make_environment_spec(j.at("family").get<std::string>(), std::move(params));
  spec.normalized = j.value("normalized", false);  // optional in config files
  if (j.contains("affine_map") && !j.at("affine_map").is_null()) {
    spec.affine_map = AffineMap{j.at("affine_map").at("shift").get<double>(),
                                j.at("affine_map").at("scale").get<double>()};
  }
  if (spec.normalized) {
    const double ev = env_mean_step_variance(spec);
    if (std::abs(ev - 1.0) > 1e-9 || std::abs(env_mean_step_mean(spec)) > 1e-9) {
      throw std::invalid_argument(
          "EnvironmentSpec: marked normalized but the mean step variance is "
          "not 1 (or the mean step mean is not 0)");
    }
  }
  return spec;
}

}  // namespace rwre
