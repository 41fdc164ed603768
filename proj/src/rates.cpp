#include "rwre/rates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rwre/numeric.hpp"

namespace rwre {

double PowerLogForm::operator()(double n) const {
  if (!(n > 1.0)) {
    throw std::invalid_argument("PowerLogForm: n must exceed 1 so ln(n) > 0");
  }
  return coeff * std::pow(n, n_exp) * std::pow(std::log(n), log_exp);
}

nlohmann::json PowerLogForm::to_json() const {
  return {{"coeff", coeff}, {"n_exp", n_exp}, {"log_exp", log_exp}};
}

PowerLogForm PowerLogForm::from_json(const nlohmann::json& j) {
  PowerLogForm f;
  f.coeff = j.at("coeff").get<double>();
  f.n_exp = j.at("n_exp").get<double>();
  f.log_exp = j.at("log_exp").get<double>();
  return f;
}

double RateSchedule::shift_term(double n) const {
  const double an = a_form(n);
  const double bn = b_form(n);
  return an + bn * std::pow(an * std::sqrt(n), -alpha);
}

double RateSchedule::defect_term(double n) const {
  const double an = a_form(n);
  const double bn = b_form(n);
  const double ln = std::log(n);
  const double term1 = std::pow(n, 1.0 - beta1 / 2.0) * std::pow(an, beta1);
  const double term2 =
      std::pow(n, 1.0 - beta2) * std::pow(ln, beta2) * std::pow(an, -2.0 * beta2);
  const double term3 = n * std::pow(bn, -beta3);
  return term1 + term2 + term3;
}

double RateSchedule::a_liminf_const() const {
  // a(n) / (n^(-1/4) (ln n)^(3/4)) = coeff * n^(n_exp+1/4) (ln n)^(log_exp-3/4).
  const double ne = a_form.n_exp + 0.25;
  const double le = a_form.log_exp - 0.75;
  if (ne > 0.0 || (ne == 0.0 && le > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  if (ne == 0.0 && le == 0.0) return a_form.coeff;
  return 0.0;
}

std::vector<std::string> RateSchedule::validate(std::span<const int> ns) const {
  std::vector<std::string> violations;
  if (!(alpha > 2.0)) violations.push_back("alpha must exceed 2");
  if (!(beta1 > 2.0)) violations.push_back("beta1 must exceed 2");
  if (!(beta2 >= 2.0)) violations.push_back("beta2 must be at least 2");
  if (!(beta3 >= 2.0)) violations.push_back("beta3 must be at least 2");
  if (!(a_form.coeff > 0.0)) violations.push_back("a coefficient must be positive");
  if (!(b_form.coeff > 0.0)) violations.push_back("b coefficient must be positive");
  if (!(zeta1_mean >= 0.0) || !std::isfinite(zeta1_mean)) {
    violations.push_back("zeta1_mean must be finite and nonnegative");
  }

  // a(n) -> 0: needs a negative power, or zero power with negative log power.
  if (a_form.n_exp > 0.0 ||
      (a_form.n_exp == 0.0 && a_form.log_exp >= 0.0)) {
    violations.push_back("a(n) must decay to zero");
  }
  // liminf a(n) / (n^(-1/4) (ln n)^(3/4)) > 0.
  {
    const double ne = a_form.n_exp + 0.25;
    const double le = a_form.log_exp - 0.75;
    if (ne < 0.0 || (ne == 0.0 && le < 0.0)) {
      violations.push_back(
          "a(n) decays faster than n^(-1/4) (ln n)^(3/4); lower-speed limit "
          "violated");
    }
  }
  // b(n) >= 2 * zeta1_mean * n must hold for all n, so b may not grow slower
  // than linearly (up to the boundary case b = c*n with c >= 2*zeta1).
  if (zeta1_mean > 0.0) {
    const bool eventually_ok =
        b_form.n_exp > 1.0 ||
        (b_form.n_exp == 1.0 && b_form.log_exp > 0.0) ||
        (b_form.n_exp == 1.0 && b_form.log_exp == 0.0 &&
         b_form.coeff >= 2.0 * zeta1_mean * (1.0 - 1e-12));
    if (!eventually_ok) {
      violations.push_back(
          "b(n) eventually falls below twice the mean per-step alpha-moment "
          "times n");
    }
  }
  // ... and it must clear that floor at every requested n (tiny relative
  // slack so the boundary schedule b = 2*zeta1*n passes under rounding).
  for (int n : ns) {
    if (n <= 1) {
      violations.push_back("walk lengths must exceed 1");
      break;
    }
    const double floor = 2.0 * zeta1_mean * static_cast<double>(n);
    if (b_form(static_cast<double>(n)) < floor * (1.0 - 1e-12)) {
      violations.push_back("b(" + std::to_string(n) +
                           ") falls below twice the mean per-step "
                           "alpha-moment times n");
      break;
    }
  }
  // b(n) * (a(n) sqrt(n))^(-alpha) -> 0.
  {
    const double ne = b_form.n_exp - alpha * (a_form.n_exp + 0.5);
    const double le = b_form.log_exp - alpha * a_form.log_exp;
    if (ne > 0.0 || (ne == 0.0 && le >= 0.0)) {
      violations.push_back(
          "b(n) grows too fast: b(n) * (a(n) sqrt(n))^(-alpha) does not "
          "vanish");
    }
  }
  return violations;
}

nlohmann::json RateSchedule::to_json() const {
  return {{"alpha", alpha},
          {"beta1", beta1},
          {"beta2", beta2},
          {"beta3", beta3},
          {"a", a_form.to_json()},
          {"b", b_form.to_json()},
          {"zeta1_mean", zeta1_mean}};
}

RateSchedule RateSchedule::from_json(const nlohmann::json& j) {
  RateSchedule s;
  s.alpha = j.at("alpha").get<double>();
  s.beta1 = j.at("beta1").get<double>();
  s.beta2 = j.at("beta2").get<double>();
  s.beta3 = j.at("beta3").get<double>();
  s.a_form = PowerLogForm::from_json(j.at("a"));
  s.b_form = PowerLogForm::from_json(j.at("b"));
  s.zeta1_mean = j.at("zeta1_mean").get<double>();
  return s;
}

std::vector<RateRow> theoretical_rates(const RateSchedule& sched,
                                       std::span<const int> ns) {
  const auto violations = sched.validate(ns);
  if (!violations.empty()) {
    std::string msg = "inadmissible rate schedule:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw std::invalid_argument(msg);
  }
  std::vector<RateRow> rows;
  rows.reserve(ns.size());
  for (int n : ns) {
    const double dn = static_cast<double>(n);
    rows.push_back({n, sched.a(dn), sched.b(dn), sched.shift_term(dn),
                    sched.defect_term(dn)});
  }
  return rows;
}

RateFit fit_rate(std::span<const int> ns, std::span<const double> distances,
                 std::span<const double> envelope_rates) {
  if (ns.size() != distances.size()) {
    throw std::invalid_argument("fit_rate: ns and distances differ in length");
  }
  if (ns.size() < 3) {
    throw std::invalid_argument("fit_rate: need at least 3 points");
  }
  if (!envelope_rates.empty() && envelope_rates.size() != ns.size()) {
    throw std::invalid_argument(
        "fit_rate: envelope rate sequence length mismatch");
  }
  const std::size_t m = ns.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (ns[i] <= 1) throw std::invalid_argument("fit_rate: ns must exceed 1");
    if (!(distances[i] > 0.0) || !std::isfinite(distances[i])) {
      throw std::invalid_argument("fit_rate: distances must be positive");
    }
  }

  NeumaierSum sx, sy, sxx, sxy;
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    lx[i] = std::log(static_cast<double>(ns[i]));
    ly[i] = std::log(distances[i]);
    sx.add(lx[i]);
    sy.add(ly[i]);
    sxx.add(lx[i] * lx[i]);
    sxy.add(lx[i] * ly[i]);
  }
  const double dm = static_cast<double>(m);
  const double mean_x = sx.value() / dm;
  const double mean_y = sy.value() / dm;
  const double var_x = sxx.value() / dm - mean_x * mean_x;
  if (!(var_x > 0.0)) {
    throw std::invalid_argument("fit_rate: ns must not all coincide");
  }
  const double cov_xy = sxy.value() / dm - mean_x * mean_y;

  RateFit fit;
  fit.slope = cov_xy / var_x;
  fit.intercept = mean_y - fit.slope * mean_x;
  NeumaierSum sq;
  for (std::size_t i = 0; i < m; ++i) {
    const double resid = ly[i] - (fit.intercept + fit.slope * lx[i]);
    sq.add(resid * resid);
  }
  fit.residual_rms = std::sqrt(sq.value() / dm);

  if (!envelope_rates.empty()) {
    double c = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!(envelope_rates[i] > 0.0) || !std::isfinite(envelope_rates[i])) {
        throw std::invalid_argument(
            "fit_rate: envelope rates must be positive");
      }
      c = std::max(c, distances[i] / envelope_rates[i]);
    }
    fit.envelope_coeff = c;
  }
  return fit;
}

}  // namespace rwre
