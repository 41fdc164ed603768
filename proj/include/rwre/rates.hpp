#pragma once

// Rate schedules and rate fitting for the quantitative convergence checks.
//
// A schedule consists of two tuning sequences a(n), b(n) of the form
// coeff * n^n_exp * (ln n)^log_exp together with the moment orders
// (alpha, beta1, beta2, beta3).  From these the quantitative bound
// sequences are evaluated:
//
//   shift term   y(n) = a + b * (a*sqrt(n))^(-alpha)
//   defect term  r(n) = n^(1-beta1/2) a^beta1
//                     + n^(1-beta2) (ln n)^beta2 a^(-2*beta2)
//                     + n * b^(-beta3)
//
// Admissibility conditions on the sequences: a(n) -> 0 but not faster than
// n^(-1/4) (ln n)^(3/4) up to a constant; b(n) >= 2 * zeta1_mean * n with
// b(n)*(a(n)*sqrt(n))^(-alpha) -> 0, where zeta1_mean is the mean per-step
// alpha-moment of the environment.

#include <json.hpp>

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace rwre {

// coeff * n^n_exp * (ln n)^log_exp.
struct PowerLogForm {
  double coeff = 1.0;
  double n_exp = 0.0;
  double log_exp = 0.0;

  double operator()(double n) const;

  nlohmann::json to_json() const;
  static PowerLogForm from_json(const nlohmann::json& j);
  friend bool operator==(const PowerLogForm&, const PowerLogForm&) = default;
};

struct RateSchedule {
  double alpha = 3.0;
  double beta1 = 3.0;
  double beta2 = 2.0;
  double beta3 = 2.0;
  PowerLogForm a_form;       // must decay to 0, not too fast
  PowerLogForm b_form;       // must dominate 2 * zeta1_mean * n
  double zeta1_mean = 0.0;   // mean per-step alpha-moment (from env_moments)

  double a(double n) const { return a_form(n); }
  double b(double n) const { return b_form(n); }
  double shift_term(double n) const;   // y(n)
  double defect_term(double n) const;  // r(n)

  // The liminf constant of a(n) / (n^(-1/4) (ln n)^(3/4)): positive and
  // possibly +infinity for admissible schedules.  Stored knowledge only;
  // nothing downstream predicts constants from it.
  double a_liminf_const() const;

  // Empty result = admissible.  ns are the walk lengths the schedule will
  // be evaluated at (the per-n floor on b is checked there; the asymptotic
  // conditions are checked on exponents).
  std::vector<std::string> validate(std::span<const int> ns) const;

  nlohmann::json to_json() const;
  static RateSchedule from_json(const nlohmann::json& j);
  friend bool operator==(const RateSchedule&, const RateSchedule&) = default;
};

struct RateRow {
  int n = 0;
  double a = 0.0;
  double b = 0.0;
  double shift = 0.0;   // y(n)
  double defect = 0.0;  // r(n)
};

// Evaluates the schedule at each n; throws std::invalid_argument listing
// every violation if the schedule is inadmissible.
std::vector<RateRow> theoretical_rates(const RateSchedule& sched,
                                       std::span<const int> ns);

struct RateFit {
  double slope = 0.0;      // least-squares slope of log d against log n
  double intercept = 0.0;
  double residual_rms = 0.0;
  // max_n distance_n / rate_n when a reference rate sequence is supplied;
  // NaN otherwise.
  double envelope_coeff = std::numeric_limits<double>::quiet_NaN();
};

// Log-log least squares through (n_i, distance_i), optionally fitting the
// envelope constant against a theoretical rate sequence (same length).
RateFit fit_rate(std::span<const int> ns, std::span<const double> distances,
                 std::span<const double> envelope_rates = {});

}  // namespace rwre
