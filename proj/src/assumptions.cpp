#include "rwre/assumptions.hpp"

#include <array>

namespace rwre {

nlohmann::json AssumptionReport::to_json() const {
  return {{"spec", spec.to_json()},
          {"moments", moments.to_json()},
          {"moments_all_finite", moments_all_finite},
          {"order_violations", order_violations},
          {"schedule_violations", schedule_violations},
          {"reduced_orders",
           {{"beta1", reduced_moments.beta1},
            {"beta2", reduced_moments.beta2},
            {"beta3", reduced_moments.beta3}}},
          {"reduced_moments", reduced_moments.to_json()},
          {"reduced_all_finite", reduced_all_finite},
          {"pass", pass}};
}

AssumptionReport check_assumptions(const EnvironmentSpec& spec, double alpha,
                                   double beta1, double beta2, double beta3,
                                   const RateSchedule& sched,
                                   std::span<const int> ns) {
  static constexpr std::array<int, 4> kDefaultNs = {64, 256, 1024, 4096};
  const std::span<const int> probe = ns.empty() ? std::span<const int>(kDefaultNs) : ns;

  AssumptionReport report;
  report.spec = spec;
  report.moments = env_moments(spec, alpha, beta1, beta2, beta3);
  report.moments_all_finite = report.moments.all_finite();

  if (!(alpha > 2.0)) report.order_violations.push_back("alpha must exceed 2");
  if (!(beta1 > 2.0)) report.order_violations.push_back("beta1 must exceed 2");
  if (!(beta2 >= 2.0)) {
    report.order_violations.push_back("beta2 must be at least 2");
  }
  if (!(beta3 >= 2.0)) {
    report.order_violations.push_back("beta3 must be at least 2");
  }
  if (!report.moments_all_finite) {
    report.order_violations.push_back(
        "environment lacks a required finite moment at the requested orders");
  }

  report.schedule_violations = sched.validate(probe);

  // Composite-moment shortcut: a single finite composite moment of order
  // alpha covers the triple (2*alpha, alpha, alpha).
  report.reduced_moments = env_moments(spec, alpha, 2.0 * alpha, alpha, alpha);
  report.reduced_all_finite = report.reduced_moments.all_finite();

  report.pass = report.order_violations.empty() &&
                report.schedule_violations.empty();
  return report;
}

}  // namespace rwre
