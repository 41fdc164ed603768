#pragma once

// Assumption audit: checks that an environment family and a rate schedule
// satisfy everything the quantitative convergence statement needs —
// finiteness of the required environment moments, admissibility of the
// tuning sequences, and validity of the moment orders themselves.
//
// Also reports the composite-moment shortcut: a single order alpha induces
// the canonical order triple (beta1, beta2, beta3) = (2*alpha, alpha, alpha),
// which is the choice used when only the composite moment
// E[(E_mu|S_1|^alpha)^2] is known to be finite.

#include <json.hpp>

#include <span>
#include <string>
#include <vector>

#include "rwre/env_models.hpp"
#include "rwre/rates.hpp"

namespace rwre {

struct AssumptionReport {
  EnvironmentSpec spec;
  MomentReport moments;            // at the requested orders
  bool moments_all_finite = false;
  std::vector<std::string> order_violations;     // alpha/beta range breaches
  std::vector<std::string> schedule_violations;  // from RateSchedule::validate
  MomentReport reduced_moments;    // at (2*alpha, alpha, alpha)
  bool reduced_all_finite = false;
  bool pass = false;  // orders valid && moments finite && schedule admissible

  nlohmann::json to_json() const;
};

// Audits the environment/schedule pair.  Violations are collected in the
// report, never thrown; the only exceptions are precondition breaches
// (unnormalized spec, alpha <= 2 making the moment table undefined).
// ns are the walk lengths the schedule will be used at; when empty the
// desk-scale defaults {64, 256, 1024, 4096} are probed.
AssumptionReport check_assumptions(const EnvironmentSpec& spec, double alpha,
                                   double beta1, double beta2, double beta3,
                                   const RateSchedule& sched,
                                   std::span<const int> ns = {});

}  // namespace rwre
