#pragma once

// Experiment orchestration: configuration files, the convergence study
// (quenched distribution vs limit law across walk lengths), the matched
// finite-n law check, the single-environment almost-sure track, and the
// assumption audit.
//
// Every run is a pure function of (config, threads): files written under
// output_dir are byte-identical across reruns and across thread counts.
// Nothing volatile (timestamps, host names, thread counts, absolute paths)
// enters the outputs.

#include <rwre/assumptions.hpp>
#include <rwre/empirical_dist.hpp>
#include <rwre/env_models.hpp>
#include <rwre/functionals.hpp>
#include <rwre/limit_law.hpp>
#include <rwre/rates.hpp>
#include <rwre/rng.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rwre {

// Confidence parameter behind every reported DKW band.
inline constexpr double kDkwDelta = 0.05;

// Pass/fail thresholds for the orchestrated checks, all overridable from
// the config file's "thresholds" object.
struct CheckThresholds {
  double matched_ks = 0.05;    // matched-law: two-sample KS gate
  double as_deviation = 0.05;  // almost-sure track: tail sup-deviation gate
  double final_ks = 0.1;       // convergence: KS at the largest n
  double slope_max = -0.1;     // convergence: fitted log-log slope gate

  nlohmann::json to_json() const;
  static CheckThresholds from_json(const nlohmann::json& j);
  friend bool operator==(const CheckThresholds&, const CheckThresholds&) = default;
};

struct ExperimentConfig {
  EnvironmentSpec environment;  // as declared; runs normalize it on entry
  PathFunctional functional = PathFunctional::clipped_endpoint(2.0);
  std::vector<int> n_list = {64, 256, 1024, 4096};
  std::size_t outer = 2000;  // environment (resp. conditioning-path) draws
  std::size_t inner = 4000;  // walks (resp. inner paths) per outer draw
  std::size_t mesh = 1024;   // grid resolution of simulated Brownian paths
  double alpha = 3.0;        // moment orders of the quantitative statement
  double beta1 = 3.0;
  double beta2 = 2.0;
  double beta3 = 2.0;
  PowerLogForm a_form{1.0, -0.125, 0.0};  // tuning sequences; the mean
  PowerLogForm b_form{4.0, 1.0, 0.0};     // per-step alpha-moment is filled
                                          // in from the environment at run
                                          // time
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  // Inner-noise policy: every inner standard error must stay below
  // target_distance / 5 so inner noise cannot masquerade as distance.
  double target_distance = 0.1;
  CheckThresholds thresholds;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load_file(const std::filesystem::path& path);

  friend bool operator==(const ExperimentConfig& x, const ExperimentConfig& y) {
    return x.to_json() == y.to_json();
  }
};

// Outcome of one orchestrated run: the overall gate plus the exact JSON
// document written to <output_dir>/summary.json.
struct RunResult {
  bool pass = true;
  nlohmann::json summary;
};

// Samples the quenched outer distribution at every configured n and writes
// quenched_n<k>.csv per walk length.  Seeding matches run_convergence, so
// the files reproduce the quenched side of the comparison exactly.
RunResult run_simulate(const ExperimentConfig& cfg, int threads = 0);

// Samples the limit-law outer distribution once (it does not depend on n)
// and writes limit.csv.
RunResult run_limit(const ExperimentConfig& cfg, int threads = 0);

// The main study: per n, quenched and limit outer distributions, distance
// sandwich, theoretical rate columns; distances.csv (one whole row written
// and flushed per n) and summary.json with the fitted rate and check flags.
RunResult run_convergence(const ExperimentConfig& cfg, int threads = 0);

// Finite-n matched-law check (bio_normal environments only): the quenched
// distribution at the largest configured n against the direct two-scale
// Gaussian construction of the same law.  Writes matched_quenched.csv,
// matched_direct.csv, summary.json.
RunResult run_matched_law(const ExperimentConfig& cfg, int threads = 0);

// Almost-sure mode (environments with zero mixing variance only): one
// environment realization, nested prefixes across n_list, the quenched
// mean tracked against a fixed Monte Carlo reference for E f(B).  Writes
// as_track.csv and summary.json.
RunResult run_as_convergence(const ExperimentConfig& cfg, int threads = 0);

// Moment table, order checks and schedule admissibility; writes
// assumptions.json.
RunResult run_assumption_report(const ExperimentConfig& cfg, int threads = 0);

// ---- Building blocks exposed for direct use and testing -------------------

// Trend acceptance rule shared by the convergence run and the acceptance
// gate.  Adjacent increases within the two rows' combined sampling bands
// (2 * dkw_eps) are treated as noise; at most one larger violation is
// tolerated; and the final value may not exceed the first by more than the
// combined bands (so a sequence cannot drift upward in noise-sized steps).
bool ks_trend_ok(std::span<const double> ks, double dkw_eps);

// Direct construction of the matched finite-n law: outer draws of a
// Gaussian-walk conditioning path on mesh n, inner Gaussian walks added on
// top, values E(f(b_scale*B + w_scale*W) | W).  Shared paths across the
// functional list; element i is the distribution for fs[i].
std::vector<EmpiricalDist> sample_matched_direct_multi(
    std::span<const PathFunctional> fs, double w_scale, double b_scale,
    std::size_t n, std::size_t outer, std::size_t inner, const SeedSpec& seed,
    int threads = 0);

struct AsTrackRow {
  int n = 0;
  double value = 0.0;      // inner estimate of the quenched mean at this n
  double std_error = 0.0;  // its inner standard error
  double deviation = 0.0;  // |value - reference|
};

struct AsTrackReport {
  std::vector<AsTrackRow> rows;       // one per requested n, ascending
  double reference = 0.0;             // Monte Carlo estimate of E f(B)
  double reference_std_error = 0.0;
  double sup_deviation_tail = 0.0;    // max deviation over the largest
                                      // ceil(len/2) walk lengths
};

// Core of the almost-sure mode.  env must hold at least max(n_list) steps;
// prefixes of the one realization give the nested environments.  The
// reference E f(B) uses ref_pairs antithetically paired Brownian paths
// (B, -B), which makes it exact (zero, with zero error) for odd
// functionals.  Walk lengths need not be sorted; rows come back sorted.
AsTrackReport as_convergence_track(const EnvRealization& env,
                                   const PathFunctional& f,
                                   std::span<const int> n_list,
                                   std::size_t inner, std::size_t mesh,
                                   std::size_t ref_pairs, const SeedSpec& seed,
                                   int threads = 0);

}  // namespace rwre
