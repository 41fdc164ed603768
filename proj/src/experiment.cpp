#include <rwre/experiment.hpp>

#include <rwre/metrics.hpp>
#include <rwre/parallel.hpp>
#include <rwre/quenched_walk.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace rwre {

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// All output files go through temp-file + rename so a crash never leaves a
// half-written file under its final name.
void write_text_atomic(const std::filesystem::path& path,
                       const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string());
    }
    out << text;
    out.flush();
    if (!out) {
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::filesystem::path& path,
                       const nlohmann::json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

const nlohmann::json& need_field(const nlohmann::json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw std::invalid_argument(std::string("config: missing field '") + name +
                                "'");
  }
  return j.at(name);
}

template <typename T>
T get_field(const nlohmann::json& j, const char* name) {
  try {
    return need_field(j, name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument(std::string("config: field '") + name +
                                "' has the wrong type");
  }
}

}  // namespace

// ---- Config ---------------------------------------------------------------

nlohmann::json CheckThresholds::to_json() const {
  return {{"matched_ks", matched_ks},
          {"as_deviation", as_deviation},
          {"final_ks", final_ks},
          {"slope_max", slope_max}};
}

CheckThresholds CheckThresholds::from_json(const nlohmann::json& j) {
  CheckThresholds t;
  t.matched_ks = j.value("matched_ks", t.matched_ks);
  t.as_deviation = j.value("as_deviation", t.as_deviation);
  t.final_ks = j.value("final_ks", t.final_ks);
  t.slope_max = j.value("slope_max", t.slope_max);
  return t;
}

void ExperimentConfig::validate() const {
  if (n_list.empty()) {
    throw std::invalid_argument("config: n_list must be nonempty");
  }
  for (int n : n_list) {
    if (n < 2) {
      throw std::invalid_argument("config: n_list entries must be at least 2");
    }
  }
  for (std::size_t i = 0; i + 1 < n_list.size(); ++i) {
    if (n_list[i + 1] <= n_list[i]) {
      throw std::invalid_argument("config: n_list must be strictly increasing");
    }
  }
  if (outer < 2) throw std::invalid_argument("config: outer must be at least 2");
  if (inner < 2) throw std::invalid_argument("config: inner must be at least 2");
  if (mesh < 1) throw std::invalid_argument("config: mesh must be at least 1");
  if (!(alpha > 2.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("config: alpha must exceed 2");
  }
  if (!(beta1 > 0.0) || !std::isfinite(beta1)) {
    throw std::invalid_argument("config: beta1 must be positive");
  }
  if (!(beta2 > 0.0) || !std::isfinite(beta2)) {
    throw std::invalid_argument("config: beta2 must be positive");
  }
  if (!(beta3 > 0.0) || !std::isfinite(beta3)) {
    throw std::invalid_argument("config: beta3 must be positive");
  }
  if (!(target_distance > 0.0) || !std::isfinite(target_distance)) {
    throw std::invalid_argument("config: target_distance must be positive");
  }
  if (output_dir.empty()) {
    throw std::invalid_argument("config: output_dir must be nonempty");
  }
  if (!(thresholds.matched_ks > 0.0)) {
    throw std::invalid_argument("config: thresholds.matched_ks must be positive");
  }
  if (!(thresholds.as_deviation > 0.0)) {
    throw std::invalid_argument(
        "config: thresholds.as_deviation must be positive");
  }
  if (!(thresholds.final_ks > 0.0)) {
    throw std::invalid_argument("config: thresholds.final_ks must be positive");
  }
  if (!std::isfinite(thresholds.slope_max)) {
    throw std::invalid_argument("config: thresholds.slope_max must be finite");
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["environment"] = environment.to_json();
  j["functional"] = functional.to_json();
  j["n_list"] = n_list;
  j["outer"] = outer;
  j["inner"] = inner;
  j["mesh"] = mesh;
  j["alpha"] = alpha;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["beta3"] = beta3;
  j["schedule"] = {{"a", a_form.to_json()}, {"b", b_form.to_json()}};
  j["master_seed"] = master_seed;
  j["output_dir"] = output_dir;
  j["target_distance"] = target_distance;
  j["thresholds"] = thresholds.to_json();
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.environment = EnvironmentSpec::from_json(need_field(j, "environment"));
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument("config: field 'environment' has the wrong type");
  }
  try {
    c.functional = PathFunctional::from_json(need_field(j, "functional"));
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument("config: field 'functional' has the wrong type");
  }
  c.n_list = get_field<std::vector<int>>(j, "n_list");
  c.outer = get_field<std::size_t>(j, "outer");
  c.inner = get_field<std::size_t>(j, "inner");
  c.mesh = get_field<std::size_t>(j, "mesh");
  c.alpha = get_field<double>(j, "alpha");
  c.beta1 = get_field<double>(j, "beta1");
  c.beta2 = get_field<double>(j, "beta2");
  c.beta3 = get_field<double>(j, "beta3");
  const nlohmann::json& sched = need_field(j, "schedule");
  try {
    c.a_form = PowerLogForm::from_json(need_field(sched, "a"));
    c.b_form = PowerLogForm::from_json(need_field(sched, "b"));
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument("config: field 'schedule' has the wrong type");
  }
  c.master_seed = get_field<std::uint64_t>(j, "master_seed");
  c.output_dir = get_field<std::string>(j, "output_dir");
  c.target_distance = j.value("target_distance", c.target_distance);
  if (j.contains("thresholds")) {
    try {
      c.thresholds = CheckThresholds::from_json(j.at("thresholds"));
    } catch (const nlohmann::json::exception&) {
      throw std::invalid_argument("config: field 'thresholds' has the wrong type");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("config: cannot open " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config: " + path.string() +
                                " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

// ---- Shared run plumbing --------------------------------------------------

namespace {

struct RunContext {
  EnvironmentSpec env;  // normalized
  MomentReport moments;
  double sigma = 0.0;
  SeedSpec master;
  std::filesystem::path dir;
};

RunContext prepare(const ExperimentConfig& cfg) {
  cfg.validate();
  RunContext c;
  c.env = normalize_spec(cfg.environment);
  c.moments = env_moments(c.env, cfg.alpha, cfg.beta1, cfg.beta2, cfg.beta3);
  c.sigma = std::sqrt(std::max(0.0, c.moments.sigma_sq.value));
  c.master = SeedSpec{cfg.master_seed, 0};
  c.dir = cfg.output_dir;
  std::filesystem::create_directories(c.dir);
  return c;
}

// The config echoed into summaries, minus the output directory: summaries
// must not depend on where they are written.
nlohmann::json config_echo(const ExperimentConfig& cfg) {
  nlohmann::json j = cfg.to_json();
  j.erase("output_dir");
  return j;
}

RateSchedule schedule_from(const ExperimentConfig& cfg,
                           const MomentReport& moments) {
  RateSchedule s;
  s.alpha = cfg.alpha;
  s.beta1 = cfg.beta1;
  s.beta2 = cfg.beta2;
  s.beta3 = cfg.beta3;
  s.a_form = cfg.a_form;
  s.b_form = cfg.b_form;
  s.zeta1_mean = moments.alpha_sum_mean.finite
                     ? moments.alpha_sum_mean.value
                     : std::numeric_limits<double>::infinity();
  return s;
}

double meta_inner_stderr(const EmpiricalDist& d) {
  return d.meta.at("max_inner_stderr").get<double>();
}

constexpr char kDistancesHeader[] =
    "n,ks,levy,prokhorov_lo,prokhorov_hi,dkw_eps,y_n,r_n,max_inner_stderr\n";

struct DistanceRow {
  int n = 0;
  double ks = 0.0, levy = 0.0, prokhorov_lo = 0.0, prokhorov_hi = 0.0;
  double dkw_eps = 0.0, y_n = 0.0, r_n = 0.0, max_inner_stderr = 0.0;

  std::string to_csv_line() const {
    std::string s = std::to_string(n);
    for (double v : {ks, levy, prokhorov_lo, prokhorov_hi, dkw_eps, y_n, r_n,
                     max_inner_stderr}) {
      s += ',';
      s += format_value(v);
    }
    s += '\n';
    return s;
  }

  nlohmann::json to_json() const {
    return {{"n", n},
            {"ks", ks},
            {"levy", levy},
            {"prokhorov_lo", prokhorov_lo},
            {"prokhorov_hi", prokhorov_hi},
            {"dkw_eps", dkw_eps},
            {"y_n", y_n},
            {"r_n", r_n},
            {"max_inner_stderr", max_inner_stderr}};
  }
};

}  // namespace

// ---- Building blocks ------------------------------------------------------

bool ks_trend_ok(std::span<const double> ks, double dkw_eps) {
  if (ks.size() < 2) return true;
  const double band = 2.0 * dkw_eps;
  int large_increases = 0;
  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    if (ks[i + 1] - ks[i] > band) ++large_increases;
  }
  return large_increases <= 1 && ks.back() <= ks.front() + band;
}

std::vector<EmpiricalDist> sample_matched_direct_multi(
    std::span<const PathFunctional> fs, double w_scale, double b_scale,
    std::size_t n, std::size_t outer, std::size_t inner, const SeedSpec& seed,
    int threads) {
  if (fs.empty()) {
    throw std::invalid_argument("sample_matched_direct: no functionals");
  }
  if (n < 1) {
    throw std::invalid_argument("sample_matched_direct: n must be >= 1");
  }
  if (outer < 1) {
    throw std::invalid_argument("sample_matched_direct: outer must be >= 1");
  }
  if (inner < 2) {
    throw std::invalid_argument("sample_matched_direct: inner must be >= 2");
  }
  if (!(w_scale >= 0.0) || !(b_scale >= 0.0) || !std::isfinite(w_scale) ||
      !std::isfinite(b_scale)) {
    throw std::invalid_argument(
        "sample_matched_direct: scales must be finite and nonnegative");
  }

  const SeedSpec w_seed = seed.child("matched-w");
  const SeedSpec b_seed = seed.child("matched-b");

  const std::size_t F = fs.size();
  std::vector<double> values(outer * F);
  std::vector<double> errors(outer * F);
  parallel_for(outer, threads, [&](std::size_t j) {
    const GridPath w = sample_brownian_grid(n, w_seed.child(j));
    std::vector<double> scaled(w.vertices().begin(), w.vertices().end());
    for (auto& v : scaled) v *= w_scale;
    const auto ests = conditional_mean_given_path_multi(
        fs, b_scale, GridPath(std::move(scaled)), static_cast<int>(inner),
        b_seed.child(j));
    for (std::size_t f = 0; f < F; ++f) {
      values[j * F + f] = ests[f].value;
      errors[j * F + f] = ests[f].std_error;
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
    meta["w_scale"] = w_scale;
    meta["b_scale"] = b_scale;
    meta["max_inner_stderr"] = max_se;
    meta["seed"] = {{"master", seed.master}, {"stream", seed.stream}};
    out.push_back(EmpiricalDist::from_samples(std::move(sample), std::move(meta)));
  }
  return out;
}

AsTrackReport as_convergence_track(const EnvRealization& env,
                                   const PathFunctional& f,
                                   std::span<const int> n_list,
                                   std::size_t inner, std::size_t mesh,
                                   std::size_t ref_pairs, const SeedSpec& seed,
                                   int threads) {
  if (n_list.empty()) {
    throw std::invalid_argument("as_convergence_track: empty n_list");
  }
  if (inner < 2) {
    throw std::invalid_argument("as_convergence_track: inner must be >= 2");
  }
  if (mesh < 1) {
    throw std::invalid_argument("as_convergence_track: mesh must be >= 1");
  }
  if (ref_pairs < 2) {
    throw std::invalid_argument("as_convergence_track: ref_pairs must be >= 2");
  }
  std::vector<int> ns(n_list.begin(), n_list.end());
  std::sort(ns.begin(), ns.end());
  for (int n : ns) {
    if (n < 1) {
      throw std::invalid_argument("as_convergence_track: n must be >= 1");
    }
    if (static_cast<std::size_t>(n) > env.size()) {
      throw std::invalid_argument(
          "as_convergence_track: environment shorter than requested n");
    }
  }

  // Reference E f(B) with antithetic pairs (B, -B): odd functionals cancel
  // exactly, so their reference is 0 with zero error.  Serial accumulation
  // keeps the order fixed.
  const SeedSpec ref_seed = seed.child("as-ref");
  MeanAccumulator ref_acc;
  std::vector<double> neg(mesh + 1);
  for (std::size_t r = 0; r < ref_pairs; ++r) {
    const GridPath b = sample_brownian_grid(mesh, ref_seed.child(r));
    const auto verts = b.vertices();
    const double plus = f.evaluate_vertices(verts);
    for (std::size_t k = 0; k <= mesh; ++k) neg[k] = -verts[k];
    const double minus = f.evaluate_vertices(neg);
    ref_acc.add(0.5 * (plus + minus));
  }
  const Estimate ref = ref_acc.finish();

  // One walk sweep per requested length, on the prefix environment.  Seeds
  // are indexed by n itself, so the row set does not depend on ordering.
  const SeedSpec walk_seed = seed.child("as-walk");
  AsTrackReport rep;
  rep.reference = ref.value;
  rep.reference_std_error = ref.std_error;
  rep.rows.resize(ns.size());
  parallel_for(ns.size(), threads, [&](std::size_t i) {
    const int n = ns[i];
    const EnvRealization prefix{
        std::vector<StepDistribution>(env.steps.begin(), env.steps.begin() + n),
        env.seed_trace};
    const Estimate est = quenched_expectation(
        prefix, f, static_cast<int>(inner),
        walk_seed.child(static_cast<std::uint64_t>(n)));
    rep.rows[i] = AsTrackRow{n, est.value, est.std_error,
                             std::abs(est.value - ref.value)};
  });

  const std::size_t len = ns.size();
  const std::size_t tail_start = len - (len + 1) / 2;
  for (std::size_t i = tail_start; i < len; ++i) {
    rep.sup_deviation_tail = std::max(rep.sup_deviation_tail,
                                      rep.rows[i].deviation);
  }
  return rep;
}

// ---- Runs -----------------------------------------------------------------

RunResult run_simulate(const ExperimentConfig& cfg, int threads) {
  const RunContext c = prepare(cfg);
  std::vector<std::string> files;
  double max_se = 0.0;
  for (int n : cfg.n_list) {
    const SeedSpec seed_n =
        c.master.child("n").child(static_cast<std::uint64_t>(n));
    const EmpiricalDist fq = sample_quenched_dist(
        c.env, cfg.functional, static_cast<std::size_t>(n), cfg.outer,
        cfg.inner, seed_n, threads);
    const std::string name = "quenched_n" + std::to_string(n) + ".csv";
    fq.write_csv(c.dir / name);
    files.push_back(name);
    max_se = std::max(max_se, meta_inner_stderr(fq));
  }
  const bool noise_ok = max_se <= cfg.target_distance / 5.0;
  nlohmann::json summary;
  summary["config"] = config_echo(cfg);
  summary["sigma"] = c.sigma;
  summary["files"] = files;
  summary["max_inner_stderr"] = max_se;
  summary["checks"] = {{"inner_noise_ok", noise_ok}, {"pass", noise_ok}};
  write_json_atomic(c.dir / "summary.json", summary);
  return RunResult{noise_ok, summary};
}

RunResult run_limit(const ExperimentConfig& cfg, int threads) {
  const RunContext c = prepare(cfg);
  const EmpiricalDist fl =
      sample_limit_dist(cfg.functional, c.sigma, cfg.outer, cfg.inner, cfg.mesh,
                        c.master.child("limit"), threads);
  fl.write_csv(c.dir / "limit.csv");
  const double max_se = meta_inner_stderr(fl);
  const bool noise_ok = max_se <= cfg.target_distance / 5.0;
  nlohmann::json summary;
  summary["config"] = config_echo(cfg);
  summary["sigma"] = c.sigma;
  summary["files"] = {"limit.csv"};
  summary["max_inner_stderr"] = max_se;
  summary["checks"] = {{"inner_noise_ok", noise_ok}, {"pass", noise_ok}};
  write_json_atomic(c.dir / "summary.json", summary);
  return RunResult{noise_ok, summary};
}

RunResult run_convergence(const ExperimentConfig& cfg, int threads) {
  const RunContext c = prepare(cfg);

  const RateSchedule sched = schedule_from(cfg, c.moments);
  const std::vector<std::string> sched_viol = sched.validate(cfg.n_list);
  const bool schedule_ok = sched_viol.empty();
  std::vector<RateRow> rate_rows;
  if (schedule_ok) rate_rows = theoretical_rates(sched, cfg.n_list);

  // distances.csv grows one whole row at a time (built fully, then written
  // and flushed), so an interrupted run leaves only complete rows.
  std::ofstream csv(c.dir / "distances.csv", std::ios::binary | std::ios::trunc);
  if (!csv) {
    throw std::runtime_error("cannot open " +
                             (c.dir / "distances.csv").string());
  }
  csv << kDistancesHeader;
  csv.flush();

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double dkw = dkw_band(cfg.outer, kDkwDelta);
  std::vector<DistanceRow> rows;
  rows.reserve(cfg.n_list.size());
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    const int n = cfg.n_list[i];
    const SeedSpec seed_n =
        c.master.child("n").child(static_cast<std::uint64_t>(n));
    const EmpiricalDist fq = sample_quenched_dist(
        c.env, cfg.functional, static_cast<std::size_t>(n), cfg.outer,
        cfg.inner, seed_n, threads);
    const EmpiricalDist fl =
        sample_limit_dist(cfg.functional, c.sigma, cfg.outer, cfg.inner,
                          cfg.mesh, seed_n, threads);
    const ProkhorovBounds pb = prokhorov_bounds(fq, fl);
    DistanceRow row;
    row.n = n;
    row.ks = ks_distance(fq, fl);
    row.levy = levy_distance(fq, fl);
    row.prokhorov_lo = pb.lower;
    row.prokhorov_hi = pb.upper;
    row.dkw_eps = dkw;
    row.y_n = schedule_ok ? rate_rows[i].shift : nan;
    row.r_n = schedule_ok ? rate_rows[i].defect : nan;
    row.max_inner_stderr = std::max(meta_inner_stderr(fq), meta_inner_stderr(fl));
    csv << row.to_csv_line();
    csv.flush();
    rows.push_back(row);
  }

  std::vector<double> ks_col;
  for (const DistanceRow& r : rows) ks_col.push_back(r.ks);
  const bool trend_ok = ks_trend_ok(ks_col, dkw);
  const bool final_ks_ok = rows.back().ks <= cfg.thresholds.final_ks;

  // Log-log fit of the KS column, with the envelope constant against the
  // reference decay n^(-1/4) (ln n)^(3/4).
  bool fit_performed = rows.size() >= 3;
  for (const DistanceRow& r : rows) {
    if (!(r.ks > 0.0)) fit_performed = false;
  }
  RateFit fit;
  if (fit_performed) {
    std::vector<double> env_rates;
    for (const DistanceRow& r : rows) {
      const double dn = static_cast<double>(r.n);
      env_rates.push_back(std::pow(dn, -0.25) * std::pow(std::log(dn), 0.75));
    }
    fit = fit_rate(cfg.n_list, ks_col, env_rates);
  }
  const bool slope_ok = !fit_performed || fit.slope <= cfg.thresholds.slope_max;

  bool noise_ok = true;
  for (const DistanceRow& r : rows) {
    if (r.max_inner_stderr > cfg.target_distance / 5.0) noise_ok = false;
  }

  const bool pass = trend_ok && final_ks_ok && slope_ok && noise_ok;

  nlohmann::json summary;
  summary["config"] = config_echo(cfg);
  summary["sigma"] = c.sigma;
  summary["moments"] = c.moments.to_json();
  summary["dkw_delta"] = kDkwDelta;
  summary["schedule_ok"] = schedule_ok;
  summary["schedule_violations"] = sched_viol;
  summary["rows"] = nlohmann::json::array();
  for (const DistanceRow& r : rows) summary["rows"].push_back(r.to_json());
  if (fit_performed) {
    summary["fit"] = {{"slope", fit.slope},
                      {"intercept", fit.intercept},
                      {"residual_rms", fit.residual_rms},
                      {"envelope_coeff", fit.envelope_coeff}};
  } else {
    summary["fit"] = nullptr;
  }
  summary["checks"] = {{"trend_ok", trend_ok},
                       {"final_ks_ok", final_ks_ok},
                       {"slope_ok", slope_ok},
                       {"inner_noise_ok", noise_ok},
                       {"pass", pass}};
  write_json_atomic(c.dir / "summary.json", summary);
  return RunResult{pass, summary};
}

RunResult run_matched_law(const ExperimentConfig& cfg, int threads) {
  if (cfg.environment.family != EnvFamily::bio_normal) {
    throw std::invalid_argument(
        "matched-law: environment family must be bio_normal (the exact "
        "finite-n identity holds only there)");
  }
  const RunContext c = prepare(cfg);
  const double s1 = c.env.param("sigma1");
  const double s2 = c.env.param("sigma2");
  const int n = cfg.n_list.back();

  const EmpiricalDist fq = sample_quenched_dist(
      c.env, cfg.functional, static_cast<std::size_t>(n), cfg.outer, cfg.inner,
      c.master, threads);
  const EmpiricalDist fd = sample_matched_direct_multi(
      std::span<const PathFunctional>(&cfg.functional, 1), s1, s2,
      static_cast<std::size_t>(n), cfg.outer, cfg.inner, c.master, threads)[0];
  fq.write_csv(c.dir / "matched_quenched.csv");
  fd.write_csv(c.dir / "matched_direct.csv");

  const double ks = ks_distance(fq, fd);
  const double max_se = std::max(meta_inner_stderr(fq), meta_inner_stderr(fd));
  const bool ks_ok = ks <= cfg.thresholds.matched_ks;
  const bool noise_ok = max_se <= cfg.target_distance / 5.0;
  const bool pass = ks_ok && noise_ok;

  nlohmann::json summary;
  summary["config"] = config_echo(cfg);
  summary["n"] = n;
  summary["sigma1"] = s1;
  summary["sigma2"] = s2;
  summary["ks"] = ks;
  summary["dkw_eps"] = dkw_band(cfg.outer, kDkwDelta);
  summary["max_inner_stderr"] = max_se;
  summary["threshold"] = cfg.thresholds.matched_ks;
  summary["files"] = {"matched_quenched.csv", "matched_direct.csv"};
  summary["checks"] = {{"ks_ok", ks_ok},
                       {"inner_noise_ok", noise_ok},
                       {"pass", pass}};
  write_json_atomic(c.dir / "summary.json", summary);
  return RunResult{pass, summary};
}

RunResult run_as_convergence(const ExperimentConfig& cfg, int threads) {
  const RunContext c = prepare(cfg);
  if (c.moments.sigma_sq.value != 0.0) {
    throw std::invalid_argument(
        "as-converge: sigma nonzero for this environment; the almost-sure "
        "mode needs a zero mixing variance");
  }

  const int n_max = cfg.n_list.back();
  const EnvRealization env_full = sample_environment(
      c.env, static_cast<std::size_t>(n_max), c.master.child("as-env"));
  const AsTrackReport rep =
      as_convergence_track(env_full, cfg.functional, cfg.n_list, cfg.inner,
                           cfg.mesh, cfg.outer, c.master, threads);

  std::ofstream csv(c.dir / "as_track.csv", std::ios::binary | std::ios::trunc);
  if (!csv) {
    throw std::runtime_error("cannot open " + (c.dir / "as_track.csv").string());
  }
  csv << "n,value,std_error,deviation\n";
  for (const AsTrackRow& r : rep.rows) {
    std::string line = std::to_string(r.n);
    for (double v : {r.value, r.std_error, r.deviation}) {
      line += ',';
      line += format_value(v);
    }
    line += '\n';
    csv << line;
    csv.flush();
  }

  bool noise_ok = rep.reference_std_error <= cfg.target_distance / 5.0;
  for (const AsTrackRow& r : rep.rows) {
    if (r.std_error > cfg.target_distance / 5.0) noise_ok = false;
  }
  const bool dev_ok = rep.sup_deviation_tail <= cfg.thresholds.as_deviation;
  const bool pass = dev_ok && noise_ok;

  nlohmann::json summary;
  summary["config"] = config_echo(cfg);
  summary["sigma"] = 0.0;
  summary["reference"] = rep.reference;
  summary["reference_std_error"] = rep.reference_std_error;
  summary["rows"] = nlohmann::json::array();
  for (const AsTrackRow& r : rep.rows) {
    summary["rows"].push_back({{"n", r.n},
                               {"value", r.value},
                               {"std_error", r.std_error},
                               {"deviation", r.deviation}});
  }
  summary["sup_deviation_tail"] = rep.sup_deviation_tail;
  summary["threshold"] = cfg.thresholds.as_deviation;
  summary["checks"] = {{"deviation_ok", dev_ok},
                       {"inner_noise_ok", noise_ok},
                       {"pass", pass}};
  write_json_atomic(c.dir / "summary.json", summary);
  return RunResult{pass, summary};
}

RunResult run_assumption_report(const ExperimentConfig& cfg, int /*threads*/) {
  const RunContext c = prepare(cfg);
  const RateSchedule sched = schedule_from(cfg, c.moments);
  const AssumptionReport rep = check_assumptions(
      c.env, cfg.alpha, cfg.beta1, cfg.beta2, cfg.beta3, sched, cfg.n_list);
  write_json_atomic(c.dir / "assumptions.json", rep.to_json());

  nlohmann::json summary;
  summary["config"] = config_echo(cfg);
  summary["report"] = rep.to_json();
  summary["checks"] = {{"pass", rep.pass}};
  write_json_atomic(c.dir / "summary.json", summary);
  return RunResult{rep.pass, summary};
}

}  // namespace rwre
