// Command-line front end for the convergence laboratory.
//
// Exit codes: 0 = run completed and every check passed, 2 = run completed
// but a check failed, 1 = usage, configuration, or I/O error.

#include <rwre/experiment.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  bool out_set = false;
  int threads = 0;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "JSON experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", args.seed, "override the master seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  sub->add_option("--out", args.out, "override the output directory")
      ->each([&args](const std::string&) { args.out_set = true; });
  sub->add_option("--threads", args.threads,
                  "worker threads (0 = all hardware threads)")
      ->check(CLI::NonNegativeNumber);
}

void print_rows(const nlohmann::json& summary) {
  if (!summary.contains("rows")) return;
  for (const auto& row : summary.at("rows")) {
    std::cout << "  n=" << row.at("n").get<int>();
    for (const char* key : {"ks", "levy", "prokhorov_hi", "deviation"}) {
      if (row.contains(key)) {
        std::cout << "  " << key << "=" << row.at(key).dump();
      }
    }
    std::cout << "\n";
  }
}

void print_checks(const nlohmann::json& summary) {
  if (!summary.contains("checks")) return;
  for (const auto& [name, ok] : summary.at("checks").items()) {
    if (name == "pass") continue;
    std::cout << "  check " << name << ": " << (ok.get<bool>() ? "ok" : "FAIL")
              << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convergence laboratory for random walks in time-random "
               "environments"};
  app.require_subcommand(1);
  CommonArgs args;

  CLI::App* simulate =
      app.add_subcommand("simulate", "sample the quenched outer distributions");
  CLI::App* limit =
      app.add_subcommand("limit", "sample the limit-law outer distribution");
  CLI::App* compare = app.add_subcommand(
      "compare", "quenched vs limit distances across walk lengths");
  CLI::App* matched = app.add_subcommand(
      "matched-law", "finite-n matched construction check (bio_normal)");
  CLI::App* as_converge = app.add_subcommand(
      "as-converge", "single-environment track (zero mixing variance)");
  CLI::App* assumptions =
      app.add_subcommand("assumptions", "moment and schedule audit");
  for (CLI::App* sub :
       {simulate, limit, compare, matched, as_converge, assumptions}) {
    add_common(sub, args);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? 0 : 1;
  }

  try {
    rwre::ExperimentConfig cfg = rwre::ExperimentConfig::load_file(args.config_path);
    if (args.seed_set) cfg.master_seed = args.seed;
    if (args.out_set) cfg.output_dir = args.out;

    rwre::RunResult result;
    std::string mode;
    if (simulate->parsed()) {
      mode = "simulate";
      result = rwre::run_simulate(cfg, args.threads);
    } else if (limit->parsed()) {
      mode = "limit";
      result = rwre::run_limit(cfg, args.threads);
    } else if (compare->parsed()) {
      mode = "compare";
      result = rwre::run_convergence(cfg, args.threads);
    } else if (matched->parsed()) {
      mode = "matched-law";
      result = rwre::run_matched_law(cfg, args.threads);
    } else if (as_converge->parsed()) {
      mode = "as-converge";
      result = rwre::run_as_convergence(cfg, args.threads);
    } else {
      mode = "assumptions";
      result = rwre::run_assumption_report(cfg, args.threads);
    }

    std::cout << mode << ": output in " << cfg.output_dir << "\n";
    print_rows(result.summary);
    if (result.summary.contains("ks")) {
      std::cout << "  ks=" << result.summary.at("ks").dump() << "\n";
    }
    if (result.summary.contains("sup_deviation_tail")) {
      std::cout << "  sup_deviation_tail="
                << result.summary.at("sup_deviation_tail").dump() << "\n";
    }
    if (result.summary.contains("fit") && !result.summary.at("fit").is_null()) {
      std::cout << "  fit slope=" << result.summary.at("fit").at("slope").dump()
                << " envelope_coeff="
                << result.summary.at("fit").at("envelope_coeff").dump() << "\n";
    }
    print_checks(result.summary);
    std::cout << (result.pass ? "PASS" : "FAIL") << "\n";
    return result.pass ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
