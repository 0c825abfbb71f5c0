// Apache License, Version 2.0, refer to LICENSE.txt
//
// fablab: partition priors, exhaustive desk-scale verification, FAB-EM
// mixture fitting, and the dominance / d-sweep experiment suites.
//
// Exit codes: 0 success, 1 user or validation error, 2 budget exceeded.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "fablab/config.hpp"
#include "fablab/io.hpp"
#include "fablab/verify.hpp"

namespace {

int cmd_verify_priors(int n_max, int k_max) {
  const auto reports = fablab::run_prior_identity_suite(n_max, k_max);

  std::printf("prior identity suite (n <= %d, k <= %d)\n", n_max, k_max);
  std::printf("%-38s %10s %14s %10s  %s\n", "identity", "instances",
              "max deviation", "tolerance", "status");
  bool all_pass = true;
  for (const auto& r : reports) {
    std::printf("%-38s %10llu %14.3e %10.0e  %s\n", r.identity.c_str(),
                static_cast<unsigned long long>(r.instances),
                r.max_abs_deviation, r.tolerance, r.pass ? "pass" : "FAIL");
    all_pass = all_pass && r.pass;
  }

  std::printf("\nfixed-K normalizer, count-tuple vs partition support (informational)\n");
  std::printf("%4s %4s %18s %18s\n", "n", "k", "count tuples", "partitions");
  for (const auto& row : fablab::normalizer_table(10, 5)) {
    std::printf("%4d %4d %18s %18s\n", row.n, row.k,
                fablab::format_double(row.compositions).c_str(),
                fablab::format_double(row.partitions).c_str());
  }

  std::printf("\ntotal sequence mass over {1..k}^n (informational, not asserted)\n");
  std::printf("%4s %4s %18s\n", "n", "k", "mass");
  for (const auto& row :
       fablab::sequence_mass_table(std::min(n_max, 7), k_max)) {
    std::printf("%4d %4d %18s\n", row.n, row.k,
                fablab::format_double(row.total_mass).c_str());
  }
  return all_pass ? 0 : 1;
}

struct FitArgs {
  std::string data_path;
  std::string out_path;
  fablab::FabConfig cfg;
  bool header = false;
  std::string init = "random";
};

int cmd_fit(FitArgs& args) {
  args.cfg.init = args.init == "kmeans" ? fablab::InitMethod::KMeansStyle
                                        : fablab::InitMethod::RandomResponsibilities;
  const fablab::Matrix x = fablab::load_csv_matrix(args.data_path, args.header);

  const double dc = 2.0 * static_cast<double>(x.cols());
  if (args.cfg.d > 0.0 && !fablab::gfic_d_in_nominal_range(args.cfg.d, dc)) {
    std::cerr << "note: d = " << args.cfg.d << " lies outside (1, " << dc / 2.0
              << "), the open range for this parameter dimensionality\n";
  }

  const fablab::FabResult result = fablab::fab_fit(x, args.cfg);
  fablab::write_file_atomic(
      args.out_path,
      fablab::model_json(result.model, args.cfg.d, args.cfg.seed,
                         result.trace.iterations, result.trace.converged));

  std::printf("selected k = %d, objective = %s, iterations = %d, converged = %s\n",
              result.model.components(),
              fablab::format_double(result.trace.records.back().objective).c_str(),
              result.trace.iterations,
              result.trace.converged ? "true" : "false");
  return 0;
}

std::string resolve_out(const std::string& cli_out, const std::string& cfg_out) {
  if (!cli_out.empty()) return cli_out;
  if (!cfg_out.empty()) return cfg_out;
  throw fablab::ConfigError("no output path: pass --out or set \"out\" in the config");
}

int cmd_lab_dominance(const std::string& config_path, const std::string& cli_out) {
  const fablab::DominanceConfig cfg = fablab::load_dominance_config(config_path);
  const std::string out = resolve_out(cli_out, cfg.out);
  const fablab::GeneratedData data = fablab::generate_gmm_data(cfg.dataset);
  const auto rows = fablab::dominance_curve(data.x, cfg.replications, cfg.priors,
                                            cfg.k_max, cfg.var_floor_scale);
  fablab::write_file_atomic(out, fablab::dominance_csv(rows));
  std::printf("dominance: %zu rows -> %s\n", rows.size(), out.c_str());
  return 0;
}

int cmd_lab_selection(const std::string& config_path, const std::string& cli_out) {
  const fablab::SelectionConfig cfg = fablab::load_selection_config(config_path);
  const std::string out = resolve_out(cli_out, cfg.out);

  const double dc = 2.0 * static_cast<double>(cfg.dataset.dims);
  for (double d : cfg.d_grid) {
    if (d > 0.0 && !fablab::gfic_d_in_nominal_range(d, dc)) {
      std::cerr << "note: d = " << d << " lies outside (1, " << dc / 2.0 << ")\n";
    }
  }

  const auto rows = fablab::selection_sweep(cfg.dataset, cfg.d_grid, cfg.seeds, cfg.fit);
  fablab::write_file_atomic(out, fablab::selection_csv(rows));
  std::printf("selection: %zu cells -> %s\n", rows.size(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partition priors over cluster assignments, exhaustive checks, "
               "and FAB-EM mixture fitting"};
  app.require_subcommand(1);

  int n_max = 7;
  int k_max = 4;
  auto* verify = app.add_subcommand("verify-priors",
                                    "Exhaustively check the prior identities");
  verify->add_option("--n-max", n_max, "Largest N checked (<= 8)");
  verify->add_option("--k-max", k_max, "Largest slot count checked");

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit a mixture to a CSV dataset");
  fit->add_option("data", fit_args.data_path, "Input CSV, one observation per row")
      ->required();
  fit->add_option("--k-init", fit_args.cfg.k_init, "Initial component count")
      ->required();
  fit->add_option("--d", fit_args.cfg.d, "Shrinkage exponent (0 = plain EM)");
  fit->add_option("--seed", fit_args.cfg.seed, "RNG seed");
  fit->add_option("--out", fit_args.out_path, "Output model JSON path")->required();
  fit->add_option("--max-iters", fit_args.cfg.max_iters, "Iteration cap");
  fit->add_flag("--header", fit_args.header, "Skip a header row");
  fit->add_option("--prune-threshold", fit_args.cfg.prune_threshold,
                  "Minimum soft count (default max(d, 1))");
  fit->add_option("--rel-tol", fit_args.cfg.rel_tol, "Convergence tolerance");
  fit->add_option("--var-floor-scale", fit_args.cfg.var_floor_scale,
                  "Variance floor as a fraction of the data variance");
  fit->add_option("--init", fit_args.init, "random | kmeans")
      ->check(CLI::IsMember({"random", "kmeans"}));

  auto* lab = app.add_subcommand("lab", "Experiment suites");
  lab->require_subcommand(1);
  std::string dom_config, dom_out;
  auto* dominance = lab->add_subcommand("dominance",
                                        "Prior-vs-likelihood dominance curve");
  dominance->add_option("config", dom_config, "JSON experiment config")->required();
  dominance->add_option("--out", dom_out, "Output CSV path");
  std::string sel_config, sel_out;
  auto* selection = lab->add_subcommand("selection", "Model-selection d-sweep");
  selection->add_option("config", sel_config, "JSON experiment config")->required();
  selection->add_option("--out", sel_out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (verify->parsed()) return cmd_verify_priors(n_max, k_max);
    if (fit->parsed()) return cmd_fit(fit_args);
    if (dominance->parsed()) return cmd_lab_dominance(dom_config, dom_out);
    if (selection->parsed()) return cmd_lab_selection(sel_config, sel_out);
  } catch (const fablab::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
