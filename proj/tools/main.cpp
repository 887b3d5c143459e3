#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"smle: joint feature screening for high-dimensional GLMs"};
  app.require_subcommand(1);

  cli::GenOpts gen;
  std::string gen_out = ".";
  CLI::App* cg = app.add_subcommand("gen", "Generate a synthetic GLM dataset");
  cg->add_option("--n", gen.n, "Sample size")->required();
  cg->add_option("--p", gen.p, "Number of features")->required();
  cg->add_option("--family", gen.family, "gaussian|binomial|poisson")
      ->capture_default_str();
  cg->add_option("--correlation", gen.correlation, "id|ma|cs|ar")
      ->capture_default_str();
  cg->add_option("--rho", gen.rho, "Correlation parameter")->capture_default_str();
  cg->add_option("--num-true", gen.num_true,
                 "Causal feature count when --pos-true is absent")
      ->capture_default_str();
  cg->add_option("--pos-true", gen.pos_true, "Causal positions, e.g. 1,3,5")
      ->delimiter(',');
  cg->add_option("--effects", gen.effects, "Causal effects, aligned with --pos-true")
      ->delimiter(',');
  cg->add_option("--ctg-pos", gen.ctg_pos, "Features to bin as categorical")
      ->delimiter(',');
  cg->add_option("--ctg-levels", gen.ctg_levels, "Levels per binned feature")
      ->delimiter(',');
  cg->add_option("--sigma", gen.sigma, "Gaussian noise standard deviation")
      ->capture_default_str();
  cg->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
  cg->add_option("--out-dir", gen_out, "Output directory")->capture_default_str();
  cg->callback([&] { cli::run_gen(gen, gen_out); });

  cli::ScreenOpts scr;
  std::string scr_out = ".";
  CLI::App* cs = app.add_subcommand("screen", "Run SMLE feature screening");
  cs->add_option("--data", scr.data, "Training data CSV")->required();
  cs->add_option("--family", scr.family,
                 "gaussian|binomial|poisson (default: from the data's manifest)");
  cs->add_option("--k", scr.k, "Retained model size (default: floor(0.5 ln(n) n^(1/3)))");
  cs->add_option("--keyset", scr.keyset, "Feature ids always retained, e.g. 1,4,5")
      ->delimiter(',');
  cs->add_option("--tol", scr.tol, "Convergence tolerance on the step norm")
      ->capture_default_str();
  cs->add_flag("--fast", scr.fast, "Enable the relaxed stopping rules");
  cs->add_option("--u-rate", scr.u_rate, "Step shrink factor of the u-search")
      ->capture_default_str();
  cs->add_option("--max-iter", scr.max_iter, "Iteration cap")->capture_default_str();
  cs->add_option("--max-u-tries", scr.max_u_tries, "Step-search try cap")
      ->capture_default_str();
  cs->add_flag("--standardize", scr.standardize,
               "Center and scale non-indicator columns before fitting");
  cs->add_flag("--no-group", scr.no_group,
               "Threshold dummy columns individually instead of per feature");
  cs->add_option("--step-init", scr.step_init,
                 "Initial step size (default: 1/max|X|^2, adaptive)");
  cs->add_option("--out-dir", scr_out, "Output directory")->capture_default_str();
  cs->callback([&] { cli::run_screen(scr, scr_out); });

  cli::SelectOpts sel;
  std::string sel_out = ".";
  CLI::App* cl = app.add_subcommand("select", "Post-screening model selection");
  cl->add_option("--data", sel.data, "Training data CSV")->required();
  cl->add_option("--screen-result", sel.screen_result,
                 "screen_result.json providing the candidate set (default: screen here)");
  cl->add_option("--family", sel.family,
                 "gaussian|binomial|poisson (default: from the result or manifest)");
  cl->add_option("--k", sel.k, "Screening size when no --screen-result is given");
  cl->add_option("--keyset", sel.keyset, "Feature ids always kept")->delimiter(',');
  cl->add_option("--tol", sel.tol, "Screening tolerance")->capture_default_str();
  cl->add_option("--u-rate", sel.u_rate, "Step shrink factor")->capture_default_str();
  cl->add_option("--max-iter", sel.max_iter, "Screening iteration cap")
      ->capture_default_str();
  cl->add_option("--max-u-tries", sel.max_u_tries, "Step-search try cap")
      ->capture_default_str();
  cl->add_flag("--standardize", sel.standardize, "Standardize before fitting");
  cl->add_flag("--no-group", sel.no_group, "Ungrouped thresholding");
  cl->add_option("--step-init", sel.step_init, "Initial step size (default adaptive)");
  cl->add_option("--criterion", sel.criterion, "aic|bic|ebic")->capture_default_str();
  cl->add_option("--gamma", sel.gamma, "EBIC gamma")->capture_default_str();
  cl->add_flag("--vote", sel.vote, "Vote across --gamma-seq (EBIC only)");
  cl->add_option("--gamma-seq", sel.gamma_seq, "Gamma grid for voting")
      ->delimiter(',');
  cl->add_option("--vote-threshold", sel.vote_threshold,
                 "Keep features selected in at least this fraction of runs")
      ->capture_default_str();
  cl->add_option("--k-min", sel.k_min, "Smallest model size scored")
      ->capture_default_str();
  cl->add_option("--k-max", sel.k_max, "Largest model size scored (default: all)");
  cl->add_option("--threads", sel.threads, "Worker threads")->capture_default_str();
  cl->add_option("--out-dir", sel_out, "Output directory")->capture_default_str();
  cl->callback([&] { cli::run_select(sel, sel_out); });

  cli::EvalOpts ev;
  std::string ev_out = ".";
  CLI::App* ce = app.add_subcommand("eval", "Monte Carlo screening benchmark");
  ce->add_option("--config", ev.config,
                 "Experiment config JSON (default: built-in three-cell benchmark)");
  ce->add_option("--reps", ev.reps, "Replications per cell")->capture_default_str();
  ce->add_option("--seed", ev.seed, "Master RNG seed")->capture_default_str();
  ce->add_option("--threads", ev.threads, "Worker threads")->capture_default_str();
  ce->add_option("--out-dir", ev_out, "Output directory")->capture_default_str();
  ce->callback([&] { cli::run_eval(ev, ev_out); });

  cli::PredictOpts pr;
  std::string pr_out = ".";
  CLI::App* cp = app.add_subcommand("predict", "Refit a result's support and predict");
  cp->add_option("--data", pr.data, "Training data CSV")->required();
  cp->add_option("--result", pr.result,
                 "screen_result.json or select_result.json naming the support")
      ->required();
  cp->add_option("--newdata", pr.newdata,
                 "CSV to predict for (default: the training rows)");
  cp->add_option("--type", pr.type, "link|response")->capture_default_str();
  cp->add_option("--out-dir", pr_out, "Output directory")->capture_default_str();
  cp->callback([&] { cli::run_predict(pr, pr_out); });

  std::string manifest_path;
  std::string rp_out;
  CLI::App* cr = app.add_subcommand("replay", "Re-run the subcommand a manifest records");
  cr->add_option("manifest", manifest_path, "Path to manifest.json")->required();
  cr->add_option("--out-dir", rp_out, "Output directory (default: the recorded one)");
  cr->callback([&] { cli::run_replay(manifest_path, rp_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const smle::Error& e) {
    std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[E_RUNTIME]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
