#pragma once

// Subcommand runners. Each takes a fully-parsed options struct plus an output
// directory, writes its artifacts there, and finishes with a manifest that
// round-trips through the *_from_json readers so `replay` can re-run it.

#include "artifacts.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cli {

struct GenOpts {
  int n = 0;
  int p = 0;
  std::string family = "gaussian";
  std::string correlation = "id";
  double rho = 0.2;
  int num_true = 5;
  std::vector<int> pos_true;        // empty -> random positions
  std::vector<double> effects;      // empty -> random effects
  std::vector<int> ctg_pos;         // features to bin as categorical
  std::vector<int> ctg_levels;      // levels per binned feature
  double sigma = 1.0;
  std::uint64_t seed = 1;
};
Json to_json(const GenOpts& o);
GenOpts gen_opts_from_json(const Json& j);
void run_gen(const GenOpts& opts, const std::string& out_dir);

struct ScreenOpts {
  std::string data;
  std::string family;               // empty -> sibling manifest
  int k = -1;                       // -1 -> default from n; 0 is an error
  std::vector<int> keyset;          // original feature ids
  double tol = 1e-2;
  bool fast = false;
  double u_rate = 0.5;
  int max_iter = 500;
  int max_u_tries = 50;
  bool standardize = false;
  bool no_group = false;
  double step_init = 0.0;           // 0 -> adaptive 1/max(|X|)^2
};
Json to_json(const ScreenOpts& o);
ScreenOpts screen_opts_from_json(const Json& j);
void run_screen(const ScreenOpts& opts, const std::string& out_dir);

struct SelectOpts {
  std::string data;
  std::string screen_result;        // empty -> screen internally with k
  std::string family;
  int k = -1;                       // screening size when screening internally
  std::vector<int> keyset;
  double tol = 1e-2;
  double u_rate = 0.5;
  int max_iter = 500;
  int max_u_tries = 50;
  bool standardize = false;
  bool no_group = false;
  double step_init = 0.0;
  std::string criterion = "ebic";
  double gamma = 0.5;
  bool vote = false;
  std::vector<double> gamma_seq{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  double vote_threshold = 0.6;
  int k_min = 1;
  int k_max = 0;                    // 0 -> candidate unit count
  int threads = 1;
};
Json to_json(const SelectOpts& o);
SelectOpts select_opts_from_json(const Json& j);
void run_select(const SelectOpts& opts, const std::string& out_dir);

struct EvalOpts {
  std::string config;               // empty -> built-in canonical cells
  int reps = 100;
  std::uint64_t seed = 1;
  int threads = 1;
};
Json to_json(const EvalOpts& o);
EvalOpts eval_opts_from_json(const Json& j);
void run_eval(const EvalOpts& opts, const std::string& out_dir);

struct PredictOpts {
  std::string data;                 // training CSV
  std::string result;               // screen_result.json or select_result.json
  std::string newdata;              // empty -> fitted values on training rows
  std::string type = "response";    // link | response
};
Json to_json(const PredictOpts& o);
PredictOpts predict_opts_from_json(const Json& j);
void run_predict(const PredictOpts& opts, const std::string& out_dir);

// Re-runs the subcommand recorded in a manifest. Outputs go to out_dir when
// given, else to the manifest's recorded out_dir.
void run_replay(const std::string& manifest_path, const std::string& out_dir);

// The canonical three-cell benchmark (linear / poisson / logistic) as JSON,
// the same shape `--config` files use.
Json canonical_eval_config();

}  // namespace cli
