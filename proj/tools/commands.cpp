#include "commands.hpp"

#include "smle/bench.hpp"
#include "smle/glm.hpp"
#include "smle/screen.hpp"
#include "smle/select.hpp"
#include "smle/version.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

namespace fs = std::filesystem;

namespace cli {
namespace {

std::string abspath(const std::string& p) {
  return fs::absolute(fs::path(p)).lexically_normal().string();
}

void ensure_dir(const std::string& d) {
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw smle::IoError("cannot create output directory '" + d + "'");
}

std::string joined(const std::string& dir, const char* file) {
  return (fs::path(dir) / file).string();
}

// --family beats a manifest.json sitting beside the data file (the gen
// subcommand leaves one there with the family recorded).
smle::Family resolve_family(const std::string& flag, const std::string& data_path) {
  if (!flag.empty()) return smle::family_from_string(flag);
  const fs::path sibling = fs::path(data_path).parent_path() / "manifest.json";
  std::error_code ec;
  if (fs::exists(sibling, ec)) {
    try {
      Json j = read_json_file(sibling.string());
      if (j.contains("config") && j["config"].contains("family")) {
        return smle::family_from_string(j["config"]["family"].get<std::string>());
      }
    } catch (const std::exception&) {
      // unreadable manifest: treated as absent
    }
  }
  throw smle::ValidationError("family not given and no manifest.json with one beside '" +
                              data_path + "'");
}

int resolve_k(int k_flag, int n) {
  if (k_flag < 0) return smle::default_k(n);
  if (k_flag == 0) throw smle::ValidationError("k must be at least 1");
  return k_flag;
}

smle::VectorXd to_vector(const std::vector<double>& v) {
  smle::VectorXd out(static_cast<int>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
  return out;
}

std::vector<double> to_std(const smle::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Json index_json(const smle::IndexSet& s) { return Json(s); }

Json coef_json(const LoadedData& ld, const smle::VectorXd& beta) {
  Json arr = Json::array();
  for (int c = 1; c <= static_cast<int>(beta.size()); ++c) {
    if (beta[c - 1] != 0.0) {
      Json e;
      e["column"] = c;
      e["name"] = ld.col_names[c - 1];
      e["value"] = beta[c - 1];
      arr.push_back(std::move(e));
    }
  }
  return arr;
}

void stamp(Json& j) {
  j["schema_version"] = smle::kSchemaVersion;
  j["version"] = smle::kVersion;
}

smle::ScreeningConfig make_screen_config(const LoadedData& ld, int k,
                                         const std::vector<int>& keyset_features,
                                         double tol, bool fast, double u_rate,
                                         int max_iter, int max_u_tries,
                                         bool standardize, bool no_group,
                                         double step_init) {
  smle::ScreeningConfig cfg;
  cfg.k = k;
  if (!keyset_features.empty()) {
    smle::IndexSet feats(keyset_features.begin(), keyset_features.end());
    cfg.keyset = columns_of_features(ld, feats);
  }
  cfg.tol = tol;
  cfg.fast = fast;
  cfg.u_rate = u_rate;
  cfg.max_iter = max_iter;
  cfg.max_u_tries = max_u_tries;
  cfg.standardize = standardize;
  if (ld.has_categorical) cfg.group_map = ld.groups;
  cfg.group = !no_group;
  if (step_init > 0.0) cfg.step_init = step_init;
  return cfg;
}

void write_trace_csv(const std::string& path, const smle::ScreeningResult& res) {
  smle::CsvTable t;
  t.header = {"iter", "loglik", "step_delta", "u_tries", "support_changes"};
  t.rows.push_back({"0", smle::format_double(res.trace.loglik_initial), "0", "0", "0"});
  int iter = 1;
  for (const auto& r : res.trace.records) {
    t.rows.push_back({std::to_string(iter++), smle::format_double(r.loglik),
                      smle::format_double(r.step_delta), std::to_string(r.u_tries),
                      std::to_string(r.support_changes)});
  }
  smle::write_csv(path, t);
}

// Solution path: one column per encoded column that ever enters the support,
// one row per iteration (iteration 0 is the zero start).
void write_path_csv(const std::string& path, const LoadedData& ld,
                    const smle::ScreeningResult& res) {
  std::set<int> ever;
  for (const auto& r : res.trace.records) {
    for (const auto& cv : r.beta_on_support) ever.insert(cv.first);
  }
  const smle::IndexSet cols(ever.begin(), ever.end());

  smle::CsvTable t;
  t.header.push_back("iter");
  for (int c : cols) t.header.push_back(ld.col_names[c - 1]);

  std::vector<std::string> row0(cols.size() + 1, "0");
  t.rows.push_back(row0);
  int iter = 1;
  for (const auto& r : res.trace.records) {
    std::map<int, double> by_col(r.beta_on_support.begin(), r.beta_on_support.end());
    std::vector<std::string> row;
    row.reserve(cols.size() + 1);
    row.push_back(std::to_string(iter++));
    for (int c : cols) {
      auto f = by_col.find(c);
      row.push_back(f == by_col.end() ? "0" : smle::format_double(f->second));
    }
    t.rows.push_back(std::move(row));
  }
  smle::write_csv(path, t);
}

Json screen_result_json(const LoadedData& ld, smle::Family family,
                        const smle::ScreeningConfig& cfg,
                        const smle::ScreeningResult& res) {
  Json j;
  stamp(j);
  j["family"] = smle::to_string(family);
  j["n"] = ld.data.n();
  j["p_features"] = static_cast<int>(ld.feature_names.size());
  j["p_columns"] = ld.data.p();
  j["k"] = cfg.k;
  j["keyset_features"] = index_json(features_of_columns(ld, cfg.keyset));
  j["retained_features"] = index_json(features_of_columns(ld, res.retained));
  j["retained_columns"] = index_json(res.retained);
  j["coefficients"] = coef_json(ld, res.beta_final.beta);
  j["iterations"] = res.iterations;
  j["stop_reason"] = smle::to_string(res.stop_reason);
  j["loglik_initial"] = res.trace.loglik_initial;
  j["loglik_final"] = res.trace.records.empty() ? res.trace.loglik_initial
                                                : res.trace.records.back().loglik;
  return j;
}

smle::ExperimentSpec spec_from_json(const Json& j) {
  smle::ExperimentSpec spec;
  if (!j.contains("cells") || !j["cells"].is_array() || j["cells"].empty()) {
    throw smle::ValidationError("experiment config needs a nonempty 'cells' array");
  }
  try {
    for (const auto& cj : j["cells"]) {
      smle::CellSpec cell;
      cell.name = cj.at("name").get<std::string>();
      smle::GenConfig g;
      g.n = cj.at("n").get<int>();
      g.p = cj.at("p").get<int>();
      g.family = smle::family_from_string(cj.at("family").get<std::string>());
      g.correlation =
          smle::correlation_from_string(cj.value("correlation", std::string("id")));
      g.rho = cj.value("rho", 0.2);
      g.num_truecoef = cj.value("num_true", 5);
      if (cj.contains("pos_true")) {
        g.pos_truecoef = cj["pos_true"].get<std::vector<int>>();
      }
      if (cj.contains("effects")) {
        g.effect_truecoef = to_vector(cj["effects"].get<std::vector<double>>());
      }
      g.sigma_noise = cj.value("sigma", 1.0);
      cell.gen = g;
      cell.k = cj.value("k", 0);
      spec.cells.push_back(std::move(cell));
    }
    if (j.contains("methods")) {
      for (const auto& mj : j["methods"]) {
        spec.methods.push_back(
            {mj.at("name").get<std::string>(), mj.value("fast", false)});
      }
    } else {
      spec.methods = {{"default", false}, {"fast", true}};
    }
    spec.replications = j.value("replications", 100);
  } catch (const smle::Error&) {
    throw;
  } catch (const std::exception& e) {
    throw smle::ValidationError(std::string("malformed experiment config: ") + e.what());
  }
  return spec;
}

}  // namespace

// ---------------------------------------------------------------- gen

Json to_json(const GenOpts& o) {
  Json j;
  j["n"] = o.n;
  j["p"] = o.p;
  j["family"] = o.family;
  j["correlation"] = o.correlation;
  j["rho"] = o.rho;
  j["num_true"] = o.num_true;
  j["pos_true"] = o.pos_true;
  j["effects"] = o.effects;
  j["ctg_pos"] = o.ctg_pos;
  j["ctg_levels"] = o.ctg_levels;
  j["sigma"] = o.sigma;
  j["seed"] = o.seed;
  return j;
}

GenOpts gen_opts_from_json(const Json& j) {
  GenOpts o;
  o.n = j.at("n").get<int>();
  o.p = j.at("p").get<int>();
  o.family = j.value("family", o.family);
  o.correlation = j.value("correlation", o.correlation);
  o.rho = j.value("rho", o.rho);
  o.num_true = j.value("num_true", o.num_true);
  o.pos_true = j.value("pos_true", o.pos_true);
  o.effects = j.value("effects", o.effects);
  o.ctg_pos = j.value("ctg_pos", o.ctg_pos);
  o.ctg_levels = j.value("ctg_levels", o.ctg_levels);
  o.sigma = j.value("sigma", o.sigma);
  o.seed = j.value("seed", o.seed);
  return o;
}

void run_gen(const GenOpts& opts, const std::string& out_dir) {
  ensure_dir(out_dir);

  smle::GenConfig cfg;
  cfg.n = opts.n;
  cfg.p = opts.p;
  cfg.family = smle::family_from_string(opts.family);
  cfg.correlation = smle::correlation_from_string(opts.correlation);
  cfg.rho = opts.rho;
  cfg.num_truecoef = opts.num_true;
  if (!opts.pos_true.empty()) {
    cfg.pos_truecoef = smle::IndexSet(opts.pos_true.begin(), opts.pos_true.end());
  }
  if (!opts.effects.empty()) cfg.effect_truecoef = to_vector(opts.effects);
  if (!opts.ctg_pos.empty()) {
    cfg.pos_ctgidx = smle::IndexSet(opts.ctg_pos.begin(), opts.ctg_pos.end());
    cfg.level_ctgidx = opts.ctg_levels;
  }
  cfg.sigma_noise = opts.sigma;
  cfg.seed = opts.seed;

  smle::GenData gd = smle::gen_data(cfg);
  write_data_csv(joined(out_dir, "data.csv"), gd);

  Json truth;
  stamp(truth);
  truth["family"] = opts.family;
  truth["n"] = opts.n;
  truth["p"] = opts.p;
  truth["correlation"] = opts.correlation;
  truth["rho"] = opts.rho;
  truth["positions"] = index_json(*gd.data.causal_index);
  truth["effects"] = to_std(*gd.data.causal_coef);
  if (gd.categorical) {
    truth["categorical_positions"] = index_json(gd.categorical->positions);
    truth["categorical_levels"] = gd.categorical->levels;
  }
  if (cfg.family == smle::Family::gaussian) truth["sigma"] = opts.sigma;
  truth["seed"] = opts.seed;
  write_json_file(joined(out_dir, "truth.json"), truth);

  Manifest m;
  m.subcommand = "gen";
  m.seed = opts.seed;
  m.threads = 1;
  m.out_dir = abspath(out_dir);
  m.outputs = {"data.csv", "truth.json"};
  m.config = to_json(opts);
  write_manifest(m);
}

// ---------------------------------------------------------------- screen

Json to_json(const ScreenOpts& o) {
  Json j;
  j["data"] = o.data;
  j["family"] = o.family;
  j["k"] = o.k;
  j["keyset"] = o.keyset;
  j["tol"] = o.tol;
  j["fast"] = o.fast;
  j["u_rate"] = o.u_rate;
  j["max_iter"] = o.max_iter;
  j["max_u_tries"] = o.max_u_tries;
  j["standardize"] = o.standardize;
  j["no_group"] = o.no_group;
  j["step_init"] = o.step_init;
  return j;
}

ScreenOpts screen_opts_from_json(const Json& j) {
  ScreenOpts o;
  o.data = j.at("data").get<std::string>();
  o.family = j.value("family", o.family);
  o.k = j.value("k", o.k);
  o.keyset = j.value("keyset", o.keyset);
  o.tol = j.value("tol", o.tol);
  o.fast = j.value("fast", o.fast);
  o.u_rate = j.value("u_rate", o.u_rate);
  o.max_iter = j.value("max_iter", o.max_iter);
  o.max_u_tries = j.value("max_u_tries", o.max_u_tries);
  o.standardize = j.value("standardize", o.standardize);
  o.no_group = j.value("no_group", o.no_group);
  o.step_init = j.value("step_init", o.step_init);
  return o;
}

void run_screen(const ScreenOpts& opts_in, const std::string& out_dir) {
  ensure_dir(out_dir);
  ScreenOpts opts = opts_in;
  opts.data = abspath(opts.data);

  const smle::Family family = resolve_family(opts.family, opts.data);
  opts.family = smle::to_string(family);
  LoadedData ld = load_data_csv(opts.data, family);
  opts.k = resolve_k(opts.k, ld.data.n());

  const smle::ScreeningConfig cfg = make_screen_config(
      ld, opts.k, opts.keyset, opts.tol, opts.fast, opts.u_rate, opts.max_iter,
      opts.max_u_tries, opts.standardize, opts.no_group, opts.step_init);
  const smle::ScreeningResult res = smle::run_screening(ld.data, cfg);

  write_json_file(joined(out_dir, "screen_result.json"),
                  screen_result_json(ld, family, cfg, res));
  write_trace_csv(joined(out_dir, "trace.csv"), res);
  write_path_csv(joined(out_dir, "path.csv"), ld, res);

  Manifest m;
  m.subcommand = "screen";
  m.seed = 1;  // screening draws no random numbers
  m.threads = 1;
  m.out_dir = abspath(out_dir);
  m.inputs["data"] = opts.data;
  m.outputs = {"screen_result.json", "trace.csv", "path.csv"};
  m.config = to_json(opts);
  write_manifest(m);
}

// ---------------------------------------------------------------- select

Json to_json(const SelectOpts& o) {
  Json j;
  j["data"] = o.data;
  j["screen_result"] = o.screen_result;
  j["family"] = o.family;
  j["k"] = o.k;
  j["keyset"] = o.keyset;
  j["tol"] = o.tol;
  j["u_rate"] = o.u_rate;
  j["max_iter"] = o.max_iter;
  j["max_u_tries"] = o.max_u_tries;
  j["standardize"] = o.standardize;
  j["no_group"] = o.no_group;
  j["step_init"] = o.step_init;
  j["criterion"] = o.criterion;
  j["gamma"] = o.gamma;
  j["vote"] = o.vote;
  j["gamma_seq"] = o.gamma_seq;
  j["vote_threshold"] = o.vote_threshold;
  j["k_min"] = o.k_min;
  j["k_max"] = o.k_max;
  j["threads"] = o.threads;
  return j;
}

SelectOpts select_opts_from_json(const Json& j) {
  SelectOpts o;
  o.data = j.at("data").get<std::string>();
  o.screen_result = j.value("screen_result", o.screen_result);
  o.family = j.value("family", o.family);
  o.k = j.value("k", o.k);
  o.keyset = j.value("keyset", o.keyset);
  o.tol = j.value("tol", o.tol);
  o.u_rate = j.value("u_rate", o.u_rate);
  o.max_iter = j.value("max_iter", o.max_iter);
  o.max_u_tries = j.value("max_u_tries", o.max_u_tries);
  o.standardize = j.value("standardize", o.standardize);
  o.no_group = j.value("no_group", o.no_group);
  o.step_init = j.value("step_init", o.step_init);
  o.criterion = j.value("criterion", o.criterion);
  o.gamma = j.value("gamma", o.gamma);
  o.vote = j.value("vote", o.vote);
  o.gamma_seq = j.value("gamma_seq", o.gamma_seq);
  o.vote_threshold = j.value("vote_threshold", o.vote_threshold);
  o.k_min = j.value("k_min", o.k_min);
  o.k_max = j.value("k_max", o.k_max);
  o.threads = j.value("threads", o.threads);
  return o;
}

void run_select(const SelectOpts& opts_in, const std::string& out_dir) {
  ensure_dir(out_dir);
  SelectOpts opts = opts_in;
  opts.data = abspath(opts.data);
  if (!opts.screen_result.empty()) opts.screen_result = abspath(opts.screen_result);

  // Family: flag, then the screen result's record, then the data's manifest.
  smle::Family family;
  if (!opts.family.empty()) {
    family = smle::family_from_string(opts.family);
  } else if (!opts.screen_result.empty()) {
    Json sj = read_json_file(opts.screen_result);
    if (sj.contains("family")) {
      family = smle::family_from_string(sj["family"].get<std::string>());
    } else {
      family = resolve_family("", opts.data);
    }
  } else {
    family = resolve_family("", opts.data);
  }
  opts.family = smle::to_string(family);

  LoadedData ld = load_data_csv(opts.data, family);

  smle::IndexSet candidates;
  if (!opts.screen_result.empty()) {
    Json sj = read_json_file(opts.screen_result);
    if (!sj.contains("retained_columns")) {
      throw smle::ValidationError("'" + opts.screen_result +
                                  "' has no retained_columns field");
    }
    candidates = sj["retained_columns"].get<std::vector<int>>();
  } else {
    opts.k = resolve_k(opts.k, ld.data.n());
    const smle::ScreeningConfig scfg = make_screen_config(
        ld, opts.k, opts.keyset, opts.tol, /*fast=*/false, opts.u_rate,
        opts.max_iter, opts.max_u_tries, opts.standardize, opts.no_group,
        opts.step_init);
    candidates = smle::run_screening(ld.data, scfg).retained;
  }

  smle::SelectionConfig sel;
  sel.k_min = opts.k_min;
  sel.k_max = opts.k_max;
  sel.criterion = smle::criterion_from_string(opts.criterion);
  sel.gamma_ebic = opts.gamma;
  sel.vote = opts.vote;
  sel.gamma_seq = opts.gamma_seq;
  sel.vote_threshold = opts.vote_threshold;
  sel.threads = opts.threads;

  const smle::ScreeningConfig base = make_screen_config(
      ld, /*k=*/1, opts.keyset, opts.tol, /*fast=*/false, opts.u_rate,
      opts.max_iter, opts.max_u_tries, opts.standardize, opts.no_group,
      opts.step_init);
  const smle::SelectionResult result =
      smle::run_selection(ld.data, candidates, sel, base);

  Json j;
  stamp(j);
  j["family"] = opts.family;
  j["n"] = ld.data.n();
  j["p_features"] = static_cast<int>(ld.feature_names.size());
  j["p_columns"] = ld.data.p();
  j["criterion"] = opts.criterion;
  j["gamma"] = opts.gamma;
  j["vote"] = opts.vote;
  j["candidate_features"] = index_json(features_of_columns(ld, candidates));
  j["candidate_columns"] = index_json(candidates);
  j["chosen_k"] = result.chosen_k;
  j["selected_features"] = index_json(features_of_columns(ld, result.selected));
  j["selected_columns"] = index_json(result.selected);
  Json scores = Json::array();
  for (const auto& sm : result.scores) {
    Json e;
    e["k"] = sm.k;
    e["score"] = std::isfinite(sm.score) ? Json(sm.score) : Json(nullptr);
    e["converged"] = sm.converged;
    e["features"] = index_json(features_of_columns(ld, sm.support));
    e["columns"] = index_json(sm.support);
    scores.push_back(std::move(e));
  }
  j["scores"] = std::move(scores);
  if (result.vote_counts) {
    j["gamma_seq"] = result.gamma_used;
    j["vote_threshold"] = opts.vote_threshold;
    Json votes = Json::array();
    for (const auto& [col, count] : *result.vote_counts) {
      Json e;
      e["column"] = col;
      e["feature"] = ld.feature_of_col[col];
      e["count"] = count;
      votes.push_back(std::move(e));
    }
    j["vote_counts"] = std::move(votes);
  }
  write_json_file(joined(out_dir, "select_result.json"), j);

  Manifest m;
  m.subcommand = "select";
  m.seed = 1;  // selection draws no random numbers
  m.threads = opts.threads;
  m.out_dir = abspath(out_dir);
  m.inputs["data"] = opts.data;
  if (!opts.screen_result.empty()) m.inputs["screen_result"] = opts.screen_result;
  m.outputs = {"select_result.json"};
  m.config = to_json(opts);
  write_manifest(m);
}

// ---------------------------------------------------------------- eval

Json to_json(const EvalOpts& o) {
  Json j;
  j["config"] = o.config;
  j["reps"] = o.reps;
  j["seed"] = o.seed;
  j["threads"] = o.threads;
  return j;
}

EvalOpts eval_opts_from_json(const Json& j) {
  EvalOpts o;
  o.config = j.value("config", o.config);
  o.reps = j.value("reps", o.reps);
  o.seed = j.value("seed", o.seed);
  o.threads = j.value("threads", o.threads);
  return o;
}

Json canonical_eval_config() {
  auto cell = [](const char* name, int n, const char* family, double coef, int k) {
    Json c;
    c["name"] = name;
    c["n"] = n;
    c["p"] = 1000;
    c["family"] = family;
    c["correlation"] = "cs";
    c["rho"] = 0.3;
    c["pos_true"] = std::vector<int>{1, 2, 3, 4};
    c["effects"] = std::vector<double>{coef, coef, coef, coef};
    c["k"] = k;
    return c;
  };
  Json j;
  j["cells"] = Json::array({cell("linear", 100, "gaussian", 2.5, 20),
                            cell("poisson", 200, "poisson", 0.7, 10),
                            cell("logistic", 400, "binomial", 1.5, 30)});
  Json m_default, m_fast;
  m_default["name"] = "default";
  m_default["fast"] = false;
  m_fast["name"] = "fast";
  m_fast["fast"] = true;
  j["methods"] = Json::array({m_default, m_fast});
  j["replications"] = 100;
  return j;
}

void run_eval(const EvalOpts& opts_in, const std::string& out_dir) {
  ensure_dir(out_dir);
  EvalOpts opts = opts_in;

  Json cfg_json;
  if (!opts.config.empty()) {
    opts.config = abspath(opts.config);
    cfg_json = read_json_file(opts.config);
  } else {
    cfg_json = canonical_eval_config();
  }
  smle::ExperimentSpec spec = spec_from_json(cfg_json);
  if (opts.reps > 0) spec.replications = opts.reps;
  opts.reps = spec.replications;
  spec.master_seed = opts.seed;
  spec.threads = opts.threads;

  const smle::ExperimentReport report = smle::run_experiment(spec);

  smle::CsvTable t;
  t.header = {"cell", "method", "replications", "failures",
              "ssr",  "prr",    "mean_iterations"};
  smle::CsvTable timing;
  timing.header = {"cell", "method", "mean_time_s"};
  for (const auto& row : report.rows) {
    t.rows.push_back({row.cell, row.method, std::to_string(row.replications),
                      std::to_string(row.failures), smle::format_double(row.ssr),
                      smle::format_double(row.prr),
                      smle::format_double(row.mean_iterations)});
    timing.rows.push_back({row.cell, row.method, smle::format_double(row.mean_time_s)});
  }
  smle::write_csv(joined(out_dir, "report.csv"), t);
  smle::write_csv(joined(out_dir, "timing.csv"), timing);

  Manifest m;
  m.subcommand = "eval";
  m.seed = opts.seed;
  m.threads = opts.threads;
  m.out_dir = abspath(out_dir);
  if (!opts.config.empty()) m.inputs["config"] = opts.config;
  m.outputs = {"report.csv", "timing.csv"};
  m.config = to_json(opts);
  m.config["spec"] = cfg_json;  // materialized cells, for the record
  write_manifest(m);
}

// ---------------------------------------------------------------- predict

Json to_json(const PredictOpts& o) {
  Json j;
  j["data"] = o.data;
  j["result"] = o.result;
  j["newdata"] = o.newdata;
  j["type"] = o.type;
  return j;
}

PredictOpts predict_opts_from_json(const Json& j) {
  PredictOpts o;
  o.data = j.at("data").get<std::string>();
  o.result = j.at("result").get<std::string>();
  o.newdata = j.value("newdata", o.newdata);
  o.type = j.value("type", o.type);
  return o;
}

void run_predict(const PredictOpts& opts_in, const std::string& out_dir) {
  ensure_dir(out_dir);
  PredictOpts opts = opts_in;
  opts.data = abspath(opts.data);
  opts.result = abspath(opts.result);
  if (!opts.newdata.empty()) opts.newdata = abspath(opts.newdata);

  smle::PredictScale scale;
  if (opts.type == "link") {
    scale = smle::PredictScale::link;
  } else if (opts.type == "response") {
    scale = smle::PredictScale::response;
  } else {
    throw smle::ValidationError("type must be 'link' or 'response'");
  }

  Json rj = read_json_file(opts.result);
  if (!rj.contains("family")) {
    throw smle::ValidationError("'" + opts.result + "' has no family field");
  }
  const smle::Family family =
      smle::family_from_string(rj["family"].get<std::string>());
  smle::IndexSet features;
  if (rj.contains("selected_features")) {
    features = rj["selected_features"].get<std::vector<int>>();
  } else if (rj.contains("retained_features")) {
    features = rj["retained_features"].get<std::vector<int>>();
  } else {
    throw smle::ValidationError(
        "'" + opts.result + "' has neither selected_features nor retained_features");
  }

  LoadedData ld = load_data_csv(opts.data, family);
  const smle::IndexSet cols = columns_of_features(ld, features);
  const smle::RefitResult fit = smle::newton_refit(ld.data, cols);

  smle::MatrixXd X_new;
  if (opts.newdata.empty()) {
    X_new = ld.data.X;
  } else {
    X_new = encode_like(ld, smle::read_csv(opts.newdata));
  }
  const smle::VectorXd pred = smle::predict(X_new, fit.coef, family, scale);

  smle::CsvTable t;
  t.header = {"prediction"};
  for (int i = 0; i < pred.size(); ++i) {
    t.rows.push_back({smle::format_double(pred[i])});
  }
  smle::write_csv(joined(out_dir, "predictions.csv"), t);

  Manifest m;
  m.subcommand = "predict";
  m.seed = 1;
  m.threads = 1;
  m.out_dir = abspath(out_dir);
  m.inputs["data"] = opts.data;
  m.inputs["result"] = opts.result;
  if (!opts.newdata.empty()) m.inputs["newdata"] = opts.newdata;
  m.outputs = {"predictions.csv"};
  m.config = to_json(opts);
  write_manifest(m);
}

// ---------------------------------------------------------------- replay

void run_replay(const std::string& manifest_path, const std::string& out_dir) {
  const Manifest m = read_manifest(abspath(manifest_path));
  const std::string target = out_dir.empty() ? m.out_dir : out_dir;
  if (m.subcommand == "gen") {
    run_gen(gen_opts_from_json(m.config), target);
  } else if (m.subcommand == "screen") {
    run_screen(screen_opts_from_json(m.config), target);
  } else if (m.subcommand == "select") {
    run_select(select_opts_from_json(m.config), target);
  } else if (m.subcommand == "eval") {
    run_eval(eval_opts_from_json(m.config), target);
  } else if (m.subcommand == "predict") {
    run_predict(predict_opts_from_json(m.config), target);
  } else {
    throw smle::ValidationError("manifest has unknown subcommand '" + m.subcommand + "'");
  }
}

}  // namespace cli
