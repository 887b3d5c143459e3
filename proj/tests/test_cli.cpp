// End-to-end checks of the command-line tool: artifact schemas, categorical
// handling, the benchmark and prediction subcommands, and error exits.
// argv[1] is the CLI binary; prints one line per check, exits nonzero on any
// failure.

#include "smle/csv.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("%s - %s\n", ok ? "ok" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

int run(const std::string& cmd) {
  return std::system((cmd + " > /dev/null 2>&1").c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <cli-binary>\n", argv[0]);
    return 2;
  }
  const std::string cli = std::string("\"") + argv[1] + "\" ";
  const fs::path root =
      fs::temp_directory_path() /
      ("smle_cli_test_" + std::to_string(static_cast<unsigned>(::getpid())));
  std::error_code ec;
  fs::remove_all(root, ec);
  fs::create_directories(root);
  const auto dir = [&](const std::string& d) {
    fs::create_directories(root / d);
    return (root / d).string();
  };

  // ------------------------------------------------ numeric pipeline
  const std::string gen_dir = dir("gen");
  check(run(cli + "gen --n 80 --p 30 --family binomial --correlation ar "
                  "--rho 0.6 --pos-true 2 9 14 --effects 1.5 -2 2 --seed 5 "
                  "--out-dir " + gen_dir) == 0,
        "gen exits 0");
  check(fs::exists(fs::path(gen_dir) / "data.csv") &&
            fs::exists(fs::path(gen_dir) / "truth.json") &&
            fs::exists(fs::path(gen_dir) / "manifest.json"),
        "gen writes data.csv, truth.json, manifest.json");
  {
    Json truth = read_json(fs::path(gen_dir) / "truth.json");
    check(truth["positions"] == Json::array({2, 9, 14}),
          "truth.json records the causal positions");
  }

  const std::string screen_dir = dir("screen");
  check(run(cli + "screen --data " + gen_dir + "/data.csv --k 6 --keyset 5 "
                  "--out-dir " + screen_dir) == 0,
        "screen exits 0");
  {
    Json sr = read_json(fs::path(screen_dir) / "screen_result.json");
    const auto retained = sr["retained_features"].get<std::vector<int>>();
    check(static_cast<int>(retained.size()) == 6,
          "screen retains exactly k features");
    bool has5 = false;
    for (int j : retained) has5 = has5 || j == 5;
    check(has5, "screen keeps the keyset feature");
    check(sr["family"] == "binomial" && sr["iterations"].get<int>() >= 1,
          "screen_result.json carries family and iteration count");
    check(fs::exists(fs::path(screen_dir) / "trace.csv") &&
              fs::exists(fs::path(screen_dir) / "path.csv"),
          "screen writes trace.csv and path.csv");
    // trace.csv likelihoods are non-decreasing.
    smle::CsvTable trace = smle::read_csv(screen_dir + "/trace.csv");
    int ll_col = -1;
    for (size_t c = 0; c < trace.header.size(); ++c) {
      if (trace.header[c] == "loglik") ll_col = static_cast<int>(c);
    }
    bool monotone = ll_col >= 0;
    double prev = -1e300;
    for (const auto& row : trace.rows) {
      double v = 0.0;
      monotone = monotone && smle::parse_double(row[ll_col], v) &&
                 v >= prev - 1e-10;
      prev = v;
    }
    check(monotone, "trace.csv loglik column is non-decreasing");
  }

  // ------------------------------------------------ vote-mode selection
  const std::string sel_dir = dir("select");
  check(run(cli + "select --data " + gen_dir + "/data.csv --screen-result " +
            screen_dir + "/screen_result.json --vote --gamma-seq 0 0.5 1 "
            "--vote-threshold 0.5 --out-dir " + sel_dir) == 0,
        "select --vote exits 0");
  {
    Json sj = read_json(fs::path(sel_dir) / "select_result.json");
    check(sj.contains("vote_counts") && sj.contains("gamma_seq") &&
              sj["gamma_seq"].size() == 3,
          "vote-mode select_result.json records the gamma grid and counts");
    check(sj.contains("selected_features") && sj.contains("scores"),
          "select_result.json lists the selection and the score table");
  }

  // ------------------------------------------------ categorical pipeline
  const std::string ctg_dir = dir("ctg");
  check(run(cli + "gen --n 120 --p 10 --family gaussian --pos-true 3 7 "
                  "--effects 2 -2 --ctg-pos 1 --ctg-levels 3 --seed 9 "
                  "--out-dir " + ctg_dir) == 0,
        "gen with a categorical feature exits 0");
  {
    smle::CsvTable t = smle::read_csv(ctg_dir + "/data.csv");
    check(t.header.size() == 11 && t.header[1] == "x1",
          "categorical data.csv keeps the original feature columns");
    bool lettered = true;
    for (const auto& row : t.rows) {
      lettered = lettered && row[1].size() == 1 && row[1][0] >= 'A' &&
                 row[1][0] <= 'C';
    }
    check(lettered, "binned feature is written as letter labels");
  }
  const std::string ctg_screen = dir("ctg_screen");
  check(run(cli + "screen --data " + ctg_dir + "/data.csv --k 4 --out-dir " +
            ctg_screen) == 0,
        "screen auto-encodes categorical columns");
  {
    Json sr = read_json(fs::path(ctg_screen) / "screen_result.json");
    const auto feats = sr["retained_features"].get<std::vector<int>>();
    check(static_cast<int>(feats.size()) == 4,
          "grouped screening counts a categorical feature as one unit");
    for (int f : feats) check(f >= 1 && f <= 10, "retained feature in range");
  }
  check(run(cli + "screen --data " + ctg_dir + "/data.csv --k 4 --no-group "
                  "--out-dir " + dir("ctg_nogroup")) == 0,
        "screen --no-group exits 0");

  // ------------------------------------------------ predict
  const std::string pred_link = dir("pred_link");
  const std::string pred_resp = dir("pred_resp");
  const std::string gauss_screen = dir("gauss_screen");
  check(run(cli + "screen --data " + ctg_dir + "/data.csv --k 3 --out-dir " +
            gauss_screen) == 0,
        "gaussian screen for prediction exits 0");
  check(run(cli + "predict --data " + ctg_dir + "/data.csv --result " +
            gauss_screen + "/screen_result.json --type link --out-dir " +
            pred_link) == 0,
        "predict --type link exits 0");
  check(run(cli + "predict --data " + ctg_dir + "/data.csv --result " +
            gauss_screen + "/screen_result.json --type response --out-dir " +
            pred_resp) == 0,
        "predict --type response exits 0");
  check(slurp(fs::path(pred_link) / "predictions.csv") ==
            slurp(fs::path(pred_resp) / "predictions.csv"),
        "gaussian link and response predictions are identical");
  {
    smle::CsvTable t = smle::read_csv(pred_link + "/predictions.csv");
    check(static_cast<int>(t.rows.size()) == 120,
          "absent --newdata predicts the training rows");
  }

  const std::string pred_bin = dir("pred_bin");
  check(run(cli + "predict --data " + gen_dir + "/data.csv --result " +
            screen_dir + "/screen_result.json --type response --out-dir " +
            pred_bin) == 0,
        "binomial predict exits 0");
  {
    smle::CsvTable t = smle::read_csv(pred_bin + "/predictions.csv");
    bool in01 = true;
    for (const auto& row : t.rows) {
      double v = 0.0;
      in01 = in01 && smle::parse_double(row[0], v) && v > 0.0 && v < 1.0;
    }
    check(in01, "binomial response predictions lie in (0,1)");
  }

  // Features-only newdata is accepted; a mangled schema is refused.
  {
    smle::CsvTable t = smle::read_csv(std::string(gen_dir) + "/data.csv");
    smle::CsvTable feats;
    feats.header.assign(t.header.begin() + 1, t.header.end());
    for (const auto& row : t.rows) {
      feats.rows.emplace_back(row.begin() + 1, row.end());
    }
    smle::write_csv((root / "newdata.csv").string(), feats);
    smle::CsvTable bad = feats;
    bad.header[2] = "zz";
    smle::write_csv((root / "baddata.csv").string(), bad);
  }
  check(run(cli + "predict --data " + gen_dir + "/data.csv --result " +
            screen_dir + "/screen_result.json --newdata " +
            (root / "newdata.csv").string() + " --out-dir " + dir("pred_new")) ==
            0,
        "features-only newdata is accepted");
  check(run(cli + "predict --data " + gen_dir + "/data.csv --result " +
            screen_dir + "/screen_result.json --newdata " +
            (root / "baddata.csv").string() + " --out-dir " +
            dir("pred_bad")) != 0,
        "mismatched newdata columns exit nonzero");

  // ------------------------------------------------ eval
  {
    Json cfg;
    Json cell;
    cell["name"] = "tiny";
    cell["n"] = 60;
    cell["p"] = 40;
    cell["family"] = "gaussian";
    cell["correlation"] = "ar";
    cell["rho"] = 0.5;
    cell["pos_true"] = std::vector<int>{3, 11, 20};
    cell["effects"] = std::vector<double>{2.0, -2.0, 1.5};
    cell["k"] = 6;
    cfg["cells"] = Json::array({cell});
    Json m1, m2;
    m1["name"] = "default";
    m1["fast"] = false;
    m2["name"] = "fast";
    m2["fast"] = true;
    cfg["methods"] = Json::array({m1, m2});
    cfg["replications"] = 3;
    std::ofstream(root / "eval_cfg.json") << cfg.dump(2) << "\n";
  }
  const std::string eval1 = dir("eval1");
  const std::string eval2 = dir("eval2");
  check(run(cli + "eval --config " + (root / "eval_cfg.json").string() +
            " --seed 11 --out-dir " + eval1) == 0,
        "eval exits 0");
  check(run(cli + "eval --config " + (root / "eval_cfg.json").string() +
            " --seed 11 --out-dir " + eval2) == 0,
        "eval rerun exits 0");
  check(slurp(fs::path(eval1) / "report.csv") ==
            slurp(fs::path(eval2) / "report.csv"),
        "equal seeds give byte-identical report.csv");
  {
    smle::CsvTable t = smle::read_csv(eval1 + "/report.csv");
    check(t.rows.size() == 2 && t.header.size() == 7,
          "report.csv has one row per cell x method");
    check(fs::exists(fs::path(eval1) / "timing.csv"),
          "eval writes timing.csv");
  }

  // ------------------------------------------------ error exits
  check(run(cli + "gen --n 10 --p 5 --family gamma --out-dir " + dir("err1")) !=
            0,
        "unknown family exits nonzero");
  check(run(cli + "screen --data " + gen_dir + "/data.csv --k 0 --out-dir " +
            dir("err2")) != 0,
        "k = 0 exits nonzero");
  check(run(cli + "select --data " + gen_dir + "/data.csv --k 6 --criterion "
                  "hqic --out-dir " + dir("err3")) != 0,
        "unknown criterion exits nonzero");
  check(run(cli + "screen --data " + (root / "missing.csv").string() +
            " --out-dir " + dir("err4")) != 0,
        "missing data file exits nonzero");

  fs::remove_all(root, ec);
  std::printf("%s: %d failure(s)\n", g_failures == 0 ? "SUCCESS" : "FAILURE",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
