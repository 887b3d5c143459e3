#include "artifacts.hpp"

#include "smle/version.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

namespace fs = std::filesystem;

namespace cli {

LoadedData load_data_csv(const std::string& path, smle::Family family) {
  smle::CsvTable table = smle::read_csv(path);
  if (table.header.empty() || table.header[0] != "y") {
    throw smle::ValidationError("'" + path + "': first column must be 'y'");
  }
  const int p_orig = static_cast<int>(table.header.size()) - 1;
  if (p_orig < 1) {
    throw smle::ValidationError("'" + path + "': no feature columns");
  }
  const int n = static_cast<int>(table.rows.size());
  if (n < 1) throw smle::ValidationError("'" + path + "': no data rows");

  LoadedData out;
  out.feature_names.assign(table.header.begin() + 1, table.header.end());

  out.data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    double v;
    if (!smle::parse_double(table.rows[i][0], v)) {
      throw smle::ValidationError("'" + path + "': non-numeric response at row " +
                                  std::to_string(i + 1));
    }
    out.data.y[i] = v;
  }

  // Per feature: numeric if every value parses as a double, else categorical.
  struct FeatCol {
    bool categorical = false;
    std::vector<double> num;
    std::vector<std::string> labels;       // per row
    std::vector<std::string> level_names;  // sorted distinct labels
  };
  std::vector<FeatCol> feats(p_orig);
  for (int f = 0; f < p_orig; ++f) {
    FeatCol& fc = feats[f];
    fc.num.resize(n);
    for (int i = 0; i < n; ++i) {
      const std::string& tok = table.rows[i][f + 1];
      double v;
      if (!smle::parse_double(tok, v)) {
        fc.categorical = true;
        break;
      }
      fc.num[i] = v;
    }
    if (fc.categorical) {
      fc.labels.resize(n);
      std::set<std::string> lvl;
      for (int i = 0; i < n; ++i) {
        const std::string& tok = table.rows[i][f + 1];
        if (tok.empty()) {
          throw smle::ValidationError("'" + path + "': empty label in column " +
                                      out.feature_names[f]);
        }
        fc.labels[i] = tok;
        lvl.insert(tok);
      }
      if (lvl.size() < 2) {
        throw smle::ValidationError("'" + path + "': categorical column " +
                                    out.feature_names[f] +
                                    " needs at least 2 levels");
      }
      fc.level_names.assign(lvl.begin(), lvl.end());
      out.has_categorical = true;
    }
  }

  int p_enc = 0;
  for (const auto& fc : feats) {
    p_enc += fc.categorical ? static_cast<int>(fc.level_names.size()) - 1 : 1;
  }
  out.data.X.resize(n, p_enc);
  out.data.family = family;

  int col = 0;
  for (int f = 0; f < p_orig; ++f) {
    const FeatCol& fc = feats[f];
    smle::IndexSet group;
    if (!fc.categorical) {
      for (int i = 0; i < n; ++i) out.data.X(i, col) = fc.num[i];
      out.col_names.push_back(out.feature_names[f]);
      group.push_back(col + 1);
      ++col;
    } else {
      out.levels_of_feature[f + 1] = fc.level_names;
      // Reference level: alphabetically first. One indicator per other level.
      for (size_t lvl = 1; lvl < fc.level_names.size(); ++lvl) {
        for (int i = 0; i < n; ++i) {
          out.data.X(i, col) = fc.labels[i] == fc.level_names[lvl] ? 1.0 : 0.0;
        }
        out.col_names.push_back(out.feature_names[f] + "_" + fc.level_names[lvl]);
        group.push_back(col + 1);
        ++col;
      }
    }
    out.groups.push_back(std::move(group));
    out.group_feature.push_back(f + 1);
  }

  out.feature_of_col.assign(p_enc + 1, 0);
  for (size_t g = 0; g < out.groups.size(); ++g) {
    for (int c : out.groups[g]) out.feature_of_col[c] = out.group_feature[g];
  }
  return out;
}

smle::MatrixXd encode_like(const LoadedData& train, const smle::CsvTable& table) {
  const int p_orig = static_cast<int>(train.feature_names.size());
  // Accept either the training layout (y + features) or features only.
  int offset;
  if (static_cast<int>(table.header.size()) == p_orig + 1 &&
      table.header[0] == "y") {
    offset = 1;
  } else if (static_cast<int>(table.header.size()) == p_orig) {
    offset = 0;
  } else {
    throw smle::ValidationError("new data columns do not match the training data");
  }
  for (int f = 0; f < p_orig; ++f) {
    if (table.header[f + offset] != train.feature_names[f]) {
      throw smle::ValidationError("new data column '" + table.header[f + offset] +
                                  "' does not match training column '" +
                                  train.feature_names[f] + "'");
    }
  }
  const int n = static_cast<int>(table.rows.size());
  if (n < 1) throw smle::ValidationError("new data has no rows");

  smle::MatrixXd X(n, train.data.p());
  int col = 0;
  for (int f = 0; f < p_orig; ++f) {
    auto lv = train.levels_of_feature.find(f + 1);
    if (lv == train.levels_of_feature.end()) {
      for (int i = 0; i < n; ++i) {
        double v;
        if (!smle::parse_double(table.rows[i][f + offset], v)) {
          throw smle::ValidationError("non-numeric value in numeric column '" +
                                      train.feature_names[f] + "'");
        }
        X(i, col) = v;
      }
      ++col;
    } else {
      const std::vector<std::string>& levels = lv->second;
      for (int i = 0; i < n; ++i) {
        const std::string& tok = table.rows[i][f + offset];
        if (std::find(levels.begin(), levels.end(), tok) == levels.end()) {
          throw smle::ValidationError("unseen level '" + tok + "' in column '" +
                                      train.feature_names[f] + "'");
        }
      }
      for (size_t lvl = 1; lvl < levels.size(); ++lvl) {
        for (int i = 0; i < n; ++i) {
          X(i, col) = table.rows[i][f + offset] == levels[lvl] ? 1.0 : 0.0;
        }
        ++col;
      }
    }
  }
  return X;
}

smle::IndexSet features_of_columns(const LoadedData& d, const smle::IndexSet& cols) {
  std::set<int> feats;
  for (int c : cols) {
    if (c < 1 || c > d.data.p()) {
      throw smle::ValidationError("encoded column id out of range");
    }
    feats.insert(d.feature_of_col[c]);
  }
  return smle::IndexSet(feats.begin(), feats.end());
}

smle::IndexSet columns_of_features(const LoadedData& d, const smle::IndexSet& features) {
  std::set<int> cols;
  for (int f : features) {
    bool found = false;
    for (size_t g = 0; g < d.group_feature.size(); ++g) {
      if (d.group_feature[g] == f) {
        cols.insert(d.groups[g].begin(), d.groups[g].end());
        found = true;
        break;
      }
    }
    if (!found) {
      throw smle::ValidationError("feature id " + std::to_string(f) +
                                  " not present in the data");
    }
  }
  return smle::IndexSet(cols.begin(), cols.end());
}

void write_data_csv(const std::string& path, const smle::GenData& gd) {
  const int n = gd.data.n();
  const int p = gd.config.p;
  smle::CsvTable table;
  table.header.push_back("y");
  for (int j = 1; j <= p; ++j) table.header.push_back("x" + std::to_string(j));

  // Column content: categorical features print their letter label, numeric
  // features their value from the pre-encoding matrix.
  std::vector<int> ctg_slot(p + 1, -1);
  if (gd.categorical) {
    for (size_t i = 0; i < gd.categorical->positions.size(); ++i) {
      ctg_slot[gd.categorical->positions[i]] = static_cast<int>(i);
    }
  }
  // Recover numeric columns: for encoded data the numeric columns live in the
  // singleton groups of the encoding; without categoricals X is the raw matrix.
  table.rows.resize(n);
  for (int i = 0; i < n; ++i) {
    auto& row = table.rows[i];
    row.reserve(p + 1);
    row.push_back(smle::format_double(gd.data.y[i]));
    for (int j = 1; j <= p; ++j) {
      if (ctg_slot[j] >= 0) {
        row.push_back(std::string(1, gd.categorical->labels[ctg_slot[j]][i]));
      } else if (gd.categorical) {
        // locate the singleton group of feature j
        const auto& groups = gd.categorical->groups;
        const auto& gf = gd.categorical->group_feature;
        for (size_t g = 0; g < gf.size(); ++g) {
          if (gf[g] == j) {
            row.push_back(smle::format_double(
                gd.data.X(i, groups[g].front() - 1)));
            break;
          }
        }
      } else {
        row.push_back(smle::format_double(gd.data.X(i, j - 1)));
      }
    }
  }
  smle::write_csv(path, table);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw smle::IoError("cannot open '" + path + "' for reading");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw smle::IoError("'" + path + "': invalid JSON: " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw smle::IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw smle::IoError("failed writing '" + path + "'");
}

void write_manifest(const Manifest& m) {
  Json j;
  j["schema_version"] = smle::kSchemaVersion;
  j["version"] = smle::kVersion;
  j["subcommand"] = m.subcommand;
  j["seed"] = m.seed;
  j["threads"] = m.threads;
  j["out_dir"] = m.out_dir;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["config"] = m.config;
  write_json_file((fs::path(m.out_dir) / "manifest.json").string(), j);
}

Manifest read_manifest(const std::string& path) {
  Json j = read_json_file(path);
  Manifest m;
  try {
    m.subcommand = j.at("subcommand").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.threads = j.at("threads").get<int>();
    m.out_dir = j.at("out_dir").get<std::string>();
    m.inputs = j.at("inputs");
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.config = j.at("config");
  } catch (const std::exception& e) {
    throw smle::ValidationError("'" + path + "': malformed manifest: " + e.what());
  }
  return m;
}

}  // namespace cli
