#pragma once

// File-format layer shared by the CLI subcommands: CSV dataset loading with
// categorical auto-detection and dummy encoding, JSON artifacts, manifests.

#include "smle/csv.hpp"
#include "smle/datagen.hpp"
#include "smle/types.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace cli {

using Json = nlohmann::ordered_json;

// A dataset as the CLI sees it: the encoded design plus the bookkeeping to
// translate between original features (header columns after y) and encoded
// columns (dummies expanded in place).
struct LoadedData {
  smle::Dataset data;                       // X = encoded design
  std::vector<std::string> feature_names;   // size p_orig
  std::vector<std::string> col_names;       // size p_enc
  smle::GroupMap groups;                    // partition of encoded columns
  std::vector<int> group_feature;           // group -> original feature id
  std::vector<int> feature_of_col;          // encoded col (1-based) -> feature id
  bool has_categorical = false;
  // Sorted label sets of categorical features, for encoding new data.
  std::map<int, std::vector<std::string>> levels_of_feature;
};

LoadedData load_data_csv(const std::string& path, smle::Family family);

// Encode a table with the same columns as `train` using the training levels;
// unseen labels are an error.
smle::MatrixXd encode_like(const LoadedData& train, const smle::CsvTable& table);

// Collapse encoded column ids to original feature ids (sorted, distinct).
smle::IndexSet features_of_columns(const LoadedData& d, const smle::IndexSet& cols);
// All encoded columns belonging to the given features (sorted).
smle::IndexSet columns_of_features(const LoadedData& d, const smle::IndexSet& features);

void write_data_csv(const std::string& path, const smle::GenData& gd);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

struct Manifest {
  std::string subcommand;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir;
  Json inputs = Json::object();
  std::vector<std::string> outputs;
  Json config = Json::object();
};

void write_manifest(const Manifest& m);
Manifest read_manifest(const std::string& path);

}  // namespace cli
