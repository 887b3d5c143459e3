#pragma once

#include "smle/rng.hpp"
#include "smle/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace smle {

enum class Correlation { id, ma, cs, ar };
Correlation correlation_from_string(const std::string& s);
std::string to_string(Correlation c);

struct CovarianceSpec {
  Correlation structure = Correlation::id;
  double rho = 0.2;      // in [0, 1)
  IndexSet causal;       // used by CS only: causal pairs get rho/2
};

// Explicit p x p covariance matrix (unit diagonal):
//   id: identity
//   ma: rho at |i-j|=1, rho/2 at |i-j|=2, 0 beyond
//   cs: rho everywhere off-diagonal, except rho/2 between two causal features
//   ar: rho^|i-j|
// Throws NumericError when the requested matrix is not positive semidefinite
// (possible for ma and cs at large rho). Intended for modest p; sampling never
// materializes it.
MatrixXd build_covariance(const CovarianceSpec& spec, int p);

// n x p standard-normal-marginal draws with the requested covariance, exact in
// law and O(np): direct normals (id), stationary recursion (ar), bandwidth-2
// Cholesky (ma), spectral block factorization (cs). Rows are generated one at
// a time. Same PSD validity checks as build_covariance.
MatrixXd sample_features(const CovarianceSpec& spec, int n, int p, Rng& rng);

// Dummy encoding of selected columns after equal-probability quantile binning.
struct CategoricalEncoding {
  IndexSet positions;                       // original features binned
  std::vector<int> levels;                  // aligned with positions
  std::vector<std::vector<char>> labels;    // [feature][row] in 'A'..'Z'
  MatrixXd design;                          // full design, dummies in place
  GroupMap groups;                          // partition of encoded columns
  std::vector<int> group_feature;           // group -> original feature id
  std::vector<std::string> col_names;       // encoded column names (x3_B, ...)
};

// Bin X's `positions` columns into `levels[i]` equally likely classes using
// standard-normal quantile cutpoints (labels 'A','B',...; with 2 levels the
// cut is at 0: negative -> 'A'). Emits the labeled view plus an L-1 dummy
// encoding per feature (reference level 'A' dropped) with its group map.
// Numeric columns pass through as singleton groups.
CategoricalEncoding make_categorical(const MatrixXd& X, const IndexSet& positions,
                                     const std::vector<int>& levels);

// theta_i = sum_j effects_j X(i, causal_j); then gaussian theta + sigma*N(0,1),
// binomial Bernoulli(b'(theta)), poisson Poisson(e^theta) with the linear
// predictor treated as in b_prime.
VectorXd gen_response(const MatrixXd& X, Family family, const IndexSet& causal,
                      const VectorXd& effects, double sigma_noise, Rng& rng);

struct GenConfig {
  int n = 0;
  int p = 0;
  Family family = Family::gaussian;
  Correlation correlation = Correlation::id;
  double rho = 0.2;
  int num_truecoef = 5;                       // ignored when pos_truecoef given
  std::optional<IndexSet> pos_truecoef;       // causal positions (1-based)
  std::optional<VectorXd> effect_truecoef;    // aligned with positions
  std::optional<IndexSet> pos_ctgidx;         // features to bin categorical
  std::optional<std::vector<int>> level_ctgidx;  // levels per binned feature
  double sigma_noise = 1.0;                   // gaussian response only
  std::uint64_t seed = 1;
};

struct GenData {
  // For purely numeric data, `data.X` is the raw feature matrix. With
  // categorical positions, `data.X` is the dummy-encoded design and
  // `categorical` carries the labeled view and group structure; causal indices
  // stay in the original feature space.
  Dataset data;
  std::optional<CategoricalEncoding> categorical;
  GenConfig config;  // with resolved positions/effects recorded in data
};

// Deterministic synthetic GLM data. The response is generated from the
// pre-binning numeric features; binning happens afterwards. RNG streams: truth
// (positions, then effects) from split(0), features from split(1), response
// from split(2), so fixing any of them fixes the corresponding draws.
GenData gen_data(const GenConfig& cfg);

}  // namespace smle
