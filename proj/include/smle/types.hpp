#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Feature (column) indices are 1-based throughout the public API: feature j is
// column j-1 of the design matrix, and matches CSV column "xj". Index sets are
// kept sorted ascending. Rows and iteration counters are plain 0/1-based ints.
using IndexSet = std::vector<int>;

// A group partition of {1..p}. Each group is kept or dropped as one unit by
// group-aware hard thresholding (dummy columns of one categorical feature).
using GroupMap = std::vector<IndexSet>;

enum class Family { gaussian, binomial, poisson };

Family family_from_string(const std::string& s);
std::string to_string(Family f);

struct Dataset {
  VectorXd y;
  MatrixXd X;
  Family family = Family::gaussian;
  // Ground truth when the data is synthetic; absent for real data.
  std::optional<IndexSet> causal_index;
  std::optional<VectorXd> causal_coef;

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }
};

// Dense coefficient vector. The support is always derived from the stored
// values, so it cannot disagree with them.
struct CoefVector {
  VectorXd beta;

  CoefVector() = default;
  explicit CoefVector(VectorXd b) : beta(std::move(b)) {}
  static CoefVector zeros(int p) { return CoefVector(VectorXd::Zero(p)); }

  int size() const { return static_cast<int>(beta.size()); }
  IndexSet support() const;
  int l0_norm() const { return static_cast<int>(support().size()); }
};

// Error hierarchy. code() is stable and machine-parsable (the CLI prints
// "error[CODE]: message" and exits nonzero).
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual const char* code() const { return "E_RUNTIME"; }
};

struct DimensionError : Error {
  using Error::Error;
  const char* code() const override { return "E_DIMENSION"; }
};

struct ValidationError : Error {
  using Error::Error;
  const char* code() const override { return "E_VALIDATION"; }
};

struct NumericError : Error {
  using Error::Error;
  const char* code() const override { return "E_NUMERIC"; }
};

struct SingularDesignError : Error {
  using Error::Error;
  const char* code() const override { return "E_SINGULAR_DESIGN"; }
};

// Thrown by iterative fits that fail to converge; carries the last iterate so
// callers can report or flag it instead of dying.
struct NonConvergenceError : Error {
  VectorXd last_beta;
  NonConvergenceError(const std::string& msg, VectorXd beta)
      : Error(msg), last_beta(std::move(beta)) {}
  const char* code() const override { return "E_NON_CONVERGENCE"; }
};

// Internal to the screener: the step-size search ran out of tries. The caller
// treats the current iterate as converged.
struct StepSizeExhausted : Error {
  using Error::Error;
  const char* code() const override { return "E_STEP_EXHAUSTED"; }
};

struct IoError : Error {
  using Error::Error;
  const char* code() const override { return "E_IO"; }
};

// Set difference helpers used across modules; inputs must be sorted.
bool contains_all(const IndexSet& superset, const IndexSet& subset);
IndexSet set_intersection(const IndexSet& a, const IndexSet& b);
int symmetric_difference_size(const IndexSet& a, const IndexSet& b);

}  // namespace smle
