#pragma once

#include "smle/types.hpp"

#include <map>
#include <optional>

namespace smle {

struct ScreeningConfig {
  int k = 0;                    // retained model size; must be >= 1
  IndexSet keyset;              // columns always kept (their groups, if grouped)
  std::optional<VectorXd> coef_initial;  // warm start; zero vector otherwise
  double tol = 1e-2;            // stop when ||beta_t - beta_{t-1}||_2 < tol
  bool fast = false;            // adds likelihood-gain and support-stability stops
  double u_rate = 0.5;          // step shrink factor in the u-search
  int max_iter = 500;
  int max_u_tries = 50;
  bool standardize = false;     // center/scale non-indicator columns first
  std::optional<GroupMap> group_map;  // partition of {1..p}; enables group mode
  bool group = true;            // honored only when group_map is present
  // Initial step size; when absent, 1/(max_ij |X_ij|)^2 is used, which is
  // always >= the majorization-safe 1/lambda_max(X^T X), so the u-search
  // starts large and shrinks until the likelihood ascent condition holds.
  std::optional<double> step_init;
};

enum class StopReason { tol, fast_likelihood, fast_support, max_iter };
std::string to_string(StopReason r);

struct IterRecord {
  double loglik = 0.0;
  double step_delta = 0.0;   // ||beta_t - beta_{t-1}||_2
  int u_tries = 0;           // candidates evaluated by the step search (>= 1)
  int support_changes = 0;   // symmetric-difference size vs previous support
  // Coefficients on the current support, as (column, value) pairs; feeds the
  // solution-path output.
  std::vector<std::pair<int, double>> beta_on_support;
};

struct IterTrace {
  double loglik_initial = 0.0;  // l(beta^0)
  std::vector<IterRecord> records;
};

struct ScreeningResult {
  CoefVector beta_final;
  IndexSet retained;            // support of beta_final, sorted
  int iterations = 0;
  StopReason stop_reason = StopReason::tol;
  IterTrace trace;
};

// Hard thresholding: keep the k largest-magnitude units of v (groups score by
// the Euclidean norm of their entries and count as one unit), zero the rest;
// kept entries preserve their values. Keyset units are always kept and consume
// budget. Ties break toward the lowest column index. If k >= the number of
// units, v is returned unchanged.
CoefVector hard_threshold(const VectorXd& v, int k, const IndexSet& keyset = {},
                          const std::optional<GroupMap>& groups = std::nullopt);

// One iterative-hard-thresholding update: H_k(beta_t + nu * score(beta_t)).
CoefVector iht_step(const Dataset& data, const CoefVector& beta_t, double nu,
                    const ScreeningConfig& cfg);

struct USearchOutcome {
  CoefVector candidate;
  int tries = 0;
  double loglik = 0.0;  // l(candidate)
};

// Step-size search: starting from nu0, propose iht_step(nu) and shrink
// nu <- u_rate * nu until l(candidate) >= l(beta_t). nu restarts from nu0 at
// every outer iteration. Throws StepSizeExhausted after max_u_tries failures
// (run_screening treats that as converged).
USearchOutcome u_search(const Dataset& data, const CoefVector& beta_t,
                        const ScreeningConfig& cfg, double nu0);

// 1 / (max absolute row sum of X)^2; a conservative safe step for reference
// and for explicit step_init overrides. Errors on an all-zero X.
double initial_step_size(const MatrixXd& X);

// floor(0.5 * ln(n) * n^(1/3)), clamped to >= 1.
int default_k(int n);

// Inspects the trace and decides whether to stop. Default mode: step_delta <
// tol. Fast mode instead stops when step_delta < sqrt(k)*tol (reported as
// StopReason::tol), when the likelihood gain falls below 1% of the first
// iteration's gain, or when the support is unchanged for 10 consecutive
// iterations. Hitting max_iter always stops.
std::optional<StopReason> check_stop(const IterTrace& trace,
                                     const ScreeningConfig& cfg);

// Sparsity-restricted MLE screening (IHT with adaptive step size). Runs from
// coef_initial (zero by default), keeps the likelihood non-decreasing, and
// returns the final support. With standardize=true the model is fit on the
// centered/scaled design and coefficients are reported on that working scale.
ScreeningResult run_screening(const Dataset& data, const ScreeningConfig& cfg);

}  // namespace smle
