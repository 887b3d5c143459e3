#include "smle/screen.hpp"

#include "smle/glm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace smle {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::tol: return "tol";
    case StopReason::fast_likelihood: return "fast_likelihood";
    case StopReason::fast_support: return "fast_support";
    case StopReason::max_iter: return "max_iter";
  }
  return "?";
}

namespace {

// Precomputed thresholding structure: the units (columns or groups) that
// compete for the k slots, and which of them are pinned by the keyset.
struct ThresholdUnits {
  std::vector<std::vector<int>> cols;  // columns per unit, 1-based
  std::vector<char> pinned;            // per unit
  int pinned_count = 0;
};

ThresholdUnits build_units(int p, const IndexSet& keyset,
                           const std::optional<GroupMap>& groups,
                           bool group_enabled) {
  ThresholdUnits u;
  if (groups && group_enabled) {
    // Validate that the groups partition {1..p}.
    std::vector<int> owner(p + 1, -1);
    for (size_t gi = 0; gi < groups->size(); ++gi) {
      const IndexSet& g = (*groups)[gi];
      if (g.empty()) throw ValidationError("group_map contains an empty group");
      for (int j : g) {
        if (j < 1 || j > p) throw ValidationError("group_map column out of range");
        if (owner[j] != -1) throw ValidationError("group_map columns overlap");
        owner[j] = static_cast<int>(gi);
      }
    }
    for (int j = 1; j <= p; ++j) {
      if (owner[j] == -1) {
        throw ValidationError("group_map must cover every column");
      }
    }
    u.cols = *groups;
    for (auto& g : u.cols) std::sort(g.begin(), g.end());
    u.pinned.assign(u.cols.size(), 0);
    for (int j : keyset) {
      if (j < 1 || j > p) throw ValidationError("keyset column out of range");
      u.pinned[owner[j]] = 1;
    }
  } else {
    u.cols.reserve(p);
    for (int j = 1; j <= p; ++j) u.cols.push_back({j});
    u.pinned.assign(p, 0);
    for (int j : keyset) {
      if (j < 1 || j > p) throw ValidationError("keyset column out of range");
      u.pinned[j - 1] = 1;
    }
  }
  for (char c : u.pinned) u.pinned_count += c;
  return u;
}

CoefVector apply_threshold(const VectorXd& v, int k, const ThresholdUnits& u) {
  const int n_units = static_cast<int>(u.cols.size());
  if (k < 1) throw ValidationError("hard_threshold: k must be >= 1");
  if (u.pinned_count > k) {
    throw ValidationError("hard_threshold: keyset pins more units than k");
  }
  if (k >= n_units) return CoefVector(v);  // nothing to drop

  // Units score by the Euclidean norm of their entries (|v_j| for singletons);
  // ties break toward the lowest column index.
  struct Scored {
    double score;
    int first_col;
    int unit;
  };
  std::vector<Scored> open;
  open.reserve(n_units);
  for (int ui = 0; ui < n_units; ++ui) {
    if (u.pinned[ui]) continue;
    double ss = 0.0;
    for (int j : u.cols[ui]) ss += v[j - 1] * v[j - 1];
    open.push_back({std::sqrt(ss), u.cols[ui].front(), ui});
  }
  const int budget = k - u.pinned_count;
  std::sort(open.begin(), open.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.first_col < b.first_col;
  });

  VectorXd out = VectorXd::Zero(v.size());
  for (int ui = 0; ui < n_units; ++ui) {
    if (u.pinned[ui]) {
      for (int j : u.cols[ui]) out[j - 1] = v[j - 1];
    }
  }
  for (int i = 0; i < budget && i < static_cast<int>(open.size()); ++i) {
    for (int j : u.cols[open[i].unit]) out[j - 1] = v[j - 1];
  }
  return CoefVector(std::move(out));
}

// Linear predictor for a sparse coefficient vector, O(n * nnz).
VectorXd sparse_linpred(const MatrixXd& X, const VectorXd& beta) {
  VectorXd theta = VectorXd::Zero(X.rows());
  for (int j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) theta += X.col(j) * beta[j];
  }
  return theta;
}

struct SearchState {
  CoefVector candidate;
  VectorXd theta;
  double loglik = 0.0;
  int tries = 0;
};

// Core of the u-search: the gradient at beta_t is fixed while nu shrinks.
SearchState search_step(const VectorXd& y, const MatrixXd& X, Family family,
                        const VectorXd& beta_t, double ll_t, const VectorXd& g,
                        const ThresholdUnits& units, int k, double nu0,
                        double u_rate, int max_u_tries) {
  double nu = nu0;
  for (int tries = 1; tries <= max_u_tries; ++tries) {
    CoefVector cand = apply_threshold(beta_t + nu * g, k, units);
    VectorXd theta_c = sparse_linpred(X, cand.beta);
    const double ll_c = log_likelihood_linpred(y, theta_c, family);
    if (std::isfinite(ll_c) && ll_c >= ll_t) {
      return {std::move(cand), std::move(theta_c), ll_c, tries};
    }
    nu *= u_rate;
  }
  throw StepSizeExhausted("u_search: no ascent step within max_u_tries");
}

double default_step_init(const MatrixXd& X) {
  const double m = X.cwiseAbs().maxCoeff();
  if (m == 0.0) throw ValidationError("design matrix is all zeros");
  // 1/max^2 >= 1/lambda_max(X^T X): always on the large side, so the search
  // shrinks from here rather than crawling with an over-conservative step.
  return 1.0 / (m * m);
}

void validate_config(const Dataset& data, const ScreeningConfig& cfg) {
  if (cfg.k < 1) throw ValidationError("screening: k must be >= 1");
  if (!(cfg.tol > 0.0)) throw ValidationError("screening: tol must be > 0");
  if (!(cfg.u_rate > 0.0 && cfg.u_rate < 1.0)) {
    throw ValidationError("screening: u_rate must be in (0,1)");
  }
  if (cfg.max_iter < 1) throw ValidationError("screening: max_iter must be >= 1");
  if (cfg.max_u_tries < 1) {
    throw ValidationError("screening: max_u_tries must be >= 1");
  }
  if (cfg.step_init && !(*cfg.step_init > 0.0)) {
    throw ValidationError("screening: step_init must be > 0");
  }
  std::set<int> seen(cfg.keyset.begin(), cfg.keyset.end());
  if (seen.size() != cfg.keyset.size()) {
    throw ValidationError("screening: keyset contains duplicates");
  }
  if (cfg.coef_initial) {
    if (cfg.coef_initial->size() != data.p()) {
      throw DimensionError("screening: coef_initial length != p");
    }
    if (!cfg.coef_initial->allFinite()) {
      throw NumericError("screening: coef_initial must be finite");
    }
  }
}

MatrixXd standardized_copy(const MatrixXd& X) {
  MatrixXd W = X;
  const int n = static_cast<int>(W.rows());
  for (int j = 0; j < W.cols(); ++j) {
    bool indicator = true;
    for (int i = 0; i < n && indicator; ++i) {
      indicator = (W(i, j) == 0.0 || W(i, j) == 1.0);
    }
    if (indicator) continue;  // leave dummy/binary columns on their own scale
    const double mean = W.col(j).mean();
    W.col(j).array() -= mean;
    if (n > 1) {
      const double sd = std::sqrt(W.col(j).squaredNorm() / (n - 1));
      if (sd > 0.0) W.col(j) /= sd;
    }
  }
  return W;
}

}  // namespace

CoefVector hard_threshold(const VectorXd& v, int k, const IndexSet& keyset,
                          const std::optional<GroupMap>& groups) {
  const int p = static_cast<int>(v.size());
  if (p == 0) throw ValidationError("hard_threshold: empty vector");
  ThresholdUnits units = build_units(p, keyset, groups, groups.has_value());
  return apply_threshold(v, k, units);
}

CoefVector iht_step(const Dataset& data, const CoefVector& beta_t, double nu,
                    const ScreeningConfig& cfg) {
  if (beta_t.size() != data.p()) {
    throw DimensionError("iht_step: coefficient length != p");
  }
  VectorXd g = gradient(data, beta_t);
  if (!g.allFinite()) throw NumericError("iht_step: non-finite gradient");
  ThresholdUnits units = build_units(data.p(), cfg.keyset, cfg.group_map,
                                     cfg.group_map.has_value() && cfg.group);
  return apply_threshold(beta_t.beta + nu * g, cfg.k, units);
}

USearchOutcome u_search(const Dataset& data, const CoefVector& beta_t,
                        const ScreeningConfig& cfg, double nu0) {
  if (beta_t.size() != data.p()) {
    throw DimensionError("u_search: coefficient length != p");
  }
  if (!(nu0 > 0.0)) throw ValidationError("u_search: nu0 must be > 0");
  ThresholdUnits units = build_units(data.p(), cfg.keyset, cfg.group_map,
                                     cfg.group_map.has_value() && cfg.group);
  VectorXd theta_t = data.X * beta_t.beta;
  const double ll_t = log_likelihood_linpred(data.y, theta_t, data.family);
  VectorXd resid(theta_t.size());
  for (int i = 0; i < theta_t.size(); ++i) {
    resid[i] = data.y[i] - b_prime(data.family, theta_t[i]);
  }
  VectorXd g = data.X.transpose() * resid;
  if (!g.allFinite()) throw NumericError("u_search: non-finite gradient");
  SearchState s = search_step(data.y, data.X, data.family, beta_t.beta, ll_t, g,
                              units, cfg.k, nu0, cfg.u_rate, cfg.max_u_tries);
  return {std::move(s.candidate), s.tries, s.loglik};
}

double initial_step_size(const MatrixXd& X) {
  if (X.size() == 0) throw ValidationError("initial_step_size: empty matrix");
  const double s = X.cwiseAbs().rowwise().sum().maxCoeff();
  if (s == 0.0) throw ValidationError("initial_step_size: all-zero matrix");
  return 1.0 / (s * s);
}

int default_k(int n) {
  if (n < 1) throw ValidationError("default_k: n must be >= 1");
  const int k = static_cast<int>(
      std::floor(0.5 * std::log(static_cast<double>(n)) * std::cbrt(n)));
  return std::max(k, 1);
}

std::optional<StopReason> check_stop(const IterTrace& trace,
                                     const ScreeningConfig& cfg) {
  if (trace.records.empty()) return std::nullopt;
  const IterRecord& last = trace.records.back();
  const size_t t = trace.records.size();

  if (!cfg.fast) {
    if (last.step_delta < cfg.tol) return StopReason::tol;
  } else {
    if (last.step_delta < std::sqrt(static_cast<double>(cfg.k)) * cfg.tol) {
      return StopReason::tol;
    }
    const double first_gain = trace.records.front().loglik - trace.loglik_initial;
    const double gain = t >= 2 ? last.loglik - trace.records[t - 2].loglik
                               : first_gain;
    if (gain < 0.01 * first_gain) return StopReason::fast_likelihood;
    if (t >= 10) {
      bool stable = true;
      for (size_t i = t - 10; i < t && stable; ++i) {
        stable = (trace.records[i].support_changes == 0);
      }
      if (stable) return StopReason::fast_support;
    }
  }
  if (static_cast<int>(t) >= cfg.max_iter) return StopReason::max_iter;
  return std::nullopt;
}

ScreeningResult run_screening(const Dataset& data, const ScreeningConfig& cfg) {
  validate_dataset(data);
  validate_config(data, cfg);

  const bool grouped = cfg.group_map.has_value() && cfg.group;
  ThresholdUnits units = build_units(data.p(), cfg.keyset, cfg.group_map, grouped);
  const int n_units = static_cast<int>(units.cols.size());
  if (cfg.k > n_units) {
    throw ValidationError("screening: k exceeds the number of units");
  }
  if (units.pinned_count > cfg.k) {
    throw ValidationError("screening: keyset pins more units than k");
  }

  Dataset work;
  work.y = data.y;
  work.family = data.family;
  work.X = cfg.standardize ? standardized_copy(data.X) : data.X;

  const double nu0 = cfg.step_init ? *cfg.step_init : default_step_init(work.X);

  // A warm start denser than the sparsity budget cannot serve as the ascent
  // reference point (no k-sparse candidate needs to match its likelihood), so
  // project it onto the feasible set before iterating.
  CoefVector beta = cfg.coef_initial ? CoefVector(*cfg.coef_initial)
                                     : CoefVector::zeros(data.p());
  if (beta.l0_norm() > 0) {
    beta = apply_threshold(beta.beta, cfg.k, units);
  }
  VectorXd theta = beta.l0_norm() == 0 ? VectorXd::Zero(data.n())
                                       : VectorXd(work.X * beta.beta);
  double ll = log_likelihood_linpred(work.y, theta, work.family);

  ScreeningResult result;
  result.trace.loglik_initial = ll;
  IndexSet support_prev = beta.support();
  result.stop_reason = StopReason::max_iter;

  for (int t = 1; t <= cfg.max_iter; ++t) {
    VectorXd resid(theta.size());
    for (int i = 0; i < theta.size(); ++i) {
      resid[i] = work.y[i] - b_prime(work.family, theta[i]);
    }
    VectorXd g = work.X.transpose() * resid;
    if (!g.allFinite()) throw NumericError("screening: non-finite gradient");

    SearchState s;
    try {
      s = search_step(work.y, work.X, work.family, beta.beta, ll, g, units,
                      cfg.k, nu0, cfg.u_rate, cfg.max_u_tries);
    } catch (const StepSizeExhausted&) {
      // No ascent step exists at float precision: treat as converged.
      result.stop_reason = StopReason::tol;
      break;
    }

    IterRecord rec;
    rec.loglik = s.loglik;
    rec.step_delta = (s.candidate.beta - beta.beta).norm();
    rec.u_tries = s.tries;
    IndexSet support_new = s.candidate.support();
    rec.support_changes = symmetric_difference_size(support_new, support_prev);
    rec.beta_on_support.reserve(support_new.size());
    for (int j : support_new) rec.beta_on_support.emplace_back(j, s.candidate.beta[j - 1]);
    result.trace.records.push_back(std::move(rec));

    beta = std::move(s.candidate);
    theta = std::move(s.theta);
    ll = s.loglik;
    support_prev = std::move(support_new);

    if (auto reason = check_stop(result.trace, cfg)) {
      result.stop_reason = *reason;
      break;
    }
  }

  result.beta_final = std::move(beta);
  result.retained = result.beta_final.support();
  result.iterations = static_cast<int>(result.trace.records.size());
  return result;
}

}  // namespace smle
