#pragma once

#include "smle/screen.hpp"
#include "smle/types.hpp"

#include <map>

namespace smle {

enum class Criterion { aic, bic, ebic };
Criterion criterion_from_string(const std::string& s);
std::string to_string(Criterion c);

struct SelectionConfig {
  int k_min = 1;
  int k_max = 0;          // 0 -> number of candidate units
  Criterion criterion = Criterion::ebic;
  double gamma_ebic = 0.5;
  bool vote = false;      // EBIC only: vote across gamma_seq
  std::vector<double> gamma_seq{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  double vote_threshold = 0.6;  // feature kept when vote fraction >= threshold
  int threads = 1;              // >1 evaluates candidate sizes concurrently
};

// -2L + 2d (AIC), -2L + d ln n (BIC), BIC + 2 gamma ln C(p_total, d) (EBIC,
// binomial coefficient via log-gamma).
double information_criterion(double loglik, int d, int n, Criterion c,
                             double gamma, int p_total);

struct ScoredModel {
  int k = 0;
  double score = 0.0;     // +inf when the refit did not converge
  bool converged = true;
  IndexSet support;       // column indices in the space scores were built over
};

struct SelectionResult {
  std::vector<ScoredModel> scores;  // ascending k; columns in original space
  int chosen_k = 0;
  IndexSet selected;                // original column space
  // Vote mode only: feature -> fraction of gamma runs that selected it, and
  // the gamma values used. selected = {j : vote_counts[j] >= vote_threshold},
  // chosen_k = |selected| (the voted set need not equal any single s_k).
  std::optional<std::map<int, double>> vote_counts;
  std::vector<double> gamma_used;
};

// Refits `support` on the restricted data by maximum likelihood and scores it.
// A non-convergent or singular refit yields score=+inf with converged=false
// (never silently dropped). p_total is the column count of the space the
// support was searched over, used by the EBIC combinatorial term;
// run_selection passes the full design's width, since its candidates were
// screened out of the full design.
ScoredModel criterion_score(const Dataset& data_sub, const IndexSet& support,
                            Criterion c, double gamma, int p_total);

// Post-screening model selection: for each k in [k_min, k_max], rerun the
// screener on the columns in `candidates` (inheriting screen_base with fast
// mode forced off; the keyset, mapped into the candidate space, stays pinned,
// and k_min is raised to the pinned unit count if needed), refit the resulting
// support, and score it. chosen_k minimizes the criterion, ties toward the
// smaller k. Reported supports are mapped back to the column space of `data`.
SelectionResult run_selection(const Dataset& data, const IndexSet& candidates,
                              const SelectionConfig& cfg,
                              const ScreeningConfig& screen_base);

// EBIC with voting: run_selection once per gamma in gamma_seq, then keep the
// features selected by at least vote_threshold of the runs.
SelectionResult ebic_vote(const Dataset& data, const IndexSet& candidates,
                          const SelectionConfig& cfg,
                          const ScreeningConfig& screen_base);

// Re-threshold a voted result without refitting.
SelectionResult vote_update(const SelectionResult& result, double new_threshold);

}  // namespace smle
