#include "smle/select.hpp"

#include "smle/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

namespace smle {

Criterion criterion_from_string(const std::string& s) {
  if (s == "aic") return Criterion::aic;
  if (s == "bic") return Criterion::bic;
  if (s == "ebic") return Criterion::ebic;
  throw ValidationError("unknown criterion: '" + s + "'");
}

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::aic: return "aic";
    case Criterion::bic: return "bic";
    case Criterion::ebic: return "ebic";
  }
  return "?";
}

double information_criterion(double loglik, int d, int n, Criterion c,
                             double gamma, int p_total) {
  if (d < 0 || n < 1 || p_total < d) {
    throw ValidationError("information_criterion: need 0 <= d <= p_total, n >= 1");
  }
  const double base = -2.0 * loglik;
  switch (c) {
    case Criterion::aic:
      return base + 2.0 * d;
    case Criterion::bic:
      return base + d * std::log(static_cast<double>(n));
    case Criterion::ebic: {
      if (gamma < 0.0) {
        throw ValidationError("information_criterion: gamma must be >= 0");
      }
      const double lchoose = std::lgamma(p_total + 1.0) - std::lgamma(d + 1.0) -
                             std::lgamma(p_total - d + 1.0);
      return base + d * std::log(static_cast<double>(n)) + 2.0 * gamma * lchoose;
    }
  }
  return 0.0;
}

ScoredModel criterion_score(const Dataset& data_sub, const IndexSet& support,
                            Criterion c, double gamma, int p_total) {
  ScoredModel out;
  out.k = static_cast<int>(support.size());
  out.support = support;
  try {
    RefitResult fit = newton_refit(data_sub, support);
    out.score = information_criterion(fit.loglik, static_cast<int>(support.size()),
                                      data_sub.n(), c, gamma, p_total);
    out.converged = true;
  } catch (const NonConvergenceError&) {
    out.score = std::numeric_limits<double>::infinity();
    out.converged = false;
  } catch (const SingularDesignError&) {
    out.score = std::numeric_limits<double>::infinity();
    out.converged = false;
  }
  return out;
}

namespace {

struct CandidateSpace {
  Dataset sub;                       // y, X restricted to the candidates
  IndexSet candidates;               // original column ids, sorted
  std::optional<GroupMap> groups;    // remapped into 1..q
  IndexSet keyset;                   // remapped into 1..q
  int units = 0;
};

CandidateSpace restrict_to_candidates(const Dataset& data,
                                      const IndexSet& candidates,
                                      const ScreeningConfig& screen_base) {
  if (candidates.empty()) {
    throw ValidationError("selection: candidate set is empty");
  }
  std::vector<int> pos(data.p() + 1, 0);  // original col -> 1-based sub col
  for (size_t i = 0; i < candidates.size(); ++i) {
    const int j = candidates[i];
    if (j < 1 || j > data.p()) {
      throw ValidationError("selection: candidate index out of range [1,p]");
    }
    if (i > 0 && candidates[i] <= candidates[i - 1]) {
      throw ValidationError("selection: candidates must be sorted and distinct");
    }
    pos[j] = static_cast<int>(i) + 1;
  }

  CandidateSpace cs;
  cs.candidates = candidates;
  const int q = static_cast<int>(candidates.size());
  cs.sub.y = data.y;
  cs.sub.family = data.family;
  cs.sub.X.resize(data.n(), q);
  for (int i = 0; i < q; ++i) cs.sub.X.col(i) = data.X.col(candidates[i] - 1);

  if (screen_base.group_map && screen_base.group) {
    GroupMap sub_groups;
    for (const IndexSet& g : *screen_base.group_map) {
      int inside = 0;
      for (int j : g) inside += (j >= 1 && j <= data.p() && pos[j] != 0);
      if (inside == 0) continue;
      if (inside != static_cast<int>(g.size())) {
        throw ValidationError(
            "selection: candidates split a group; groups must be kept or "
            "dropped whole");
      }
      IndexSet remapped;
      remapped.reserve(g.size());
      for (int j : g) remapped.push_back(pos[j]);
      std::sort(remapped.begin(), remapped.end());
      sub_groups.push_back(std::move(remapped));
    }
    cs.groups = std::move(sub_groups);
    cs.units = static_cast<int>(cs.groups->size());
  } else {
    cs.units = q;
  }

  for (int j : screen_base.keyset) {
    if (j < 1 || j > data.p() || pos[j] == 0) {
      throw ValidationError("selection: keyset column not among the candidates");
    }
    cs.keyset.push_back(pos[j]);
  }
  std::sort(cs.keyset.begin(), cs.keyset.end());
  return cs;
}

int pinned_unit_count(const CandidateSpace& cs) {
  if (!cs.groups) return static_cast<int>(cs.keyset.size());
  std::set<int> pinned;
  for (size_t gi = 0; gi < cs.groups->size(); ++gi) {
    for (int j : (*cs.groups)[gi]) {
      if (std::binary_search(cs.keyset.begin(), cs.keyset.end(), j)) {
        pinned.insert(static_cast<int>(gi));
        break;
      }
    }
  }
  return static_cast<int>(pinned.size());
}

ScoredModel evaluate_size(const CandidateSpace& cs, int k,
                          const ScreeningConfig& screen_base,
                          const SelectionConfig& cfg, double gamma,
                          int p_total) {
  ScreeningConfig scfg = screen_base;
  scfg.k = k;
  scfg.fast = false;  // selection always screens in full mode
  scfg.group_map = cs.groups;
  scfg.keyset = cs.keyset;
  scfg.coef_initial.reset();  // a full-space warm start has the wrong length
  try {
    ScreeningResult sr = run_screening(cs.sub, scfg);
    ScoredModel scored = criterion_score(cs.sub, sr.retained, cfg.criterion,
                                         gamma, p_total);
    scored.k = k;
    // Map the support back to the caller's column space.
    for (int& j : scored.support) j = cs.candidates[j - 1];
    return scored;
  } catch (const Error&) {
    ScoredModel failed;
    failed.k = k;
    failed.score = std::numeric_limits<double>::infinity();
    failed.converged = false;
    return failed;
  }
}

SelectionResult select_with_gamma(const Dataset& data, const CandidateSpace& cs,
                                  const SelectionConfig& cfg,
                                  const ScreeningConfig& screen_base,
                                  double gamma) {
  // The combinatorial EBIC term penalizes the model search over the space the
  // candidates were screened from, so the full column count enters ln C(p, d)
  // even though scoring refits only the restricted design.
  const int p_total = data.p();
  const int pinned = pinned_unit_count(cs);
  const int k_min = std::max(cfg.k_min, std::max(pinned, 1));
  const int k_max = cfg.k_max > 0 ? cfg.k_max : cs.units;
  if (k_min > k_max || k_max > cs.units) {
    throw ValidationError("selection: need 1 <= k_min <= k_max <= candidate units");
  }

  const int count = k_max - k_min + 1;
  std::vector<ScoredModel> scores(count);
  const int threads = std::max(1, std::min(cfg.threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) {
      scores[i] = evaluate_size(cs, k_min + i, screen_base, cfg, gamma, p_total);
    }
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        for (int i = t; i < count; i += threads) {
          scores[i] = evaluate_size(cs, k_min + i, screen_base, cfg, gamma, p_total);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  int best = -1;
  for (int i = 0; i < count; ++i) {
    if (!scores[i].converged) continue;
    if (best == -1 || scores[i].score < scores[best].score) best = i;
  }
  if (best == -1) {
    throw NonConvergenceError(
        "selection: no candidate size produced a convergent refit", VectorXd());
  }

  SelectionResult result;
  result.scores = std::move(scores);
  result.chosen_k = k_min + best;
  result.selected = result.scores[best].support;
  if (cfg.criterion == Criterion::ebic) result.gamma_used = {gamma};
  return result;
}

void validate_selection_config(const SelectionConfig& cfg) {
  if (cfg.k_min < 1) throw ValidationError("selection: k_min must be >= 1");
  if (cfg.threads < 1) throw ValidationError("selection: threads must be >= 1");
  if (!(cfg.vote_threshold > 0.0 && cfg.vote_threshold <= 1.0)) {
    throw ValidationError("selection: vote_threshold must be in (0,1]");
  }
  if (cfg.criterion == Criterion::ebic && cfg.gamma_ebic < 0.0) {
    throw ValidationError("selection: gamma_ebic must be >= 0");
  }
}

}  // namespace

SelectionResult run_selection(const Dataset& data, const IndexSet& candidates,
                              const SelectionConfig& cfg,
                              const ScreeningConfig& screen_base) {
  validate_dataset(data);
  validate_selection_config(cfg);
  if (cfg.vote) return ebic_vote(data, candidates, cfg, screen_base);
  CandidateSpace cs = restrict_to_candidates(data, candidates, screen_base);
  return select_with_gamma(data, cs, cfg, screen_base, cfg.gamma_ebic);
}

SelectionResult ebic_vote(const Dataset& data, const IndexSet& candidates,
                          const SelectionConfig& cfg,
                          const ScreeningConfig& screen_base) {
  validate_dataset(data);
  validate_selection_config(cfg);
  if (cfg.criterion != Criterion::ebic) {
    throw ValidationError("ebic_vote: criterion must be ebic");
  }
  if (cfg.gamma_seq.empty()) {
    throw ValidationError("ebic_vote: gamma_seq must be nonempty");
  }
  CandidateSpace cs = restrict_to_candidates(data, candidates, screen_base);

  // Keep the score table of the gamma closest to gamma_ebic for reporting.
  size_t report_idx = 0;
  for (size_t i = 1; i < cfg.gamma_seq.size(); ++i) {
    if (std::abs(cfg.gamma_seq[i] - cfg.gamma_ebic) <
        std::abs(cfg.gamma_seq[report_idx] - cfg.gamma_ebic)) {
      report_idx = i;
    }
  }

  std::map<int, double> counts;
  SelectionResult reported;
  for (size_t i = 0; i < cfg.gamma_seq.size(); ++i) {
    SelectionResult r =
        select_with_gamma(data, cs, cfg, screen_base, cfg.gamma_seq[i]);
    for (int j : r.selected) counts[j] += 1.0;
    if (i == report_idx) reported = std::move(r);
  }
  for (auto& kv : counts) kv.second /= static_cast<double>(cfg.gamma_seq.size());

  SelectionResult out = std::move(reported);
  out.gamma_used = cfg.gamma_seq;
  out.vote_counts = std::move(counts);
  out.selected.clear();
  for (const auto& kv : *out.vote_counts) {
    if (kv.second >= cfg.vote_threshold) out.selected.push_back(kv.first);
  }
  out.chosen_k = static_cast<int>(out.selected.size());
  return out;
}

SelectionResult vote_update(const SelectionResult& result, double new_threshold) {
  if (!result.vote_counts) {
    throw ValidationError("vote_update: result carries no vote counts");
  }
  if (!(new_threshold > 0.0 && new_threshold <= 1.0)) {
    throw ValidationError("vote_update: threshold must be in (0,1]");
  }
  SelectionResult out = result;
  out.selected.clear();
  for (const auto& kv : *out.vote_counts) {
    if (kv.second >= new_threshold) out.selected.push_back(kv.first);
  }
  out.chosen_k = static_cast<int>(out.selected.size());
  return out;
}

}  // namespace smle
