#include "smle/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace smle {

double ssr(const std::vector<IndexSet>& retained, const IndexSet& causal) {
  if (retained.empty()) throw ValidationError("ssr: no replicates");
  int covered = 0;
  for (const IndexSet& r : retained) {
    covered += contains_all(r, causal) ? 1 : 0;  // empty causal is covered
  }
  return static_cast<double>(covered) / retained.size();
}

double prr(const std::vector<IndexSet>& retained, const IndexSet& causal) {
  if (retained.empty()) throw ValidationError("prr: no replicates");
  if (causal.empty()) throw ValidationError("prr: causal set is empty");
  double total = 0.0;
  for (const IndexSet& r : retained) {
    total += static_cast<double>(set_intersection(r, causal).size()) /
             causal.size();
  }
  return total / retained.size();
}

int mrd(int causal_position, const IndexSet& retained) {
  if (retained.empty()) throw ValidationError("mrd: retained set is empty");
  int best = std::numeric_limits<int>::max();
  for (int j : retained) best = std::min(best, std::abs(j - causal_position));
  return best;
}

double mean_mrd(const IndexSet& causal, const IndexSet& retained) {
  if (causal.empty()) throw ValidationError("mean_mrd: causal set is empty");
  double total = 0.0;
  for (int c : causal) total += mrd(c, retained);
  return total / causal.size();
}

namespace {

struct RepOutcome {
  bool ok = false;
  IndexSet retained;
  int iterations = 0;
  double seconds = 0.0;
};

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  if (spec.replications < 1) {
    throw ValidationError("experiment: replications must be >= 1");
  }
  if (spec.cells.empty() || spec.methods.empty()) {
    throw ValidationError("experiment: need at least one cell and one method");
  }
  const int threads = std::max(1, spec.threads);

  ExperimentReport report;
  Rng master(spec.master_seed);

  for (size_t ci = 0; ci < spec.cells.size(); ++ci) {
    const CellSpec& cell = spec.cells[ci];
    Rng cell_stream = master.split(ci);
    const int R = spec.replications;
    const int M = static_cast<int>(spec.methods.size());

    // outcomes[rep * M + method]; all methods screen the same replicate data.
    std::vector<RepOutcome> outcomes(static_cast<size_t>(R) * M);
    auto run_rep = [&](int rep) {
      GenConfig gen = cell.gen;
      gen.seed = cell_stream.split(rep).seed();
      GenData gd;
      try {
        gd = gen_data(gen);
      } catch (const Error&) {
        return;  // all methods fail this replicate
      }
      for (int mi = 0; mi < M; ++mi) {
        RepOutcome& out = outcomes[static_cast<size_t>(rep) * M + mi];
        ScreeningConfig cfg;
        cfg.k = cell.k > 0 ? cell.k : default_k(gd.data.n());
        cfg.fast = spec.methods[mi].fast;
        if (gd.categorical) cfg.group_map = gd.categorical->groups;
        try {
          const auto t0 = std::chrono::steady_clock::now();
          ScreeningResult sr = run_screening(gd.data, cfg);
          const auto t1 = std::chrono::steady_clock::now();
          out.ok = true;
          out.iterations = sr.iterations;
          out.seconds = std::chrono::duration<double>(t1 - t0).count();
          if (gd.categorical) {
            // Collapse encoded columns to original feature ids.
            IndexSet features;
            for (size_t gi = 0; gi < gd.categorical->groups.size(); ++gi) {
              for (int col : gd.categorical->groups[gi]) {
                if (std::binary_search(sr.retained.begin(), sr.retained.end(),
                                       col)) {
                  features.push_back(gd.categorical->group_feature[gi]);
                  break;
                }
              }
            }
            std::sort(features.begin(), features.end());
            out.retained = std::move(features);
          } else {
            out.retained = std::move(sr.retained);
          }
        } catch (const Error&) {
          out.ok = false;
        }
      }
    };

    if (threads == 1) {
      for (int rep = 0; rep < R; ++rep) run_rep(rep);
    } else {
      std::vector<std::thread> pool;
      const int workers = std::min(threads, R);
      pool.reserve(workers);
      for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t]() {
          for (int rep = t; rep < R; rep += workers) run_rep(rep);
        });
      }
      for (auto& th : pool) th.join();
    }

    const IndexSet causal = cell.gen.pos_truecoef ? *cell.gen.pos_truecoef
                                                  : IndexSet{};
    for (int mi = 0; mi < M; ++mi) {
      CellReport row;
      row.cell = cell.name;
      row.method = spec.methods[mi].name;
      row.replications = R;
      std::vector<IndexSet> retained;
      double time_total = 0.0, iter_total = 0.0;
      for (int rep = 0; rep < R; ++rep) {
        const RepOutcome& out = outcomes[static_cast<size_t>(rep) * M + mi];
        if (!out.ok) {
          ++row.failures;
          continue;
        }
        retained.push_back(out.retained);
        time_total += out.seconds;
        iter_total += out.iterations;
      }
      if (!retained.empty()) {
        if (cell.gen.pos_truecoef) {
          row.ssr = ssr(retained, causal);
          row.prr = causal.empty() ? 0.0 : prr(retained, causal);
        } else {
          // Random truth per replicate: recompute per-replicate coverage.
          int covered = 0;
          double prr_sum = 0.0;
          int idx = 0;
          for (int rep = 0; rep < R; ++rep) {
            const RepOutcome& out = outcomes[static_cast<size_t>(rep) * M + mi];
            if (!out.ok) continue;
            GenConfig gen = cell.gen;
            gen.seed = cell_stream.split(rep).seed();
            // Regenerating just the truth stream is cheap and avoids storing it.
            GenData gd = gen_data(GenConfig{1, gen.p, gen.family, Correlation::id,
                                            0.0, gen.num_truecoef, gen.pos_truecoef,
                                            gen.effect_truecoef, std::nullopt,
                                            std::nullopt, gen.sigma_noise,
                                            gen.seed});
            const IndexSet& truth = *gd.data.causal_index;
            covered += contains_all(retained[idx], truth) ? 1 : 0;
            if (!truth.empty()) {
              prr_sum +=
                  static_cast<double>(
                      set_intersection(retained[idx], truth).size()) /
                  truth.size();
            }
            ++idx;
          }
          row.ssr = static_cast<double>(covered) / retained.size();
          row.prr = prr_sum / retained.size();
        }
        row.mean_time_s = time_total / retained.size();
        row.mean_iterations = iter_total / retained.size();
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace smle
