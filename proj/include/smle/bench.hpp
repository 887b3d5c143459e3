#pragma once

#include "smle/datagen.hpp"
#include "smle/screen.hpp"
#include "smle/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace smle {

// Sure-screening rate: fraction of replicates whose retained set covers the
// whole causal set. An empty causal set counts as covered.
double ssr(const std::vector<IndexSet>& retained, const IndexSet& causal);

// Positive recovery rate: mean |causal n retained| / |causal|. Errors on an
// empty causal set.
double prr(const std::vector<IndexSet>& retained, const IndexSet& causal);

// Minimal absolute position difference between one causal position and any
// retained index. Errors on an empty retained set.
int mrd(int causal_position, const IndexSet& retained);
double mean_mrd(const IndexSet& causal, const IndexSet& retained);

struct MethodSpec {
  std::string name;
  bool fast = false;
};

struct CellSpec {
  std::string name;
  GenConfig gen;   // per-replicate seed is derived, the seed field is ignored
  int k = 0;       // 0 -> default_k(n)
};

struct ExperimentSpec {
  std::vector<CellSpec> cells;
  std::vector<MethodSpec> methods;
  int replications = 100;
  std::uint64_t master_seed = 1;
  int threads = 1;  // replicates run concurrently; results do not depend on it
};

struct CellReport {
  std::string cell;
  std::string method;
  int replications = 0;
  int failures = 0;          // failed replicates are recorded, not fatal
  double ssr = 0.0;
  double prr = 0.0;
  double mean_iterations = 0.0;
  double mean_time_s = 0.0;  // wall-clock of run_screening only
};

struct ExperimentReport {
  std::vector<CellReport> rows;  // cells x methods, in spec order
};

// Monte Carlo benchmark: per replicate, generate a dataset (seed derived as
// master.split(cell_index).split(replicate), shared across methods so they see
// identical data) and screen it with each method. Metrics aggregate over the
// replicates that succeeded.
ExperimentReport run_experiment(const ExperimentSpec& spec);

}  // namespace smle
