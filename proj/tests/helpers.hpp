#pragma once

#include "smle/datagen.hpp"
#include "smle/glm.hpp"
#include "smle/rng.hpp"
#include "smle/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

// Test-side utilities. Anything used as an expected value here is computed
// independently of the library code under test (plain loops, Eigen
// decompositions, sort-based rankings), so the assertions do not become
// tautologies.
namespace testutil {

using smle::Dataset;
using smle::Family;
using smle::IndexSet;
using smle::MatrixXd;
using smle::VectorXd;

inline Dataset random_dataset(Family f, int n, int p, std::uint64_t seed,
                              int n_causal = 3, double scale = 1.0) {
  smle::Rng rng(seed);
  Dataset d;
  d.family = f;
  d.X = MatrixXd(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) d.X(i, j) = rng.normal();
  VectorXd theta = VectorXd::Zero(n);
  for (int c = 0; c < n_causal; ++c) {
    double coef = scale * (c % 2 ? -1.0 : 1.0) * (0.5 + 0.25 * c);
    theta += coef * d.X.col(c % p);
  }
  d.y = VectorXd(n);
  for (int i = 0; i < n; ++i) {
    switch (f) {
      case Family::gaussian:
        d.y[i] = theta[i] + rng.normal();
        break;
      case Family::binomial:
        d.y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-theta[i]))) ? 1.0 : 0.0;
        break;
      case Family::poisson:
        d.y[i] = rng.poisson(std::exp(std::min(theta[i], 10.0)));
        break;
    }
  }
  return d;
}

// Central finite difference of the log-likelihood, coordinate by coordinate.
inline VectorXd fd_gradient(const Dataset& d, const VectorXd& beta, double h) {
  VectorXd g(beta.size());
  for (int j = 0; j < beta.size(); ++j) {
    VectorXd bp = beta, bm = beta;
    bp[j] += h;
    bm[j] -= h;
    g[j] = (smle::log_likelihood(d, smle::CoefVector(bp)) -
            smle::log_likelihood(d, smle::CoefVector(bm))) /
           (2 * h);
  }
  return g;
}

// Brute-force top-k magnitudes, 1-based columns, ties toward the lower index.
inline IndexSet top_k_abs(const VectorXd& v, int k) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(v[a]) > std::abs(v[b]);
  });
  IndexSet out;
  for (int i = 0; i < k && i < static_cast<int>(idx.size()); ++i)
    out.push_back(idx[i] + 1);
  std::sort(out.begin(), out.end());
  return out;
}

inline bool sets_equal(const IndexSet& a, const IndexSet& b) { return a == b; }

// Largest eigenvalue of X^T X via Eigen's symmetric solver (reference value
// for the step-size majorization bound).
inline double lambda_max(const MatrixXd& X) {
  MatrixXd G = X.transpose() * X;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
  return es.eigenvalues().maxCoeff();
}

}  // namespace testutil
