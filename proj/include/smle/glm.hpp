#pragma once

#include "smle/types.hpp"

namespace smle {

// Exponential-family log-partition b(theta) and mean function b'(theta).
// Log-likelihood is l(beta) = sum_i [ y_i theta_i - b(theta_i) ], theta = X beta;
// the data-only c(y) term is dropped and the gaussian dispersion is fixed at 1,
// so gaussian "log-likelihood" differs from the classic one by a constant.
//
// gaussian:  b = theta^2/2,                 b' = theta
// binomial:  b = log(1+e^theta) (stable),   b' = 1/(1+e^-theta) (stable)
// poisson:   b = e^theta up to theta=30, extended linearly above with slope
//            e^30 so that b stays convex, l stays bounded above, and b' is the
//            exact derivative of b everywhere.  b' = e^min(theta,30).
double b_value(Family f, double theta);
double b_prime(Family f, double theta);
// Second derivative (variance function); used as Newton weights.
double b_second(Family f, double theta);

double log_likelihood_linpred(const VectorXd& y, const VectorXd& theta, Family f);
double log_likelihood(const Dataset& data, const CoefVector& beta);

// Score vector X^T (y - b'(X beta)).
VectorXd gradient(const Dataset& data, const CoefVector& beta);

struct NewtonOptions {
  int max_iter = 100;
  double tol = 1e-8;     // on the gradient max-norm
  bool intercept = false;
  int max_halvings = 30; // step halvings when a full step would lower l
};

struct RefitResult {
  CoefVector coef;       // dense, length p, nonzero only on the support
  double intercept = 0.0;
  double loglik = 0.0;
  int iterations = 0;
};

// Maximum-likelihood refit restricted to `support` (Newton-Raphson with step
// halving; for gaussian this is the least-squares solution). Throws
// SingularDesignError if the restricted design is column-rank-deficient and
// NonConvergenceError (carrying the last iterate) if max_iter is exhausted.
// Separated logistic fits typically stop via the gradient tolerance with a
// large finite coefficient rather than erroring; callers that care should
// inspect the fitted magnitudes.
RefitResult newton_refit(const Dataset& data, const IndexSet& support,
                         const NewtonOptions& opts = {});

enum class PredictScale { link, response };

// Linear predictor X_new beta, or its mean transform b'(X_new beta).
VectorXd predict(const MatrixXd& X_new, const CoefVector& fit, Family f,
                 PredictScale scale);

// Input checking shared by the fitting entry points: finite X/y, matching
// lengths, y compatible with the family (binomial 0/1, poisson nonneg ints).
void validate_dataset(const Dataset& data);

}  // namespace smle
