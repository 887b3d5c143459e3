#include "smle/glm.hpp"

#include <cmath>

namespace smle {

namespace {
constexpr double kPoissonCap = 30.0;  // linear extension of e^theta above this

double log1pexp(double x) {
  // log(1 + e^x) without overflow.
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}
}  // namespace

double b_value(Family f, double theta) {
  switch (f) {
    case Family::gaussian:
      return 0.5 * theta * theta;
    case Family::binomial:
      return log1pexp(theta);
    case Family::poisson:
      if (theta <= kPoissonCap) return std::exp(theta);
      return std::exp(kPoissonCap) * (1.0 + (theta - kPoissonCap));
  }
  return 0.0;
}

double b_prime(Family f, double theta) {
  switch (f) {
    case Family::gaussian:
      return theta;
    case Family::binomial:
      // 1/(1+e^-theta), stable on both tails.
      if (theta >= 0.0) return 1.0 / (1.0 + std::exp(-theta));
      {
        const double e = std::exp(theta);
        return e / (1.0 + e);
      }
    case Family::poisson:
      return std::exp(std::min(theta, kPoissonCap));
  }
  return 0.0;
}

double b_second(Family f, double theta) {
  switch (f) {
    case Family::gaussian:
      return 1.0;
    case Family::binomial: {
      const double mu = b_prime(Family::binomial, theta);
      return mu * (1.0 - mu);
    }
    case Family::poisson:
      return theta <= kPoissonCap ? std::exp(theta) : 0.0;
  }
  return 0.0;
}

double log_likelihood_linpred(const VectorXd& y, const VectorXd& theta,
                              Family f) {
  if (y.size() != theta.size()) {
    throw DimensionError("log_likelihood: y and linear predictor differ in length");
  }
  double ll = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    ll += y[i] * theta[i] - b_value(f, theta[i]);
  }
  return ll;
}

double log_likelihood(const Dataset& data, const CoefVector& beta) {
  if (beta.size() != data.p()) {
    throw DimensionError("log_likelihood: coefficient length != number of columns");
  }
  return log_likelihood_linpred(data.y, data.X * beta.beta, data.family);
}

VectorXd gradient(const Dataset& data, const CoefVector& beta) {
  if (beta.size() != data.p()) {
    throw DimensionError("gradient: coefficient length != number of columns");
  }
  VectorXd theta = data.X * beta.beta;
  VectorXd resid(theta.size());
  for (int i = 0; i < theta.size(); ++i) {
    resid[i] = data.y[i] - b_prime(data.family, theta[i]);
  }
  return data.X.transpose() * resid;
}

void validate_dataset(const Dataset& data) {
  if (data.n() < 1 || data.p() < 1) {
    throw ValidationError("dataset must have at least one row and one column");
  }
  if (data.y.size() != data.n()) {
    throw DimensionError("y length != number of rows of X");
  }
  if (!data.X.allFinite() || !data.y.allFinite()) {
    throw NumericError("dataset contains non-finite values");
  }
  if (data.family == Family::binomial) {
    for (int i = 0; i < data.y.size(); ++i) {
      if (data.y[i] != 0.0 && data.y[i] != 1.0) {
        throw ValidationError("binomial response must be 0/1");
      }
    }
  } else if (data.family == Family::poisson) {
    for (int i = 0; i < data.y.size(); ++i) {
      if (data.y[i] < 0.0 || data.y[i] != std::floor(data.y[i])) {
        throw ValidationError("poisson response must be nonnegative integers");
      }
    }
  }
  if (data.causal_index) {
    const IndexSet& ci = *data.causal_index;
    for (size_t i = 0; i < ci.size(); ++i) {
      if (ci[i] < 1 || ci[i] > data.p()) {
        throw ValidationError("causal index out of range [1,p]");
      }
      if (i > 0 && ci[i] <= ci[i - 1]) {
        throw ValidationError("causal index must be sorted and distinct");
      }
    }
    if (data.causal_coef &&
        data.causal_coef->size() != static_cast<int>(ci.size())) {
      throw DimensionError("causal_coef length != causal_index length");
    }
  }
}

RefitResult newton_refit(const Dataset& data, const IndexSet& support,
                         const NewtonOptions& opts) {
  validate_dataset(data);
  const int n = data.n();
  const int d = static_cast<int>(support.size());
  for (int j : support) {
    if (j < 1 || j > data.p()) {
      throw ValidationError("newton_refit: support index out of range");
    }
  }
  if (d + (opts.intercept ? 1 : 0) >= n) {
    throw ValidationError("newton_refit: support size must be < n");
  }

  // Restricted design, with an intercept column up front if requested.
  const int q = d + (opts.intercept ? 1 : 0);
  MatrixXd Xs(n, q);
  int col = 0;
  if (opts.intercept) Xs.col(col++) = VectorXd::Ones(n);
  for (int j : support) Xs.col(col++) = data.X.col(j - 1);

  RefitResult out;
  out.coef = CoefVector::zeros(data.p());
  if (q == 0) {
    // Null model: theta = 0.
    out.loglik = log_likelihood_linpred(data.y, VectorXd::Zero(n), data.family);
    return out;
  }

  {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(Xs);
    qr.setThreshold(1e-10);
    if (qr.rank() < q) {
      throw SingularDesignError("newton_refit: restricted design is rank-deficient");
    }
  }

  VectorXd b = VectorXd::Zero(q);
  VectorXd theta = VectorXd::Zero(n);
  double ll = log_likelihood_linpred(data.y, theta, data.family);
  bool converged = false;

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    VectorXd resid(n), w(n);
    for (int i = 0; i < n; ++i) {
      resid[i] = data.y[i] - b_prime(data.family, theta[i]);
      w[i] = std::max(b_second(data.family, theta[i]), 1e-10);
    }
    VectorXd g = Xs.transpose() * resid;
    if (!g.allFinite()) throw NumericError("newton_refit: non-finite gradient");
    if (g.lpNorm<Eigen::Infinity>() < opts.tol) {
      converged = true;
      break;
    }
    MatrixXd H = Xs.transpose() * w.asDiagonal() * Xs;
    Eigen::LDLT<MatrixXd> ldlt(H);
    if (ldlt.info() != Eigen::Success) {
      throw SingularDesignError("newton_refit: Hessian factorization failed");
    }
    VectorXd direction = ldlt.solve(g);
    if (!direction.allFinite()) {
      throw NumericError("newton_refit: non-finite Newton direction");
    }

    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      VectorXd b_new = b + step * direction;
      VectorXd theta_new = Xs * b_new;
      const double ll_new = log_likelihood_linpred(data.y, theta_new, data.family);
      if (std::isfinite(ll_new) && ll_new >= ll) {
        b = b_new;
        theta = theta_new;
        ll = ll_new;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    out.iterations = iter;
    if (!accepted) break;  // no ascent left at float precision; checked below
  }

  if (!converged) {
    // Accept a halving-stalled fit only if it is stationary relative to the
    // problem scale; otherwise (separation, divergence, max_iter) report
    // non-convergence with the last iterate attached.
    VectorXd resid(n);
    for (int i = 0; i < n; ++i) {
      resid[i] = data.y[i] - b_prime(data.family, theta[i]);
    }
    const double gnorm = (Xs.transpose() * resid).lpNorm<Eigen::Infinity>();
    if (gnorm >= std::max(opts.tol, 1e-6 * (1.0 + std::abs(ll)))) {
      VectorXd full = VectorXd::Zero(data.p());
      for (int jdx = 0; jdx < d; ++jdx) {
        full[support[jdx] - 1] = b[jdx + (opts.intercept ? 1 : 0)];
      }
      throw NonConvergenceError(
          "newton_refit: no convergence in " + std::to_string(out.iterations) +
              " iterations (possible separation or divergence)",
          full);
    }
  }

  col = opts.intercept ? 1 : 0;
  for (int jdx = 0; jdx < d; ++jdx) {
    out.coef.beta[support[jdx] - 1] = b[col + jdx];
  }
  out.intercept = opts.intercept ? b[0] : 0.0;
  out.loglik = ll;
  return out;
}

VectorXd predict(const MatrixXd& X_new, const CoefVector& fit, Family f,
                 PredictScale scale) {
  if (X_new.cols() != fit.size()) {
    throw DimensionError("predict: column count != coefficient length");
  }
  VectorXd theta = X_new * fit.beta;
  if (scale == PredictScale::link) return theta;
  for (int i = 0; i < theta.size(); ++i) theta[i] = b_prime(f, theta[i]);
  return theta;
}

}  // namespace smle
