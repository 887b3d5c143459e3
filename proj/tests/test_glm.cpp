#include <doctest.h>

#include "helpers.hpp"
#include "smle/glm.hpp"

#include <cmath>

using namespace smle;
using testutil::fd_gradient;
using testutil::random_dataset;

TEST_CASE("log-partition values and derivatives") {
  const double e30 = std::exp(30.0);
  CHECK(b_value(Family::gaussian, 2.0) == doctest::Approx(2.0));
  CHECK(b_prime(Family::gaussian, 2.0) == doctest::Approx(2.0));
  CHECK(b_second(Family::gaussian, -7.0) == doctest::Approx(1.0));

  CHECK(b_value(Family::binomial, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(b_prime(Family::binomial, 0.0) == doctest::Approx(0.5));
  CHECK(b_second(Family::binomial, 0.0) == doctest::Approx(0.25));
  // overflow-stable tails
  CHECK(b_value(Family::binomial, 800.0) == doctest::Approx(800.0));
  CHECK(b_prime(Family::binomial, 800.0) == doctest::Approx(1.0));
  CHECK(b_value(Family::binomial, -800.0) == doctest::Approx(0.0));

  CHECK(b_value(Family::poisson, 1.0) == doctest::Approx(std::exp(1.0)));
  CHECK(b_prime(Family::poisson, 1.0) == doctest::Approx(std::exp(1.0)));
  // Above 30 the extension is linear with the boundary slope, so b stays
  // convex, C1, and bounded-above in the likelihood.
  CHECK(b_value(Family::poisson, 30.0) == doctest::Approx(e30));
  CHECK(b_value(Family::poisson, 31.0) == doctest::Approx(2.0 * e30));
  CHECK(b_prime(Family::poisson, 31.0) == doctest::Approx(e30));
  CHECK(b_prime(Family::poisson, 45.0) == doctest::Approx(e30));
}

TEST_CASE("log-partition derivative matches finite differences") {
  const double h = 1e-6;
  for (Family f : {Family::gaussian, Family::binomial, Family::poisson}) {
    for (double theta : {-3.0, -0.7, 0.0, 1.3, 4.0, 29.0}) {
      double fd = (b_value(f, theta + h) - b_value(f, theta - h)) / (2 * h);
      CHECK(b_prime(f, theta) == doctest::Approx(fd).epsilon(1e-5));
      double fd2 = (b_prime(f, theta + h) - b_prime(f, theta - h)) / (2 * h);
      CHECK(b_second(f, theta) == doctest::Approx(fd2).epsilon(1e-4));
    }
  }
}

TEST_CASE("log-likelihood hand values") {
  Dataset d;
  d.family = Family::gaussian;
  d.X = MatrixXd::Identity(2, 2);
  d.y = VectorXd(2);
  d.y << 1.0, 2.0;
  VectorXd beta(2);
  beta << 0.5, 1.0;
  // l = sum y*theta - theta^2/2 = (0.5 + 2) - (0.125 + 0.5)
  CHECK(log_likelihood(d, CoefVector(beta)) == doctest::Approx(1.875));

  d.family = Family::binomial;
  d.y << 1.0, 0.0;
  VectorXd theta(2);
  theta << 0.0, 0.0;
  CHECK(log_likelihood_linpred(d.y, theta, Family::binomial) ==
        doctest::Approx(-2.0 * std::log(2.0)));
}

TEST_CASE("gradient matches central finite differences") {
  // 20 instances per family, relative error within 1e-5 (max-norm scaled).
  for (Family f : {Family::gaussian, Family::binomial, Family::poisson}) {
    for (int inst = 0; inst < 20; ++inst) {
      Dataset d = random_dataset(f, 25 + inst % 7, 6 + inst % 5,
                                 1000 + 17 * inst + static_cast<int>(f));
      smle::Rng rng(77 + inst);
      VectorXd beta(d.p());
      for (int j = 0; j < d.p(); ++j) beta[j] = 0.4 * rng.normal();
      VectorXd g = gradient(d, CoefVector(beta));
      VectorXd fd = fd_gradient(d, beta, 1e-6);
      double denom = std::max(1.0, fd.cwiseAbs().maxCoeff());
      CHECK((g - fd).cwiseAbs().maxCoeff() / denom <= 1e-5);
    }
  }
}

TEST_CASE("newton refit equals least squares for gaussian") {
  Dataset d = random_dataset(Family::gaussian, 40, 6, 42);
  IndexSet support{2, 5};
  RefitResult fit = newton_refit(d, support);
  // Reference: normal equations on the two support columns, no intercept.
  MatrixXd Xs(40, 2);
  Xs.col(0) = d.X.col(1);
  Xs.col(1) = d.X.col(4);
  VectorXd ref = (Xs.transpose() * Xs).ldlt().solve(Xs.transpose() * d.y);
  CHECK(fit.coef.beta[1] == doctest::Approx(ref[0]).epsilon(1e-8));
  CHECK(fit.coef.beta[4] == doctest::Approx(ref[1]).epsilon(1e-8));
  CHECK(fit.coef.support() == support);
  CHECK(fit.intercept == 0.0);
  CHECK(fit.loglik ==
        doctest::Approx(log_likelihood(d, fit.coef)).epsilon(1e-12));

  NewtonOptions with_icpt;
  with_icpt.intercept = true;
  RefitResult fit2 = newton_refit(d, support, with_icpt);
  MatrixXd Xa(40, 3);
  Xa.col(0) = VectorXd::Ones(40);
  Xa.col(1) = d.X.col(1);
  Xa.col(2) = d.X.col(4);
  VectorXd ref2 = (Xa.transpose() * Xa).ldlt().solve(Xa.transpose() * d.y);
  CHECK(fit2.intercept == doctest::Approx(ref2[0]).epsilon(1e-8));
  CHECK(fit2.coef.beta[1] == doctest::Approx(ref2[1]).epsilon(1e-8));
  CHECK(fit2.coef.beta[4] == doctest::Approx(ref2[2]).epsilon(1e-8));
}

TEST_CASE("newton refit recovers a known binomial coefficient") {
  // Strong single-feature logistic signal; the MLE on the true support should
  // land near the generating coefficient.
  Dataset d = random_dataset(Family::binomial, 4000, 3, 7, 1, 1.0);
  RefitResult fit = newton_refit(d, {1});
  CHECK(fit.coef.beta[0] == doctest::Approx(0.5).epsilon(0.15));
  // The refit is the restricted MLE: the restricted score vanishes there.
  VectorXd g = gradient(d, fit.coef);
  CHECK(std::abs(g[0]) <= 1e-6);
}

TEST_CASE("newton refit error paths") {
  Dataset d = random_dataset(Family::gaussian, 30, 4, 9);
  d.X.col(2) = 2.0 * d.X.col(0);  // columns 1 and 3 collinear
  CHECK_THROWS_AS((void)newton_refit(d, {1, 3}), SingularDesignError);

  Dataset b = random_dataset(Family::binomial, 60, 4, 11);
  NewtonOptions tight;
  tight.max_iter = 1;
  tight.tol = 1e-14;
  try {
    (void)newton_refit(b, {1, 2, 3}, tight);
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    CHECK(e.last_beta.size() == b.p());  // carries the last iterate
  }

  CHECK_THROWS_AS((void)newton_refit(d, {0}), ValidationError);
  CHECK_THROWS_AS((void)newton_refit(d, {5}), ValidationError);
}

TEST_CASE("predict on both scales") {
  Dataset d;
  d.family = Family::poisson;
  d.X = MatrixXd(2, 2);
  d.X << 1.0, 0.0, 0.5, 1.0;
  VectorXd beta(2);
  beta << 1.0, 2.0;
  MatrixXd Xnew(2, 2);
  Xnew << 2.0, 0.0, 0.0, 1.0;
  VectorXd link = predict(Xnew, CoefVector(beta), Family::poisson,
                          PredictScale::link);
  CHECK(link[0] == doctest::Approx(2.0));
  CHECK(link[1] == doctest::Approx(2.0));
  VectorXd resp = predict(Xnew, CoefVector(beta), Family::poisson,
                          PredictScale::response);
  CHECK(resp[0] == doctest::Approx(std::exp(2.0)));

  VectorXd blink = predict(Xnew, CoefVector(beta), Family::binomial,
                           PredictScale::response);
  CHECK(blink[0] == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));

  MatrixXd bad(1, 3);
  bad.setZero();
  CHECK_THROWS_AS(
      (void)predict(bad, CoefVector(beta), Family::gaussian, PredictScale::link),
      DimensionError);
}

TEST_CASE("dataset validation") {
  Dataset d = random_dataset(Family::binomial, 10, 3, 5);
  CHECK_NOTHROW(validate_dataset(d));
  Dataset wrong = d;
  wrong.y[0] = 0.5;  // binomial responses must be 0/1
  CHECK_THROWS_AS(validate_dataset(wrong), ValidationError);

  Dataset pois = random_dataset(Family::poisson, 10, 3, 6);
  CHECK_NOTHROW(validate_dataset(pois));
  pois.y[1] = -1.0;
  CHECK_THROWS_AS(validate_dataset(pois), ValidationError);
  pois.y[1] = 2.5;
  CHECK_THROWS_AS(validate_dataset(pois), ValidationError);

  Dataset mism = d;
  mism.y = VectorXd::Zero(9);
  CHECK_THROWS_AS(validate_dataset(mism), DimensionError);

  Dataset nonfinite = random_dataset(Family::gaussian, 10, 3, 7);
  nonfinite.X(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate_dataset(nonfinite), NumericError);
}
