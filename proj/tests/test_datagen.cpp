#include <doctest.h>

#include "helpers.hpp"
#include "smle/datagen.hpp"

#include <cmath>
#include <set>

using namespace smle;

namespace {

MatrixXd empirical_cov(const MatrixXd& X) {
  // Marginals are mean zero by construction; the uncentered moment suffices.
  return X.transpose() * X / static_cast<double>(X.rows());
}

}  // namespace

TEST_CASE("covariance matrices match their closed forms") {
  CHECK(build_covariance({Correlation::id, 0.7, {}}, 3) ==
        MatrixXd::Identity(3, 3));

  MatrixXd ma = build_covariance({Correlation::ma, 0.5, {}}, 4);
  MatrixXd ma_expect(4, 4);
  ma_expect << 1.00, 0.50, 0.25, 0.00,  //
      0.50, 1.00, 0.50, 0.25,           //
      0.25, 0.50, 1.00, 0.50,           //
      0.00, 0.25, 0.50, 1.00;
  CHECK((ma - ma_expect).cwiseAbs().maxCoeff() == 0.0);

  MatrixXd cs = build_covariance({Correlation::cs, 0.5, {1, 4}}, 4);
  MatrixXd cs_expect(4, 4);
  cs_expect << 1.00, 0.50, 0.50, 0.25,  //
      0.50, 1.00, 0.50, 0.50,           //
      0.50, 0.50, 1.00, 0.50,           //
      0.25, 0.50, 0.50, 1.00;
  CHECK((cs - cs_expect).cwiseAbs().maxCoeff() == 0.0);

  MatrixXd ar = build_covariance({Correlation::ar, 0.9, {}}, 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      CHECK(ar(i, j) ==
            doctest::Approx(std::pow(0.9, std::abs(i - j))).epsilon(1e-12));
    }
  }
}

TEST_CASE("invalid covariance requests are rejected") {
  CHECK_THROWS_AS((void)build_covariance({Correlation::ma, 0.9, {}}, 4),
                  NumericError);  // not PSD at this rho
  CHECK_THROWS_AS(
      (void)build_covariance({Correlation::cs, 0.5, {1, 2, 3, 4}}, 1000),
      NumericError);
  CHECK_THROWS_AS((void)build_covariance({Correlation::ar, 1.0, {}}, 4),
                  ValidationError);
  CHECK_THROWS_AS((void)build_covariance({Correlation::ar, -0.1, {}}, 4),
                  ValidationError);
  CHECK_THROWS_AS((void)build_covariance({Correlation::cs, 0.3, {5}}, 4),
                  ValidationError);  // causal index out of range
  CHECK_THROWS_AS((void)build_covariance({Correlation::cs, 0.3, {2, 2}}, 4),
                  ValidationError);
  Rng rng(9);
  CHECK_THROWS_AS((void)sample_features({Correlation::ma, 0.9, {}}, 10, 4, rng),
                  NumericError);
}

TEST_CASE("sampled features realize the requested covariance") {
  const int n = 50000;
  const int p = 6;
  std::vector<CovarianceSpec> specs{
      {Correlation::id, 0.0, {}},
      {Correlation::ma, 0.4, {}},
      {Correlation::cs, 0.3, {1, 4}},
      {Correlation::ar, 0.9, {}},
  };
  for (size_t s = 0; s < specs.size(); ++s) {
    Rng rng(1000 + s);
    MatrixXd X = sample_features(specs[s], n, p, rng);
    MatrixXd target = build_covariance(specs[s], p);
    MatrixXd emp = empirical_cov(X);
    CHECK((emp - target).cwiseAbs().maxCoeff() < 0.03);
  }
}

TEST_CASE("correlation names round-trip") {
  for (Correlation c :
       {Correlation::id, Correlation::ma, Correlation::cs, Correlation::ar}) {
    CHECK(correlation_from_string(to_string(c)) == c);
  }
  CHECK(correlation_from_string("AR") == Correlation::ar);
  CHECK_THROWS_AS((void)correlation_from_string("toeplitz"), ValidationError);
}

TEST_CASE("gen_response families and exact linear predictor") {
  Rng rng(42);
  MatrixXd X = sample_features({Correlation::id, 0.0, {}}, 200, 5, rng);
  IndexSet causal{1, 3};
  VectorXd effects(2);
  effects << 1.5, -2.0;

  Rng r1(7);
  VectorXd y_gauss = gen_response(X, Family::gaussian, causal, effects, 0.0, r1);
  VectorXd theta = 1.5 * X.col(0) - 2.0 * X.col(2);
  CHECK((y_gauss - theta).cwiseAbs().maxCoeff() <= 1e-15);

  Rng r2(7);
  VectorXd y_bin = gen_response(X, Family::binomial, causal, effects, 1.0, r2);
  for (int i = 0; i < y_bin.size(); ++i) {
    CHECK((y_bin[i] == 0.0 || y_bin[i] == 1.0));
  }

  Rng r3(7);
  VectorXd y_pois = gen_response(X, Family::poisson, causal, effects, 1.0, r3);
  for (int i = 0; i < y_pois.size(); ++i) {
    CHECK(y_pois[i] >= 0.0);
    CHECK(y_pois[i] == std::floor(y_pois[i]));
  }

  CHECK_THROWS_AS(
      (void)gen_response(X, Family::gaussian, {1}, effects, 1.0, r1),
      DimensionError);
  CHECK_THROWS_AS(
      (void)gen_response(X, Family::gaussian, {0, 3}, effects, 1.0, r1),
      ValidationError);
  CHECK_THROWS_AS(
      (void)gen_response(X, Family::gaussian, causal, effects, -1.0, r1),
      ValidationError);
}

TEST_CASE("gen_data is deterministic and streams are independent") {
  GenConfig cfg;
  cfg.n = 60;
  cfg.p = 20;
  cfg.family = Family::binomial;
  cfg.correlation = Correlation::ar;
  cfg.rho = 0.5;
  cfg.pos_truecoef = IndexSet{2, 9, 17};
  cfg.effect_truecoef = (VectorXd(3) << 1.0, -1.5, 2.0).finished();
  cfg.seed = 99;

  GenData a = gen_data(cfg);
  GenData b = gen_data(cfg);
  CHECK(a.data.X == b.data.X);
  CHECK(a.data.y == b.data.y);
  REQUIRE(a.data.causal_index.has_value());
  CHECK(*a.data.causal_index == IndexSet{2, 9, 17});

  // Changing only the effects leaves the feature stream untouched.
  GenConfig cfg2 = cfg;
  cfg2.effect_truecoef = (VectorXd(3) << 2.0, -3.0, 4.0).finished();
  GenData c = gen_data(cfg2);
  CHECK(c.data.X == a.data.X);
  CHECK(c.data.y != a.data.y);

  GenConfig cfg3 = cfg;
  cfg3.seed = 100;
  GenData d = gen_data(cfg3);
  CHECK(d.data.X != a.data.X);
}

TEST_CASE("gen_data draws truth when not pinned") {
  GenConfig cfg;
  cfg.n = 30;
  cfg.p = 50;
  cfg.num_truecoef = 5;
  cfg.seed = 4;
  GenData g = gen_data(cfg);
  REQUIRE(g.data.causal_index.has_value());
  REQUIRE(g.data.causal_coef.has_value());
  const IndexSet& pos = *g.data.causal_index;
  CHECK(pos.size() == 5);
  CHECK(std::is_sorted(pos.begin(), pos.end()));
  std::set<int> uniq(pos.begin(), pos.end());
  CHECK(uniq.size() == 5);
  for (int j : pos) {
    CHECK(j >= 1);
    CHECK(j <= 50);
  }
  CHECK(g.data.causal_coef->size() == 5);
  // Default effect law: magnitudes in [0.5, 1.5] with random signs.
  for (int i = 0; i < 5; ++i) {
    double mag = std::abs((*g.data.causal_coef)[i]);
    CHECK(mag >= 0.5);
    CHECK(mag <= 1.5);
  }
}

TEST_CASE("gen_data validation") {
  GenConfig cfg;
  cfg.n = 10;
  cfg.p = 5;
  cfg.pos_truecoef = IndexSet{1, 1};
  CHECK_THROWS_AS((void)gen_data(cfg), ValidationError);
  cfg.pos_truecoef = IndexSet{1, 9};
  CHECK_THROWS_AS((void)gen_data(cfg), ValidationError);
  cfg.pos_truecoef = IndexSet{1, 2};
  cfg.effect_truecoef = (VectorXd(3) << 1, 2, 3).finished();
  CHECK_THROWS_AS((void)gen_data(cfg), DimensionError);
  cfg = GenConfig{};
  cfg.n = 0;
  cfg.p = 5;
  CHECK_THROWS_AS((void)gen_data(cfg), ValidationError);
  cfg = GenConfig{};
  cfg.n = 10;
  cfg.p = 5;
  cfg.rho = 1.0;
  cfg.correlation = Correlation::ar;
  CHECK_THROWS_AS((void)gen_data(cfg), ValidationError);
  cfg = GenConfig{};
  cfg.n = 10;
  cfg.p = 5;
  cfg.pos_ctgidx = IndexSet{2};
  cfg.level_ctgidx = std::vector<int>{1};  // < 2 levels
  CHECK_THROWS_AS((void)gen_data(cfg), ValidationError);
  cfg.level_ctgidx = std::vector<int>{3, 3};  // length mismatch
  CHECK_THROWS_AS((void)gen_data(cfg), DimensionError);
}

TEST_CASE("make_categorical encodes dummies with the reference level dropped") {
  Rng rng(2718);
  MatrixXd X = sample_features({Correlation::id, 0.0, {}}, 9000, 4, rng);
  CategoricalEncoding enc = make_categorical(X, {2}, {3});

  CHECK(enc.design.rows() == 9000);
  CHECK(enc.design.cols() == 5);  // x1, x2_B, x2_C, x3, x4
  CHECK(enc.groups == GroupMap{{1}, {2, 3}, {4}, {5}});
  CHECK(enc.group_feature == std::vector<int>{1, 2, 3, 4});
  CHECK(enc.col_names ==
        std::vector<std::string>{"x1", "x2_B", "x2_C", "x3", "x4"});
  REQUIRE(enc.labels.size() == 1);
  REQUIRE(enc.labels[0].size() == 9000);

  // Quantile cutpoints at the standard-normal thirds.
  const double lo = inverse_normal_cdf(1.0 / 3.0);
  const double hi = inverse_normal_cdf(2.0 / 3.0);
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 9000; ++i) {
    char expect = X(i, 1) < lo ? 'A' : (X(i, 1) < hi ? 'B' : 'C');
    CHECK(enc.labels[0][i] == expect);
    counts[expect - 'A']++;
    // Dummy columns one-hot encode the non-reference levels.
    CHECK(enc.design(i, 1) == (expect == 'B' ? 1.0 : 0.0));
    CHECK(enc.design(i, 2) == (expect == 'C' ? 1.0 : 0.0));
    // Numeric columns pass through untouched.
    CHECK(enc.design(i, 0) == X(i, 0));
    CHECK(enc.design(i, 3) == X(i, 2));
    CHECK(enc.design(i, 4) == X(i, 3));
  }
  // Equal-probability bins: each class holds about a third of the rows.
  for (int c = 0; c < 3; ++c) {
    CHECK(std::abs(counts[c] - 3000) < 200);
  }

  // Two levels cut at zero, negative draws labeled 'A'.
  CategoricalEncoding bin = make_categorical(X, {1}, {2});
  for (int i = 0; i < 200; ++i) {
    CHECK(bin.labels[0][i] == (X(i, 0) < 0.0 ? 'A' : 'B'));
  }

  CHECK_THROWS_AS((void)make_categorical(X, {9}, {3}), ValidationError);
  CHECK_THROWS_AS((void)make_categorical(X, {1, 1}, {3, 3}), ValidationError);
  CHECK_THROWS_AS((void)make_categorical(X, {1}, {27}), ValidationError);
  CHECK_THROWS_AS((void)make_categorical(X, {1, 2}, {3}), DimensionError);
}

TEST_CASE("responses are generated before binning") {
  GenConfig plain;
  plain.n = 80;
  plain.p = 6;
  plain.family = Family::poisson;
  plain.pos_truecoef = IndexSet{1, 4};
  plain.effect_truecoef = (VectorXd(2) << 0.6, -0.4).finished();
  plain.seed = 31;

  GenConfig binned = plain;
  binned.pos_ctgidx = IndexSet{3};
  binned.level_ctgidx = std::vector<int>{4};

  GenData a = gen_data(plain);
  GenData b = gen_data(binned);
  CHECK(a.data.y == b.data.y);  // binning never perturbs the response
  REQUIRE(b.categorical.has_value());
  CHECK(b.data.X == b.categorical->design);
  CHECK(b.data.X.cols() == 6 - 1 + 3);  // feature 3 becomes three dummies
  CHECK(b.categorical->groups.size() == 6);
  CHECK(*b.data.causal_index == IndexSet{1, 4});  // original feature space
  CHECK_FALSE(a.categorical.has_value());
}
