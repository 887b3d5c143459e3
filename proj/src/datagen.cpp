#include "smle/datagen.hpp"

#include "smle/glm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace smle {

Correlation correlation_from_string(const std::string& s) {
  if (s == "id" || s == "ID") return Correlation::id;
  if (s == "ma" || s == "MA") return Correlation::ma;
  if (s == "cs" || s == "CS") return Correlation::cs;
  if (s == "ar" || s == "AR") return Correlation::ar;
  throw ValidationError("unknown correlation structure: '" + s + "'");
}

std::string to_string(Correlation c) {
  switch (c) {
    case Correlation::id: return "id";
    case Correlation::ma: return "ma";
    case Correlation::cs: return "cs";
    case Correlation::ar: return "ar";
  }
  return "?";
}

namespace {

void validate_cov_spec(const CovarianceSpec& spec, int p) {
  if (p < 1) throw ValidationError("covariance: p must be >= 1");
  if (!(spec.rho >= 0.0 && spec.rho < 1.0)) {
    throw ValidationError("covariance: rho must be in [0,1)");
  }
  std::set<int> seen;
  for (int j : spec.causal) {
    if (j < 1 || j > p) throw ValidationError("covariance: causal index out of range");
    if (!seen.insert(j).second) {
      throw ValidationError("covariance: causal indices must be distinct");
    }
  }
}

// Banded (bandwidth-2) Cholesky factor of the MA covariance; L stored as p x 3
// (diagonal, first and second subdiagonal). Fails iff the matrix is not PSD.
MatrixXd ma_banded_cholesky(int p, double rho) {
  MatrixXd L = MatrixXd::Zero(p, 3);
  auto sigma = [rho](int i, int j) {
    const int d = std::abs(i - j);
    if (d == 0) return 1.0;
    if (d == 1) return rho;
    if (d == 2) return rho / 2.0;
    return 0.0;
  };
  for (int j = 0; j < p; ++j) {
    double diag = sigma(j, j);
    for (int m = std::max(0, j - 2); m < j; ++m) {
      const double ljm = L(j, j - m);
      diag -= ljm * ljm;
    }
    if (diag <= 1e-12) {
      throw NumericError("ma covariance is not positive semidefinite for this rho/p");
    }
    L(j, 0) = std::sqrt(diag);
    for (int i = j + 1; i <= std::min(p - 1, j + 2); ++i) {
      double v = sigma(i, j);
      for (int m = std::max(0, i - 2); m < j; ++m) {
        v -= L(i, i - m) * L(j, j - m);
      }
      L(i, i - j) = v / L(j, 0);
    }
  }
  return L;
}

// 2x2 covariance of the block-constant component of the CS structure (causal
// block of size m, the rest of size q); used both as the PSD check and as the
// sampling factor.
struct CsBlocks {
  int m = 0, q = 0;
  Eigen::Matrix2d chol = Eigen::Matrix2d::Zero();  // lower Cholesky of M2
};

CsBlocks cs_blocks(int p, double rho, int m) {
  CsBlocks b;
  b.m = m;
  b.q = p - m;
  Eigen::Matrix2d M2 = Eigen::Matrix2d::Zero();
  M2(0, 0) = b.m > 0 ? 1.0 + (b.m - 1) * rho / 2.0 : 1.0;
  M2(1, 1) = b.q > 0 ? 1.0 + (b.q - 1) * rho : 1.0;
  M2(0, 1) = M2(1, 0) = std::sqrt(static_cast<double>(b.m) * b.q) * rho;
  Eigen::LLT<Eigen::Matrix2d> llt(M2);
  if (llt.info() != Eigen::Success) {
    throw NumericError("cs covariance is not positive semidefinite for this rho/p");
  }
  b.chol = llt.matrixL();
  return b;
}

}  // namespace

MatrixXd build_covariance(const CovarianceSpec& spec, int p) {
  validate_cov_spec(spec, p);
  const double rho = spec.rho;
  MatrixXd S = MatrixXd::Identity(p, p);
  switch (spec.structure) {
    case Correlation::id:
      break;
    case Correlation::ma:
      ma_banded_cholesky(p, rho);  // PSD check
      for (int i = 0; i < p; ++i) {
        if (i + 1 < p) S(i, i + 1) = S(i + 1, i) = rho;
        if (i + 2 < p) S(i, i + 2) = S(i + 2, i) = rho / 2.0;
      }
      break;
    case Correlation::cs: {
      cs_blocks(p, rho, static_cast<int>(spec.causal.size()));  // PSD check
      std::vector<char> is_causal(p + 1, 0);
      for (int j : spec.causal) is_causal[j] = 1;
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
          if (i == j) continue;
          S(i, j) = (is_causal[i + 1] && is_causal[j + 1]) ? rho / 2.0 : rho;
        }
      }
      break;
    }
    case Correlation::ar:
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
          S(i, j) = std::pow(rho, std::abs(i - j));
        }
      }
      break;
  }
  return S;
}

MatrixXd sample_features(const CovarianceSpec& spec, int n, int p, Rng& rng) {
  validate_cov_spec(spec, p);
  if (n < 1) throw ValidationError("sample_features: n must be >= 1");
  const double rho = spec.rho;
  MatrixXd X(n, p);

  switch (spec.structure) {
    case Correlation::id:
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
      }
      break;

    case Correlation::ar: {
      // Stationary recursion: x_1 = z_1, x_j = rho x_{j-1} + sqrt(1-rho^2) z_j.
      const double s = std::sqrt(1.0 - rho * rho);
      for (int i = 0; i < n; ++i) {
        double prev = rng.normal();
        X(i, 0) = prev;
        for (int j = 1; j < p; ++j) {
          prev = rho * prev + s * rng.normal();
          X(i, j) = prev;
        }
      }
      break;
    }

    case Correlation::ma: {
      MatrixXd L = ma_banded_cholesky(p, rho);
      VectorXd z(p);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) z[j] = rng.normal();
        for (int j = p - 1; j >= 0; --j) {
          double v = L(j, 0) * z[j];
          if (j >= 1) v += L(j, 1) * z[j - 1];
          if (j >= 2) v += L(j, 2) * z[j - 2];
          X(i, j) = v;
        }
      }
      break;
    }

    case Correlation::cs: {
      // Exact O(np) sampler from the spectral block structure: within-block
      // contrasts scaled by sqrt(1-rho) / sqrt(1-rho/2), plus a 2-dim
      // block-constant component with covariance M2.
      const int m = static_cast<int>(spec.causal.size());
      CsBlocks blocks = cs_blocks(p, rho, m);
      std::vector<char> is_causal(p + 1, 0);
      for (int j : spec.causal) is_causal[j] = 1;
      const double sc = std::sqrt(1.0 - rho / 2.0);
      const double sn = std::sqrt(1.0 - rho);
      const double inv_sqrt_m = m > 0 ? 1.0 / std::sqrt(static_cast<double>(m)) : 0.0;
      const double inv_sqrt_q =
          blocks.q > 0 ? 1.0 / std::sqrt(static_cast<double>(blocks.q)) : 0.0;
      VectorXd z(p);
      for (int i = 0; i < n; ++i) {
        double sum_c = 0.0, sum_n = 0.0;
        for (int j = 0; j < p; ++j) {
          z[j] = rng.normal();
          (is_causal[j + 1] ? sum_c : sum_n) += z[j];
        }
        const double mean_c = m > 0 ? sum_c / m : 0.0;
        const double mean_n = blocks.q > 0 ? sum_n / blocks.q : 0.0;
        const double w1 = rng.normal();
        const double w2 = rng.normal();
        const double a1 = blocks.chol(0, 0) * w1;                          // causal level
        const double a2 = blocks.chol(1, 0) * w1 + blocks.chol(1, 1) * w2; // other level
        for (int j = 0; j < p; ++j) {
          if (is_causal[j + 1]) {
            X(i, j) = sc * (z[j] - mean_c) + a1 * inv_sqrt_m;
          } else {
            X(i, j) = sn * (z[j] - mean_n) + a2 * inv_sqrt_q;
          }
        }
      }
      break;
    }
  }
  return X;
}

CategoricalEncoding make_categorical(const MatrixXd& X, const IndexSet& positions,
                                     const std::vector<int>& levels) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (positions.size() != levels.size()) {
    throw DimensionError("make_categorical: positions and levels differ in length");
  }
  std::set<int> seen;
  for (size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] < 1 || positions[i] > p) {
      throw ValidationError("make_categorical: position out of range [1,p]");
    }
    if (!seen.insert(positions[i]).second) {
      throw ValidationError("make_categorical: positions must be distinct");
    }
    if (levels[i] < 2 || levels[i] > 26) {
      throw ValidationError("make_categorical: levels must be in [2,26]");
    }
  }

  CategoricalEncoding enc;
  enc.positions = positions;
  enc.levels = levels;

  // Bin by standard-normal quantile cutpoints into equally likely classes.
  std::vector<int> level_of(p + 1, 0);  // 0 => numeric passthrough
  std::vector<std::vector<int>> bin(positions.size());
  for (size_t c = 0; c < positions.size(); ++c) {
    const int pos = positions[c];
    const int L = levels[c];
    level_of[pos] = L;
    std::vector<double> cuts(L - 1);
    for (int i = 1; i < L; ++i) {
      cuts[i - 1] = inverse_normal_cdf(static_cast<double>(i) / L);
    }
    bin[c].resize(n);
    std::vector<char> lab(n);
    for (int i = 0; i < n; ++i) {
      int b = 0;
      while (b < L - 1 && X(i, pos - 1) >= cuts[b]) ++b;
      bin[c][i] = b;
      lab[i] = static_cast<char>('A' + b);
    }
    enc.labels.push_back(std::move(lab));
  }

  int p_enc = 0;
  for (int j = 1; j <= p; ++j) {
    p_enc += level_of[j] == 0 ? 1 : level_of[j] - 1;
  }
  enc.design.resize(n, p_enc);
  int col = 0;
  for (int j = 1; j <= p; ++j) {
    const std::string base = "x" + std::to_string(j);
    if (level_of[j] == 0) {
      enc.design.col(col) = X.col(j - 1);
      enc.groups.push_back({col + 1});
      enc.group_feature.push_back(j);
      enc.col_names.push_back(base);
      ++col;
    } else {
      const size_t c = std::find(positions.begin(), positions.end(), j) -
                       positions.begin();
      IndexSet group;
      // Reference level 'A' dropped; dummies for 'B'.. in order.
      for (int lvl = 1; lvl < level_of[j]; ++lvl) {
        for (int i = 0; i < n; ++i) {
          enc.design(i, col) = bin[c][i] == lvl ? 1.0 : 0.0;
        }
        group.push_back(col + 1);
        enc.col_names.push_back(base + "_" + static_cast<char>('A' + lvl));
        ++col;
      }
      enc.groups.push_back(std::move(group));
      enc.group_feature.push_back(j);
    }
  }
  return enc;
}

VectorXd gen_response(const MatrixXd& X, Family family, const IndexSet& causal,
                      const VectorXd& effects, double sigma_noise, Rng& rng) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (static_cast<int>(causal.size()) != effects.size()) {
    throw DimensionError("gen_response: causal and effects differ in length");
  }
  for (int j : causal) {
    if (j < 1 || j > p) {
      throw ValidationError("gen_response: causal position out of range [1,p]");
    }
  }
  if (family == Family::gaussian && !(sigma_noise >= 0.0)) {
    throw ValidationError("gen_response: sigma_noise must be >= 0");
  }

  VectorXd theta = VectorXd::Zero(n);
  for (size_t idx = 0; idx < causal.size(); ++idx) {
    theta += X.col(causal[idx] - 1) * effects[static_cast<int>(idx)];
  }

  VectorXd y(n);
  switch (family) {
    case Family::gaussian:
      for (int i = 0; i < n; ++i) y[i] = theta[i] + sigma_noise * rng.normal();
      break;
    case Family::binomial:
      for (int i = 0; i < n; ++i) {
        y[i] = rng.bernoulli(b_prime(Family::binomial, theta[i])) ? 1.0 : 0.0;
      }
      break;
    case Family::poisson:
      for (int i = 0; i < n; ++i) {
        const double lambda = b_prime(Family::poisson, theta[i]);
        if (!std::isfinite(lambda) || lambda > 1e15) {
          throw NumericError("gen_response: poisson mean overflow");
        }
        y[i] = rng.poisson(lambda);
      }
      break;
  }
  return y;
}

GenData gen_data(const GenConfig& cfg) {
  if (cfg.n < 1 || cfg.p < 1) {
    throw ValidationError("gen_data: n and p must be >= 1");
  }
  if (cfg.num_truecoef < 0 || cfg.num_truecoef > cfg.p) {
    throw ValidationError("gen_data: num_truecoef out of range [0,p]");
  }

  Rng master(cfg.seed);
  Rng rng_truth = master.split(0);
  Rng rng_features = master.split(1);
  Rng rng_response = master.split(2);

  // Causal positions and effects first (CS feature sampling needs positions).
  IndexSet causal;
  if (cfg.pos_truecoef) {
    causal = *cfg.pos_truecoef;
    std::set<int> seen;
    for (int j : causal) {
      if (j < 1 || j > cfg.p) {
        throw ValidationError("gen_data: causal position out of range [1,p]");
      }
      if (!seen.insert(j).second) {
        throw ValidationError("gen_data: causal positions must be distinct");
      }
    }
  } else {
    const int m = cfg.effect_truecoef
                      ? static_cast<int>(cfg.effect_truecoef->size())
                      : cfg.num_truecoef;
    if (m > cfg.p) throw ValidationError("gen_data: more effects than features");
    // Partial Fisher-Yates over 1..p.
    std::vector<int> pool(cfg.p);
    for (int j = 0; j < cfg.p; ++j) pool[j] = j + 1;
    for (int i = 0; i < m; ++i) {
      const auto r = i + rng_truth.uniform_int(cfg.p - i);
      std::swap(pool[i], pool[r]);
      causal.push_back(pool[i]);
    }
  }

  VectorXd effects;
  if (cfg.effect_truecoef) {
    effects = *cfg.effect_truecoef;
    if (effects.size() != static_cast<int>(causal.size())) {
      throw DimensionError("gen_data: effects length != causal positions length");
    }
  } else {
    effects.resize(static_cast<int>(causal.size()));
    for (int i = 0; i < effects.size(); ++i) {
      const double mag = 0.5 + rng_truth.uniform();  // |effect| ~ U[0.5, 1.5]
      effects[i] = rng_truth.bernoulli(0.5) ? mag : -mag;
    }
  }

  // Keep (position, effect) pairs sorted by position.
  {
    std::vector<int> order(causal.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return causal[a] < causal[b]; });
    IndexSet sorted_pos(causal.size());
    VectorXd sorted_eff(effects.size());
    for (size_t i = 0; i < order.size(); ++i) {
      sorted_pos[i] = causal[order[i]];
      sorted_eff[static_cast<int>(i)] = effects[order[i]];
    }
    causal = std::move(sorted_pos);
    effects = std::move(sorted_eff);
  }

  CovarianceSpec cov{cfg.correlation, cfg.rho, causal};
  MatrixXd X = sample_features(cov, cfg.n, cfg.p, rng_features);
  VectorXd y = gen_response(X, cfg.family, causal, effects, cfg.sigma_noise,
                            rng_response);

  GenData out;
  out.config = cfg;
  out.data.y = std::move(y);
  out.data.family = cfg.family;
  out.data.causal_index = causal;
  out.data.causal_coef = effects;

  if (cfg.pos_ctgidx && !cfg.pos_ctgidx->empty()) {
    if (!cfg.level_ctgidx || cfg.level_ctgidx->size() != cfg.pos_ctgidx->size()) {
      throw DimensionError("gen_data: ctg positions and levels differ in length");
    }
    out.categorical = make_categorical(X, *cfg.pos_ctgidx, *cfg.level_ctgidx);
    out.data.X = out.categorical->design;
  } else {
    out.data.X = std::move(X);
  }
  return out;
}

}  // namespace smle
