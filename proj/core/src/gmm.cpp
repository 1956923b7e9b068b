#include "aedkit/gmm.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "aedkit/errors.hpp"
#include "aedkit/rng.hpp"

namespace aed {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
constexpr double kCollapseWeight = 1e-8;

// Per-column squared distance to a center.
double sq_dist(const Matrix& x, Eigen::Index col, const Vector& center) {
  return (x.col(col) - center).squaredNorm();
}

// k-means++ seeding followed by a few Lloyd iterations. Empty clusters are
// re-seeded from a random frame.
Matrix kmeans_centers(const Matrix& x, int k, int iters, Rng& rng) {
  const Eigen::Index d = x.rows(), t = x.cols();
  Matrix centers(d, k);

  centers.col(0) = x.col(rng.index(static_cast<std::size_t>(t)));
  Vector min_d2 = Vector::Constant(t, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < t; ++i) {
      min_d2(i) = std::min(min_d2(i), sq_dist(x, i, centers.col(c - 1)));
      total += min_d2(i);
    }
    Eigen::Index pick;
    if (total <= 0.0) {
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(t)));
    } else {
      double target = rng.uniform01() * total;
      pick = t - 1;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < t; ++i) {
        acc += min_d2(i);
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    }
    centers.col(c) = x.col(pick);
  }

  std::vector<int> assign(static_cast<std::size_t>(t), 0);
  for (int it = 0; it < iters; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < t; ++i) {
      int best = 0;
      double best_d = sq_dist(x, i, centers.col(0));
      for (int c = 1; c < k; ++c) {
        const double dd = sq_dist(x, i, centers.col(c));
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    for (int c = 0; c < k; ++c) {
      Vector sum = Vector::Zero(d);
      int n = 0;
      for (Eigen::Index i = 0; i < t; ++i) {
        if (assign[static_cast<std::size_t>(i)] == c) {
          sum += x.col(i);
          ++n;
        }
      }
      if (n > 0)
        centers.col(c) = sum / n;
      else
        centers.col(c) = x.col(rng.index(static_cast<std::size_t>(t)));
    }
    if (!changed) break;
  }
  return centers;
}

// log N(x | mean, diag var) for one frame
double log_gauss_diag(const Matrix& x, Eigen::Index col, const Vector& mean,
                      const Vector& var) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    const double diff = x(j, col) - mean(j);
    acc += std::log(var(j)) + diff * diff / var(j);
  }
  return -0.5 * (acc + x.rows() * kLog2Pi);
}

// K x T log joint log(w_k) + log N; returns per-frame logsumexp in ll.
Matrix log_joint(const GmmModel& m, const Matrix& x, Vector* ll) {
  const int k = m.components();
  const Eigen::Index t = x.cols();
  Matrix lj(k, t);
  for (int c = 0; c < k; ++c) {
    const Vector mean = m.means.row(c).transpose();
    const Vector var = m.variances.row(c).transpose();
    const double lw = std::log(std::max(m.weights(c), 1e-300));
    for (Eigen::Index i = 0; i < t; ++i)
      lj(c, i) = lw + log_gauss_diag(x, i, mean, var);
  }
  if (ll) {
    ll->resize(t);
    for (Eigen::Index i = 0; i < t; ++i) {
      const double mx = lj.col(i).maxCoeff();
      double s = 0.0;
      for (int c = 0; c < k; ++c) s += std::exp(lj(c, i) - mx);
      (*ll)(i) = mx + std::log(s);
    }
  }
  return lj;
}

}  // namespace

GmmModel fit_gmm(const Matrix& features, const GmmConfig& cfg) {
  const Eigen::Index d = features.rows(), t = features.cols();
  if (cfg.components < 1) throw ConfigError("gmm: components < 1");
  if (t < cfg.components)
    throw InputError("gmm: fewer frames than mixture components");
  if (!features.allFinite()) throw InputError("gmm: features must be finite");

  const int k = cfg.components;
  Rng rng(cfg.seed);

  // Per-dimension data variance: drives the variance floor and re-seeded
  // component variances.
  Vector data_mean = features.rowwise().mean();
  Vector data_var(d);
  for (Eigen::Index j = 0; j < d; ++j)
    data_var(j) = (features.row(j).array() - data_mean(j)).square().sum() / t;
  const double floor_value =
      std::max(cfg.variance_floor_rel * data_var.mean(), 1e-12);
  Vector data_var_floored = data_var.cwiseMax(floor_value);

  GmmModel m;
  m.weights = Vector::Constant(k, 1.0 / k);
  m.means = kmeans_centers(features, k, cfg.kmeans_iters, rng).transpose();
  m.variances = data_var_floored.transpose().replicate(k, 1);

  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_em_iters; ++it) {
    // E-step
    Vector ll_per_frame;
    Matrix lj = log_joint(m, features, &ll_per_frame);
    const double ll = ll_per_frame.sum();
    m.loglik_trace.push_back(ll);
    m.iterations_run = it + 1;

    Matrix resp(k, t);
    for (Eigen::Index i = 0; i < t; ++i)
      for (int c = 0; c < k; ++c)
        resp(c, i) = std::exp(lj(c, i) - ll_per_frame(i));

    // M-step
    for (int c = 0; c < k; ++c) {
      const double nk = resp.row(c).sum();
      if (nk / t < kCollapseWeight) {
        const Eigen::Index pick =
            static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(t)));
        std::cerr << "[aedkit] gmm: component " << c
                  << " collapsed; re-seeding from frame " << pick << "\n";
        m.means.row(c) = features.col(pick).transpose();
        m.variances.row(c) = data_var_floored.transpose();
        m.weights(c) = 1.0 / t;
        continue;
      }
      m.weights(c) = nk / t;
      Vector mean = Vector::Zero(d);
      for (Eigen::Index i = 0; i < t; ++i) mean += resp(c, i) * features.col(i);
      mean /= nk;
      Vector var = Vector::Zero(d);
      for (Eigen::Index i = 0; i < t; ++i)
        var += resp(c, i) * (features.col(i) - mean).array().square().matrix();
      var /= nk;
      m.means.row(c) = mean.transpose();
      m.variances.row(c) = var.cwiseMax(floor_value).transpose();
    }
    m.weights /= m.weights.sum();

    if (it > 0) {
      const double denom = std::max(std::abs(prev_ll), 1e-300);
      if (std::abs(ll - prev_ll) / denom < cfg.tolerance) break;
    }
    prev_ll = ll;
  }
  return m;
}

Matrix responsibilities(const GmmModel& model, const Matrix& features) {
  if (features.rows() != model.dim())
    throw DimensionError("gmm: feature dimension does not match model");
  Vector ll;
  Matrix lj = log_joint(model, features, &ll);
  Matrix resp(model.components(), features.cols());
  for (Eigen::Index i = 0; i < features.cols(); ++i)
    for (int c = 0; c < model.components(); ++c)
      resp(c, i) = std::exp(lj(c, i) - ll(i));
  return resp;
}

std::vector<int> hard_assign(const GmmModel& model, const Matrix& features) {
  if (features.rows() != model.dim())
    throw DimensionError("gmm: feature dimension does not match model");
  Matrix lj = log_joint(model, features, nullptr);
  std::vector<int> labels(static_cast<std::size_t>(features.cols()), 0);
  for (Eigen::Index i = 0; i < features.cols(); ++i) {
    int best = 0;
    for (int c = 1; c < model.components(); ++c)
      if (lj(c, i) > lj(best, i)) best = c;  // strict: ties keep lower index
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

std::vector<Spectrogram> split_spectra(const Spectrogram& spec,
                                       const std::vector<int>& labels, int k) {
  if (static_cast<Eigen::Index>(labels.size()) != spec.values.cols())
    throw DimensionError("split_spectra: label count != frame count");
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int lab : labels) {
    if (lab < 0 || lab >= k)
      throw InputError("split_spectra: label out of range");
    ++counts[static_cast<std::size_t>(lab)];
  }
  std::vector<Spectrogram> parts(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    auto& part = parts[static_cast<std::size_t>(c)];
    part.sample_rate = spec.sample_rate;
    part.frame_len = spec.frame_len;
    part.hop = spec.hop;
    part.values.resize(spec.values.rows(), counts[static_cast<std::size_t>(c)]);
  }
  std::vector<int> next(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < spec.values.cols(); ++i) {
    const auto c = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
    parts[c].values.col(next[c]++) = spec.values.col(i);
  }
  return parts;
}

}  // namespace aed
