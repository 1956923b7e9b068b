#include "aedkit/nmf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aedkit/errors.hpp"
#include "aedkit/rng.hpp"

namespace aed {

namespace {

void check_non_negative(const Matrix& m, const char* name) {
  if (m.size() == 0) throw InputError(std::string(name) + " is empty");
  if (!m.allFinite()) throw InputError(std::string(name) + " has NaN/Inf entries");
  if ((m.array() < 0.0).any())
    throw InputError(std::string(name) + " has negative entries");
}

Matrix uniform_positive(Eigen::Index rows, Eigen::Index cols, Rng& rng, double eps) {
  Matrix m(rows, cols);
  // column-major fill order; part of the determinism contract
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      m(i, j) = std::max(rng.uniform_pos(), eps);
  return m;
}

// One multiplicative sweep: H first, then the estimable columns of W (those
// with index >= fixed_cols). Updating H before W keeps a uniform scaling of V
// absorbed entirely by H, which the dictionary-learning invariants rely on.
void multiplicative_sweep(const Matrix& v, Matrix& w, Matrix& h,
                          Eigen::Index fixed_cols, double eps) {
  const Eigen::Index r = w.cols();

  Matrix wh = (w * h).cwiseMax(eps);
  Matrix ratio = v.cwiseQuotient(wh);
  Vector w_col_sums = w.colwise().sum();
  h = h.cwiseProduct(w.transpose() * ratio);
  for (Eigen::Index k = 0; k < r; ++k)
    h.row(k) /= std::max(w_col_sums(k), eps);
  h = h.cwiseMax(eps);

  const Eigen::Index n_free = r - fixed_cols;
  if (n_free > 0) {
    wh.noalias() = w * h;
    wh = wh.cwiseMax(eps);
    ratio = v.cwiseQuotient(wh);
    auto h_free = h.bottomRows(n_free);
    Vector h_row_sums = h_free.rowwise().sum();
    Matrix numer = ratio * h_free.transpose();  // p x n_free
    auto w_free = w.rightCols(n_free);
    w_free = w_free.cwiseProduct(numer);
    for (Eigen::Index k = 0; k < n_free; ++k)
      w_free.col(k) /= std::max(h_row_sums(k), eps);
    w_free = w_free.cwiseMax(eps);
  }
}

// Runs sweeps until max_iters or the relative cost change drops under
// cfg.tolerance. Returns the trace of per-iteration costs.
std::vector<double> iterate(const Matrix& v, Matrix& w, Matrix& h,
                            Eigen::Index fixed_cols, const NmfConfig& cfg) {
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(std::max(cfg.max_iters, 0)));
  double prev = -1.0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    multiplicative_sweep(v, w, h, fixed_cols, cfg.epsilon_floor);
    const double cost = kl_divergence(v, w * h, cfg.epsilon_floor);
    trace.push_back(cost);
    if (it > 0) {
      const double denom = std::max(std::abs(prev), 1e-300);
      if (std::abs(prev - cost) / denom < cfg.tolerance) break;
    }
    prev = cost;
  }
  return trace;
}

void check_config(const NmfConfig& cfg) {
  if (cfg.max_iters < 1) throw ConfigError("nmf: max_iters must be >= 1");
  if (cfg.epsilon_floor <= 0.0) throw ConfigError("nmf: epsilon_floor must be > 0");
  if (cfg.tolerance < 0.0) throw ConfigError("nmf: tolerance must be >= 0");
}

}  // namespace

double kl_divergence(const Matrix& v, const Matrix& approx, double epsilon_floor) {
  if (v.rows() != approx.rows() || v.cols() != approx.cols())
    throw DimensionError("kl_divergence: shape mismatch");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      const double a = std::max(approx(i, j), epsilon_floor);
      const double x = v(i, j);
      if (x > 0.0)
        acc += x * std::log(x / a) - x + a;
      else
        acc += a;
    }
  }
  return acc;
}

NmfResult nmf_factorize(const Matrix& v, const NmfConfig& cfg) {
  check_non_negative(v, "nmf: V");
  check_config(cfg);
  if (v.sum() <= 0.0) throw InputError("nmf: V is all-zero");
  const Eigen::Index p = v.rows(), q = v.cols();
  if (cfg.rank < 1 || cfg.rank >= std::min(p, q))
    throw ConfigError("nmf: rank must satisfy 1 <= r < min(rows, cols)");

  Rng rng(cfg.seed);
  Matrix w = uniform_positive(p, cfg.rank, rng, cfg.epsilon_floor);
  Matrix h = uniform_positive(cfg.rank, q, rng, cfg.epsilon_floor);

  std::vector<double> trace = iterate(v, w, h, /*fixed_cols=*/0, cfg);

  // L1-normalize atoms, pushing the energy into H. Keeps W*H (and the cost
  // trace) unchanged while making atoms from separate runs comparable.
  for (Eigen::Index k = 0; k < w.cols(); ++k) {
    const double s = w.col(k).sum();
    w.col(k) /= s;
    h.row(k) *= s;
  }

  NmfResult res;
  res.basis = std::move(w);
  res.activations = std::move(h);
  res.iterations_run = static_cast<int>(trace.size());
  res.cost_trace = std::move(trace);
  return res;
}

SupervisedNmfResult nmf_supervised(const Matrix& v, const Matrix& basis,
                                   const NmfConfig& cfg) {
  check_non_negative(v, "nmf: V");
  check_non_negative(basis, "nmf: basis");
  check_config(cfg);
  if (basis.rows() != v.rows())
    throw DimensionError("nmf_supervised: basis rows != V rows");
  for (Eigen::Index k = 0; k < basis.cols(); ++k)
    if (basis.col(k).sum() <= 0.0)
      throw InputError("nmf_supervised: basis column " + std::to_string(k) +
                       " is all-zero");

  Rng rng(cfg.seed);
  Matrix w = basis;  // never written back to the caller's matrix
  Matrix h = uniform_positive(basis.cols(), v.cols(), rng, cfg.epsilon_floor);

  std::vector<double> trace = iterate(v, w, h, /*fixed_cols=*/basis.cols(), cfg);

  SupervisedNmfResult res;
  res.activations = std::move(h);
  res.iterations_run = static_cast<int>(trace.size());
  res.cost_trace = std::move(trace);
  return res;
}

SemiSupervisedNmfResult nmf_semi_supervised(const Matrix& v, const Matrix& basis,
                                            int noise_rank, const NmfConfig& cfg) {
  check_non_negative(v, "nmf: V");
  check_non_negative(basis, "nmf: basis");
  check_config(cfg);
  if (noise_rank < 0) throw ConfigError("nmf_semi_supervised: noise_rank < 0");
  if (noise_rank >= v.cols())
    throw ConfigError("nmf_semi_supervised: noise_rank must be < frame count");
  if (basis.rows() != v.rows())
    throw DimensionError("nmf_semi_supervised: basis rows != V rows");
  for (Eigen::Index k = 0; k < basis.cols(); ++k)
    if (basis.col(k).sum() <= 0.0)
      throw InputError("nmf_semi_supervised: basis column " + std::to_string(k) +
                       " is all-zero");

  const Eigen::Index r_fixed = basis.cols();
  Rng rng(cfg.seed);
  // H is drawn before the noise atoms so that noise_rank == 0 consumes the
  // same random stream as nmf_supervised and yields identical activations.
  Matrix h = uniform_positive(r_fixed + noise_rank, v.cols(), rng, cfg.epsilon_floor);
  Matrix w(v.rows(), r_fixed + noise_rank);
  w.leftCols(r_fixed) = basis;
  if (noise_rank > 0)
    w.rightCols(noise_rank) =
        uniform_positive(v.rows(), noise_rank, rng, cfg.epsilon_floor);

  std::vector<double> trace = iterate(v, w, h, /*fixed_cols=*/r_fixed, cfg);

  SemiSupervisedNmfResult res;
  res.noise_basis = w.rightCols(noise_rank);
  res.event_activations = h.topRows(r_fixed);
  res.noise_activations = h.bottomRows(noise_rank);
  res.iterations_run = static_cast<int>(trace.size());
  res.cost_trace = std::move(trace);
  return res;
}

}  // namespace aed
