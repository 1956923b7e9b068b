#include <doctest.h>

#include <cmath>

#include "aedkit/errors.hpp"
#include "aedkit/nmf.hpp"
#include "aedkit/rng.hpp"

using namespace aed;

namespace {

Matrix random_positive(int rows, int cols, std::uint64_t seed, double lo = 0.1,
                       double hi = 2.0) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(lo, hi);
  return m;
}

// Scalar-loop reference for the generalized KL divergence, written against
// the formula rather than the library code.
double kl_reference(const Matrix& v, const Matrix& approx, double eps) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      const double x = v(i, j);
      const double a = approx(i, j) < eps ? eps : approx(i, j);
      total += (x > 0.0 ? x * (std::log(x) - std::log(a)) - x : 0.0) + a;
    }
  }
  return total;
}

void check_trace_monotone(const std::vector<double>& trace) {
  for (std::size_t k = 1; k < trace.size(); ++k)
    CHECK(trace[k] <= trace[k - 1] * (1.0 + 1e-9) + 1e-12);
}

}  // namespace

TEST_CASE("kl_divergence: identical positive matrices cost exactly zero") {
  const Matrix v = random_positive(6, 7, 11);
  CHECK(kl_divergence(v, v) == 0.0);
}

TEST_CASE("kl_divergence: single-entry value matches the formula") {
  Matrix v(1, 1), a(1, 1);
  v << 2.0;
  a << 1.0;
  CHECK(kl_divergence(v, a) == doctest::Approx(2.0 * std::log(2.0) - 1.0));
}

TEST_CASE("kl_divergence: agrees with a scalar-loop reference and is >= 0") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Matrix v = random_positive(5, 5, 100 + s, 0.0, 2.0);
    Matrix a = random_positive(5, 5, 200 + s, 0.05, 2.0);
    v(0, 0) = 0.0;  // exercise the 0*log(0) convention
    const double got = kl_divergence(v, a);
    CHECK(got == doctest::Approx(kl_reference(v, a, 1e-12)).epsilon(1e-12));
    CHECK(got >= 0.0);
  }
}

TEST_CASE("kl_divergence: shape mismatch throws") {
  CHECK_THROWS_AS(kl_divergence(Matrix::Ones(2, 2), Matrix::Ones(2, 3)),
                  DimensionError);
}

TEST_CASE("nmf_factorize: exact rank-1 instance is recovered") {
  Rng rng(42);
  Vector w(12), h(20);
  for (int i = 0; i < 12; ++i) w(i) = rng.uniform(0.2, 2.0);
  for (int i = 0; i < 20; ++i) h(i) = rng.uniform(0.2, 2.0);
  const Matrix v = w * h.transpose();

  NmfConfig cfg;
  cfg.rank = 1;
  cfg.max_iters = 1000;
  cfg.tolerance = 0.0;
  cfg.seed = 7;
  const NmfResult res = nmf_factorize(v, cfg);
  CHECK(res.cost_trace.back() < 1e-6 * v.sum());
}

TEST_CASE("nmf_factorize: deterministic per seed, bitwise") {
  const Matrix v = random_positive(8, 10, 3);
  NmfConfig cfg;
  cfg.rank = 3;
  cfg.seed = 99;
  const NmfResult a = nmf_factorize(v, cfg);
  const NmfResult b = nmf_factorize(v, cfg);
  CHECK(a.basis == b.basis);
  CHECK(a.activations == b.activations);
  CHECK(a.cost_trace == b.cost_trace);
}

TEST_CASE("nmf_factorize: cost trace is non-increasing over 50 seeded runs") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Matrix v = random_positive(4, 4, 300 + s, 0.0, 3.0);
    NmfConfig cfg;
    cfg.rank = 2;
    cfg.seed = s;
    const NmfResult res = nmf_factorize(v, cfg);
    check_trace_monotone(res.cost_trace);
    CHECK((res.basis.array() >= 0.0).all());
    CHECK((res.activations.array() >= 0.0).all());
    CHECK(res.basis.allFinite());
  }
}

TEST_CASE("nmf_factorize: atoms come back L1-normalized") {
  const Matrix v = random_positive(9, 12, 17);
  NmfConfig cfg;
  cfg.rank = 4;
  const NmfResult res = nmf_factorize(v, cfg);
  for (int k = 0; k < 4; ++k)
    CHECK(res.basis.col(k).sum() == doctest::Approx(1.0).epsilon(1e-12));
  // normalization moved the energy, not the product
  CHECK(kl_divergence(v, res.basis * res.activations) ==
        doctest::Approx(res.cost_trace.back()).epsilon(1e-9));
}

TEST_CASE("nmf_factorize: degenerate and misconfigured inputs throw") {
  CHECK_THROWS_AS(nmf_factorize(Matrix::Zero(4, 4), NmfConfig{}), InputError);
  NmfConfig cfg;
  cfg.rank = 4;  // not < min(4, 4)
  CHECK_THROWS_AS(nmf_factorize(Matrix::Ones(4, 4), cfg), ConfigError);
  Matrix neg = Matrix::Ones(3, 3);
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(nmf_factorize(neg, NmfConfig{}), InputError);
}

TEST_CASE("nmf_supervised: recovers activations of a synthetic instance") {
  const Matrix basis = random_positive(16, 4, 5, 0.05, 1.0);
  const Matrix h_true = random_positive(4, 25, 6, 0.1, 1.5);
  const Matrix v = basis * h_true;

  NmfConfig cfg;
  cfg.max_iters = 500;
  cfg.tolerance = 1e-10;
  const SupervisedNmfResult res = nmf_supervised(v, basis, cfg);
  CHECK(res.cost_trace.back() / v.sum() < 1e-4);
  check_trace_monotone(res.cost_trace);
}

TEST_CASE("nmf_supervised: the caller's basis is untouched, bit for bit") {
  const Matrix basis = random_positive(10, 3, 8);
  const Matrix copy = basis;
  const Matrix v = random_positive(10, 14, 9);
  (void)nmf_supervised(v, basis, NmfConfig{});
  CHECK(basis == copy);
}

TEST_CASE("nmf_supervised: zero input column collapses to the epsilon floor") {
  Matrix v = random_positive(6, 8, 10);
  v.col(3).setZero();
  const Matrix basis = random_positive(6, 3, 11);
  NmfConfig cfg;
  const SupervisedNmfResult res = nmf_supervised(v, basis, cfg);
  CHECK(res.activations.col(3).sum() < 3 * cfg.epsilon_floor * 10);
}

TEST_CASE("nmf_supervised: all-zero basis column is rejected") {
  Matrix basis = random_positive(6, 3, 12);
  basis.col(1).setZero();
  CHECK_THROWS_AS(nmf_supervised(random_positive(6, 5, 13), basis, NmfConfig{}),
                  InputError);
}

TEST_CASE("nmf_supervised: uniform input scaling keeps the relative residual") {
  const Matrix basis = random_positive(12, 3, 21, 0.05, 1.0);
  const Matrix v = random_positive(12, 18, 22);
  NmfConfig cfg;
  cfg.max_iters = 2000;
  cfg.tolerance = 1e-12;
  const double c = 7.5;
  const SupervisedNmfResult r1 = nmf_supervised(v, basis, cfg);
  const SupervisedNmfResult rc = nmf_supervised(c * v, basis, cfg);
  const double rel1 = r1.cost_trace.back() / v.sum();
  const double relc = rc.cost_trace.back() / (c * v.sum());
  CHECK(relc == doctest::Approx(rel1).epsilon(1e-3));
}

TEST_CASE("nmf_semi_supervised: one noise atom beats supervised on noisy input") {
  // broadband pattern the fixed basis cannot express
  const Matrix basis = random_positive(14, 3, 30, 0.02, 0.4);
  int improved = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix h = random_positive(3, 22, 400 + s, 0.1, 1.0);
    Matrix v = basis * h;
    Rng rng(500 + s);
    Vector gain(v.cols());
    for (Eigen::Index t = 0; t < v.cols(); ++t) gain(t) = rng.uniform(0.5, 1.5);
    v += Vector::Constant(v.rows(), 0.8) * gain.transpose();

    NmfConfig cfg;
    cfg.seed = s;
    const auto semi = nmf_semi_supervised(v, basis, 1, cfg);
    const auto sup = nmf_supervised(v, basis, cfg);
    if (semi.cost_trace.back() < sup.cost_trace.back()) ++improved;
    check_trace_monotone(semi.cost_trace);
    CHECK(semi.noise_basis.cols() == 1);
    CHECK(semi.event_activations.rows() == 3);
    CHECK(semi.noise_activations.rows() == 1);
  }
  CHECK(improved == 20);
}

TEST_CASE("nmf_semi_supervised: noise_rank 0 degrades to supervised, bitwise") {
  const Matrix basis = random_positive(9, 3, 31);
  const Matrix v = random_positive(9, 11, 32);
  NmfConfig cfg;
  cfg.seed = 77;
  const auto semi = nmf_semi_supervised(v, basis, 0, cfg);
  const auto sup = nmf_supervised(v, basis, cfg);
  CHECK(semi.event_activations == sup.activations);
  CHECK(semi.cost_trace == sup.cost_trace);
  CHECK(semi.noise_basis.cols() == 0);
}

TEST_CASE("nmf_semi_supervised: clean input reconstructs through the fixed part") {
  const Matrix basis = random_positive(10, 3, 33, 0.05, 1.0);
  const Matrix h_true = random_positive(3, 15, 34, 0.1, 1.0);
  const Matrix v = basis * h_true;
  NmfConfig cfg;
  cfg.max_iters = 1000;
  cfg.tolerance = 1e-12;
  const auto semi = nmf_semi_supervised(v, basis, 1, cfg);
  CHECK(semi.cost_trace.back() / v.sum() < 1e-3);
}

TEST_CASE("nmf_semi_supervised: fixed basis stays untouched; bad ranks throw") {
  const Matrix basis = random_positive(7, 2, 35);
  const Matrix copy = basis;
  const Matrix v = random_positive(7, 9, 36);
  (void)nmf_semi_supervised(v, basis, 2, NmfConfig{});
  CHECK(basis == copy);
  CHECK_THROWS_AS(nmf_semi_supervised(v, basis, 9, NmfConfig{}), ConfigError);
  CHECK_THROWS_AS(nmf_semi_supervised(v, basis, -1, NmfConfig{}), ConfigError);
}
