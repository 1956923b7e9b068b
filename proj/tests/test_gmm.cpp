#include <doctest.h>

#include <cmath>

#include "aedkit/errors.hpp"
#include "aedkit/gmm.hpp"
#include "aedkit/rng.hpp"

using namespace aed;

namespace {

// two Gaussian clouds at +/- center, first `split` columns from cloud 0
Matrix two_clouds(int d, int t, int split, double center, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(d, t);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < d; ++j)
      x(j, i) = (i < split ? -center : center) + rng.normal();
  return x;
}

}  // namespace

TEST_CASE("fit_gmm: single component reduces to sample statistics") {
  Rng rng(5);
  Matrix x(3, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 3; ++j) x(j, i) = rng.uniform(-2.0, 5.0);

  GmmConfig cfg;
  cfg.components = 1;
  const GmmModel m = fit_gmm(x, cfg);

  CHECK(m.weights(0) == doctest::Approx(1.0));
  for (int j = 0; j < 3; ++j) {
    const double mean = x.row(j).mean();
    const double var = (x.row(j).array() - mean).square().sum() / 50.0;
    CHECK(m.means(0, j) == doctest::Approx(mean).epsilon(1e-9));
    CHECK(m.variances(0, j) == doctest::Approx(var).epsilon(1e-6));
  }
}

TEST_CASE("fit_gmm: two separated clouds are recovered almost perfectly") {
  const Matrix x = two_clouds(2, 200, 100, 10.0, 42);
  GmmConfig cfg;
  cfg.components = 2;
  cfg.seed = 3;
  const GmmModel m = fit_gmm(x, cfg);
  const std::vector<int> labels = hard_assign(m, x);

  int agree = 0;
  for (int i = 0; i < 200; ++i)
    if (labels[static_cast<std::size_t>(i)] == labels[0] ? i < 100 : i >= 100)
      ++agree;
  CHECK(agree >= 198);  // >= 99% up to a label swap
}

TEST_CASE("fit_gmm: deterministic per seed") {
  const Matrix x = two_clouds(3, 60, 30, 2.0, 9);
  GmmConfig cfg;
  cfg.components = 2;
  cfg.seed = 17;
  const GmmModel a = fit_gmm(x, cfg);
  const GmmModel b = fit_gmm(x, cfg);
  CHECK(a.means == b.means);
  CHECK(a.variances == b.variances);
  CHECK(a.weights == b.weights);
}

TEST_CASE("fit_gmm: log-likelihood trace never decreases (20 seeded runs)") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix x = two_clouds(3, 80, 50, 1.5, 1000 + s);
    GmmConfig cfg;
    cfg.components = 3;
    cfg.seed = s;
    const GmmModel m = fit_gmm(x, cfg);
    REQUIRE(!m.loglik_trace.empty());
    for (std::size_t k = 1; k < m.loglik_trace.size(); ++k) {
      const double prev = m.loglik_trace[k - 1];
      CHECK(m.loglik_trace[k] >= prev - 1e-7 * std::abs(prev));
    }
    CHECK(m.weights.sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("fit_gmm: fewer frames than components is an input error") {
  GmmConfig cfg;
  cfg.components = 5;
  CHECK_THROWS_AS(fit_gmm(Matrix::Random(3, 4), cfg), InputError);
}

TEST_CASE("responsibilities: columns are distributions") {
  const Matrix x = two_clouds(2, 40, 20, 3.0, 12);
  GmmConfig cfg;
  cfg.components = 2;
  const GmmModel m = fit_gmm(x, cfg);
  const Matrix resp = responsibilities(m, x);
  for (Eigen::Index i = 0; i < resp.cols(); ++i) {
    CHECK(resp.col(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK((resp.col(i).array() >= 0.0).all());
    CHECK((resp.col(i).array() <= 1.0 + 1e-12).all());
  }
}

TEST_CASE("hard_assign: a frame at a component mean picks that component") {
  GmmModel m;
  m.weights = Vector::Constant(2, 0.5);
  m.means.resize(2, 2);
  m.means << 0.0, 0.0, 5.0, 5.0;
  m.variances = Matrix::Constant(2, 2, 1.0);

  Matrix x(2, 2);
  x.col(0) << 0.0, 0.0;
  x.col(1) << 5.0, 5.0;
  const auto labels = hard_assign(m, x);
  CHECK(labels[0] == 0);
  CHECK(labels[1] == 1);
}

TEST_CASE("hard_assign: exact posterior ties go to the lower index") {
  GmmModel m;
  m.weights = Vector::Constant(2, 0.5);
  m.means.resize(2, 1);
  m.means << -1.0, 1.0;  // a frame at 0 is equidistant
  m.variances = Matrix::Constant(2, 1, 1.0);
  Matrix x(1, 1);
  x << 0.0;
  CHECK(hard_assign(m, x)[0] == 0);
}

TEST_CASE("split_spectra: degenerate single-cluster partition") {
  Spectrogram spec;
  spec.sample_rate = 8000.0;
  spec.frame_len = 320;
  spec.hop = 80;
  spec.values = Matrix::Random(5, 4).cwiseAbs();
  const std::vector<int> labels{0, 0, 0, 0};
  const auto parts = split_spectra(spec, labels, 2);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].values == spec.values);
  CHECK(parts[1].frames() == 0);
}

TEST_CASE("split_spectra: alternating labels preserve order") {
  Spectrogram spec;
  spec.sample_rate = 8000.0;
  spec.frame_len = 320;
  spec.hop = 80;
  spec.values.resize(2, 4);
  spec.values << 1, 2, 3, 4, 5, 6, 7, 8;
  const auto parts = split_spectra(spec, {0, 1, 0, 1}, 2);
  CHECK(parts[0].values.row(0)(0) == 1);
  CHECK(parts[0].values.row(0)(1) == 3);
  CHECK(parts[1].values.row(0)(0) == 2);
  CHECK(parts[1].values.row(0)(1) == 4);
}

TEST_CASE("split_spectra: part sizes always sum to the frame count") {
  Rng rng(77);
  Spectrogram spec;
  spec.sample_rate = 8000.0;
  spec.frame_len = 320;
  spec.hop = 80;
  spec.values = Matrix::Random(3, 17).cwiseAbs();
  std::vector<int> labels(17);
  for (auto& l : labels) l = static_cast<int>(rng.index(3));
  const auto parts = split_spectra(spec, labels, 3);
  int total = 0;
  for (const auto& p : parts) total += p.frames();
  CHECK(total == 17);
  CHECK_THROWS_AS(split_spectra(spec, {0, 1}, 2), DimensionError);
}
