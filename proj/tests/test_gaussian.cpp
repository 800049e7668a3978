#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rrcov/errors.hpp"
#include "rrcov/gaussian.hpp"
#include "test_support.hpp"

using namespace rrcov;
using namespace rrcov::testing;

namespace {

GaussianApprox shared_exponential_approx() {
  return GaussianApprox::from_summary(summarize(cycle_moments(shared_exponential())));
}

Matrix diag(std::vector<double> d) {
  Matrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

struct McMin {
  double mean, se;
};

McMin mc_expected_min(double mw, double mv, double vw, double vv, double cov, int n,
                      std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  const double sw = std::sqrt(vw);
  const double l21 = sw > 0 ? cov / sw : 0.0;
  const double l22 = std::sqrt(std::max(0.0, vv - l21 * l21));
  double s = 0, s2 = 0;
  for (int k = 0; k < n; ++k) {
    const double z1 = z(gen), z2 = z(gen);
    const double m = std::min(mw + sw * z1, mv + l21 * z1 + l22 * z2);
    s += m;
    s2 += m * m;
  }
  const double mean = s / n;
  return {mean, std::sqrt((s2 / n - mean * mean) / n)};
}

}  // namespace

TEST_CASE("params_at on the shared-exponential model") {
  const auto g = shared_exponential_approx();
  const auto p = params_at(g, 1.0, true, true);
  CHECK(p.mean[0] == doctest::Approx(0.0));
  CHECK(p.mean[1] == doctest::Approx(-0.125));
  CHECK(p.covariance(0, 0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(p.covariance(0, 1) == doctest::Approx(7.0 / 8.0).epsilon(1e-12));
  CHECK(p.covariance(1, 0) == doctest::Approx(7.0 / 8.0).epsilon(1e-12));
  CHECK(p.covariance(1, 1) == doctest::Approx(41.0 / 64.0).epsilon(1e-12));

  const auto plain = params_at(g, 3.0, false, false);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(plain.mean[i] == g.a[i] * 3.0);
    for (std::size_t j = 0; j < 2; ++j) CHECK(plain.covariance(i, j) == g.C(i, j) * 3.0);
  }
  // Below t0 the plain covariance is still available.
  CHECK_NOTHROW(params_at(g, 0.5, true, false));
}

TEST_CASE("refined covariance below the threshold is rejected with t0") {
  const auto g = shared_exponential_approx();
  const double expected = (std::sqrt(731.0) - 3.0) / 38.0;
  try {
    params_at(g, 0.5, true, true);
    FAIL("expected not-positive-definite error");
  } catch (const NotPositiveDefiniteError& e) {
    CHECK(e.kind() == ErrorKind::NotPositiveDefinite);
    CHECK(std::abs(e.t0() - expected) <= 1e-8);
  }
}

TEST_CASE("pd_threshold examples") {
  const auto g = shared_exponential_approx();
  const auto th = pd_threshold(g.C, g.D);
  CHECK_FALSE(th.always_pd);
  CHECK(std::abs(th.t0 - (std::sqrt(731.0) - 3.0) / 38.0) <= 1e-8);
  // Root of det(C t + D) = (38 t^2 + 6 t - 19) / 64.
  CHECK(std::abs(38 * th.t0 * th.t0 + 6 * th.t0 - 19) <= 1e-7);

  const auto id = pd_threshold(Matrix::identity(2), Matrix::identity(2));
  CHECK(id.always_pd);
  CHECK(id.t0 == 0.0);

  const auto one = pd_threshold(Matrix::identity(2), diag({-1.0, 0.0}));
  CHECK_FALSE(one.always_pd);
  CHECK(std::abs(one.t0 - 1.0) <= 1e-8);

  const auto far = pd_threshold(Matrix::identity(3), diag({-1000.0, 2.0, -0.5}));
  CHECK(std::abs(far.t0 - 1000.0) <= 1e-8);

  try {
    pd_threshold(diag({1.0, 0.0}), Matrix::identity(2));
    FAIL("expected invalid-input error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
  }
}

TEST_CASE("factorization and eigenvalue helpers") {
  CHECK(is_positive_definite(Matrix::identity(3)));
  CHECK_FALSE(is_positive_definite(diag({1.0, 0.0})));
  Matrix m(2);
  m(0, 0) = 2;
  m(0, 1) = m(1, 0) = 1;
  m(1, 1) = 2;
  CHECK(min_eigenvalue(m) == doctest::Approx(1.0).epsilon(1e-14));
  m(0, 1) = m(1, 0) = 3;
  CHECK(min_eigenvalue(m) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK_FALSE(is_positive_definite(m));
}

TEST_CASE("positive definiteness is monotone in t") {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 3;
    Matrix a(n), C(n), D(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = z(gen);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = 0;
        for (std::size_t k = 0; k < n; ++k) s += a(i, k) * a(j, k);
        C(i, j) = C(j, i) = s + (i == j ? 0.1 : 0.0);
        D(i, j) = D(j, i) = 2.0 * z(gen);
      }
    }
    const auto th = pd_threshold(C, D);
    auto pd_at = [&](double t) { return is_positive_definite(scaled_sum(C, t, D)); };
    if (th.always_pd) {
      CHECK(pd_at(0.0));
      continue;
    }
    for (int k = 0; k <= 50; ++k) {
      const double below = (th.t0 - 1e-7) * k / 50.0;
      const double above = th.t0 + 1e-7 + 10.0 * k / 50.0;
      if (below >= 0) CHECK_FALSE(pd_at(below));
      CHECK(pd_at(above));
    }
  }
}

TEST_CASE("expected minimum examples") {
  CHECK(expected_min_bivariate(2.5, 2.5, 1.0, 1.0, 1.0) == 2.5);
  CHECK(expected_min_bivariate(0, 0, 1, 1, 0) ==
        doctest::Approx(-1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(expected_min_bivariate(-10, 10, 1, 1, 0) == doctest::Approx(-10.0).epsilon(1e-12));

  const auto mc = mc_expected_min(0, 0, 1, 1, 0, 10'000'000, 5);
  CHECK(std::abs(mc.mean + 1.0 / std::sqrt(std::numbers::pi)) <= 4 * mc.se);

  try {
    expected_min_bivariate(0, 0, 1, 1, 1.5);
    FAIL("expected invalid-input error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
  }
  CHECK_THROWS_AS(expected_min_bivariate(0, 0, -1, 1, 0), Error);
}

TEST_CASE("variance in place of the standard deviation misses the simulated minimum") {
  // Same display with theta^2 substituted for theta in every slot.
  auto variance_form = [](double mw, double mv, double vw, double vv, double cov) {
    const double v = vw + vv - 2 * cov;
    return normal_cdf((mv - mw) / v) * mw + normal_cdf((mw - mv) / v) * mv -
           v * normal_pdf((mw - mv) / v);
  };
  const double mw = 1.0, mv = 1.5, vw = 2.0, vv = 3.0, cov = 0.5;
  const auto mc = mc_expected_min(mw, mv, vw, vv, cov, 1'000'000, 6);
  CHECK(std::abs(expected_min_bivariate(mw, mv, vw, vv, cov) - mc.mean) <= 4 * mc.se);
  CHECK(std::abs(variance_form(mw, mv, vw, vv, cov) - mc.mean) > 20 * mc.se);
}

TEST_CASE("expected minimum properties on random parameters") {
  std::mt19937_64 gen(1234);
  std::uniform_real_distribution<double> mean(-3, 3), var(0.05, 4), rho(-0.99, 0.99);
  for (int trial = 0; trial < 20; ++trial) {
    const double mw = mean(gen), mv = mean(gen), vw = var(gen), vv = var(gen);
    const double cov = rho(gen) * std::sqrt(vw * vv);
    const double value = expected_min_bivariate(mw, mv, vw, vv, cov);
    CHECK(value < std::min(mw, mv));
    CHECK(std::abs(value - expected_min_bivariate(mv, mw, vv, vw, cov)) <= 1e-14);
    const auto mc = mc_expected_min(mw, mv, vw, vv, cov, 1'000'000, 100 + trial);
    INFO("trial " << trial << ": " << value << " vs " << mc.mean << " se " << mc.se);
    CHECK(std::abs(value - mc.mean) <= 4 * mc.se);
  }
}

TEST_CASE("approx_expected_min") {
  const auto g = shared_exponential_approx();
  const auto p = params_at(g, 10.0, true, true);
  CHECK(approx_expected_min(g, 10.0, true, true) ==
        expected_min_bivariate(p.mean[0], p.mean[1], p.covariance(0, 0), p.covariance(1, 1),
                               p.covariance(0, 1)));
  CHECK_THROWS_AS(approx_expected_min(g, 0.5, true, true), NotPositiveDefiniteError);

  // Plain form: m~(t)/t tends to the smaller growth rate.
  CHECK(approx_expected_min(g, 1e6, false, false) / 1e6 == doctest::Approx(0.75).epsilon(1e-3));

  auto same = shared_exponential();
  same.cycle.rewards[1] = same.cycle.rewards[0];
  const auto gs = GaussianApprox::from_summary(summarize(cycle_moments(same)));
  CHECK_FALSE(gs.threshold.has_value());
  for (double t : {0.5, 1.0, 4.0}) {
    CHECK(approx_expected_min(gs, t, true, true) == doctest::Approx(gs.a[0] * t + gs.b[0]));
  }

  const auto g1 = GaussianApprox::from_summary(summarize(cycle_moments(poisson_unit())));
  try {
    approx_expected_min(g1, 1.0, true, false);
    FAIL("expected unsupported-dimension error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedDimension);
  }
}
