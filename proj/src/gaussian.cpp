#include "rrcov/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rrcov/errors.hpp"

namespace rrcov {

bool is_positive_definite(const Matrix& m) {
  const std::size_t n = m.size();
  Matrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = m(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) return false;
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = m(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return true;
}

double min_eigenvalue(const Matrix& m) {
  const std::size_t n = m.size();
  Matrix a = m;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  double lowest = a(0, 0);
  for (std::size_t i = 1; i < n; ++i) lowest = std::min(lowest, a(i, i));
  return lowest;
}

PdThreshold pd_threshold(const Matrix& C, const Matrix& D) {
  if (C.size() != D.size()) {
    throw Error(ErrorKind::InvalidInput, "C and D must have the same dimension");
  }
  if (!is_positive_definite(C)) {
    throw Error(ErrorKind::InvalidInput, "covariance rate matrix C is not positive definite");
  }
  if (is_positive_definite(D)) return {true, 0.0};

  auto pd_at = [&](double t) { return is_positive_definite(scaled_sum(C, t, D)); };

  double lo = 0.0;
  double hi = 1.0;
  while (!pd_at(hi)) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw Error(ErrorKind::InvalidInput, "no finite PD threshold");
    }
  }
  while (hi - lo > kPdThresholdWidth) {
    const double mid = 0.5 * (lo + hi);
    (pd_at(mid) ? hi : lo) = mid;
  }
  // A bracket collapsing onto zero means D is singular PSD: PD for all t > 0.
  if (hi <= kPdThresholdWidth) return {false, 0.0};
  return {false, hi};
}

GaussianApprox GaussianApprox::from_summary(const AsymptoticSummary& s) {
  GaussianApprox g{s.a, s.b, s.C, s.D, std::nullopt};
  if (is_positive_definite(s.C)) g.threshold = pd_threshold(s.C, s.D);
  return g;
}

GaussianParams params_at(const GaussianApprox& g, double t, bool use_b, bool use_D) {
  const std::size_t n = g.a.size();
  if (use_D && g.threshold) {
    if (!g.threshold->always_pd && !(t > g.threshold->t0)) {
      throw NotPositiveDefiniteError(
          "C t + D is not positive definite at t = " + std::to_string(t) +
              " (threshold t0 = " + std::to_string(g.threshold->t0) + ")",
          g.threshold->t0);
    }
  } else if (use_D) {
    const Matrix cov = scaled_sum(g.C, t, g.D);
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += std::abs(cov(i, i));
    if (min_eigenvalue(cov) < -1e-12 * std::max(1.0, trace)) {
      throw NotPositiveDefiniteError(
          "C is singular and C t + D is not positive semidefinite at t = " + std::to_string(t),
          std::numeric_limits<double>::quiet_NaN());
    }
  }
  GaussianParams p{std::vector<double>(n), Matrix(n)};
  for (std::size_t i = 0; i < n; ++i) {
    p.mean[i] = g.a[i] * t + (use_b ? g.b[i] : 0.0);
  }
  p.covariance = use_D ? scaled_sum(g.C, t, g.D) : scaled_sum(g.C, t, Matrix(n));
  return p;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

double expected_min_bivariate(double mean_w, double mean_v, double var_w, double var_v,
                              double cov) {
  if (!(var_w >= 0.0) || !(var_v >= 0.0)) {
    throw Error(ErrorKind::InvalidInput, "variances must be nonnegative");
  }
  const double bound = std::sqrt(var_w * var_v);
  if (std::abs(cov) > bound * (1.0 + 1e-12) + 1e-300) {
    throw Error(ErrorKind::InvalidInput, "covariance exceeds sqrt(var_w var_v)");
  }
  const double theta = std::sqrt(std::max(0.0, var_w + var_v - 2.0 * cov));
  if (theta == 0.0) return std::min(mean_w, mean_v);
  const double z = (mean_v - mean_w) / theta;
  return normal_cdf(z) * mean_w + normal_cdf(-z) * mean_v - theta * normal_pdf(z);
}

double approx_expected_min(const GaussianApprox& g, double t, bool use_b, bool use_D) {
  if (g.a.size() != 2) {
    throw Error(ErrorKind::UnsupportedDimension,
                "expected minimum needs exactly 2 reward coordinates, model has " +
                    std::to_string(g.a.size()));
  }
  const auto p = params_at(g, t, use_b, use_D);
  return expected_min_bivariate(p.mean[0], p.mean[1], p.covariance(0, 0), p.covariance(1, 1),
                                p.covariance(0, 1));
}

}  // namespace rrcov
