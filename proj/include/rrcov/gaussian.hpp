#pragma once

#include <optional>
#include <vector>

#include "rrcov/asymptotics.hpp"
#include "rrcov/matrix.hpp"

namespace rrcov {

// Bisection stops once the bracket is this narrow.
inline constexpr double kPdThresholdWidth = 1e-9;

struct PdThreshold {
  bool always_pd = false;
  double t0 = 0.0;  // 0 when always_pd
};

/// True when the symmetric matrix admits a Cholesky factorization with
/// strictly positive pivots.
bool is_positive_definite(const Matrix& m);

/// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi).
double min_eigenvalue(const Matrix& m);

/// Smallest t0 with C t + D positive definite for every t > t0. Requires C
/// positive definite (InvalidInput otherwise).
PdThreshold pd_threshold(const Matrix& C, const Matrix& D);

/// Normal approximation N(a t + b, C t + D) to the reward vector at time t.
struct GaussianApprox {
  std::vector<double> a;
  std::vector<double> b;
  Matrix C;
  Matrix D;
  // Empty when C is singular; the refined covariance is then admitted
  // wherever C t + D is positive semidefinite.
  std::optional<PdThreshold> threshold;

  static GaussianApprox from_summary(const AsymptoticSummary& s);
};

struct GaussianParams {
  std::vector<double> mean;
  Matrix covariance;
};

/// use_b adds b to the mean; use_D adds D to the covariance and then needs
/// t > t0 (NotPositiveDefiniteError carrying t0 otherwise). With singular C
/// the check is that C t + D is positive semidefinite.
GaussianParams params_at(const GaussianApprox& g, double t, bool use_b, bool use_D);

double normal_cdf(double x);
double normal_pdf(double x);

/// E min(W, V) for a bivariate normal (W, V).
double expected_min_bivariate(double mean_w, double mean_v, double var_w, double var_v,
                              double cov);

/// Approximate E min(R_1(t), R_2(t)); two reward coordinates only.
double approx_expected_min(const GaussianApprox& g, double t, bool use_b, bool use_D);

}  // namespace rrcov
