#pragma once

#include <cstddef>
#include <vector>

#include "rrcov/matrix.hpp"
#include "rrcov/model.hpp"

namespace rrcov {

// Relative tolerance for the two algebraic routes to the covariance rate.
inline constexpr double kCovRateTolerance = 1e-10;

/// Long-run constants of a renewal-reward process with L reward coordinates:
///   E R_i(t)            = a_i t + b_i + o(1)
///   Cov(R_i(t), R_j(t)) = C_ij t + D_ij + o(1)
/// The "ordinary" variants assume T0 = 0, X0 = 0.
struct AsymptoticSummary {
  std::vector<double> a;
  std::vector<double> b_ordinary;
  std::vector<double> b;
  std::vector<double> ell;
  Matrix a_pair;
  Matrix b_pair_ordinary;
  Matrix C;
  Matrix D_ordinary;
  Matrix D;
  // Largest |covariance form - rate identity form| / max(1, |C_ij|).
  double cov_rate_residual = 0.0;
};

double growth_rate(const CycleMoments& mom, std::size_t i);

// b-ring: mean offset for an ordinary process.
double mean_correction_ordinary(const CycleMoments& mom, std::size_t i);

double mean_correction(const CycleMoments& mom, std::size_t i);

// Integral over [0, inf) of the ordinary mean-curve remainder.
double ell(const CycleMoments& mom, std::size_t i);

// Growth rate of the ordinary product-reward process sum X_i X_j.
double pair_rate(const CycleMoments& mom, std::size_t i, std::size_t j);

double pair_correction_ordinary(const CycleMoments& mom, std::size_t i, std::size_t j);

// Dedicated single-coordinate form of pair_correction_ordinary(i, i).
double pair_correction_ordinary_diagonal(const CycleMoments& mom, std::size_t i);

/// Both routes to the covariance rate.
struct CovRateForms {
  double covariance_form;  // mu1^-1 Cov(X_i - a_i T, X_j - a_j T)
  double identity_form;    // a_ij + a_i b_j + a_j b_i (ordinary b)
};

CovRateForms cov_rate_forms(const CycleMoments& mom, std::size_t i, std::size_t j);

/// Reports the covariance form; throws InternalConsistency when the two
/// routes disagree beyond kCovRateTolerance.
double cov_rate(const CycleMoments& mom, std::size_t i, std::size_t j);

double cov_correction_ordinary(const CycleMoments& mom, std::size_t i, std::size_t j);

double cov_correction(const CycleMoments& mom, std::size_t i, std::size_t j);

/// Variance correction assembled from the single-coordinate formulas only.
double variance_correction(const CycleMoments& mom, std::size_t i);

AsymptoticSummary summarize(const CycleMoments& mom);

}  // namespace rrcov
