#include "rrcov/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrcov/errors.hpp"

namespace rrcov {

double growth_rate(const CycleMoments& mom, std::size_t i) {
  return mom.lambda1[i] / mom.mu1;
}

double mean_correction_ordinary(const CycleMoments& mom, std::size_t i) {
  const double a = growth_rate(mom, i);
  return a * mom.mu2 / 2.0 / mom.mu1 - mom.m11[i] / mom.mu1;
}

double mean_correction(const CycleMoments& mom, std::size_t i) {
  return mean_correction_ordinary(mom, i) + mom.delay_x[i] -
         growth_rate(mom, i) * mom.delay_t;
}

double ell(const CycleMoments& mom, std::size_t i) {
  const double mu1 = mom.mu1;
  const double l1 = mom.lambda1[i];
  return l1 * mom.mu2 * mom.mu2 / (4.0 * mu1 * mu1 * mu1) -
         l1 * mom.mu3 / (6.0 * mu1 * mu1) + mom.m21[i] / (2.0 * mu1) -
         mom.mu2 * mom.m11[i] / (2.0 * mu1 * mu1);
}

double pair_rate(const CycleMoments& mom, std::size_t i, std::size_t j) {
  return mom.p011(i, j) / mom.mu1;
}

double pair_correction_ordinary(const CycleMoments& mom, std::size_t i, std::size_t j) {
  return pair_rate(mom, i, j) * mom.mu2 / 2.0 / mom.mu1 - mom.p111(i, j) / mom.mu1;
}

double pair_correction_ordinary_diagonal(const CycleMoments& mom, std::size_t i) {
  return mom.mu2 * mom.lambda2[i] / (2.0 * mom.mu1 * mom.mu1) - mom.m12[i] / mom.mu1;
}

CovRateForms cov_rate_forms(const CycleMoments& mom, std::size_t i, std::size_t j) {
  const double ai = growth_rate(mom, i);
  const double aj = growth_rate(mom, j);

  // Cov(X_i - a_i T, X_j - a_j T) from raw moments, keeping the product of
  // means even though it vanishes in exact arithmetic.
  const double cross = mom.p011(i, j) - ai * mom.m11[j] - aj * mom.m11[i] + ai * aj * mom.mu2;
  const double mean_i = mom.lambda1[i] - ai * mom.mu1;
  const double mean_j = mom.lambda1[j] - aj * mom.mu1;
  const double covariance_form = (cross - mean_i * mean_j) / mom.mu1;

  const double identity_form = pair_rate(mom, i, j) +
                               ai * mean_correction_ordinary(mom, j) +
                               aj * mean_correction_ordinary(mom, i);
  return {covariance_form, identity_form};
}

double cov_rate(const CycleMoments& mom, std::size_t i, std::size_t j) {
  const auto forms = cov_rate_forms(mom, i, j);
  const double scale = std::max(1.0, std::abs(forms.covariance_form));
  if (!(std::abs(forms.covariance_form - forms.identity_form) <= kCovRateTolerance * scale)) {
    throw Error(ErrorKind::InternalConsistency,
                "covariance rate routes disagree for (" + std::to_string(i + 1) + ", " +
                    std::to_string(j + 1) + ")");
  }
  return forms.covariance_form;
}

double cov_correction_ordinary(const CycleMoments& mom, std::size_t i, std::size_t j) {
  return mean_correction_ordinary(mom, i) * mean_correction_ordinary(mom, j) +
         pair_correction_ordinary(mom, i, j) + 2.0 * growth_rate(mom, i) * ell(mom, j) +
         2.0 * growth_rate(mom, j) * ell(mom, i);
}

double cov_correction(const CycleMoments& mom, std::size_t i, std::size_t j) {
  const double ai = growth_rate(mom, i);
  const double aj = growth_rate(mom, j);
  const double var_t0 = mom.delay_t2 - mom.delay_t * mom.delay_t;
  const double cov_x0 = mom.delay_xx(i, j) - mom.delay_x[i] * mom.delay_x[j];
  const double cov_t0_xi = mom.delay_tx[i] - mom.delay_t * mom.delay_x[i];
  const double cov_t0_xj = mom.delay_tx[j] - mom.delay_t * mom.delay_x[j];
  return cov_correction_ordinary(mom, i, j) - cov_rate(mom, i, j) * mom.delay_t +
         ai * aj * var_t0 + cov_x0 - ai * cov_t0_xj - aj * cov_t0_xi;
}

double variance_correction(const CycleMoments& mom, std::size_t i) {
  const double a = growth_rate(mom, i);
  const double b = mean_correction_ordinary(mom, i);
  const double d_ordinary = b * b + pair_correction_ordinary_diagonal(mom, i) + 4.0 * a * ell(mom, i);

  const double mu1 = mom.mu1;
  const double c = (mom.lambda2[i] - 2.0 * a * mom.m11[i] + a * a * mom.mu2) / mu1 -
                   (mom.lambda1[i] - a * mu1) * (mom.lambda1[i] - a * mu1) / mu1;
  const double var_t0 = mom.delay_t2 - mom.delay_t * mom.delay_t;
  const double var_x0 = mom.delay_xx(i, i) - mom.delay_x[i] * mom.delay_x[i];
  const double cov_t0_x0 = mom.delay_tx[i] - mom.delay_t * mom.delay_x[i];
  return d_ordinary - c * mom.delay_t + a * a * var_t0 + var_x0 - 2.0 * a * cov_t0_x0;
}

AsymptoticSummary summarize(const CycleMoments& mom) {
  const std::size_t L = mom.dim;
  AsymptoticSummary s;
  s.a.resize(L);
  s.b_ordinary.resize(L);
  s.b.resize(L);
  s.ell.resize(L);
  s.a_pair = Matrix(L);
  s.b_pair_ordinary = Matrix(L);
  s.C = Matrix(L);
  s.D_ordinary = Matrix(L);
  s.D = Matrix(L);

  for (std::size_t i = 0; i < L; ++i) {
    s.a[i] = growth_rate(mom, i);
    s.b_ordinary[i] = mean_correction_ordinary(mom, i);
    s.b[i] = mean_correction(mom, i);
    s.ell[i] = ell(mom, i);
    for (std::size_t j = i; j < L; ++j) {
      s.a_pair(i, j) = s.a_pair(j, i) = pair_rate(mom, i, j);
      s.b_pair_ordinary(i, j) = s.b_pair_ordinary(j, i) = pair_correction_ordinary(mom, i, j);
      s.C(i, j) = s.C(j, i) = cov_rate(mom, i, j);
      s.D_ordinary(i, j) = s.D_ordinary(j, i) = cov_correction_ordinary(mom, i, j);
      s.D(i, j) = s.D(j, i) = cov_correction(mom, i, j);

      const auto forms = cov_rate_forms(mom, i, j);
      s.cov_rate_residual =
          std::max(s.cov_rate_residual, std::abs(forms.covariance_form - forms.identity_form) /
                                            std::max(1.0, std::abs(forms.covariance_form)));
    }
  }
  return s;
}

}  // namespace rrcov
