#include "rrcov/accumulator.hpp"

#include <limits>

namespace rrcov {

void MomentAccumulator::add(std::span<const double> x) {
  const std::size_t d = mean_.size();
  ++count_;
  const double n = static_cast<double>(count_);
  scratch_.resize(d);
  double* dp = scratch_.data();
  for (std::size_t i = 0; i < d; ++i) {
    dp[i] = x[i] - mean_[i];
    mean_[i] += dp[i] / n;
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      comoment_(i, j) += dp[i] * (x[j] - mean_[j]);
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) comoment_(i, j) = comoment_(j, i);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const std::size_t d = mean_.size();
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  std::vector<double> delta(d);
  for (std::size_t i = 0; i < d; ++i) delta[i] = other.mean_[i] - mean_[i];
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      comoment_(i, j) += other.comoment_(i, j) + delta[i] * delta[j] * (na * nb / n);
    }
  }
  for (std::size_t i = 0; i < d; ++i) mean_[i] += delta[i] * (nb / n);
  count_ += other.count_;
}

MomentAccumulator MomentAccumulator::without(const MomentAccumulator& part) const {
  const std::size_t d = mean_.size();
  MomentAccumulator rest(d);
  if (part.count_ >= count_) return rest;
  rest.count_ = count_ - part.count_;
  const double n = static_cast<double>(count_);
  const double nb = static_cast<double>(part.count_);
  const double nr = static_cast<double>(rest.count_);
  for (std::size_t i = 0; i < d; ++i) {
    rest.mean_[i] = (n * mean_[i] - nb * part.mean_[i]) / nr;
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double di = part.mean_[i] - rest.mean_[i];
      const double dj = part.mean_[j] - rest.mean_[j];
      rest.comoment_(i, j) = comoment_(i, j) - part.comoment_(i, j) - di * dj * (nb * nr / n);
    }
  }
  return rest;
}

double MomentAccumulator::covariance(std::size_t i, std::size_t j) const {
  if (count_ < 2) return std::numeric_limits<double>::quiet_NaN();
  return comoment_(i, j) / static_cast<double>(count_ - 1);
}

}  // namespace rrcov
