#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rrcov/matrix.hpp"

namespace rrcov {

/// One-pass mean and co-moment accumulator for fixed-dimension vectors.
/// Two accumulators merge exactly as if their samples had been added to one
/// (Chan et al. pairwise update), and a merged part can be removed again for
/// delete-a-group jackknife estimates.
class MomentAccumulator {
 public:
  MomentAccumulator() = default;
  explicit MomentAccumulator(std::size_t dim) : mean_(dim, 0.0), comoment_(dim) {}

  void add(std::span<const double> x);
  void merge(const MomentAccumulator& other);

  // The accumulator of the samples in *this but not in part. part must have
  // been merged into *this.
  MomentAccumulator without(const MomentAccumulator& part) const;

  std::size_t dimension() const noexcept { return mean_.size(); }
  std::uint64_t count() const noexcept { return count_; }
  double mean(std::size_t i) const { return mean_[i]; }
  // Unbiased (n - 1) sample covariance.
  double covariance(std::size_t i, std::size_t j) const;

 private:
  std::uint64_t count_ = 0;
  std::vector<double> mean_;
  Matrix comoment_;
  std::vector<double> scratch_;
};

}  // namespace rrcov
