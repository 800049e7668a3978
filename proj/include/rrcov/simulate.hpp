#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rrcov/accumulator.hpp"
#include "rrcov/gaussian.hpp"
#include "rrcov/matrix.hpp"
#include "rrcov/model.hpp"

namespace rrcov {

inline constexpr std::uint64_t kDefaultBlockSize = 4096;
inline constexpr std::uint64_t kDefaultMaxCyclesPerPath = 1'000'000'000;

/// Name of the environment variable holding the default worker count.
inline constexpr const char* kWorkersEnv = "RRCOV_WORKERS";

struct SimConfig {
  std::vector<double> time_grid;  // strictly increasing, positive
  std::uint64_t replications = 1'000'000;
  std::uint64_t master_seed = 1;
  // Replications per random stream. Stream identity depends on this, on the
  // seed and on the block index only.
  std::uint64_t block_size = kDefaultBlockSize;
  std::uint64_t max_cycles_per_path = kDefaultMaxCyclesPerPath;
  // 0 selects the default (RRCOV_WORKERS, else the OpenMP default).
  int workers = 0;
};

/// Throws ValidationError on a malformed configuration.
void validate(const SimConfig& cfg);

/// Worker count simulate() will use for this config.
int resolve_workers(const SimConfig& cfg);

struct GridEstimate {
  double t = 0.0;
  std::uint64_t replications = 0;
  std::vector<double> mean;
  std::vector<double> mean_se;
  Matrix covariance;
  Matrix covariance_se;  // block jackknife
  double min_mean = 0.0;  // E min_i R_i(t)
  double min_se = 0.0;
};

struct SimEstimate {
  std::vector<GridEstimate> points;
  std::uint64_t blocks = 0;
};

/// Generates sample paths of the reward process observed on a time grid.
/// The reward of cycle n is collected at the end of the cycle, S_n, so R(t)
/// sums the rewards of every cycle with S_n <= t.
class PathSampler {
 public:
  PathSampler(const ModelSpec& spec, std::span<const double> grid,
              std::uint64_t max_cycles = kDefaultMaxCyclesPerPath);

  /// Writes R(grid[g])_i to out[g * L + i]. Returns the number of regular
  /// cycles drawn; throws ResourceError if the bound is exceeded.
  std::uint64_t sample(RngStream& rng, std::span<double> out);

 private:
  const ModelSpec& spec_;
  std::span<const double> grid_;
  std::uint64_t max_cycles_;
  const CycleSpec* delay_;
  std::vector<double> scratch_;
  std::vector<double> rewards_;
  std::vector<double> running_;
};

/// Per-grid-point accumulators over the augmented vector
/// (R_1(t), ..., R_L(t), min_i R_i(t)) for one block of replications.
std::vector<MomentAccumulator> simulate_block(const ModelSpec& spec, const SimConfig& cfg,
                                              std::uint64_t block);

/// Combines per-block accumulators (in block order) into estimates.
SimEstimate finalize(const SimConfig& cfg,
                     const std::vector<std::vector<MomentAccumulator>>& blocks);

/// Block-parallel simulation of the reward process on cfg.time_grid.
/// Bit-identical for fixed (seed, block_size, replications) whatever the
/// worker count.
SimEstimate simulate(const ModelSpec& spec, const SimConfig& cfg);

/// Single-threaded reference of simulate(); same streams, same merge order.
SimEstimate simulate_serial(const ModelSpec& spec, const SimConfig& cfg);

/// One row of the approximation-vs-simulation comparison.
struct CompareRow {
  double t = 0.0;
  double m_hat = 0.0;
  double m_hat_se = 0.0;
  double m_tilde_plain = 0.0;                 // covariance C t
  std::optional<double> m_tilde_refined;      // covariance C t + D; empty when not PD
  double error_plain() const { return m_tilde_plain - m_hat; }
  std::optional<double> error_refined() const {
    if (!m_tilde_refined) return std::nullopt;
    return *m_tilde_refined - m_hat;
  }
};

/// Approximate vs simulated E min(R_1(t), R_2(t)); L = 2 only.
std::vector<CompareRow> compare(const ModelSpec& spec, const SimConfig& cfg, bool use_b);

std::vector<CompareRow> compare(const GaussianApprox& approx, const SimEstimate& sim,
                                bool use_b);

}  // namespace rrcov
